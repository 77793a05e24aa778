import math

import numpy as np
import pytest

from nakfade.bound import (
    BinomialMixture,
    ChannelSpec,
    TabulatedPmf,
    build_pmf_A,
    cdf_Y_at,
    conditional_cdf_A,
    convolve_power,
    outage_lower_bound,
    success_rate,
    threshold_terms,
)
from nakfade.fading import NakagamiParam
from nakfade.montecarlo import mc_lower_bound
from nakfade.mutual_info import Snr

M1 = NakagamiParam(1)
M2 = NakagamiParam(2)
MH = NakagamiParam(0.5)


def spec44(m, rate):
    return ChannelSpec(4, 4, m, rate)


class TestChannelSpec:
    @pytest.mark.parametrize("bad_rate", [0.0, -1.0, 4.0001, 5.0])
    def test_rate_domain(self, bad_rate):
        with pytest.raises(ValueError):
            spec44(M1, bad_rate)

    def test_blocks_domain(self):
        with pytest.raises(ValueError):
            ChannelSpec(0, 4, M1, 1.0)

    def test_rate_equal_bits_allowed(self):
        assert spec44(M1, 4.0).rate == 4.0


class TestSuccessRate:
    def test_rayleigh_closed_form(self):
        assert success_rate(Snr(15.0), spec44(M1, 1)) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_high_snr_limit(self):
        assert success_rate(Snr(1e30), spec44(M2, 1)) == pytest.approx(1.0, abs=1e-15)

    def test_m2_closed_form(self):
        # Gamma(2, 3)/Gamma(2) = 4 e^-3
        assert success_rate(Snr(10.0), spec44(M2, 1)) == pytest.approx(4.0 * math.exp(-3.0), rel=1e-12)


class TestConditionalCdfA:
    def test_support_edges(self):
        s = spec44(M1, 1)
        assert conditional_cdf_A(0.0, Snr(15.0), s) == 0.0
        assert conditional_cdf_A(-1.0, Snr(15.0), s) == 0.0
        assert conditional_cdf_A(4.0, Snr(15.0), s) == 1.0
        assert conditional_cdf_A(9.0, Snr(15.0), s) == 1.0

    def test_rayleigh_closed_form(self):
        got = conditional_cdf_A(2.0, Snr(15.0), spec44(M1, 1))
        want = (1 - math.exp(-0.2)) / (1 - math.exp(-1.0))
        assert got == pytest.approx(want, rel=1e-12)

    def test_monotone(self):
        xs = np.linspace(-0.5, 4.5, 300)
        vals = conditional_cdf_A(xs, Snr(7.0), spec44(MH, 1))
        assert np.all(np.diff(vals) >= 0)

    @pytest.mark.parametrize("rho", [3.0, 10**1.5, 1e4])
    def test_rayleigh_specialization_dense_grid(self, rho):
        s = spec44(M1, 2)
        xs = np.linspace(0.0, 4.0, 100)
        got = conditional_cdf_A(xs, Snr(rho), s)
        want = (1 - np.exp(-(2.0**xs - 1) / rho)) / (1 - math.exp(-15.0 / rho))
        want[xs <= 0] = 0.0
        assert np.max(np.abs(got - np.minimum(want, 1.0))) < 1e-12


class TestBuildPmfA:
    def test_masses_sum_to_one(self):
        pmf = build_pmf_A(Snr(10.0), spec44(MH, 1), 4096)
        assert abs(pmf.masses.sum() - 1.0) <= 1e-9

    def test_grid_spans_bits_exactly(self):
        pmf = build_pmf_A(Snr(10.0), spec44(M2, 1), 1000)
        assert abs(pmf.n_cells * pmf.grid_step - 4.0) <= 1e-12
        assert pmf.origin == 0.0

    def test_first_cell_is_cdf_at_step(self):
        snr, s = Snr(10.0), spec44(MH, 1)
        pmf = build_pmf_A(snr, s, 512)
        assert pmf.masses[0] == pytest.approx(conditional_cdf_A(pmf.grid_step, snr, s), abs=1e-15)

    def test_cumulative_reproduces_cdf(self):
        snr, s = Snr(31.6), spec44(M2, 1)
        pmf = build_pmf_A(snr, s, 1024)
        grid = (1 + np.arange(pmf.n_cells)) * pmf.grid_step
        assert np.max(np.abs(np.cumsum(pmf.masses) - conditional_cdf_A(grid, snr, s))) < 1e-12

    def test_rejects_single_cell(self):
        with pytest.raises(ValueError):
            build_pmf_A(Snr(10.0), spec44(M1, 1), 1)


class TestConvolvePower:
    def test_identity(self):
        pmf = build_pmf_A(Snr(5.0), spec44(M1, 1), 64)
        assert convolve_power(pmf, 1) is pmf

    def test_delta_shift(self):
        masses = np.zeros(32)
        masses[5] = 1.0
        pmf = TabulatedPmf(0.125, masses)
        out = convolve_power(pmf, 3)
        assert out.n_cells == 3 * 31 + 1
        assert out.masses[15] == pytest.approx(1.0, abs=1e-12)
        assert out.masses.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_direct_convolution(self, n):
        rng = np.random.default_rng(2024)
        masses = rng.random(512)
        masses /= masses.sum()
        pmf = TabulatedPmf(4.0 / 512, masses)
        direct = masses.copy()
        for _ in range(n - 1):
            direct = np.convolve(direct, masses)
        direct /= direct.sum()
        got = convolve_power(pmf, n).masses
        assert got.shape == direct.shape
        assert np.max(np.abs(got - direct)) < 1e-10

    def test_midpoint_alignment_offset(self):
        pmf = TabulatedPmf(0.5, np.full(8, 0.125))
        out = convolve_power(pmf, 4)
        assert out.origin == pytest.approx(1.5 * 0.5)

    def test_rejects_zero_power(self):
        with pytest.raises(ValueError):
            convolve_power(TabulatedPmf(1.0, np.array([1.0])), 0)


class TestCdfYAt:
    def test_below_support(self):
        pmf = TabulatedPmf(0.5, np.full(8, 0.125))
        assert cdf_Y_at(pmf, 0.0) == 0.0
        assert cdf_Y_at(pmf, -1.0) == 0.0

    def test_at_support_top(self):
        pmf = TabulatedPmf(0.5, np.full(8, 0.125))
        assert cdf_Y_at(pmf, 4.0) == pytest.approx(1.0, abs=1e-9)
        assert cdf_Y_at(pmf, 99.0) == 1.0

    def test_linear_within_cell(self):
        pmf = TabulatedPmf(0.25, np.array([1.0]))
        assert cdf_Y_at(pmf, 0.125) == pytest.approx(0.5, rel=1e-15)


class TestBinomialMixture:
    def test_weights_sum_to_one(self):
        mix = BinomialMixture.from_rates(0.37, 6)
        assert abs(mix.weights.sum() - 1.0) <= 1e-12
        assert np.all(mix.weights >= 0)

    def test_degenerate_rates(self):
        assert BinomialMixture.from_rates(0.0, 4).weights[0] == 1.0
        assert BinomialMixture.from_rates(1.0, 4, one_minus_p=0.0).weights[4] == 1.0


class TestOutageLowerBound:
    def test_vanishing_snr_saturates(self):
        res = outage_lower_bound(Snr(1e-6), spec44(M2, 1))
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_monotone_in_snr(self):
        s = spec44(M2, 1)
        assert outage_lower_bound(Snr.from_db(20), s).value <= outage_lower_bound(Snr.from_db(10), s).value

    def test_value_is_sum_of_products(self):
        res = outage_lower_bound(Snr.from_db(8), spec44(M2, 3))
        assert res.value == pytest.approx(sum(t[3] for t in res.per_term), abs=1e-12)
        assert 0.0 <= res.value <= 1.0

    def test_term_count_and_tail_terms_vanish(self):
        # summing t up to B adds only zeros: A is positive so F_Yt(<=0) = 0
        spec = spec44(M2, 3)
        snr = Snr.from_db(9)
        n_terms = threshold_terms(spec)
        assert n_terms == math.ceil(spec.B * spec.rate / spec.M)
        pmf = build_pmf_A(snr, spec, 512)
        for t in range(n_terms, spec.B):
            arg = spec.B * spec.rate - t * spec.M
            assert arg <= 0
            assert cdf_Y_at(convolve_power(pmf, spec.B - t), arg) == 0.0

    def test_rate_equal_bits_uses_full_formula(self):
        res = outage_lower_bound(Snr.from_db(10), spec44(M1, 4.0))
        assert len(res.per_term) == 4  # ceil(BR/M) - 1 = B - 1 -> t = 0..3
        assert 0.0 < res.value <= 1.0

    @pytest.mark.parametrize("m", [MH, M2])
    def test_grid_convergence_on_acceptance_grid(self, m):
        for rate in (1.0, 2.0, 3.0):
            s = spec44(m, rate)
            for db in (5.0, 10.0, 15.0, 20.0):
                v1 = outage_lower_bound(Snr.from_db(db), s, 4096).value
                v2 = outage_lower_bound(Snr.from_db(db), s, 8192).value
                assert abs(v1 / v2 - 1) < 1e-4, (m.m, rate, db)

    def test_against_mc_oracle_at_spec_point(self):
        # 1e7-sample MC of the capped-rate event at rho = 10^1.6; the bound
        # value there (~1.4e-10) is far below 1/n, so the check uses the
        # binomial deviation predicted by the analytic value itself.
        s = spec44(M2, 1.0)
        snr = Snr(10**1.6)
        analytic = outage_lower_bound(snr, s).value
        est = mc_lower_bound(snr, s, n=10**7, seed=20260809)
        se = max(est.std_err, math.sqrt(analytic * (1 - analytic) / est.n_samples))
        assert abs(est.p_hat - analytic) <= 3.0 * se

"""Discrete-input AWGN mutual information via 2-D Gauss-Hermite quadrature.

The per-block mutual information of a 2^M-point constellation is

    I(rho) = M - 2^-M sum_x E_Z[ log2 sum_x' exp(-|sqrt(rho)(x-x') + Z|^2 + |Z|^2) ]

with Z complex Gaussian, unit variance.  The expectation is a 2-D integral
with weight e^(-|z|^2)/pi over (Re z, Im z), evaluated by a tensor product
of one-dimensional Gauss-Hermite rules.  For square QAM the constellation
is a product of two real grids and the node sums factorize, which the batch
evaluator exploits; the generic path handles any point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constellation import Constellation

__all__ = [
    "Snr",
    "QuadratureRule",
    "hermite_rule",
    "DEFAULT_ORDER",
    "mi_discrete",
    "mi_discrete_array",
    "mi_gaussian",
    "mi_capped",
]

# Smallest order for which doubling it moves the MI of every supported
# constellation by < 1e-6 over rho <= 1e3 (measured; 32 gives only ~4e-6).
DEFAULT_ORDER = 96

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Snr:
    """Average signal-to-noise ratio as a linear power ratio."""

    rho: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise ValueError(f"SNR must be a nonnegative finite ratio, got {self.rho}")

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.rho)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Hermite nodes/weights of a given order (one real dimension)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.order < 1 or self.nodes.shape != (self.order,) or self.weights.shape != (self.order,):
            raise ValueError("nodes/weights must both have length `order`")
        if abs(self.weights.sum() - math.sqrt(math.pi)) > 1e-12:
            raise ValueError("Gauss-Hermite weights must sum to sqrt(pi)")

    @classmethod
    def gauss_hermite(cls, order: int = DEFAULT_ORDER) -> "QuadratureRule":
        """Build the rule by Golub-Welsch: eigen-decompose the Hermite Jacobi matrix.

        Nodes are the eigenvalues; weight i is sqrt(pi) times the squared
        first component of eigenvector i.  Works for any order without
        tabulated coefficients.
        """
        if order < 1:
            raise ValueError(f"quadrature order must be >= 1, got {order}")
        jac = np.zeros((order, order))
        off = np.sqrt(np.arange(1, order) / 2.0)
        idx = np.arange(order - 1)
        jac[idx, idx + 1] = off
        jac[idx + 1, idx] = off
        vals, vecs = np.linalg.eigh(jac)
        weights = math.sqrt(math.pi) * vecs[0] ** 2
        return cls(order, vals, weights)


@lru_cache(maxsize=16)
def hermite_rule(order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Cached Gauss-Hermite rule (the 2-D tensor rule has order^2 nodes)."""
    return QuadratureRule.gauss_hermite(order)


def mi_gaussian(rho: Snr) -> float:
    """Gaussian-input mutual information log2(1 + rho) in bits."""
    return math.log2(1.0 + rho.rho)


def mi_capped(rho: Snr, M: int) -> float:
    """min{M, log2(1 + rho)}: the cap every 2^M-ary input obeys."""
    return min(float(M), math.log2(1.0 + rho.rho))


def _mi_batch_separable(rhos: np.ndarray, levels: np.ndarray, M: int, rule: QuadratureRule) -> np.ndarray:
    """Batch MI for grid QAM: the tensor quadrature factorizes per dimension.

    With points {a + jb}, the inner sum over x' splits into a product of two
    real sums, and the weighted node sums collapse to one (side x order)
    log-sum per dimension.  Identical quadrature, just reassociated.
    """
    side = levels.size
    t = rule.nodes
    w = rule.weights
    sqrt_pi = w.sum()
    sw2 = float(w @ t**2)
    diffs = levels[:, None] - levels[None, :]
    sq = np.sqrt(rhos)
    e = sq[:, None, None, None] * diffs[None, :, :, None] + t[None, None, None, :]
    np.multiply(e, e, out=e)
    np.negative(e, out=e)
    shift = e.max(axis=2)
    e -= shift[:, :, None, :]
    np.exp(e, out=e)
    log_inner = np.log(e.sum(axis=2))
    log_inner += shift
    g = np.einsum("k,spk->s", w, log_inner)
    return M - (2.0 * sqrt_pi / (math.pi * _LN2)) * (sw2 + g / side)


def _mi_batch_generic(rhos: np.ndarray, points: np.ndarray, M: int, rule: QuadratureRule) -> np.ndarray:
    """Batch MI for an arbitrary point set over the full 2-D tensor rule.

    The exponent -|sqrt(rho)(x-x') + z|^2 + |z|^2 simplifies to
    -(rho |d|^2 + 2 sqrt(rho) Re(d conj(z))); the inner log-sum is taken
    with max-subtraction so no order or SNR can overflow it (the x'=x term
    pins the max at >= 0).
    """
    K = points.size
    t = rule.nodes
    w = rule.weights
    zr = np.repeat(t, rule.order)
    zi = np.tile(t, rule.order)
    w2 = np.repeat(w, rule.order) * np.tile(w, rule.order) / math.pi
    sq = np.sqrt(rhos)
    acc = np.zeros(rhos.size)
    for x in range(K):
        d = points[x] - points
        cross = 2.0 * (d.real[:, None] * zr[None, :] + d.imag[:, None] * zi[None, :])
        e = -(rhos[:, None, None] * (np.abs(d) ** 2)[None, :, None] + sq[:, None, None] * cross[None, :, :])
        shift = e.max(axis=1)
        log_inner = shift + np.log(np.exp(e - shift[:, None, :]).sum(axis=1))
        acc += log_inner @ w2
    return M - acc / (K * _LN2)


def mi_discrete_array(rhos, c: Constellation, rule: QuadratureRule | None = None) -> np.ndarray:
    """Mutual information in bits for an array of linear SNR values.

    Evaluated in bounded-memory chunks; results are clamped to [0, M].
    """
    if rule is None:
        rule = hermite_rule()
    rhos = np.asarray(rhos, dtype=float)
    flat = rhos.ravel()
    M = c.bits_per_symbol
    out = np.empty(flat.size)
    if c.grid_levels is not None:
        side = c.grid_levels.size
        chunk = max(1, int(4e6 / (side * side * rule.order)))
        for lo in range(0, flat.size, chunk):
            out[lo : lo + chunk] = _mi_batch_separable(flat[lo : lo + chunk], c.grid_levels, M, rule)
    else:
        chunk = max(1, int(4e6 / (c.size * rule.order**2)))
        for lo in range(0, flat.size, chunk):
            out[lo : lo + chunk] = _mi_batch_generic(flat[lo : lo + chunk], c.points, M, rule)
    return np.clip(out, 0.0, float(M)).reshape(rhos.shape)


def mi_discrete(rho: Snr, c: Constellation, rule: QuadratureRule | None = None) -> float:
    """Mutual information in bits of the 2^M-ary input at linear SNR rho."""
    return float(mi_discrete_array(np.array([rho.rho]), c, rule)[0])

"""Unit-energy discrete signal sets (square QAM and PSK)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Constellation", "make_qam", "make_psk", "from_name", "KNOWN_NAMES"]

KNOWN_NAMES = ("qam4", "qam16", "qam64", "psk2", "psk4", "psk8")


@dataclass(frozen=True, eq=False)
class Constellation:
    """A set of 2^M complex points with unit average energy.

    points follow a fixed Gray-coded ordering (deterministic output, but the
    mutual information only ever sums over the unordered set).  grid_levels
    is set for square QAM, where points = {a + jb : a, b in grid_levels};
    the mutual-information engine exploits that product structure.
    """

    points: np.ndarray
    bits_per_symbol: int
    grid_levels: np.ndarray | None = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", pts)
        M = self.bits_per_symbol
        if M < 1 or pts.shape != (2**M,):
            raise ValueError(f"expected 2^{M} points, got shape {pts.shape}")
        if len(np.unique(pts)) != pts.size:
            raise ValueError("constellation points must be distinct")
        energy = float(np.mean(np.abs(pts) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"average energy must be 1, got {energy!r}")

    @property
    def size(self) -> int:
        return self.points.size


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def make_qam(M: int) -> Constellation:
    """Square 2^(M/2) x 2^(M/2) Gray-coded QAM, scaled to unit average energy.

    M must be even and at most 8 (no cross constellations).
    """
    if M < 2 or M % 2 != 0:
        raise ValueError(f"square QAM needs an even number of bits, got M={M}")
    if M > 8:
        raise ValueError(f"QAM supported up to M=8, got M={M}")
    side = 2 ** (M // 2)
    # Odd-integer levels -(side-1) ... (side-1); mean energy 2(side^2-1)/3.
    raw = 2.0 * np.arange(side) - (side - 1)
    scale = math.sqrt(2.0 * (side**2 - 1) / 3.0)
    levels = raw / scale
    pts = np.empty(side * side, dtype=complex)
    for idx in range(side * side):
        hi, lo = divmod(idx, side)
        pts[idx] = levels[_gray(hi)] + 1j * levels[_gray(lo)]
    return Constellation(pts, M, grid_levels=levels)


def make_psk(M: int) -> Constellation:
    """2^M phase-shift-keyed points e^(2 pi j k / 2^M), all unit modulus."""
    if M < 1:
        raise ValueError(f"PSK needs M >= 1, got M={M}")
    n = 2**M
    pts = np.exp(2j * np.pi * np.arange(n) / n)
    if M == 1:
        pts = pts.real.astype(complex)  # exact {+1, -1}
    return Constellation(pts, M)


def from_name(name: str) -> Constellation:
    """Constellation from a CLI/config name such as "qam16" or "psk8"."""
    key = name.strip().lower()
    for prefix, maker in (("qam", make_qam), ("psk", make_psk)):
        if key.startswith(prefix):
            try:
                size = int(key[len(prefix) :])
            except ValueError:
                break
            M = size.bit_length() - 1
            if 2**M != size:
                raise ValueError(f"constellation size must be a power of two: {name!r}")
            return maker(M)
    raise ValueError(f"unknown constellation {name!r} (known: {', '.join(KNOWN_NAMES)})")

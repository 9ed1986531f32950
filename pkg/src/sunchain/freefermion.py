"""Noninteracting limit: single-particle levels and filled-level energies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

OPEN = "open"
PERIODIC = "periodic"


@dataclass(frozen=True)
class SingleParticleSpectrum:
    energies: tuple[float, ...]
    boundary: str
    offset: float = 0.0  # constant added to every level relative to the raw hopping matrix

    def __len__(self) -> int:
        return len(self.energies)


def hopping_matrix(t: Sequence[float], L: int, boundary: str = OPEN) -> np.ndarray:
    t = [float(v) for v in t]
    expected = L - 1 if boundary == OPEN else L
    if boundary not in (OPEN, PERIODIC):
        raise ValueError(f"unknown boundary {boundary!r}")
    if len(t) != expected:
        raise ValueError(f"{boundary} chain of L={L} needs {expected} couplings, got {len(t)}")
    h = np.zeros((L, L))
    for x, tx in enumerate(t):
        y = (x + 1) % L
        h[x, y] -= tx
        h[y, x] -= tx
    return h


def single_particle_energies(
    t: Sequence[float], L: int, boundary: str = OPEN
) -> SingleParticleSpectrum:
    h = hopping_matrix(t, L, boundary)
    return SingleParticleSpectrum(tuple(np.sort(scipy.linalg.eigvalsh(h))), boundary)


def free_sector_energy(s: SingleParticleSpectrum, sector: Sequence[int]) -> float:
    """Each flavor fills its own lowest ``M_alpha`` levels."""
    if any(m < 0 or m > len(s) for m in sector):
        raise ValueError(f"sector {tuple(sector)} infeasible on {len(s)} levels")
    eps = np.asarray(s.energies)
    return float(sum(eps[:m].sum() for m in sector))


def periodic_dispersion(t: float, L: int) -> SingleParticleSpectrum:
    """``4 t sin^2(pi (k-1) / L)`` for ``k = 1..L``, sorted.

    The raw ring spectrum is ``-2 t cos(2 pi (k-1) / L)``; the formula equals it
    shifted up by ``2 t``, which is stored as ``offset``.
    """
    if L < 2 or t <= 0:
        raise ValueError("periodic dispersion needs L >= 2 and t > 0")
    k = np.arange(1, L + 1)
    eps = 4.0 * t * np.sin(np.pi * (k - 1) / L) ** 2
    return SingleParticleSpectrum(tuple(np.sort(eps)), PERIODIC, offset=2.0 * t)

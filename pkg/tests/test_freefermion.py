import itertools

import numpy as np
import pytest

from sunchain.freefermion import (
    free_sector_energy,
    periodic_dispersion,
    single_particle_energies,
)
from sunchain.hamiltonian import ChainConfig, build_sector_matrix
from sunchain.spectra import level_ordering_report, lowest_eigenpair
from sunchain import young


def test_open_two_sites():
    s = single_particle_energies([1.0], 2)
    np.testing.assert_allclose(s.energies, [-1, 1], atol=1e-15)


def test_open_three_sites():
    h = np.array([[0, -1, 0], [-1, 0, -1], [0, -1, 0]], dtype=float)
    expected = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(expected, [-2**0.5, 0, 2**0.5], atol=1e-14)
    np.testing.assert_allclose(single_particle_energies([1, 1], 3).energies, expected, atol=1e-14)


def test_periodic_four_sites_with_offset():
    s = single_particle_energies([1.0] * 4, 4, "periodic")
    d = periodic_dispersion(1.0, 4)
    np.testing.assert_allclose(np.asarray(s.energies) + d.offset, [0, 2, 2, 4], atol=1e-12)
    np.testing.assert_allclose(d.energies, [0, 2, 2, 4], atol=1e-12)


def test_periodic_dispersion_two_sites():
    np.testing.assert_allclose(periodic_dispersion(1.0, 2).energies, [0, 4], atol=1e-12)


@pytest.mark.parametrize("L", range(3, 13))
def test_periodic_degenerate_pairs(L):
    t = 0.8
    k = np.arange(1, L + 1)
    eps = 4 * t * np.sin(np.pi * (k - 1) / L) ** 2
    for j in range(2, L + 1):
        assert eps[j - 1] == pytest.approx(eps[L - j + 1], abs=1e-12)
    counts = np.unique(np.round(periodic_dispersion(t, L).energies, 10), return_counts=True)[1]
    assert sorted(counts) == [1] * (1 + (L % 2 == 0)) + [2] * ((L - 1) // 2)


@pytest.mark.parametrize("L", range(2, 13))
def test_periodic_formula_equals_shifted_ring(L):
    d = periodic_dispersion(1.3, L)
    ring = single_particle_energies([1.3] * L, L, "periodic")
    np.testing.assert_allclose(np.asarray(ring.energies) + d.offset, d.energies, atol=1e-12)


def test_wrong_coupling_count():
    with pytest.raises(ValueError):
        single_particle_energies([1.0, 1.0], 2)
    with pytest.raises(ValueError):
        single_particle_energies([1.0], 2, "periodic")


def test_free_sector_energy_examples():
    s = single_particle_energies([1.0], 2)
    assert free_sector_energy(s, (1,)) == pytest.approx(-1)
    assert free_sector_energy(s, (1, 1)) == pytest.approx(-2)
    with pytest.raises(ValueError):
        free_sector_energy(s, (3,))


@pytest.mark.parametrize("L, N", [(L, N) for L in range(1, 6) for N in range(1, 4)])
def test_ed_matches_filled_levels(L, N):
    rng = np.random.default_rng(L * 7 + N)
    t = tuple(rng.uniform(0.5, 1.5, L - 1))
    zero = (0.0,) * (L - 1)
    cfg = ChainConfig(L, N, t, zero, zero)
    eps = single_particle_energies(t, L)
    for sector in itertools.product(range(L + 1), repeat=N):
        e = lowest_eigenpair(build_sector_matrix(cfg, sector))[0].energy
        assert e == pytest.approx(free_sector_energy(eps, sector), abs=1e-10)


def test_free_ground_diagram():
    cfg = ChainConfig(5, 3, (1.0, 0.7, 1.2, 0.9), (0,) * 4, (0,) * 4)
    for M in range(1, 16):
        rep = level_ordering_report(cfg, M)
        assert rep.ground.passed and rep.ground.note == young.ground_diagram(M, 3).label()

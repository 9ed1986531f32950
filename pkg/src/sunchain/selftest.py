"""Exhaustive small-instance invariant suite behind ``sunchain selftest``."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from . import fock, freefermion, hamiltonian, oracle, spectra, young

log = logging.getLogger(__name__)

SELFTEST_SEED = 20100320


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _all_states(L, N):
    for sector in itertools.product(range(L + 1), repeat=N):
        yield from fock.enumerate_sector(L, N, sector)


def check_sign_absorption(max_L=4, max_N=3) -> CheckResult:
    bad = []
    for L in range(2, max_L + 1):
        for N in range(1, max_N + 1):
            for s in _all_states(L, N):
                for x in range(1, L):
                    moves = []
                    for a in range(1, N + 1):
                        moves += [fock.apply_hop(s, a, x, x + 1), fock.apply_hop(s, a, x + 1, x)]
                        for b in range(1, N + 1):
                            moves.append(fock.apply_exchange(s, a, b, x))
                        for b in range(1, a):
                            moves += [fock.apply_pair_hop(s, a, b, x, x + 1), fock.apply_pair_hop(s, a, b, x + 1, x)]
                    bad += [(L, N, s.masks, x) for m in moves if m is not None and m[1] != 1]
    return CheckResult("fock.sign-absorption", not bad, f"{len(bad)} move(s) with sign -1")


def check_ising_consistency(max_L=5, max_N=3) -> CheckResult:
    bad = 0
    for L in range(1, max_L + 1):
        for N in range(1, max_N + 1):
            for seq in itertools.product(range(1, N + 1), repeat=L):
                ops = [(fock.CREATE, a, x) for x, a in enumerate(seq, start=1)]
                state, sign = fock.apply_ops(fock.FockState((0,) * N), ops)
                grouped = fock.encode_state([[x for x, a in enumerate(seq, 1) if a == f] for f in range(1, N + 1)], L)
                if state != grouped or sign != fock.inversion_sign(seq):
                    bad += 1
    return CheckResult("fock.ising-consistency", bad == 0, f"{bad} mismatch(es)")


def check_enumeration(max_L=6, max_N=3) -> CheckResult:
    bad = 0
    for L in range(1, max_L + 1):
        for N in range(1, max_N + 1):
            for sector in itertools.product(range(L + 1), repeat=N):
                states = fock.enumerate_sector(L, N, sector)
                expected = np.prod([comb(L, m) for m in sector])
                if len(states) != expected or len(set(states)) != len(states) or states != sorted(states):
                    bad += 1
    return CheckResult("fock.enumeration", bad == 0, f"{bad} sector(s) wrong")


def check_dominance(max_M=8, max_N=4) -> CheckResult:
    bad = 0
    for M in range(1, max_M + 1):
        diagrams = young.enumerate_diagrams(M, max_M)
        for a, b in itertools.product(diagrams, repeat=2):
            rel = young.dominates(a, b)
            back = young.dominates(b, a)
            mirror = {
                young.Dominance.ABOVE: young.Dominance.BELOW,
                young.Dominance.BELOW: young.Dominance.ABOVE,
            }.get(rel, rel)
            if back is not mirror or ((rel is young.Dominance.EQUAL) != (a == b)):
                bad += 1
            if young.dominates(young.conjugate(a), young.conjugate(b)) is not back:
                bad += 1
            for c in diagrams:
                if rel is young.Dominance.ABOVE and young.dominates(b, c) is young.Dominance.ABOVE:
                    if young.dominates(a, c) is not young.Dominance.ABOVE:
                        bad += 1
        for N in range(1, max_N + 1):
            gs = young.ground_diagram(M, N)
            for lam in young.enumerate_diagrams(M, N):
                if lam != gs and young.dominates(lam, gs) is not young.Dominance.ABOVE:
                    bad += 1
    return CheckResult("young.dominance", bad == 0, f"{bad} violation(s)")


def check_dimensions(max_M=8, max_N=4) -> CheckResult:
    bad = 0
    for M in range(1, max_M + 1):
        for N in range(1, max_N + 1):
            for lam in young.enumerate_diagrams(M, N):
                if young.irrep_dimension(lam, N) != young.count_semistandard_tableaux(lam, N):
                    bad += 1
    return CheckResult("young.dimension", bad == 0, f"{bad} mismatch(es)")


def _random_chain(L, N, rng, potential=None):
    draw = lambda: tuple(rng.uniform(0.5, 1.5, L - 1))
    return hamiltonian.ChainConfig(L, N, draw(), draw(), draw(), potential or hamiltonian.HubbardPotential(rng.uniform(0.5, 1.5)))


def check_oracle(max_L=3, max_N=3, seed=SELFTEST_SEED) -> tuple[CheckResult, ...]:
    rng = np.random.default_rng(seed)
    worst, nonpos, disconnected = 0.0, [], []
    for L in range(1, max_L + 1):
        for N in range(1, max_N + 1):
            cfg = _random_chain(L, N, rng)
            full = oracle.FullSpace(L, N)
            for sector in itertools.product(range(L + 1), repeat=N):
                m = hamiltonian.build_sector_matrix(cfg, sector)
                ref = full.sector_matrix(cfg, m.basis.states)
                worst = max(worst, float(np.abs(m.toarray() - ref).max()))
                if not hamiltonian.check_offdiagonal_nonpositive(m):
                    nonpos.append(sector)
                if not hamiltonian.check_connectivity(m):
                    disconnected.append(sector)
    ok = worst <= 1e-12
    return CheckResult("hamiltonian.oracle", ok, f"max entry deviation {worst:.2e}"), CheckResult(
        "hamiltonian.nonpositive", not nonpos, f"positive off-diagonal in {len(nonpos)} sector(s)"
    ), CheckResult("hamiltonian.connectivity", not disconnected, f"{len(disconnected)} disconnected sector(s)")


def check_ordering(max_L=3, max_N=3, draws=2, seed=SELFTEST_SEED) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    failures = []
    for L in range(2, max_L + 1):
        for N in range(2, max_N + 1):
            for _ in range(draws):
                cfg = _random_chain(L, N, rng)
                for M in range(1, N * L + 1):
                    rep = spectra.level_ordering_report(cfg, M)
                    failures += [f"L={L} N={N} M={M} {v.name}" for v in rep.failures()]
    return CheckResult("spectra.ordering", not failures, "; ".join(failures[:5]))


def check_free_limit(max_L=4, max_N=3, seed=SELFTEST_SEED) -> CheckResult:
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for L in range(1, max_L + 1):
        for N in range(1, max_N + 1):
            t = tuple(rng.uniform(0.5, 1.5, L - 1))
            zero = (0.0,) * (L - 1)
            cfg = hamiltonian.ChainConfig(L, N, t, zero, zero)
            eps = freefermion.single_particle_energies(t, L)
            for sector in itertools.product(range(L + 1), repeat=N):
                e = spectra.lowest_eigenpair(hamiltonian.build_sector_matrix(cfg, sector))[0].energy
                worst = max(worst, abs(e - freefermion.free_sector_energy(eps, sector)))
    return CheckResult("freefermion.agreement", worst <= 1e-10, f"max deviation {worst:.2e}")


def run_selftest() -> list[CheckResult]:
    hamiltonian.clear_caches()
    results = [
        check_sign_absorption(),
        check_ising_consistency(),
        check_enumeration(),
        check_dominance(),
        check_dimensions(),
        *check_oracle(),
        check_ordering(),
        check_free_limit(),
    ]
    hamiltonian.clear_caches()
    return results

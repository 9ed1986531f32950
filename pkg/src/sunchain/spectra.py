"""Relative ground states, theorem verdicts and the level-ordering report."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np
import scipy.linalg

from . import fock, young
from .hamiltonian import (
    ChainConfig,
    SectorBasis,
    SparseSectorMatrix,
    apply_raising,
    build_sector_matrix,
    check_connectivity,
    check_offdiagonal_nonpositive,
    sector_basis,
)
from .lanczos import LanczosError, lanczos_lowest

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Eigensolver failure; the message names the offending sector."""


@dataclass(frozen=True)
class Tolerances:
    residual: float = 1e-10
    degeneracy: float = 1e-8
    positivity_floor: float = 1e-12
    trial_overlap: float = 1e-12
    highest_weight: float = 1e-8
    ordering_margin: float = 1e-9
    permutation: float = 1e-10

    def degeneracy_for(self, energy: float) -> float:
        return self.degeneracy * max(1.0, abs(energy))


@dataclass(frozen=True)
class SolverOptions:
    crossover: int = 512
    krylov_dim: int = 120
    max_restarts: int = 50
    max_dim: int = 200_000


@dataclass
class EigenResult:
    energy: float
    vector: np.ndarray
    residual: float
    gap: float | None = None


@dataclass
class Verdict:
    """``passed`` is ``None`` when the check is indeterminate."""

    name: str
    passed: bool | None
    value: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "value": self.value, "note": self.note}


def _gauge(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def lowest_eigenpair(
    m: SparseSectorMatrix,
    how_many: int = 1,
    options: SolverOptions = SolverOptions(),
    tol: Tolerances = Tolerances(),
) -> list[EigenResult]:
    """The ``how_many`` lowest eigenpairs, ascending.

    Dense diagonalisation below ``options.crossover``, Lanczos above.  Every
    returned pair satisfies ``||Hv - Ev|| <= tol.residual * max(1, |E|)``.
    """
    n = m.dimension
    if n < 1:
        raise SolverError(f"sector {m.sector}: empty basis")
    k = min(how_many, n)
    mat = m.matrix
    if n <= options.crossover:
        w, V = scipy.linalg.eigh(mat.toarray(), subset_by_index=[0, k - 1])
    else:
        try:
            w, V, _ = lanczos_lowest(
                mat.dot,
                n,
                k,
                tol=tol.residual,
                krylov_dim=options.krylov_dim,
                max_restarts=options.max_restarts,
            )
        except LanczosError as exc:
            raise SolverError(f"sector {m.sector}: {exc}") from exc
    out = []
    for e, v in zip(w, V.T):
        v = _gauge(v / np.linalg.norm(v))
        res = float(np.linalg.norm(mat @ v - e * v))
        if res > tol.residual * max(1.0, abs(e)):
            raise SolverError(f"sector {m.sector}: residual {res:.3e} above tolerance")
        out.append(EigenResult(float(e), v, res))
    if len(out) > 1:
        out[0].gap = out[1].energy - out[0].energy
    return out


def verify_positivity(r: EigenResult, tol: Tolerances = Tolerances()) -> Verdict:
    v = _gauge(r.vector)
    vmax = float(np.max(np.abs(v)))
    vmin = float(np.min(v))
    ok = vmin > tol.positivity_floor * vmax
    return Verdict("positivity", bool(ok), vmin / vmax)


def verify_uniqueness(results: Sequence[EigenResult], tol: Tolerances = Tolerances()) -> Verdict:
    if len(results[0].vector) == 1:
        return Verdict("uniqueness", True, None, "one-dimensional sector")
    if len(results) < 2:
        raise ValueError("uniqueness needs the two lowest eigenvalues")
    gap = results[1].energy - results[0].energy
    return Verdict("uniqueness", bool(gap > tol.degeneracy_for(results[0].energy)), gap)


def is_nonascending(sector: Sequence[int]) -> bool:
    return all(a >= b for a, b in zip(sector, sector[1:]))


def permute_flavors(vector: np.ndarray, basis: SectorBasis, perm: Sequence[int]):
    """Relabel flavors: old flavor ``a`` becomes ``perm[a-1]``.

    Regrouping the creation operators into the new flavor order costs
    ``(-1)**(M_a * M_b)`` for every pair of groups that swap places.
    """
    N = basis.N
    if sorted(perm) != list(range(1, N + 1)):
        raise ValueError(f"not a permutation of 1..{N}: {perm}")
    new_sector = [0] * N
    for a, m in enumerate(basis.sector, start=1):
        new_sector[perm[a - 1] - 1] = m
    target = sector_basis(basis.L, N, tuple(new_sector))
    out = np.zeros(target.dim)
    for i, state in enumerate(basis.states):
        masks = [0] * N
        for a, mask in enumerate(state.masks, start=1):
            masks[perm[a - 1] - 1] = mask
        sign = 1
        for a, b in itertools.combinations(range(N), 2):
            if perm[a] > perm[b] and (state.masks[a].bit_count() * state.masks[b].bit_count()) & 1:
                sign = -sign
        out[target.index[fock.FockState(tuple(masks))]] = sign * vector[i]
    return target, out


def verify_multiplet_label(
    r: EigenResult, basis: SectorBasis, tol: Tolerances = Tolerances()
) -> Verdict:
    """Trial-state overlap and annihilation by every raising operator.

    A sector that is not nonascending is first mapped to its sorted
    rearrangement by relabelling flavors.
    """
    vector = r.vector
    if not is_nonascending(basis.sector):
        order = sorted(range(basis.N), key=lambda a: -basis.sector[a])
        perm = [0] * basis.N
        for new, old in enumerate(order, start=1):
            perm[old] = new
        basis, vector = permute_flavors(vector, basis, perm)
    vector = _gauge(vector)
    trial = fock.trial_state(basis.sector)
    overlap = float(vector[basis.index[trial]])
    worst = 0.0
    for a, b in itertools.combinations(range(1, basis.N + 1), 2):
        try:
            _, image = apply_raising(vector, basis, a, b)
        except fock.SectorError:
            continue  # target weight cannot exist on this chain: image vanishes
        if image.size:
            worst = max(worst, float(np.linalg.norm(image)))
    ok = overlap > tol.trial_overlap and worst <= tol.highest_weight
    return Verdict(
        "highest-weight",
        bool(ok),
        worst,
        f"trial overlap {overlap:.3e}",
    )


def permuted_sector_consistency(
    config: ChainConfig,
    sector: Sequence[int],
    options: SolverOptions = SolverOptions(),
    tol: Tolerances = Tolerances(),
) -> Verdict:
    sector = fock.check_sector(config.L, sector, config.N)
    perms = sorted(set(itertools.permutations(sector)))
    energies = [lowest_eigenpair(build_sector_matrix(config, p), 1, options, tol)[0].energy for p in perms]
    spread = max(energies) - min(energies)
    return Verdict(
        "permutation",
        bool(spread <= tol.permutation),
        spread,
        f"{len(perms)} arrangement(s)",
    )


def compositions(M: int, N: int, cap: int) -> list[tuple[int, ...]]:
    """Weights ``(M_1..M_N)`` summing to ``M`` with every entry <= ``cap``."""
    return [c for c in itertools.product(range(min(M, cap) + 1), repeat=N) if sum(c) == M]


@dataclass
class SectorResult:
    sector: tuple[int, ...]
    dimension: int
    energies: list[float]
    nonpositive: bool
    connected: bool
    positivity: Verdict
    uniqueness: Verdict
    highest_weight: Verdict | None = None

    @property
    def energy(self) -> float:
        return self.energies[0]

    @property
    def gap(self) -> float | None:
        return self.energies[1] - self.energies[0] if len(self.energies) > 1 else None

    def verdicts(self) -> list[Verdict]:
        out = [
            Verdict("nonpositive-offdiagonal", self.nonpositive),
            Verdict("connectivity", self.connected),
            self.positivity,
            self.uniqueness,
        ]
        if self.highest_weight is not None:
            out.append(self.highest_weight)
        return out


def analyse_sector(
    config: ChainConfig,
    sector: tuple[int, ...],
    options: SolverOptions = SolverOptions(),
    tol: Tolerances = Tolerances(),
    floor: float | None = None,
    label_all: bool = False,
) -> SectorResult:
    """Build, check and diagonalise one sector.

    When ``floor`` is given, more eigenvalues are requested until one lies
    clearly above ``floor`` so degeneracy with it can be counted.  The
    highest-weight verdict is computed for nonascending sectors only unless
    ``label_all`` is set.
    """
    m = build_sector_matrix(config, sector, options.max_dim)
    k = min(2, m.dimension)
    res = lowest_eigenpair(m, k, options, tol)
    if floor is not None:
        band = 10 * tol.degeneracy_for(floor)
        while len(res) < m.dimension and res[-1].energy - floor <= band:
            k = min(2 * k, m.dimension)
            res = lowest_eigenpair(m, k, options, tol)
    hw = None
    if label_all or is_nonascending(sector):
        hw = verify_multiplet_label(res[0], m.basis, tol)
    return SectorResult(
        sector=tuple(sector),
        dimension=m.dimension,
        energies=[r.energy for r in res],
        nonpositive=check_offdiagonal_nonpositive(m),
        connected=check_connectivity(m),
        positivity=verify_positivity(res[0], tol),
        uniqueness=verify_uniqueness(res, tol),
        highest_weight=hw,
    )


@dataclass
class DiagramEntry:
    diagram: young.YoungDiagram
    feasible: bool
    sector: tuple[int, ...]
    energy: float | None = None
    gap: float | None = None
    positivity: bool | None = None
    highest_weight: bool | None = None

    def to_dict(self) -> dict:
        return {
            "diagram": self.diagram.label(),
            "feasible": self.feasible,
            "sector": list(self.sector),
            "energy": self.energy,
            "gap": self.gap,
            "positivity": self.positivity,
            "highest_weight": self.highest_weight,
        }


@dataclass
class SpectrumReport:
    config: ChainConfig
    M: int
    diagrams: list[DiagramEntry]
    sectors: list[SectorResult]
    violations: list[dict]
    incomparable: list[dict]
    ground: Verdict
    multiplicity: Verdict
    permutation: list[Verdict]
    warnings: list[str] = field(default_factory=list)

    def entry(self, diagram) -> DiagramEntry:
        label = young.YoungDiagram(diagram).label()
        for d in self.diagrams:
            if d.diagram.label() == label:
                return d
        raise KeyError(label)

    def energy(self, diagram) -> float | None:
        return self.entry(diagram).energy

    def verdicts(self) -> list[Verdict]:
        out = []
        for s in self.sectors:
            for v in s.verdicts():
                out.append(Verdict(f"{v.name}{list(s.sector)}", v.passed, v.value, v.note))
        out.append(Verdict("ordering", not self.violations, float(len(self.violations))))
        out.append(self.ground)
        out.append(self.multiplicity)
        out.extend(self.permutation)
        return out

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts() if v.passed is not True]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "M": self.M,
            "diagrams": [d.to_dict() for d in self.diagrams],
            "sectors": [
                {
                    "sector": list(s.sector),
                    "dimension": s.dimension,
                    "energies": s.energies,
                    "checks": [v.to_dict() for v in s.verdicts()],
                }
                for s in self.sectors
            ],
            "violations": self.violations,
            "incomparable": self.incomparable,
            "ground_diagram": self.ground.to_dict(),
            "ground_multiplicity": self.multiplicity.to_dict(),
            "permutation": [v.to_dict() for v in self.permutation],
            "warnings": self.warnings,
            "passed": self.passed,
        }


def _analyse_job(args):
    return analyse_sector(*args)


def _run_sectors(config, sectors, options, tol, jobs, floor=None):
    args = [(config, s, options, tol, floor) for s in sectors]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyse_job, args))
    else:
        results = [_analyse_job(a) for a in args]
    return {r.sector: r for r in results}


def level_ordering_report(
    config: ChainConfig,
    M: int,
    options: SolverOptions = SolverOptions(),
    tol: Tolerances = Tolerances(),
    jobs: int = 1,
) -> SpectrumReport:
    """Diagonalise every ``M``-particle sector and judge the ordering rule."""
    L, N = config.L, config.N
    if not 1 <= M <= N * L:
        raise ValueError(f"M={M} must lie in 1..N*L={N * L}")
    sectors = compositions(M, N, L)
    results = _run_sectors(config, sectors, options, tol, jobs)
    e_min = min(r.energy for r in results.values())
    # sectors touching the global minimum need their full degenerate block
    touching = [
        s for s, r in results.items()
        if r.energies[-1] - e_min <= 10 * tol.degeneracy_for(e_min) and len(r.energies) < r.dimension
    ]
    if touching:
        results.update(_run_sectors(config, touching, options, tol, jobs, floor=e_min))

    entries = []
    for lam in young.enumerate_diagrams(M, N):
        sector = lam.padded(N)
        if lam[0] > L:
            entries.append(DiagramEntry(lam, False, sector))
            continue
        r = results[sector]
        entries.append(
            DiagramEntry(
                lam,
                True,
                sector,
                r.energy,
                r.gap,
                r.positivity.passed,
                r.highest_weight.passed if r.highest_weight else None,
            )
        )

    feasible = [e for e in entries if e.feasible]
    violations, incomparable = [], []
    for hi, lo in itertools.permutations(feasible, 2):
        rel = young.dominates(hi.diagram, lo.diagram)
        if rel is young.Dominance.ABOVE:
            margin = hi.energy - lo.energy
            if not margin > tol.ordering_margin:
                violations.append(
                    {"upper": hi.diagram.label(), "lower": lo.diagram.label(), "margin": margin}
                )
        elif rel is young.Dominance.INCOMPARABLE and hi.diagram > lo.diagram:
            incomparable.append(
                {"a": hi.diagram.label(), "b": lo.diagram.label(), "difference": hi.energy - lo.energy}
            )

    gs = young.ground_diagram(M, N)
    best = min(feasible, key=lambda e: e.energy)
    ties = [e for e in feasible if e.energy - best.energy <= tol.degeneracy_for(best.energy)]
    if len(ties) > 1:
        ground = Verdict("ground-diagram", None, best.energy, "tie: " + " ".join(e.diagram.label() for e in ties))
    else:
        ground = Verdict("ground-diagram", best.diagram == gs, best.energy, best.diagram.label())

    expected = comb(N, M % N)
    deg = tol.degeneracy_for(e_min)
    count, ambiguous = 0, 0
    for r in results.values():
        for e in r.energies:
            d = e - e_min
            if d <= deg:
                count += 1
            elif d <= 10 * deg:
                ambiguous += 1
    if ambiguous:
        mult = Verdict("ground-multiplicity", None, float(count), f"{ambiguous} level(s) near tolerance")
    else:
        mult = Verdict("ground-multiplicity", count == expected, float(count), f"expected {expected}")

    perm_checks = []
    seen = set()
    for s in sectors:
        key = tuple(sorted(s, reverse=True))
        if key in seen:
            continue
        seen.add(key)
        group = [results[p] for p in set(itertools.permutations(key))]
        es = [g.energy for g in group]
        spread = max(es) - min(es)
        perm_checks.append(
            Verdict(f"permutation{list(key)}", bool(spread <= tol.permutation), spread, f"{len(group)} arrangement(s)")
        )

    return SpectrumReport(
        config=config,
        M=M,
        diagrams=entries,
        sectors=[results[s] for s in sectors],
        violations=violations,
        incomparable=incomparable,
        ground=ground,
        multiplicity=mult,
        permutation=perm_checks,
        warnings=list(config.warnings),
    )

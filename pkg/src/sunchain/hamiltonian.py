"""Sector-restricted Hamiltonian of the extended SU(N) Hubbard-Heisenberg chain.

The chain is open with bonds ``x = 1..L-1``.  Per bond the Hamiltonian has

* hopping ``-t_x (c^+_{x+1,a} c_{x,a} + h.c.)`` for every flavor,
* exchange ``J_x sum_a T^a_x T^a_{x+1}``, written as
  ``-2 sum_{a,b} c^+_{x,a} c_{x+1,a} c^+_{x+1,b} c_{x,b} + 2 n_x - (2/N) n_x n_{x+1}``,
* pair hopping ``-K_x (c^+_{x+1,a} c^+_{x+1,b} c_{x,b} c_{x,a} + h.c.)`` for ``a > b``,

plus an arbitrary potential ``V(n_1, ..., n_L)`` of the local fermion numbers.
All operator strings are applied through :mod:`sunchain.fock`, so the
fermionic signs are computed, not assumed.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from . import fock
from .fock import CREATE, ANNIHILATE, FockState, SectorError

log = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 200_000

KIND_HOP, KIND_EXCHANGE, KIND_PAIR = 0, 1, 2


class ConfigError(ValueError):
    pass


class HubbardPotential:
    """``V = U/2 sum_x n_x^2``."""

    kind = "hubbard"

    def __init__(self, U: float):
        self.U = float(U)

    def diagonal(self, occ: np.ndarray) -> np.ndarray:
        return 0.5 * self.U * (occ.astype(float) ** 2).sum(axis=1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "U": self.U}


class SiteDiagonalPotential:
    """``V = sum_x v_x n_x``."""

    kind = "site-diagonal"

    def __init__(self, table: Sequence[float]):
        self.table = tuple(float(v) for v in table)

    def diagonal(self, occ: np.ndarray) -> np.ndarray:
        if occ.shape[1] != len(self.table):
            raise ConfigError(f"site potential has {len(self.table)} entries for L={occ.shape[1]}")
        return occ.astype(float) @ np.asarray(self.table)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "table": list(self.table)}


class CustomPotential:
    """Any callable of the occupation tuple ``(n_1, ..., n_L)``."""

    kind = "custom"

    def __init__(self, fn: Callable[[tuple[int, ...]], float], name: str = "custom"):
        self.fn = fn
        self.name = name

    def diagonal(self, occ: np.ndarray) -> np.ndarray:
        return np.array([float(self.fn(tuple(int(v) for v in row))) for row in occ])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "name": self.name}


def zero_potential() -> HubbardPotential:
    return HubbardPotential(0.0)


@dataclass(frozen=True)
class ChainConfig:
    L: int
    N: int
    t: tuple[float, ...]
    J: tuple[float, ...]
    K: tuple[float, ...]
    potential: object = field(default_factory=zero_potential)

    def __post_init__(self):
        fock.check_caps(self.L, self.N)
        for name in ("t", "J", "K"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != self.L - 1:
                raise ConfigError(f"{name} needs L-1={self.L - 1} bond values, got {len(vals)}")
            if any(not np.isfinite(v) or v < 0 for v in vals):
                raise ConfigError(f"{name} couplings must be positive, got {vals}")
            object.__setattr__(self, name, vals)

    @classmethod
    def uniform(cls, L, N, t=1.0, J=1.0, K=1.0, potential=None) -> "ChainConfig":
        n = L - 1
        return cls(L, N, (t,) * n, (J,) * n, (K,) * n, potential or zero_potential())

    @property
    def warnings(self) -> list[str]:
        """Zero couplings void the strict-positivity hypothesis of the ordering proof."""
        out = []
        for name in ("t", "J", "K"):
            zeros = [x + 1 for x, v in enumerate(getattr(self, name)) if v == 0]
            if zeros:
                out.append(f"{name} vanishes on bonds {zeros}")
        return out

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "t": list(self.t),
            "J": list(self.J),
            "K": list(self.K),
            "potential": self.potential.to_dict(),
        }


@dataclass(frozen=True)
class SectorBasis:
    L: int
    N: int
    sector: tuple[int, ...]
    states: tuple[FockState, ...]
    index: dict = field(repr=False, compare=False)
    occupations: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)


@lru_cache(maxsize=None)
def sector_basis(L: int, N: int, sector: tuple[int, ...]) -> SectorBasis:
    states = tuple(fock.enumerate_sector(L, N, sector))
    index = {s: i for i, s in enumerate(states)}
    occ = np.array([s.site_occupations(L) for s in states], dtype=np.int64).reshape(len(states), L)
    return SectorBasis(L, N, tuple(sector), states, index, occ)


@dataclass(frozen=True)
class _Template:
    """Coupling-independent structure of one sector."""

    rows: np.ndarray
    cols: np.ndarray
    kinds: np.ndarray
    bonds: np.ndarray
    signs: np.ndarray
    exchange_diag: np.ndarray  # (dim, L-1), coefficient of J_x on the diagonal


@lru_cache(maxsize=None)
def _template(L: int, N: int, sector: tuple[int, ...]) -> _Template:
    basis = sector_basis(L, N, sector)
    index = basis.index
    rows, cols, kinds, bonds, signs = [], [], [], [], []
    exch = np.zeros((basis.dim, max(L - 1, 0)))
    occ = basis.occupations

    for i, state in enumerate(basis.states):
        for b in range(L - 1):
            x = b + 1
            for a in range(1, N + 1):
                # <new|H|state> lands in row new, column state
                for src, dst in ((x, x + 1), (x + 1, x)):
                    res = fock.apply_hop(state, a, src, dst)
                    if res is not None:
                        rows.append(index[res[0]])
                        cols.append(i)
                        kinds.append(KIND_HOP)
                        bonds.append(b)
                        signs.append(res[1])
            for a in range(1, N + 1):
                for c in range(1, N + 1):
                    res = fock.apply_exchange(state, a, c, x)
                    if res is None:
                        continue
                    new, s = res
                    if new == state:
                        exch[i, b] += -2.0 * s
                    else:
                        rows.append(index[new])
                        cols.append(i)
                        kinds.append(KIND_EXCHANGE)
                        bonds.append(b)
                        signs.append(s)
            for a in range(2, N + 1):
                for c in range(1, a):
                    for src, dst in ((x, x + 1), (x + 1, x)):
                        res = fock.apply_pair_hop(state, a, c, src, dst)
                        if res is not None:
                            rows.append(index[res[0]])
                            cols.append(i)
                            kinds.append(KIND_PAIR)
                            bonds.append(b)
                            signs.append(res[1])
    if L > 1:
        nx, ny = occ[:, :-1].astype(float), occ[:, 1:].astype(float)
        exch += 2.0 * nx - (2.0 / N) * nx * ny
    return _Template(
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(kinds, dtype=np.int8),
        np.asarray(bonds, dtype=np.int64),
        np.asarray(signs, dtype=float),
        exch,
    )


def clear_caches() -> None:
    sector_basis.cache_clear()
    _template.cache_clear()
    _raising_matrix.cache_clear()


@dataclass(frozen=True)
class SparseSectorMatrix:
    basis: SectorBasis
    matrix: sp.csr_matrix
    warnings: tuple[str, ...] = ()

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def sector(self) -> tuple[int, ...]:
        return self.basis.sector

    def entries(self):
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def write_matrix_market(self, path) -> None:
        scipy.io.mmwrite(str(path), self.matrix.tocoo(), comment=f"sector {self.sector}")


def build_sector_matrix(
    config: ChainConfig, sector: Sequence[int], max_dim: int = DEFAULT_MAX_DIM
) -> SparseSectorMatrix:
    L, N = config.L, config.N
    sector = fock.check_sector(L, sector, N)
    dim = fock.sector_dimension(L, sector)
    if dim > max_dim:
        raise SectorError(f"sector {sector} has dimension {dim} above the cap {max_dim}")
    basis = sector_basis(L, N, sector)
    tpl = _template(L, N, sector)

    table = np.zeros((3, max(L - 1, 1)))
    table[KIND_HOP, : L - 1] = config.t
    table[KIND_EXCHANGE, : L - 1] = np.multiply(2.0, config.J)
    table[KIND_PAIR, : L - 1] = config.K
    off = -tpl.signs * table[tpl.kinds, tpl.bonds] if len(tpl.rows) else np.zeros(0)

    diag = config.potential.diagonal(basis.occupations)
    if L > 1:
        diag = diag + tpl.exchange_diag @ np.asarray(config.J)
    idx = np.arange(dim)
    rows = np.concatenate([tpl.rows, idx])
    cols = np.concatenate([tpl.cols, idx])
    vals = np.concatenate([off, diag])
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return SparseSectorMatrix(basis, mat, tuple(config.warnings))


def check_offdiagonal_nonpositive(m) -> bool:
    mat = m.matrix if isinstance(m, SparseSectorMatrix) else sp.coo_matrix(m)
    coo = mat.tocoo()
    off = coo.row != coo.col
    return bool(np.all(coo.data[off] <= 0))


def check_connectivity(m) -> bool:
    """Breadth-first search over nonzero off-diagonal entries."""
    mat = sp.csr_matrix(m.matrix if isinstance(m, SparseSectorMatrix) else m)
    n = mat.shape[0]
    if n <= 1:
        return True
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    count = 1
    while queue:
        i = queue.popleft()
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i and data[k] != 0 and not seen[j]:
                seen[j] = True
                count += 1
                queue.append(j)
    return count == n


def raised_sector(sector: Sequence[int], alpha: int, beta: int) -> tuple[int, ...]:
    out = list(sector)
    out[alpha - 1] += 1
    out[beta - 1] -= 1
    return tuple(out)


@lru_cache(maxsize=None)
def _raising_matrix(L: int, N: int, sector: tuple[int, ...], alpha: int, beta: int):
    src = sector_basis(L, N, sector)
    tgt = sector_basis(L, N, raised_sector(sector, alpha, beta))
    rows, cols, vals = [], [], []
    for j, state in enumerate(src.states):
        for x in range(1, L + 1):
            res = fock.apply_ops(state, [(CREATE, alpha, x), (ANNIHILATE, beta, x)])
            if res is not None:
                rows.append(tgt.index[res[0]])
                cols.append(j)
                vals.append(float(res[1]))
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(tgt.dim, src.dim)).tocsr()
    return tgt, mat


def apply_raising(vector: np.ndarray, basis: SectorBasis, alpha: int, beta: int):
    """Apply ``F^{alpha beta} = sum_x c^+_{x,alpha} c_{x,beta}``.

    Returns ``(target_basis, image)``.  An empty target (``M_beta == 0``)
    gives ``(None, empty vector)``; a target that violates the chain-size
    condition raises :class:`SectorError`.
    """
    if alpha == beta:
        raise ValueError("raising operator needs alpha != beta")
    sector = basis.sector
    if sector[beta - 1] == 0:
        return None, np.zeros(0)
    target = raised_sector(sector, alpha, beta)
    fock.check_sector(basis.L, target)
    tgt, mat = _raising_matrix(basis.L, basis.N, sector, alpha, beta)
    return tgt, mat @ np.asarray(vector, dtype=float)

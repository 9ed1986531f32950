"""Naive full-Fock-space reference Hamiltonian.

Built from dense Jordan-Wigner matrices in a *site-major* mode order and
from explicit SU(N) generator matrices, so it shares no sign bookkeeping and
no exchange rewrite with :mod:`sunchain.hamiltonian`.  Only usable for a few
modes (``L * N <= 12``).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .fock import FockState

MAX_MODES = 12


def su_n_generators(N: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices normalised to ``Tr(T^a T^b) = 2 delta``."""
    gens = []
    for j in range(N):
        for k in range(j + 1, N):
            s = np.zeros((N, N), dtype=complex)
            s[j, k] = s[k, j] = 1
            gens.append(s)
            a = np.zeros((N, N), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            gens.append(a)
    for l in range(1, N):
        d = np.zeros((N, N), dtype=complex)
        for m in range(l):
            d[m, m] = 1
        d[l, l] = -l
        gens.append(d * np.sqrt(2.0 / (l * (l + 1))))
    return gens


class FullSpace:
    """All ``2**(L*N)`` occupation states; mode ``(x, a)`` sits at ``(x-1)*N + a-1``."""

    def __init__(self, L: int, N: int):
        if L * N > MAX_MODES:
            raise ValueError(f"full-space oracle limited to {MAX_MODES} modes")
        self.L, self.N = L, N
        self.n_modes = L * N
        self._ops = _jw_annihilators(self.n_modes)

    def mode(self, site: int, flavor: int) -> int:
        return (site - 1) * self.N + (flavor - 1)

    def c(self, site: int, flavor: int) -> sp.csr_matrix:
        return self._ops[self.mode(site, flavor)]

    def cdag(self, site: int, flavor: int) -> sp.csr_matrix:
        return self._ops[self.mode(site, flavor)].T.tocsr()

    def number(self, site: int, flavor: int):
        return self.cdag(site, flavor) @ self.c(site, flavor)

    def site_number(self, site: int):
        return sum(self.number(site, a) for a in range(1, self.N + 1))

    def vacuum(self) -> np.ndarray:
        v = np.zeros(2**self.n_modes)
        v[0] = 1.0
        return v

    def occupations(self, index: int) -> tuple[int, ...]:
        bits = [(index >> (self.n_modes - 1 - j)) & 1 for j in range(self.n_modes)]
        return tuple(sum(bits[(x - 1) * self.N : x * self.N]) for x in range(1, self.L + 1))

    def ket(self, state: FockState) -> np.ndarray:
        """Creation operators grouped by flavor, ascending site, leftmost first."""
        v = self.vacuum()
        ops = []
        for a, sites in enumerate(state.positions(), start=1):
            for x in sites:
                ops.append(self.cdag(x, a))
        for op in reversed(ops):
            v = op @ v
        return v

    def hamiltonian(self, config) -> sp.csr_matrix:
        L, N = self.L, self.N
        dim = 2**self.n_modes
        H = sp.csr_matrix((dim, dim), dtype=complex)
        gens = su_n_generators(N)
        spins = {}
        for x in range(1, L + 1):
            spins[x] = [
                sum(
                    g[a - 1, b - 1] * (self.cdag(x, a) @ self.c(x, b))
                    for a in range(1, N + 1)
                    for b in range(1, N + 1)
                    if g[a - 1, b - 1] != 0
                )
                for g in gens
            ]
        for x in range(1, L):
            t, J, K = config.t[x - 1], config.J[x - 1], config.K[x - 1]
            for a in range(1, N + 1):
                hop = self.cdag(x + 1, a) @ self.c(x, a)
                H = H - t * (hop + hop.T)
            for Ta, Tb in zip(spins[x], spins[x + 1]):
                H = H + J * (Ta @ Tb)
            for a in range(1, N + 1):
                for b in range(1, a):
                    fwd = self.cdag(x + 1, a) @ self.cdag(x + 1, b) @ self.c(x, b) @ self.c(x, a)
                    bwd = self.cdag(x, a) @ self.cdag(x, b) @ self.c(x + 1, b) @ self.c(x + 1, a)
                    H = H - K * (fwd + bwd)
        occ = np.array([self.occupations(i) for i in range(dim)])
        H = H + sp.diags(config.potential.diagonal(occ))
        if H.nnz and abs(H.imag).max() > 1e-12:
            raise AssertionError("oracle Hamiltonian is not real")
        return H.real.tocsr()

    def restrict(self, op, states) -> np.ndarray:
        """Matrix elements of ``op`` between the sign-fixed basis kets."""
        idx, sign = [], []
        for s in states:
            v = self.ket(s)
            nz = np.flatnonzero(v)
            assert len(nz) == 1 and abs(abs(v[nz[0]]) - 1) < 1e-15
            idx.append(nz[0])
            sign.append(v[nz[0]])
        sign = np.asarray(sign)
        block = sp.csr_matrix(op)[idx][:, idx].toarray()
        return sign[:, None] * block * sign[None, :]

    def sector_matrix(self, config, states) -> np.ndarray:
        return self.restrict(self.hamiltonian(config), states)

    def casimir(self) -> sp.csr_matrix:
        """``sum_{a,b} F^{ab} F^{ba}`` with ``F^{ab} = sum_x c^+_{x,a} c_{x,b}``."""
        N = self.N
        F = {
            (a, b): sum(self.cdag(x, a) @ self.c(x, b) for x in range(1, self.L + 1))
            for a in range(1, N + 1)
            for b in range(1, N + 1)
        }
        return sum(F[a, b] @ F[b, a] for a in range(1, N + 1) for b in range(1, N + 1)).tocsr()


@lru_cache(maxsize=4)
def _jw_annihilators(n: int) -> tuple[sp.csr_matrix, ...]:
    a = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    z = sp.csr_matrix(np.diag([1.0, -1.0]))
    eye = sp.identity(2, format="csr")
    ops = []
    for j in range(n):
        op = sp.identity(1, format="csr")
        for k in range(n):
            f = z if k < j else (a if k == j else eye)
            op = sp.kron(op, f, format="csr")
        ops.append(op)
    return tuple(ops)

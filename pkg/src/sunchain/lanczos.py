"""Lanczos eigensolver for the lowest eigenpairs of a real symmetric operator.

Every Lanczos vector is explicitly reorthogonalised against the whole Krylov
basis and against already converged (locked) eigenvectors.  Eigenpairs are
found one at a time on the orthogonal complement of the locked ones, so an
exactly degenerate level is found once per copy instead of being hidden by
the single-vector Krylov space.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class LanczosError(RuntimeError):
    pass


def _orthogonalize(r: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # two passes of classical Gram-Schmidt ("twice is enough")
    if not basis:
        return r
    Q = np.array(basis)
    for _ in range(2):
        r = r - Q.T @ (Q @ r)
    return r


def _krylov_lowest(matvec, v0, locked, m):
    """Run ``m`` reorthogonalised Lanczos steps; return lowest Ritz pair."""
    Q = []
    alphas, betas = [], []
    q = v0
    for j in range(m):
        Q.append(q)
        w = matvec(q)
        a = float(q @ w)
        alphas.append(a)
        w = _orthogonalize(w, Q + locked)
        b = float(np.linalg.norm(w))
        if j == m - 1 or b < 1e-13 * max(1.0, abs(a)):
            break
        betas.append(b)
        q = w / b
    T = np.diag(alphas)
    if betas:
        T += np.diag(betas, 1) + np.diag(betas, -1)
    theta, Y = np.linalg.eigh(T)
    x = np.array(Q).T @ Y[:, 0]
    x = _orthogonalize(x, locked)
    return x / np.linalg.norm(x)


def lanczos_lowest(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    k: int = 1,
    tol: float = 1e-10,
    krylov_dim: int = 120,
    max_restarts: int = 50,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of a symmetric operator of size ``n``.

    Returns ``(energies, vectors, residuals)`` with eigenvectors as columns.
    Convergence means ``||A x - E x|| <= tol * max(1, |E|)``; failing that
    within ``max_restarts`` restarts raises :class:`LanczosError`.
    """
    if k > n:
        raise ValueError(f"asked for {k} eigenpairs of a {n}-dimensional operator")
    rng = rng or np.random.default_rng(0)
    locked: list[np.ndarray] = []
    energies, residuals = [], []
    for _ in range(k):
        v = _orthogonalize(rng.standard_normal(n), locked)
        v /= np.linalg.norm(v)
        m = min(krylov_dim, n - len(locked))
        for _restart in range(max_restarts):
            x = _krylov_lowest(matvec, v, locked, m)
            Ax = matvec(x)
            e = float(x @ Ax)
            res = float(np.linalg.norm(Ax - e * x))
            if res <= tol * max(1.0, abs(e)):
                break
            v = x
        else:
            raise LanczosError(
                f"no convergence after {max_restarts} restarts (residual {res:.3e}, energy {e:.12g})"
            )
        locked.append(x)
        energies.append(e)
        residuals.append(res)
    order = np.argsort(energies, kind="stable")
    vecs = np.array(locked).T[:, order]
    return np.asarray(energies)[order], vecs, np.asarray(residuals)[order]

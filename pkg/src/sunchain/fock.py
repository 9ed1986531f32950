"""Sign-fixed many-fermion basis for an N-flavor open chain.

A basis state is stored as one bitmask per flavor; bit ``x - 1`` of mask
``alpha - 1`` is set when a flavor-``alpha`` fermion sits at site ``x``
(sites and flavors are 1-based in the public API).  The amplitude-+1 ket of
a state is the product of creation operators grouped by flavor (flavor 1
leftmost) and, within a flavor, ordered by ascending site, acting on the
vacuum.  Equivalently, modes are ordered flavor-major, site-minor, and every
fermionic sign is the parity of occupied modes preceding the touched mode.

With this ordering a same-flavor nearest-neighbour hop never crosses an
occupied mode, so hops, pair hops and flavor exchanges all carry sign +1.
"""

from __future__ import annotations

import itertools
from math import comb, prod
from typing import Iterable, NamedTuple, Sequence

MAX_SITES = 21
MAX_FLAVORS = 6

CREATE = "create"
ANNIHILATE = "annihilate"


class FockState(NamedTuple):
    """Occupation bitmasks, one per flavor (index 0 is flavor 1)."""

    masks: tuple[int, ...]

    @property
    def n_flavors(self) -> int:
        return len(self.masks)

    def counts(self) -> tuple[int, ...]:
        return tuple(m.bit_count() for m in self.masks)

    def positions(self) -> list[list[int]]:
        """Occupied sites per flavor, 1-based and ascending."""
        out = []
        for m in self.masks:
            sites = []
            x = 1
            while m:
                if m & 1:
                    sites.append(x)
                m >>= 1
                x += 1
            out.append(sites)
        return out

    def site_occupations(self, L: int) -> tuple[int, ...]:
        """Local fermion numbers n_1..n_L."""
        return tuple(sum((m >> x) & 1 for m in self.masks) for x in range(L))


class SectorError(ValueError):
    """Raised for a weight sector that cannot exist on the chain."""


class ChainSizeError(ValueError):
    """Raised when L or N exceed the supported caps."""


def check_caps(L: int, N: int) -> None:
    if not 1 <= L <= MAX_SITES:
        raise ChainSizeError(f"L={L} outside supported range 1..{MAX_SITES}")
    if not 1 <= N <= MAX_FLAVORS:
        raise ChainSizeError(f"N={N} outside supported range 1..{MAX_FLAVORS}")


def check_sector(L: int, sector: Sequence[int], N: int | None = None) -> tuple[int, ...]:
    """Validate a weight ``(M_1, ..., M_N)`` against the chain length.

    A sector exists only if ``L >= max(M_alpha)``; anything else raises
    :class:`SectorError`.
    """
    counts = tuple(int(m) for m in sector)
    if N is not None and len(counts) != N:
        raise SectorError(f"sector {counts} has {len(counts)} entries, expected N={N}")
    if any(m < 0 for m in counts):
        raise SectorError(f"sector {counts} has a negative particle count")
    if counts and max(counts) > L:
        raise SectorError(
            f"sector {counts} infeasible on L={L} sites: "
            f"requires L >= max M_alpha = {max(counts)}"
        )
    return counts


def encode_state(positions: Sequence[Iterable[int]], L: int) -> FockState:
    """Pack per-flavor site lists into a :class:`FockState`.

    >>> encode_state([[1, 2], [1]], L=3).masks
    (3, 1)
    """
    masks = []
    for alpha, sites in enumerate(positions, start=1):
        sites = list(sites)
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites of flavor {alpha} must be strictly increasing: {sites}")
        m = 0
        for x in sites:
            if not 1 <= x <= L:
                raise ValueError(f"site {x} of flavor {alpha} outside 1..{L}")
            m |= 1 << (x - 1)
        masks.append(m)
    return FockState(tuple(masks))


def decode_state(state: FockState) -> list[list[int]]:
    return state.positions()


def preceding_parity(masks: Sequence[int], flavor: int, site: int) -> int:
    """Parity (0/1) of occupied modes before ``(flavor, site)`` in mode order."""
    n = 0
    for m in masks[: flavor - 1]:
        n += m.bit_count()
    n += (masks[flavor - 1] & ((1 << (site - 1)) - 1)).bit_count()
    return n & 1


def apply_mode_op(
    state: FockState, flavor: int, site: int, kind: str
) -> tuple[FockState, int] | None:
    """Apply ``c^+`` or ``c`` on mode ``(flavor, site)``.

    Returns ``None`` when Pauli-blocked, else the new state and its sign.
    """
    masks = state.masks
    bit = 1 << (site - 1)
    occupied = masks[flavor - 1] & bit
    if kind == CREATE:
        if occupied:
            return None
        new = masks[flavor - 1] | bit
    elif kind == ANNIHILATE:
        if not occupied:
            return None
        new = masks[flavor - 1] & ~bit
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    sign = -1 if preceding_parity(masks, flavor, site) else 1
    out = masks[: flavor - 1] + (new,) + masks[flavor:]
    return FockState(out), sign


def apply_ops(
    state: FockState, ops: Sequence[tuple[str, int, int]]
) -> tuple[FockState, int] | None:
    """Apply a product of mode operators written left to right.

    ``ops`` lists ``(kind, flavor, site)`` factors as they appear in the
    operator string; the rightmost factor acts first.
    """
    sign = 1
    for kind, flavor, site in reversed(ops):
        res = apply_mode_op(state, flavor, site, kind)
        if res is None:
            return None
        state, s = res
        sign *= s
    return state, sign


def _check_adjacent(a: int, b: int) -> None:
    if abs(a - b) != 1:
        raise ValueError(f"sites {a} and {b} are not nearest neighbours")


def apply_hop(state: FockState, flavor: int, src: int, dst: int):
    """``c^+_{dst,flavor} c_{src,flavor}``."""
    _check_adjacent(src, dst)
    return apply_ops(state, [(CREATE, flavor, dst), (ANNIHILATE, flavor, src)])


def apply_pair_hop(state: FockState, alpha: int, beta: int, src: int, dst: int):
    """``c^+_{dst,a} c^+_{dst,b} c_{src,b} c_{src,a}`` with ``alpha > beta``."""
    if alpha <= beta:
        raise ValueError(f"pair hop needs alpha > beta, got {alpha}, {beta}")
    _check_adjacent(src, dst)
    return apply_ops(
        state,
        [
            (CREATE, alpha, dst),
            (CREATE, beta, dst),
            (ANNIHILATE, beta, src),
            (ANNIHILATE, alpha, src),
        ],
    )


def apply_exchange(state: FockState, alpha: int, beta: int, x: int):
    """One summand ``c^+_{x,a} c_{x+1,a} c^+_{x+1,b} c_{x,b}`` of the exchange.

    Moves a flavor-``beta`` fermion from ``x`` to ``x+1`` and a
    flavor-``alpha`` fermion back from ``x+1`` to ``x``.  For ``alpha == beta``
    the result, when defined, is the input state (a density-like term).
    """
    return apply_ops(
        state,
        [
            (CREATE, alpha, x),
            (ANNIHILATE, alpha, x + 1),
            (CREATE, beta, x + 1),
            (ANNIHILATE, beta, x),
        ],
    )


def _masks_with_popcount(L: int, k: int) -> list[int]:
    masks = [sum(1 << i for i in c) for c in itertools.combinations(range(L), k)]
    masks.sort()
    return masks


def enumerate_sector(L: int, N: int, sector: Sequence[int]) -> list[FockState]:
    """All basis states of a weight sector, lexicographic in the masks."""
    check_caps(L, N)
    counts = check_sector(L, sector, N)
    per_flavor = [_masks_with_popcount(L, m) for m in counts]
    return [FockState(tuple(ms)) for ms in itertools.product(*per_flavor)]


def sector_dimension(L: int, sector: Sequence[int]) -> int:
    return prod(comb(L, m) for m in sector)


def inversion_sign(flavors: Sequence[int]) -> int:
    """``(-1)**p`` with ``p`` the number of inversions of the flavor sequence."""
    p = sum(1 for i, j in itertools.combinations(range(len(flavors)), 2) if flavors[i] > flavors[j])
    return -1 if p & 1 else 1


def trial_state(sector: Sequence[int], L: int | None = None) -> FockState:
    """Compact state with flavor ``alpha`` on sites ``1..M_alpha``."""
    counts = tuple(sector)
    if L is not None:
        check_sector(L, counts)
    return FockState(tuple((1 << m) - 1 for m in counts))

"""Young diagrams: dominance order, conjugation and SU(N) dimensions."""

from __future__ import annotations

import enum
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence


class Dominance(enum.Enum):
    ABOVE = "strictly-above"
    BELOW = "strictly-below"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class YoungDiagram(tuple):
    """Non-ascending tuple of positive row lengths."""

    def __new__(cls, rows: Iterable[int] = ()):
        rows = tuple(int(r) for r in rows)
        if any(r <= 0 for r in rows):
            raise ValueError(f"rows must be positive: {rows}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"rows must be non-ascending: {rows}")
        return super().__new__(cls, rows)

    @property
    def boxes(self) -> int:
        return sum(self)

    @property
    def n_rows(self) -> int:
        return len(self)

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self) > n:
            raise ValueError(f"diagram {self.label()} has more than {n} rows")
        return tuple(self) + (0,) * (n - len(self))

    def label(self) -> str:
        return ",".join(str(r) for r in self)

    @classmethod
    def parse(cls, text: str) -> "YoungDiagram":
        text = text.strip()
        return cls(int(p) for p in text.split(",")) if text else cls()

    def __repr__(self) -> str:
        return f"YoungDiagram([{self.label()}])"


def diagram_from_sector(sector: Sequence[int]) -> YoungDiagram:
    """Diagram whose rows are the nonzero weights, sorted."""
    rows = sorted((m for m in sector if m), reverse=True)
    if not rows:
        raise ValueError("an all-zero sector has no Young diagram")
    return YoungDiagram(rows)


def dominates(a: Sequence[int], b: Sequence[int]) -> Dominance:
    """Compare two diagrams by prefix sums of their rows."""
    if sum(a) != sum(b):
        return Dominance.INCOMPARABLE
    n = max(len(a), len(b))
    pa = list(accumulate(tuple(a) + (0,) * (n - len(a))))
    pb = list(accumulate(tuple(b) + (0,) * (n - len(b))))
    ge = all(x >= y for x, y in zip(pa, pb))
    le = all(x <= y for x, y in zip(pa, pb))
    if ge and le:
        return Dominance.EQUAL
    if ge:
        return Dominance.ABOVE
    if le:
        return Dominance.BELOW
    return Dominance.INCOMPARABLE


def conjugate(diagram: Sequence[int]) -> YoungDiagram:
    rows = tuple(diagram)
    if not rows:
        return YoungDiagram()
    return YoungDiagram(sum(1 for r in rows if r >= i) for i in range(1, rows[0] + 1))


def irrep_dimension(diagram: Sequence[int], N: int) -> int:
    """Weyl dimension formula for the SU(N) irrep labelled by ``diagram``."""
    lam = YoungDiagram(diagram).padded(N)
    d = Fraction(1)
    for i in range(N):
        for j in range(i + 1, N):
            d *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert d.denominator == 1
    return int(d)


def ground_diagram(M: int, N: int) -> YoungDiagram:
    """Dominance-minimal diagram of ``M`` boxes with at most ``N`` rows."""
    if M < 1:
        raise ValueError("ground_diagram needs at least one box")
    q, m = divmod(M, N)
    rows = [q + 1] * m + [q] * (N - m)
    return YoungDiagram(r for r in rows if r)


def enumerate_diagrams(M: int, N: int) -> list[YoungDiagram]:
    """Partitions of ``M`` into at most ``N`` parts, reverse-lexicographic."""
    out: list[YoungDiagram] = []

    def rec(remaining: int, max_part: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(YoungDiagram(prefix))
            return
        if len(prefix) == N:
            return
        for part in range(min(remaining, max_part), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(M, M, [])
    return out


def count_semistandard_tableaux(diagram: Sequence[int], N: int) -> int:
    """Brute-force count of SSYT of the given shape with entries 1..N."""
    rows = tuple(diagram)
    cells = [(i, j) for i, r in enumerate(rows) for j in range(r)]
    filling: dict[tuple[int, int], int] = {}

    def rec(k: int) -> int:
        if k == len(cells):
            return 1
        i, j = cells[k]
        lo = 1
        if j > 0:
            lo = max(lo, filling[(i, j - 1)])
        if i > 0:
            lo = max(lo, filling[(i - 1, j)] + 1)
        total = 0
        for v in range(lo, N + 1):
            filling[(i, j)] = v
            total += rec(k + 1)
        filling.pop((i, j), None)
        return total

    return rec(0)

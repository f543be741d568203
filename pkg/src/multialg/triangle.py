"""The triangle hyperfield on the nonnegative rationals.

``a ∇ b`` is every ``c`` with ``|a - b| <= c <= a + b``; products are the
usual ones.  Subsets are finite unions of closed intervals with
:class:`fractions.Fraction` endpoints, so every computation is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, Fraction, str]


def _q(x: Number) -> Fraction:
    q = Fraction(x)
    if q < 0:
        raise ValueError(f"triangle hyperfield elements are nonnegative, got {q}")
    return q


@dataclass(frozen=True)
class IntervalSet:
    """A nonempty, normalized (sorted, disjoint) union of closed intervals."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("IntervalSet must be nonempty")
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"bad interval [{lo}, {hi}]")

    @classmethod
    def of(cls, spans: Iterable[tuple[Number, Number]]) -> "IntervalSet":
        merged: list[list[Fraction]] = []
        for lo, hi in sorted((_q(a), _q(b)) for a, b in spans):
            if lo > hi:
                raise ValueError(f"bad interval [{lo}, {hi}]")
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def point(cls, x: Number) -> "IntervalSet":
        q = _q(x)
        return cls(((q, q),))

    @classmethod
    def closed(cls, lo: Number, hi: Number) -> "IntervalSet":
        return cls.of([(lo, hi)])

    def __contains__(self, x: Number) -> bool:
        q = Fraction(x)
        return any(lo <= q <= hi for lo, hi in self.intervals)

    def issubset(self, other: "IntervalSet") -> bool:
        return all(any(olo <= lo and hi <= ohi for olo, ohi in other.intervals) for lo, hi in self.intervals)

    def __str__(self) -> str:
        parts = [f"{lo}" if lo == hi else f"[{lo},{hi}]" for lo, hi in self.intervals]
        return " ∪ ".join(parts)


def _as_set(x) -> IntervalSet:
    return x if isinstance(x, IntervalSet) else IntervalSet.point(x)


def _nabla_span(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    (a1, a2), (b1, b2) = a, b
    # The union of [|x-y|, x+y] over a connected box is an interval whose
    # lower end is the distance between the two spans.
    if a2 < b1:
        lo = b1 - a2
    elif b2 < a1:
        lo = a1 - b2
    else:
        lo = Fraction(0)
    return lo, a2 + b2


def tri_add(a, b) -> IntervalSet:
    A, B = _as_set(a), _as_set(b)
    return IntervalSet.of(_nabla_span(x, y) for x in A.intervals for y in B.intervals)


def tri_mul(a, b) -> IntervalSet:
    A, B = _as_set(a), _as_set(b)
    return IntervalSet.of((x1 * y1, x2 * y2) for x1, x2 in A.intervals for y1, y2 in B.intervals)


def tri_sum(*terms) -> IntervalSet:
    """Left fold of ``∇`` over the arguments."""
    if not terms:
        return IntervalSet.point(0)
    out = _as_set(terms[0])
    for t in terms[1:]:
        out = tri_add(out, t)
    return out

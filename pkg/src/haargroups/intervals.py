"""Finite disjoint unions of half-open intervals ``[a, b)``."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, non-empty half-open pieces. Touching pieces are merged."""

    pieces: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        cleaned = []
        for a, b in sorted((float(a), float(b)) for a, b in self.pieces):
            if math.isnan(a) or math.isnan(b):
                raise ValueError("interval endpoint is nan")
            if not a < b:
                continue
            if cleaned and a <= cleaned[-1][1]:
                cleaned[-1] = (cleaned[-1][0], max(cleaned[-1][1], b))
            else:
                cleaned.append((a, b))
        object.__setattr__(self, "pieces", tuple(cleaned))

    @classmethod
    def of(cls, *pieces: tuple[float, float]) -> "IntervalSet":
        return cls(tuple(pieces))

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __bool__(self) -> bool:
        return bool(self.pieces)

    @property
    def length(self) -> float:
        return sum(b - a for a, b in self.pieces)

    @property
    def lo(self) -> float:
        return self.pieces[0][0]

    @property
    def hi(self) -> float:
        return self.pieces[-1][1]

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.pieces + other.pieces)

    def clip(self, lo: float, hi: float) -> "IntervalSet":
        return IntervalSet(tuple((max(a, lo), min(b, hi)) for a, b in self.pieces))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.pieces:
            for c, d in other.pieces:
                out.append((max(a, c), min(b, d)))
        return IntervalSet(tuple(out))

    def contains(self, x: float) -> bool:
        return any(a <= x < b for a, b in self.pieces)

    def within(self, lo: float, hi: float) -> bool:
        return all(lo <= a and b <= hi for a, b in self.pieces)

    def shift(self, t: float) -> "IntervalSet":
        return IntervalSet(tuple((a + t, b + t) for a, b in self.pieces))

    def map_monotone(self, func: Callable[[float], float], increasing: bool = True) -> "IntervalSet":
        """Image under a monotone map applied to the endpoints.

        A decreasing map sends ``[a, b)`` to ``(f(b), f(a)]``; it is stored as
        ``[f(b), f(a))`` since the endpoints carry no mass.
        """
        if increasing:
            return IntervalSet(tuple((func(a), func(b)) for a, b in self.pieces))
        return IntervalSet(tuple((func(b), func(a)) for a, b in self.pieces))

    def __str__(self) -> str:
        if not self.pieces:
            return "∅"
        return " ∪ ".join(f"[{_num(a)},{_num(b)})" for a, b in self.pieces)

    def to_list(self) -> list[list[float]]:
        return [[a, b] for a, b in self.pieces]

    @classmethod
    def from_list(cls, pairs: Iterable[Iterable[float]]) -> "IntervalSet":
        return cls(tuple(tuple(p) for p in pairs))


def _num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


_PIECE = re.compile(r"\[\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)")


def parse_interval_set(text: str) -> IntervalSet:
    """Parse ``[a,b)`` pieces joined by ``u`` or ``∪``; ``∅`` is the empty set."""
    text = text.strip()
    if text in ("", "∅", "{}"):
        return IntervalSet()
    pieces = []
    pos = 0
    while True:
        m = _PIECE.match(text, pos)
        if m is None:
            raise ValueError(f"bad interval literal at position {pos}: {text[pos:]!r}")
        try:
            a, b = float(m.group(1)), float(m.group(2))
        except ValueError:
            raise ValueError(f"bad interval endpoint in {m.group(0)!r}") from None
        if not a < b:
            raise ValueError(f"empty or reversed interval {m.group(0)!r}")
        pieces.append((a, b))
        pos = m.end()
        rest = text[pos:].lstrip()
        if not rest:
            break
        if rest[0] not in "u∪":
            raise ValueError(f"expected 'u' between intervals, found {rest[0]!r}")
        pos = len(text) - len(rest) + 1
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return IntervalSet(tuple(pieces))

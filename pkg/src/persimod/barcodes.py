"""Graded barcodes: finite multisets of (degree, interval) bars.

A bar in degree d stands for a rank-one interval module placed in
cohomological degree d.  Barcodes are stored as tuples sorted by
(degree, lo, hi) with multiplicity expanded into repeated entries, so a
bar's index in the sorted tuple is its address in every matrix indexed
by the barcode.  The empty barcode is the zero object.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .intervals import DEG0, ExtRat, Interval, hom

__all__ = [
    "Bar",
    "Barcode",
    "shift",
    "tau",
    "gamma_to_zero",
    "cone_diagonal",
]


class Bar:
    """One bar: an interval module in a fixed cohomological degree."""

    __slots__ = ("degree", "interval")

    def __init__(self, degree: int, interval: Interval):
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "interval", interval)

    def __setattr__(self, *a):
        raise AttributeError("Bar is immutable")

    def key(self):
        return (self.degree, self.interval.lo, self.interval.hi)

    def shift(self, c) -> "Bar":
        return Bar(self.degree, self.interval.shift(c))

    def __eq__(self, other):
        if not isinstance(other, Bar):
            return NotImplemented
        return self.degree == other.degree and self.interval == other.interval

    def __hash__(self):
        return hash((self.degree, self.interval))

    def __repr__(self):
        return f"Bar({self.degree}, {self.interval})"


BarLike = Union[Bar, tuple]


def _as_bar(item: BarLike) -> Bar:
    if isinstance(item, Bar):
        return item
    if isinstance(item, tuple):
        if len(item) == 2 and isinstance(item[1], Interval):
            return Bar(item[0], item[1])
        if len(item) == 3:
            return Bar(item[0], Interval(item[1], item[2]))
    raise TypeError(f"cannot interpret {item!r} as a bar")


class Barcode:
    """Finite multiset of bars in canonical (degree, lo, hi) order."""

    __slots__ = ("bars",)

    def __init__(self, bars: Iterable[BarLike] = ()):
        items = sorted((_as_bar(b) for b in bars), key=Bar.key)
        object.__setattr__(self, "bars", tuple(items))

    def __setattr__(self, *a):
        raise AttributeError("Barcode is immutable")

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def __getitem__(self, i) -> Bar:
        return self.bars[i]

    def __bool__(self):
        return bool(self.bars)

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self.bars == other.bars

    def __hash__(self):
        return hash(self.bars)

    def __repr__(self):
        inner = ", ".join(f"({b.degree}, {b.interval})" for b in self.bars)
        return f"Barcode([{inner}])"

    # -- structure helpers ---------------------------------------------------

    def shift(self, c) -> "Barcode":
        c = Fraction(c)
        return Barcode(b.shift(c) for b in self.bars)

    def degrees(self) -> List[int]:
        return sorted({b.degree for b in self.bars})

    def is_degree_pure(self) -> bool:
        return len(self.degrees()) <= 1

    def restrict(self, indices: Iterable[int]) -> "Barcode":
        """Sub-barcode at the given sorted indices (order is preserved)."""
        idx = sorted(set(indices))
        return Barcode(self.bars[i] for i in idx)

    def indices_where(self, predicate) -> List[int]:
        return [i for i, b in enumerate(self.bars) if predicate(b)]

    def split_by_degree(self) -> Dict[int, Tuple["Barcode", List[int]]]:
        """degree -> (sub-barcode, original indices)."""
        out: Dict[int, Tuple[Barcode, List[int]]] = {}
        for d in self.degrees():
            idx = [i for i, b in enumerate(self.bars) if b.degree == d]
            out[d] = (self.restrict(idx), idx)
        return out

    def counts(self) -> List[Tuple[Bar, int]]:
        """Bars with multiplicities, in canonical order."""
        out: List[Tuple[Bar, int]] = []
        for b in self.bars:
            if out and out[-1][0] == b:
                out[-1] = (b, out[-1][1] + 1)
            else:
                out.append((b, 1))
        return out


def shift(b: Barcode, c) -> Barcode:
    """Translate every bar by the finite rational c; degrees unchanged."""
    return b.shift(c)


def gamma_to_zero(b: Barcode) -> ExtRat:
    """Distance from the zero object: the maximal bar length.

    0 for the empty barcode; +inf as soon as some bar is infinite.
    """
    out = ExtRat(0)
    for bar in b.bars:
        out = max(out, bar.interval.length)
    return out


def tau(b: Barcode, c, field=None):
    """The canonical comparison morphism B -> shift(B, c), c >= 0.

    Diagonal matrix with (i, i) entry 1 exactly when the bar survives its
    own c-shift (c < length), 0 otherwise.
    """
    from .morphisms import tau_morphism

    return tau_morphism(b, c, field=field)


def cone_diagonal(m) -> Barcode:
    """Barcode of the mapping cone of a morphism in diagonal form.

    ``m`` must be a direct sum of canonical degree-0 generators and zero
    rows/columns: every row and every column carries at most one nonzero
    entry, and each nonzero entry equals 1.  Per matched pair
    I=[a,b) -> J=[c,d) the cone contributes [b,d) in the source degree
    (when b < d) and [a,c) one degree up (when a < c); an unmatched source
    bar survives one degree up, an unmatched target bar in place.
    """
    one = getattr(m, "field").one
    src = m.source
    tgt = m.target
    row_of: Dict[int, int] = {}
    col_of: Dict[int, int] = {}
    for (t, s), val in m.entries.items():
        if val != one:
            raise ValueError(f"entry at {(t, s)} is {val!r}, not 1: not in diagonal form")
        if t in row_of or s in col_of:
            raise ValueError("row or column carries two entries: not in diagonal form")
        row_of[t] = s
        col_of[s] = t
    bars: List[Bar] = []
    for s, bar in enumerate(src.bars):
        d = bar.degree
        i = bar.interval
        if s not in col_of:
            bars.append(Bar(d + 1, i))
            continue
        j = tgt.bars[col_of[s]].interval
        if hom(i, j) is not DEG0:
            raise ValueError(f"matched pair {i} -> {j} is not a degree-0 generator")
        if i.hi < j.hi:
            bars.append(Bar(d, Interval(i.hi, j.hi)))
        if i.lo < j.lo:
            bars.append(Bar(d + 1, Interval(i.lo, j.lo)))
    for t, bar in enumerate(tgt.bars):
        if t not in row_of:
            bars.append(bar)
    return Barcode(bars)

"""Morphisms between barcodes as Hom-constrained sparse matrices.

A morphism F -> G is a matrix indexed by (target bar, source bar) whose
nonzero entries are only allowed where the two bars have equal degree and
the interval Hom is one-dimensional in degree 0.  Each such entry scales
the canonical generator between the two interval modules.

Composition is matrix composition *in the generator calculus*: after the
ordinary matrix product, any accumulated value sitting at a cell whose own
generator vanishes is dropped.  (Order-valid but support-disjoint cells act
as "phantom" entries: they carry matrix algebra but realize to the zero
map, and they can never contaminate a realizable cell under
order-respecting operations.)
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .barcodes import Bar, Barcode
from .fields import GF2
from .intervals import DEG0, hom

__all__ = [
    "Morphism",
    "make_morphism",
    "identity",
    "zero_morphism",
    "compose",
    "equals_tau",
    "tau_morphism",
    "merge_barcodes",
    "direct_sum",
]

Entry = Tuple[int, int]  # (target index, source index)


def _cell_allowed(src_bar: Bar, tgt_bar: Bar) -> bool:
    return src_bar.degree == tgt_bar.degree and hom(src_bar.interval, tgt_bar.interval) is DEG0


class Morphism:
    """Sparse Hom-constrained matrix between two barcodes (strict constructor).

    Raises ValueError if a nonzero entry violates the Hom constraint; use
    :func:`make_morphism` for the forgiving constructor that zeroes bad
    entries instead.
    """

    __slots__ = ("source", "target", "entries", "field", "zeroed")

    def __init__(self, source: Barcode, target: Barcode, entries: Mapping[Entry, object], field=GF2):
        clean: Dict[Entry, object] = {}
        for (t, s), raw in entries.items():
            if not (0 <= s < len(source) and 0 <= t < len(target)):
                raise IndexError(f"entry index {(t, s)} out of range")
            val = field.canon(raw)
            if val == field.zero:
                continue
            if not _cell_allowed(source.bars[s], target.bars[t]):
                raise ValueError(
                    f"entry at {(t, s)} not allowed: no degree-0 generator "
                    f"{source.bars[s].interval} -> {target.bars[t].interval}"
                )
            clean[(t, s)] = val
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "entries", dict(clean))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "zeroed", ())

    def __setattr__(self, *a):
        raise AttributeError("Morphism is immutable")

    def entry(self, t: int, s: int):
        return self.entries.get((t, s), self.field.zero)

    def is_zero(self) -> bool:
        return not self.entries

    def shift(self, c) -> "Morphism":
        """Translate source and target by c; the matrix is unchanged."""
        c = Fraction(c)
        return Morphism(self.source.shift(c), self.target.shift(c), self.entries, self.field)

    def restrict_source(self, indices: Sequence[int]) -> "Morphism":
        idx = sorted(set(indices))
        pos = {orig: k for k, orig in enumerate(idx)}
        ent = {(t, pos[s]): v for (t, s), v in self.entries.items() if s in pos}
        return Morphism(self.source.restrict(idx), self.target, ent, self.field)

    def restrict_target(self, indices: Sequence[int]) -> "Morphism":
        idx = sorted(set(indices))
        pos = {orig: k for k, orig in enumerate(idx)}
        ent = {(pos[t], s): v for (t, s), v in self.entries.items() if t in pos}
        return Morphism(self.source, self.target.restrict(idx), ent, self.field)

    def dense(self) -> List[List[object]]:
        z = self.field.zero
        mat = [[z] * len(self.source) for _ in range(len(self.target))]
        for (t, s), v in self.entries.items():
            mat[t][s] = v
        return mat

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.field == other.field
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.entries.items()))))

    def __repr__(self):
        return f"Morphism({len(self.source)}->{len(self.target)}, {len(self.entries)} entries, {self.field!r})"


def make_morphism(source: Barcode, target: Barcode, entries: Mapping[Entry, object], field=GF2) -> Morphism:
    """Build a morphism, forcing entries at forbidden cells to 0.

    The returned morphism records which entries were dropped in its
    ``zeroed`` attribute, and a warning is emitted when that happens.
    """
    kept: Dict[Entry, object] = {}
    zeroed: List[Entry] = []
    for (t, s), raw in entries.items():
        if not (0 <= s < len(source) and 0 <= t < len(target)):
            raise IndexError(f"entry index {(t, s)} out of range")
        val = field.canon(raw)
        if val == field.zero:
            continue
        if _cell_allowed(source.bars[s], target.bars[t]):
            kept[(t, s)] = val
        else:
            zeroed.append((t, s))
    m = Morphism(source, target, kept, field)
    if zeroed:
        warnings.warn(f"{len(zeroed)} entries had no generator to scale and were zeroed: {zeroed}")
        object.__setattr__(m, "zeroed", tuple(sorted(zeroed)))
    return m


def identity(b: Barcode, field=GF2) -> Morphism:
    return Morphism(b, b, {(i, i): field.one for i in range(len(b))}, field)


def zero_morphism(source: Barcode, target: Barcode, field=GF2) -> Morphism:
    return Morphism(source, target, {}, field)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """The composite "f then g" of f: A -> B and g: B -> C.

    Matrix product followed by the generator-calculus cleanup: a cell whose
    own generator vanishes is zeroed no matter what the sum accumulated.
    """
    if f.field != g.field:
        raise ValueError("mismatched scalar fields")
    if f.target != g.source:
        raise ValueError("mismatched middle barcode")
    field = f.field
    by_src: Dict[int, List[Tuple[int, object]]] = {}
    for (t, s), v in f.entries.items():
        by_src.setdefault(s, []).append((t, v))
    by_mid: Dict[int, List[Tuple[int, object]]] = {}
    for (t, s), v in g.entries.items():
        by_mid.setdefault(s, []).append((t, v))
    acc: Dict[Entry, object] = {}
    for s, f_col in by_src.items():
        for mid, fv in f_col:
            for t, gv in by_mid.get(mid, ()):
                key = (t, s)
                acc[key] = field.add(acc.get(key, field.zero), field.mul(gv, fv))
    out: Dict[Entry, object] = {}
    for (t, s), v in acc.items():
        if v == field.zero:
            continue
        if _cell_allowed(f.source.bars[s], g.target.bars[t]):
            out[(t, s)] = v
    return Morphism(f.source, g.target, out, field)


def tau_morphism(b: Barcode, c, field=None) -> Morphism:
    """Diagonal comparison morphism B -> shift(B, c) for c >= 0."""
    field = field or GF2
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"negative shift {c}")
    ent = {(i, i): field.one for i, bar in enumerate(b.bars) if bar.interval.length > c}
    return Morphism(b, b.shift(c), ent, field)


def equals_tau(f: Morphism, c) -> bool:
    """Is f entrywise equal to the canonical comparison at shift c?"""
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"negative shift {c}")
    if f.target != f.source.shift(c):
        raise ValueError("target is not the c-shift of the source")
    want = {
        (i, i): f.field.one
        for i, bar in enumerate(f.source.bars)
        if bar.interval.length > c
    }
    return f.entries == want


def merge_barcodes(parts: Sequence[Barcode]) -> Tuple[Barcode, List[List[int]]]:
    """Disjoint union of barcodes plus, per part, the index of each bar
    inside the merged canonical ordering."""
    tagged = []
    for pi, part in enumerate(parts):
        for i, bar in enumerate(part.bars):
            tagged.append((bar.key(), pi, i, bar))
    tagged.sort(key=lambda rec: (rec[0], rec[1], rec[2]))
    merged = Barcode(rec[3] for rec in tagged)
    maps: List[List[int]] = [[0] * len(p) for p in parts]
    for new_idx, (_, pi, i, _) in enumerate(tagged):
        maps[pi][i] = new_idx
    return merged, maps


def direct_sum(morphisms: Sequence[Morphism]) -> Morphism:
    """Block-diagonal sum; sources and targets are merged canonically."""
    if not morphisms:
        raise ValueError("empty direct sum")
    field = morphisms[0].field
    if any(m.field != field for m in morphisms):
        raise ValueError("mismatched scalar fields")
    src, src_maps = merge_barcodes([m.source for m in morphisms])
    tgt, tgt_maps = merge_barcodes([m.target for m in morphisms])
    ent: Dict[Entry, object] = {}
    for k, m in enumerate(morphisms):
        for (t, s), v in m.entries.items():
            ent[(tgt_maps[k][t], src_maps[k][s])] = v
    return Morphism(src, tgt, ent, field)

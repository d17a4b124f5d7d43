"""Diagonalization of approximate round-trip matrices.

Gauss-Jordan elimination on the target side, constrained by the interval
order: a pivot row can only clear rows whose intervals dominate the
pivot's interval coordinatewise, so each column's pivot must be a least
element of that column's support.  A support with no least element is a
genuine order-theoretic obstruction -- no automorphism of the target can
diagonalize such a matrix -- and we raise instead of guessing.

The elimination tracks the accumulated target automorphism and its
inverse alongside the working matrix.  Every claimed identity (the
factorization, the two inverse laws, the diagonal shape, the endpoint
drift) is re-checked on the result before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from .barcodes import Barcode
from .intervals import DEG0, hom
from .morphisms import Morphism, compose, equals_tau, identity

__all__ = [
    "DiagonalizationError",
    "CanonicalFormResult",
    "StageDiagonalization",
    "canonical_form",
    "diagonalize_system",
]


class DiagonalizationError(Exception):
    """Raised when a matrix admits no order-compatible diagonalization, or
    when the inputs fail the contract that would guarantee one."""

    def __init__(self, message: str, stage=None):
        super().__init__(message)
        self.stage = stage


@dataclass(frozen=True)
class CanonicalFormResult:
    """Outcome of :func:`canonical_form`.

    ``diagonalized`` equals phi composed after the input and has entries
    exactly ``{(sigma[i], i): 1}``; ``phi``/``phi_inverse`` are mutually
    inverse automorphisms of the target.
    """

    phi: Morphism
    phi_inverse: Morphism
    diagonalized: Morphism
    sigma: Mapping[int, int]


@dataclass(frozen=True)
class StageDiagonalization:
    stage: int
    live: Tuple[int, ...]
    result: CanonicalFormResult


class _Tracked:
    """Hom-constrained working matrix: writes to forbidden cells vanish.

    Forbidden cells can only ever hold values that the generator calculus
    already maps to zero (the row operations we apply are themselves
    morphisms, and composition kills those paths), so dropping them keeps
    the matrix equal to the true composite at every step.
    """

    __slots__ = ("src", "tgt", "entries", "field")

    def __init__(self, src_bars, tgt_bars, entries, field):
        self.src = list(src_bars)
        self.tgt = list(tgt_bars)
        self.entries: Dict[Tuple[int, int], object] = dict(entries)
        self.field = field

    @classmethod
    def from_morphism(cls, m: Morphism) -> "_Tracked":
        return cls(m.source.bars, m.target.bars, m.entries, m.field)

    @classmethod
    def identity_on(cls, b: Barcode, field) -> "_Tracked":
        ent = {(i, i): field.one for i in range(len(b))}
        return cls(b.bars, b.bars, ent, field)

    def _allowed(self, t: int, s: int) -> bool:
        sb, tb = self.src[s], self.tgt[t]
        return sb.degree == tb.degree and hom(sb.interval, tb.interval) is DEG0

    def _put(self, t: int, s: int, val) -> None:
        if val == self.field.zero or not self._allowed(t, s):
            self.entries.pop((t, s), None)
        else:
            self.entries[(t, s)] = val

    def row(self, r: int) -> List[Tuple[int, int]]:
        return [k for k in self.entries if k[0] == r]

    def col(self, c: int) -> List[Tuple[int, int]]:
        return [k for k in self.entries if k[1] == c]

    def rowscale(self, r: int, lam) -> None:
        for t, s in self.row(r):
            self._put(t, s, self.field.mul(lam, self.entries[(t, s)]))

    def rowadd(self, t: int, r: int, lam) -> None:
        """row_t += lam * row_r (t != r)."""
        for _, s in self.row(r):
            cur = self.entries.get((t, s), self.field.zero)
            self._put(t, s, self.field.add(cur, self.field.mul(lam, self.entries[(r, s)])))

    def colscale(self, c: int, lam) -> None:
        for t, s in self.col(c):
            self._put(t, s, self.field.mul(lam, self.entries[(t, s)]))

    def coladd(self, dst: int, src: int, lam) -> None:
        """col_dst += lam * col_src (dst != src)."""
        for t, _ in self.col(src):
            cur = self.entries.get((t, dst), self.field.zero)
            self._put(t, dst, self.field.add(cur, self.field.mul(lam, self.entries[(t, src)])))

    def to_morphism(self, source: Barcode, target: Barcode) -> Morphism:
        return Morphism(source, target, self.entries, self.field)


def canonical_form(u: Morphism, v: Morphism, eps) -> CanonicalFormResult:
    """Diagonalize u by an automorphism of its target.

    Contract: u goes from G to G', v goes back from G' to the eps-shift
    of G, every bar of G is longer than eps, both barcodes sit in a
    single common degree, and v after u equals the canonical comparison
    at shift eps.  Under that contract a diagonalization by target
    automorphisms exists and is found here; violations raise
    :class:`DiagonalizationError`.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise DiagonalizationError(f"negative shift {eps}")
    G, Gp = u.source, u.target
    field = u.field
    if v.field != field:
        raise DiagonalizationError("mismatched scalar fields")
    if v.source != Gp or v.target != G.shift(eps):
        raise DiagonalizationError("v must map the target of u back to the shifted source")
    if not G.is_degree_pure() or not Gp.is_degree_pure():
        raise DiagonalizationError("barcodes must be concentrated in a single degree")
    if len(G) and len(Gp) and G.bars[0].degree != Gp.bars[0].degree:
        raise DiagonalizationError("source and target sit in different degrees")
    for bar in G.bars:
        if not (bar.interval.length > eps):
            raise DiagonalizationError(f"bar {bar!r} is not longer than the shift {eps}")
    if not equals_tau(compose(u, v), eps):
        raise DiagonalizationError("round trip is not the canonical comparison map")

    m = _Tracked.from_morphism(u)
    phi = _Tracked.identity_on(Gp, field)
    phi_inv = _Tracked.identity_on(Gp, field)
    used = set()
    sigma: Dict[int, int] = {}

    for col in range(len(G)):
        support = sorted(t for (t, s) in m.entries if s == col)
        if not support:
            # Cannot happen when the round-trip contract holds: the
            # comparison map keeps a unit on every (long) diagonal cell,
            # and the tracked matrix stays a genuine factor of it.
            raise DiagonalizationError(f"column {col} has empty support")
        lo_min = min(Gp.bars[t].interval.lo for t in support)
        hi_min = min(Gp.bars[t].interval.hi for t in support)
        least = [
            t
            for t in support
            if Gp.bars[t].interval.lo == lo_min and Gp.bars[t].interval.hi == hi_min
        ]
        if not least:
            raise DiagonalizationError(
                f"column {col}: support intervals are incomparable (no least element)"
            )
        fresh = [t for t in least if t not in used]
        if not fresh:
            raise DiagonalizationError(
                f"column {col}: every least support row already pivots another column"
            )
        r = fresh[0]
        lam = m.entries[(r, col)]
        if lam != field.one:
            inv = field.inv(lam)
            m.rowscale(r, inv)
            phi.rowscale(r, inv)
            phi_inv.colscale(r, lam)
        for t in support:
            if t == r:
                continue
            mu = m.entries.get((t, col))
            if mu is None:
                continue
            neg = field.neg(mu)
            m.rowadd(t, r, neg)
            phi.rowadd(t, r, neg)
            phi_inv.coladd(r, t, mu)
        used.add(r)
        sigma[col] = r

    phi_m = phi.to_morphism(Gp, Gp)
    phi_inv_m = phi_inv.to_morphism(Gp, Gp)
    diag = m.to_morphism(G, Gp)

    ident = identity(Gp, field)
    assert compose(u, phi_m) == diag, "tracked matrix drifted from the recomputed composite"
    assert compose(phi_m, phi_inv_m) == ident, "tracked inverse fails on the left"
    assert compose(phi_inv_m, phi_m) == ident, "tracked inverse fails on the right"
    assert diag.entries == {(r, i): field.one for i, r in sigma.items()}
    assert len(set(sigma.values())) == len(sigma)

    for i, r in sigma.items():
        src = G.bars[i].interval
        tgt = Gp.bars[r].interval
        ok = (
            src.lo <= tgt.lo
            and tgt.lo <= src.lo + eps
            and src.hi <= tgt.hi
            and tgt.hi <= src.hi + eps
        )
        if not ok:
            raise DiagonalizationError(
                f"matched pair {src} -> {tgt} drifts by more than {eps}"
            )

    return CanonicalFormResult(phi=phi_m, phi_inverse=phi_inv_m, diagonalized=diag, sigma=sigma)


def diagonalize_system(
    stages: Sequence[Barcode],
    forward: Sequence[Morphism],
    reverse: Sequence[Morphism],
    slacks: Sequence,
) -> List[StageDiagonalization]:
    """Diagonalize every comparison map of a tower, stage by stage.

    At stage n only bars longer than twice the stage slack take part; the
    forward map is restricted to those source bars, the reverse map to the
    matching rows of its target.  After each stage the remaining maps are
    rewritten in the new basis of the shared middle object, which keeps
    every later round-trip contract intact.
    """
    n_maps = len(stages) - 1
    if len(forward) != n_maps or len(reverse) != n_maps or len(slacks) != n_maps:
        raise ValueError("need exactly one forward map, reverse map and slack per step")
    slacks = [Fraction(s) for s in slacks]
    fwd = list(forward)
    rev = list(reverse)
    for n in range(n_maps):
        if fwd[n].source != stages[n] or fwd[n].target != stages[n + 1]:
            raise ValueError(f"forward map {n} does not match the stage barcodes")
        if rev[n].source != stages[n + 1] or rev[n].target != stages[n].shift(slacks[n]):
            raise ValueError(f"reverse map {n} does not match the shifted stage barcodes")

    out: List[StageDiagonalization] = []
    for n in range(n_maps):
        eps = slacks[n]
        live = tuple(
            i for i, bar in enumerate(stages[n].bars) if bar.interval.length > 2 * eps
        )
        u = fwd[n].restrict_source(live)
        v = rev[n].restrict_target(live)
        try:
            res = canonical_form(u, v, eps)
        except DiagonalizationError as err:
            raise DiagonalizationError(f"stage {n}: {err}", stage=n) from err
        out.append(StageDiagonalization(stage=n, live=live, result=res))
        if n + 1 < n_maps:
            fwd[n + 1] = compose(res.phi_inverse, fwd[n + 1])
            rev[n + 1] = compose(rev[n + 1], res.phi.shift(slacks[n + 1]))
    return out

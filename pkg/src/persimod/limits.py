"""Towers of barcodes: truncated colimits, defect bounds, Cauchy completion.

A tower is a finite run of barcodes with forward comparison maps and a
nonnegative slack per step: the reverse map at slack eps undoes a step up
to the canonical comparison.  Diagonalizing every step (stage by stage,
rebasing as we go) turns the tower into chains of bars; the truncated
colimit reports the last witnessed endpoints of every surviving chain,
plus bars born at the final stage, together with a certified bound on how
far the truncation can still drift.

Cauchy completion subsamples a sequence until consecutive distances halve,
re-anchors every stage by its accumulated slack so the comparison maps
become honest tower maps, and reads the limit off the chains -- exactly
when the endpoint histories stabilize or follow a geometric law, and as
the last witnessed value otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field as _dc_field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .barcodes import Bar, Barcode, cone_diagonal, gamma_to_zero
from .canonical import DiagonalizationError, StageDiagonalization, diagonalize_system
from .fields import GF2, solve_linear
from .intervals import DEG0, ExtRat, Interval, hom
from .interleaving import DEFAULT_BUDGET, DistanceReport, InterleavingCertificate, gamma
from .morphisms import Morphism, compose, equals_tau, tau_morphism

__all__ = [
    "CompletionError",
    "ToleranceError",
    "InductiveSystem",
    "Chain",
    "HocolimResult",
    "CompletionResult",
    "hocolim",
    "defect_check",
    "complete_cauchy",
    "subsample_system",
]


class CompletionError(Exception):
    """A Cauchy-completion contract failed (not Cauchy, missing certificate)."""


class ToleranceError(CompletionError):
    """The completed barcode missed the requested tolerance."""


class InductiveSystem:
    """A finite tower: stages, forward maps, per-step slacks, and (optional)
    reverse maps.  Construction verifies composability and, where a reverse
    map is given, that the round trip is the canonical comparison."""

    __slots__ = ("stages", "maps", "slacks", "reverses", "field")

    def __init__(self, stages, maps, slacks, reverses=None, field=None):
        stages = tuple(stages)
        maps = tuple(maps)
        slacks = tuple(Fraction(s) for s in slacks)
        if reverses is None:
            reverses = (None,) * len(maps)
        reverses = tuple(reverses)
        if len(maps) != len(stages) - 1:
            raise ValueError("need exactly one forward map per consecutive stage pair")
        if len(slacks) != len(maps) or len(reverses) != len(maps):
            raise ValueError("need one slack and one (possibly absent) reverse map per step")
        for n, f in enumerate(maps):
            if f.source != stages[n] or f.target != stages[n + 1]:
                raise ValueError(f"forward map {n} does not connect stages {n} -> {n + 1}")
        for n, (eps, g) in enumerate(zip(slacks, reverses)):
            if eps < 0:
                raise ValueError(f"negative slack at step {n}")
            if g is None:
                continue
            if g.source != stages[n + 1] or g.target != stages[n].shift(eps):
                raise ValueError(f"reverse map {n} does not match the slack-{eps} shift")
            if not equals_tau(compose(maps[n], g), eps):
                raise ValueError(f"round trip at step {n} is not the canonical comparison")
        if field is None:
            field = maps[0].field if maps else GF2
        for f in maps:
            if f.field != field:
                raise ValueError("mixed scalar fields in forward maps")
        for g in reverses:
            if g is not None and g.field != field:
                raise ValueError("mixed scalar fields in reverse maps")
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "slacks", slacks)
        object.__setattr__(self, "reverses", reverses)
        object.__setattr__(self, "field", field)

    def __setattr__(self, *a):
        raise AttributeError("InductiveSystem is immutable")

    def __len__(self):
        return len(self.stages)

    def with_reverses(self) -> "InductiveSystem":
        """Fill in missing reverse maps by solving the (linear) round-trip
        equation against the given forward map; abort loudly on failure."""
        if all(g is not None for g in self.reverses):
            return self
        new_rev = []
        for n, g in enumerate(self.reverses):
            if g is None:
                g = _solve_reverse(self.maps[n], self.slacks[n], self.field)
                if g is None:
                    raise ValueError(
                        f"stage {n}: no reverse map realizes the slack-{self.slacks[n]} "
                        "round trip; supply one explicitly"
                    )
            new_rev.append(g)
        return InductiveSystem(self.stages, self.maps, self.slacks, new_rev, self.field)


def _solve_reverse(f: Morphism, eps: Fraction, fld) -> Optional[Morphism]:
    """One-sided inverse-up-to-comparison: find g with g∘f = tau_eps.

    Linear in the entries of g, so plain Gaussian elimination decides it.
    XXX free unknowns default to zero, which biases synthesized reverses
    toward sparse ones; any solution satisfies the tower contract, so this
    only matters for readability of dumped systems.
    """
    F, Fp = f.source, f.target
    shifted = F.shift(eps)
    cells = []
    for j, pbar in enumerate(Fp.bars):
        for i, sbar in enumerate(shifted.bars):
            if pbar.degree == sbar.degree and hom(pbar.interval, sbar.interval) is DEG0:
                cells.append((i, j))
    pos = {c: k for k, c in enumerate(cells)}
    rows: List[List] = []
    rhs: List = []
    zero, one = fld.zero, fld.one
    for i, src in enumerate(F.bars):
        for ip, tgt in enumerate(shifted.bars):
            if src.degree != tgt.degree or hom(src.interval, tgt.interval) is not DEG0:
                continue
            row = [zero] * len(cells)
            hit = False
            for (j, i_src), coef in f.entries.items():
                if i_src != i:
                    continue
                k = pos.get((ip, j))
                if k is not None:
                    row[k] = fld.add(row[k], coef)
                    hit = True
            want = one if (ip == i and src.interval.length > eps) else zero
            if hit or want != zero:
                rows.append(row)
                rhs.append(want)
    sol = solve_linear(rows, rhs, fld)
    if sol is None:
        return None
    entries = {c: v for c, v in zip(cells, sol) if v != zero}
    return Morphism(Fp, shifted, entries, fld)


@dataclass(frozen=True)
class Chain:
    """One bar followed through the tower: indices[k] is its bar index at
    stage birth+k.  Dead chains fell under the liveness threshold before
    the final stage and are excluded from the output."""

    degree: int
    birth: int
    indices: Tuple[int, ...]
    alive: bool


@dataclass(frozen=True)
class HocolimResult:
    barcode: Barcode
    error_bound: ExtRat
    chains: Tuple[Chain, ...]
    stage_data: Mapping[int, Tuple[StageDiagonalization, ...]]

    def __iter__(self):
        yield self.barcode
        yield self.error_bound


class _Piece:
    """One degree's slice of a system, with per-stage index maps back into
    the original stage barcodes."""

    __slots__ = ("degree", "stages", "maps", "reverses", "indices", "records")

    def __init__(self, degree, stages, maps, reverses, indices):
        self.degree = degree
        self.stages = stages
        self.maps = maps
        self.reverses = reverses
        self.indices = indices
        self.records: List[StageDiagonalization] = []


def _split_system(system: InductiveSystem) -> List[_Piece]:
    degrees = sorted({bar.degree for st in system.stages for bar in st.bars})
    pieces = []
    splits = [st.split_by_degree() for st in system.stages]
    for deg in degrees:
        stages_d, idx_d = [], []
        for sp in splits:
            piece, idx = sp.get(deg, (Barcode([]), []))
            stages_d.append(piece)
            idx_d.append(list(idx))
        maps_d = [
            f.restrict_source(idx_d[n]).restrict_target(idx_d[n + 1])
            for n, f in enumerate(system.maps)
        ]
        revs_d = [
            g.restrict_source(idx_d[n + 1]).restrict_target(idx_d[n])
            for n, g in enumerate(system.reverses)
        ]
        pieces.append(_Piece(deg, stages_d, maps_d, revs_d, idx_d))
    return pieces


def _diagonalized_pieces(system: InductiveSystem) -> List[_Piece]:
    system = system.with_reverses()
    pieces = _split_system(system)
    for p in pieces:
        p.records = diagonalize_system(p.stages, p.maps, p.reverses, system.slacks)
    return pieces


def _follow_chains(records: Sequence[StageDiagonalization]):
    """Walk sigma through the stages.  Returns (chains, heads) where heads
    maps final-stage bar index -> its chain."""
    active: Dict[int, dict] = {}
    chains: List[dict] = []
    for rec in records:
        live = rec.live
        live_set = set(live)
        pos = {i: k for k, i in enumerate(live)}
        for i in live:
            if i not in active:
                ch = {"birth": rec.stage, "indices": [i], "alive": True}
                chains.append(ch)
                active[i] = ch
        nxt: Dict[int, dict] = {}
        for i, ch in active.items():
            if i in live_set:
                j = rec.result.sigma[pos[i]]
                ch["indices"].append(j)
                nxt[j] = ch
            else:
                ch["alive"] = False
        active = nxt
    return chains, active


def _extended_diagonal(piece: _Piece, k: int, fld) -> Morphism:
    """The stage-k diagonalized map as a full-stage morphism: zero on the
    columns that were below threshold."""
    rec = piece.records[k]
    entries = {
        (rec.result.sigma[p], rec.live[p]): fld.one for p in range(len(rec.live))
    }
    return Morphism(piece.stages[k], piece.stages[k + 1], entries, fld)


def hocolim(system: InductiveSystem) -> HocolimResult:
    """Truncated colimit of the tower: surviving chains' last bars plus
    final-stage newborns above the last slack, with an error bound of four
    times the gamma-size of the last diagonalized step's cone."""
    n_steps = len(system.maps)
    if n_steps == 0:
        base = system.stages[0]
        chains = tuple(
            Chain(bar.degree, 0, (i,), True) for i, bar in enumerate(base.bars)
        )
        return HocolimResult(base, ExtRat(0), chains, {})

    pieces = _diagonalized_pieces(system)
    out_bars: List[Bar] = []
    all_chains: List[Chain] = []
    last_cone_bars: List[Bar] = []
    stage_data: Dict[int, Tuple[StageDiagonalization, ...]] = {}
    fld = system.field
    final_slack = system.slacks[-1]

    for p in pieces:
        raw_chains, heads = _follow_chains(p.records)
        final_piece = p.stages[-1]
        for j, bar in enumerate(final_piece.bars):
            if j not in heads and bar.interval.length > final_slack:
                raw_chains.append({"birth": n_steps, "indices": [j], "alive": True})
        for ch in raw_chains:
            glob = tuple(
                p.indices[ch["birth"] + k][i] for k, i in enumerate(ch["indices"])
            )
            all_chains.append(Chain(p.degree, ch["birth"], glob, ch["alive"]))
            if ch["alive"]:
                out_bars.append(final_piece.bars[ch["indices"][-1]])
        last_cone_bars.extend(cone_diagonal(_extended_diagonal(p, n_steps - 1, fld)).bars)
        stage_data[p.degree] = tuple(p.records)

    bound = 4 * gamma_to_zero(Barcode(last_cone_bars))
    return HocolimResult(Barcode(out_bars), bound, tuple(all_chains), stage_data)


def defect_check(system: InductiveSystem, n: int):
    """Compare the cone-size of the composite comparison from stage n into
    the final stage against twice the summed per-step cone sizes.  Returns
    (lhs, rhs, lhs <= rhs)."""
    n_steps = len(system.maps)
    if not 0 <= n <= n_steps:
        raise ValueError(f"stage index {n} outside 0..{n_steps}")
    if n == n_steps:
        return ExtRat(0), ExtRat(0), True
    pieces = _diagonalized_pieces(system)
    fld = system.field
    composite_cone: List[Bar] = []
    step_cones: List[List[Bar]] = [[] for _ in range(n, n_steps)]
    for p in pieces:
        ext = [_extended_diagonal(p, k, fld) for k in range(n, n_steps)]
        comp = ext[0]
        for nxt in ext[1:]:
            comp = compose(comp, nxt)
        composite_cone.extend(cone_diagonal(comp).bars)
        for k, e in enumerate(ext):
            step_cones[k].extend(cone_diagonal(e).bars)
    lhs = gamma_to_zero(Barcode(composite_cone))
    rhs = ExtRat(0)
    for bars in step_cones:
        rhs = rhs + gamma_to_zero(Barcode(bars))
    rhs = 2 * rhs
    return lhs, rhs, lhs <= rhs


def subsample_system(system: InductiveSystem, indices: Sequence[int]) -> InductiveSystem:
    """Restrict the tower to the given strictly increasing stage indices,
    composing the skipped maps and accumulating their slacks."""
    idx = list(indices)
    if not idx or any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing and nonempty")
    if idx[0] < 0 or idx[-1] >= len(system.stages):
        raise ValueError("indices out of range")
    stages = [system.stages[i] for i in idx]
    maps, slacks, reverses = [], [], []
    for a, b in zip(idx, idx[1:]):
        f = system.maps[a]
        for k in range(a + 1, b):
            f = compose(f, system.maps[k])
        maps.append(f)
        slacks.append(sum(system.slacks[a:b], Fraction(0)))
        g = system.reverses[b - 1]
        if g is not None:
            acc = Fraction(system.slacks[b - 1])
            for k in range(b - 2, a - 1, -1):
                gk = system.reverses[k]
                if gk is None:
                    g = None
                    break
                g = compose(g, gk.shift(acc))
                acc += system.slacks[k]
        reverses.append(g)
    return InductiveSystem(stages, maps, slacks, reverses, system.field)


@dataclass(frozen=True)
class CompletionResult:
    barcode: Barcode
    start: int
    indices: Tuple[int, ...]
    certificates: Tuple[Mapping[int, InterleavingCertificate], ...]
    final_gamma: DistanceReport

    def __iter__(self):
        yield self.barcode
        yield self.certificates


def _extrapolate(values: Sequence[ExtRat]) -> ExtRat:
    """Limit of an endpoint history: exact when it stabilizes or follows a
    constant-ratio geometric progression, else the last witnessed value."""
    if all(v == values[0] for v in values):
        return values[0]
    if any(not v.is_finite for v in values):
        return values[-1]
    vals = [v.as_fraction() for v in values]
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    if len(diffs) >= 3 and all(d != 0 for d in diffs):
        ratios = {b / a for a, b in zip(diffs, diffs[1:])}
        if len(ratios) == 1:
            r = ratios.pop()
            if abs(r) < 1:
                return ExtRat(vals[-1] + diffs[-1] * r / (1 - r))
    return ExtRat(vals[-1])


def complete_cauchy(
    seq: Sequence[Barcode],
    tol,
    *,
    start: Optional[int] = None,
    exact: bool = True,
    field=GF2,
    method: str = "matching",
    budget: int = DEFAULT_BUDGET,
) -> CompletionResult:
    """Limit of a Cauchy sequence of barcodes, to within `tol`.

    The sequence is subsampled to a suffix whose consecutive distances are
    at most 1, 1/2, 1/4, ...; certified interleavings for each step are
    re-anchored into an honest tower whose colimit is read off chainwise.
    Raises CompletionError when no suffix is Cauchy (or `start` names one
    that is not) and ToleranceError when the result misses `tol` against
    the last input stage.
    """
    seq = list(seq)
    if not seq:
        raise CompletionError("empty sequence")
    tol = Fraction(tol)
    kw = dict(field=field, method=method, budget=budget)

    steps = [gamma(seq[i], seq[i + 1], **kw) for i in range(len(seq) - 1)]

    def suffix_ok(s: int) -> bool:
        return all(
            steps[s + j].value <= Fraction(1, 2 ** j) for j in range(len(steps) - s)
        )

    if start is None:
        start = next((s for s in range(len(seq)) if suffix_ok(s)), None)
        if start is None:
            raise CompletionError(
                "no suffix has consecutive distances bounded by 1, 1/2, 1/4, ..."
            )
    elif not (0 <= start < len(seq)) or not suffix_ok(start):
        raise CompletionError(f"requested start {start} is not a Cauchy suffix")

    sub = seq[start:]
    indices = tuple(range(start, len(seq)))
    m = len(sub) - 1

    if m == 0:
        final = gamma(sub[0], seq[-1], **kw)
        if final.value > tol:
            raise ToleranceError(f"gamma {final.value} exceeds tolerance {tol}")
        return CompletionResult(sub[0], start, indices, (), final)

    # Per-degree certificates for every step; degrees never interact.
    degrees = sorted({bar.degree for b in sub for bar in b.bars})
    splits = [b.split_by_degree() for b in sub]
    step_certs: List[Dict[int, InterleavingCertificate]] = [dict() for _ in range(m)]
    out_bars: List[Bar] = []

    for deg in degrees:
        stages_h = [sp.get(deg, (Barcode([]), []))[0] for sp in splits]
        certs: List[InterleavingCertificate] = []
        for j in range(m):
            rep = gamma(stages_h[j], stages_h[j + 1], **kw)
            if rep.certificate is None:
                raise CompletionError(
                    f"no certificate for degree {deg} between stages {start + j} and {start + j + 1}"
                )
            certs.append(rep.certificate)
            step_certs[j][deg] = rep.certificate
        # Cumulative anchors: eps_j sums the remaining per-step costs, so
        # the re-anchored forward maps need no negative shifts.
        eps = [Fraction(0)] * (m + 1)
        for j in range(m - 1, -1, -1):
            eps[j] = eps[j + 1] + certs[j].total
        anchored = [stages_h[j].shift(-eps[j]) for j in range(m + 1)]
        fwd, rev, slk = [], [], []
        for j in range(m):
            pad = tau_morphism(anchored[j + 1].shift(-certs[j].b), certs[j].b, field)
            fwd.append(compose(certs[j].u.shift(-eps[j]), pad))
            rev.append(certs[j].v.shift(-eps[j + 1]))
            slk.append(certs[j].b + certs[j].total)
        system = InductiveSystem(anchored, fwd, slk, rev, field)
        res = hocolim(system)
        if not exact:
            out_bars.extend(res.barcode.bars)
            continue
        for ch in res.chains:
            if not ch.alive:
                continue
            los, his = [], []
            for k, bar_idx in enumerate(ch.indices):
                stage = ch.birth + k
                bar = anchored[stage].bars[bar_idx]
                los.append(bar.interval.lo + eps[stage])
                his.append(bar.interval.hi + eps[stage])
            lo, hi = _extrapolate(los), _extrapolate(his)
            if lo < hi:
                out_bars.append(Bar(deg, Interval(lo, hi)))

    output = Barcode(out_bars)
    final = gamma(output, seq[-1], **kw)
    if final.value > tol:
        raise ToleranceError(f"gamma {final.value} exceeds tolerance {tol}")
    return CompletionResult(output, start, indices, tuple(step_certs), final)

"""Sublevel-set persistence of piecewise-linear functions and the min/max
spectral numbers read off a barcode's essential bars.

Two conventions coexist: homological reports have left-infinite essential
bars (and the lower spectral number lives in degree -1), sublevel reports
have right-infinite ones.  `left_infinite_form` converts sublevel output
into the homological convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .barcodes import Bar, Barcode
from .intervals import ExtRat, Interval, NEG_INF, POS_INF

__all__ = [
    "PLFunction",
    "SpectralReport",
    "sublevel_barcode",
    "spectral_invariants",
    "left_infinite_form",
]


@dataclass(frozen=True)
class PLFunction:
    """Piecewise-linear function given by samples at sorted breakpoints.

    domain "interval": linear between consecutive breakpoints.
    domain "circle": the last sample additionally connects back to the
    first, so the breakpoint list reads out one full turn.
    """

    domain: str
    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    def __init__(self, domain, breakpoints, values):
        if domain not in ("interval", "circle"):
            raise ValueError(f"unknown domain {domain!r}")
        bps = tuple(Fraction(b) for b in breakpoints)
        vals = tuple(Fraction(v) for v in values)
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values differ in length")
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @property
    def min_value(self) -> Fraction:
        return min(self.values)

    @property
    def max_value(self) -> Fraction:
        return max(self.values)


def sublevel_barcode(f: PLFunction) -> Barcode:
    """Sublevel-set persistence of a PL function on an interval or circle.

    Degree-0 bars come from the merge tree (elder rule: on a tie the lower
    sample index survives); the essential degree-0 bar is [min f, +inf).
    On the circle the cycle closes at the last edge in filtration order,
    contributing an essential degree-1 bar at that value -- which is the
    global maximum.  Zero-length bars are dropped.
    """
    m = len(f.values)
    edges = [(i, i + 1) for i in range(m - 1)]
    if f.domain == "circle":
        edges.append((m - 1, 0))

    # birth[v] = (value, index): lexicographic order encodes the elder rule.
    birth = {v: (f.values[v], v) for v in range(m)}
    parent = list(range(m))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    bars = []
    order = sorted(edges, key=lambda e: (max(f.values[e[0]], f.values[e[1]]), e))
    for i, j in order:
        level = max(f.values[i], f.values[j])
        ri, rj = find(i), find(j)
        if ri == rj:
            # cycle-closing edge: only the circle has one
            bars.append(Bar(1, Interval(level, POS_INF)))
            continue
        elder, younger = (ri, rj) if birth[ri] <= birth[rj] else (rj, ri)
        died = birth[younger][0]
        if died < level:
            bars.append(Bar(0, Interval(died, level)))
        parent[younger] = elder
        birth[elder] = min(birth[elder], birth[younger])

    roots = {find(v) for v in range(m)}
    for r in sorted(roots):
        bars.append(Bar(0, Interval(birth[r][0], POS_INF)))
    return Barcode(bars)


@dataclass(frozen=True)
class SpectralReport:
    """Essential-endpoint spectrum of a barcode with its extremal values."""

    invariants: Tuple[Tuple[int, ExtRat], ...]
    c_minus: Fraction
    c_plus: Fraction

    @property
    def gamma(self) -> Fraction:
        return self.c_plus - self.c_minus


def _unique_essential(bars, degree, what):
    found = [b for b in bars if b.degree == degree]
    if len(found) != 1:
        raise ValueError(
            f"expected exactly one essential bar in degree {degree} ({what}), "
            f"found {len(found)}"
        )
    return found[0]


def spectral_invariants(b: Barcode, convention: str, dim_n: int) -> SpectralReport:
    """Locate the extremal essential bars by degree and report c- <= c+.

    convention "LeftInfinite": essential bars look like [-inf, c); the
    lower number sits in degree -1 and the upper in degree dim_n - 1, read
    at the finite right endpoint.  convention "Sublevel": essential bars
    look like [c, +inf); degree 0 carries the lower number and degree
    dim_n the upper, read at the left endpoint.
    """
    if convention == "LeftInfinite":
        essential = [x for x in b.bars if x.interval.lo == NEG_INF]
        deg_lo, deg_hi = -1, dim_n - 1
        read = lambda bar: bar.interval.hi
    elif convention == "Sublevel":
        essential = [x for x in b.bars if x.interval.hi == POS_INF]
        deg_lo, deg_hi = 0, dim_n
        read = lambda bar: bar.interval.lo
    else:
        raise ValueError(f"unknown convention {convention!r}")

    low = _unique_essential(essential, deg_lo, "lower spectral number")
    high = low if deg_hi == deg_lo else _unique_essential(essential, deg_hi, "upper spectral number")
    c_minus, c_plus = read(low), read(high)
    if not (c_minus.is_finite and c_plus.is_finite):
        raise ValueError("spectral numbers must be finite")
    c_minus, c_plus = c_minus.as_fraction(), c_plus.as_fraction()
    if c_minus > c_plus:
        raise ValueError(f"lower spectral number {c_minus} exceeds upper {c_plus}")
    invariants = tuple(sorted((x.degree, read(x)) for x in essential))
    return SpectralReport(invariants, c_minus, c_plus)


def left_infinite_form(b: Barcode) -> Barcode:
    """Convert a sublevel barcode to the homological convention: each
    right-infinite bar (d, [a, +inf)) becomes (d-1, [-inf, a)); finite
    bars are untouched."""
    out = []
    for bar in b.bars:
        if bar.interval.hi == POS_INF:
            out.append(Bar(bar.degree - 1, Interval(NEG_INF, bar.interval.lo)))
        else:
            out.append(bar)
    return Barcode(out)

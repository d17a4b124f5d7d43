import random
from fractions import Fraction

import pytest

from persimod import Barcode, Interval
from persimod.intervals import hom, DEG0
from persimod.morphisms import Morphism


@pytest.fixture
def rng():
    return random.Random(0xBAC0DE)


def rand_barcode(rng, n_bars, degrees=(0,), lo_range=(0, 10), den=4, max_len=10):
    """Random barcode with rational endpoints of bounded denominator."""
    bars = []
    for _ in range(n_bars):
        lo = Fraction(rng.randint(lo_range[0] * den, lo_range[1] * den), den)
        ln = Fraction(rng.randint(1, max_len * den), den)
        bars.append((rng.choice(degrees), Interval(lo, lo + ln)))
    return Barcode(bars)


def rand_plf(rng, domain, max_breaks=12, den=4, val_range=(0, 10)):
    """Random piecewise-linear function; low denominators make ties common."""
    from persimod.spectral import PLFunction

    m = rng.randint(2, max_breaks)
    bps = sorted(rng.sample(range(4 * val_range[1] + 1), m))
    vals = [Fraction(rng.randint(val_range[0] * den, val_range[1] * den), den)
            for _ in range(m)]
    return PLFunction(domain, [Fraction(b, 4) for b in bps], vals)


def rand_realized_morphism(rng, src, tgt, field, density=0.6):
    """Random morphism: each Hom-realizable cell filled with prob. density."""
    entries = {}
    try:
        nz = [x for x in field.elements() if x != field.zero]
    except NotImplementedError:
        nz = [Fraction(k) for k in (1, 2, 3, -1)]
    for t in range(len(tgt)):
        for s in range(len(src)):
            if (src[s].degree == tgt[t].degree
                    and hom(src[s].interval, tgt[t].interval) is DEG0
                    and rng.random() < density):
                entries[(t, s)] = rng.choice(nz)
    return Morphism(src, tgt, entries, field=field)

"""The interleaving pseudo-distance: decision procedure, optimization, witnesses."""

from fractions import Fraction

import pytest

from persimod import Barcode, Interval, check_interleaving, gamma, gamma_symmetric
from persimod.barcodes import gamma_to_zero
from persimod.fields import GF2, PrimeField
from persimod.intervals import ExtRat, POS_INF, NEG_INF
from persimod.interleaving import (
    DEFAULT_BUDGET,
    DistanceReport,
    InterleavingCertificate,
    UNKNOWN,
    matching_witness,
)
from persimod.morphisms import Morphism, identity, tau_morphism
from conftest import rand_barcode
from oracles import interleaved_oracle


def B(*bars):
    return Barcode(bars)


def certificate_found(result):
    return result is not UNKNOWN and result is not None


# --- check_interleaving frozen cases ------------------------------------------


def test_identity_interleaving():
    bc = B((0, Interval(0, 10)), (0, Interval(2, 3)))
    cert = check_interleaving(bc, bc, 0, 0)
    assert certificate_found(cert)
    assert cert.total == 0


def test_one_sided_shift_feasible():
    F, G = B((0, Interval(0, 10))), B((0, Interval(1, 10)))
    cert = check_interleaving(F, G, 0, 1)
    assert certificate_found(cert)
    assert (cert.a, cert.b) == (0, 1)


def test_half_shift_infeasible():
    F, G = B((0, Interval(0, 10))), B((0, Interval(1, 10)))
    assert check_interleaving(F, G, 0, Fraction(1, 2)) is None


def test_negative_shift_rejected():
    F = B((0, Interval(0, 1)))
    with pytest.raises(ValueError):
        check_interleaving(F, F, -1, 0)


def test_certificate_construction_reverifies():
    F, G = B((0, Interval(0, 10))), B((0, Interval(1, 10)))
    u = Morphism(F, G, {(0, 0): 1}, field=GF2)
    v = Morphism(G, F.shift(1), {(0, 0): 1}, field=GF2)
    cert = InterleavingCertificate(Fraction(0), Fraction(1), u, v)
    assert cert.total == 1
    bad_v = Morphism(G, F.shift(1), {}, field=GF2)
    with pytest.raises(ValueError):
        InterleavingCertificate(Fraction(0), Fraction(1), u, bad_v)


# --- gamma frozen cases --------------------------------------------------------


def test_gamma_self_is_zero(rng):
    for _ in range(10):
        bc = rand_barcode(rng, rng.randint(0, 5))
        rep = gamma(bc, bc)
        assert rep.value == ExtRat(0)
        assert rep.is_exact


def test_gamma_to_empty_is_max_length():
    assert gamma(Barcode(), B((0, Interval(0, 2)))).value == ExtRat(2)
    assert gamma(B((0, Interval(0, 2))), Barcode()).value == ExtRat(2)


def test_gamma_unit_shift():
    rep = gamma(B((0, Interval(0, 10))), B((0, Interval(1, 10))))
    assert rep.value == ExtRat(1)
    assert rep.is_exact
    assert rep.certificate is not None
    assert rep.certificate.total == 1


def test_gamma_symmetric_unit_shift():
    rep = gamma_symmetric(B((0, Interval(0, 10))), B((0, Interval(1, 10))))
    assert rep.value == ExtRat(2)
    assert rep.certificate.a == rep.certificate.b == 1


def test_gamma_two_sided_binding_regression():
    # u needs a >= 10 and v needs b >= 6 independently; the optimal value 16
    # is not itself an endpoint difference.  Cross-checked by brute force.
    F, G = B((0, Interval(10, 94))), B((0, Interval(0, 100)))
    rep = gamma(F, G)
    assert rep.value == ExtRat(16)
    assert (rep.certificate.a, rep.certificate.b) == (10, 6)
    assert gamma_symmetric(F, G).value == ExtRat(20)


def test_gamma_infinite_bars():
    F = B((0, Interval(0, POS_INF)))
    G = B((0, Interval(1, POS_INF)))
    assert gamma(F, G).value == ExtRat(1)
    mismatched = B((0, Interval(1, POS_INF)), (0, Interval(2, POS_INF)))
    assert gamma(F, mismatched).value == POS_INF
    left = B((0, Interval(NEG_INF, 0)))
    assert gamma(F, left).value == POS_INF


def test_gamma_graded_is_per_degree_max():
    F = B((0, Interval(0, 10)), (1, Interval(0, 4)))
    G = B((0, Interval(1, 10)), (1, Interval(0, 4)))
    assert gamma(F, G).value == ExtRat(1)


# --- metric properties ----------------------------------------------------------


def test_metric_properties(rng):
    for _ in range(30):
        F = rand_barcode(rng, rng.randint(0, 4))
        G = rand_barcode(rng, rng.randint(0, 4))
        H = rand_barcode(rng, rng.randint(0, 4))
        fg, gf = gamma(F, G), gamma(G, F)
        assert fg.value == gf.value
        t = Fraction(rng.randint(-8, 8), 2)
        assert gamma(F.shift(t), G.shift(t)).value == fg.value
        gh, fh = gamma(G, H), gamma(F, H)
        assert fh.value <= fg.value + gh.value
        assert gamma(Barcode(), F).value == gamma_to_zero(F)


def test_asymmetric_vs_symmetric_bracket(rng):
    for _ in range(20):
        F = rand_barcode(rng, rng.randint(0, 4))
        G = rand_barcode(rng, rng.randint(0, 4))
        g = gamma(F, G).value
        gs = gamma_symmetric(F, G).value
        assert g <= gs
        if g.is_finite:
            assert gs <= 2 * g
        else:
            assert gs == g


# --- agreement with the exhaustive oracle ---------------------------------------


def test_decision_agrees_with_exhaustive_oracle(rng):
    for _ in range(30):
        F = rand_barcode(rng, rng.randint(1, 3), lo_range=(0, 4), den=2, max_len=4)
        G = rand_barcode(rng, rng.randint(1, 3), lo_range=(0, 4), den=2, max_len=4)
        a = Fraction(rng.randint(0, 6), 2)
        b = Fraction(rng.randint(0, 6), 2)
        cert = check_interleaving(F, G, a, b)
        assert certificate_found(cert) == interleaved_oracle(F, G, a, b)


def test_gamma_matches_bruteforce_refinement(rng):
    # design assumption behind the grid search: the optimum is found even when
    # scanning a refinement strictly finer than the endpoint-difference grid
    for _ in range(8):
        F = rand_barcode(rng, 2, lo_range=(0, 4), den=2, max_len=4)
        G = rand_barcode(rng, 2, lo_range=(0, 4), den=2, max_len=4)
        val = gamma(F, G).value
        best = None
        for an in range(0, 33):
            a = Fraction(an, 4)
            if best is not None and ExtRat(a) >= best:
                break
            for bn in range(0, 33):
                b = Fraction(bn, 4)
                if best is not None and ExtRat(a + b) >= best:
                    break
                if interleaved_oracle(F, G, a, b):
                    best = ExtRat(a + b)
        assert best == val


def test_exhaustive_method_agrees(rng):
    for _ in range(10):
        F = rand_barcode(rng, rng.randint(1, 2), lo_range=(0, 3), den=2, max_len=3)
        G = rand_barcode(rng, rng.randint(1, 2), lo_range=(0, 3), den=2, max_len=3)
        a = Fraction(rng.randint(0, 4), 2)
        b = Fraction(rng.randint(0, 4), 2)
        match = check_interleaving(F, G, a, b, method="matching")
        exh = check_interleaving(F, G, a, b, method="exhaustive")
        assert certificate_found(match) == certificate_found(exh)


def test_exhaustive_budget_exhaustion_reports_unknown():
    bars = [(0, Interval(k, k + 40)) for k in range(8)]
    F, G = Barcode(bars), Barcode(bars)
    out = check_interleaving(F, G, 2, 2, method="exhaustive", budget=16)
    assert out is UNKNOWN


def test_gamma_zero_iff_equal(rng):
    for _ in range(20):
        F = rand_barcode(rng, rng.randint(0, 4))
        if rng.random() < 0.5:
            G = Barcode(list(F))
        else:
            G = rand_barcode(rng, rng.randint(0, 4))
        assert (gamma(F, G).value == ExtRat(0)) == (F == G)


# --- matching witness -----------------------------------------------------------


def test_matching_witness_identity():
    bc = B((0, Interval(0, 10)))
    cert = matching_witness(bc, bc, 0)
    assert cert is not None and cert.total == 0


def test_matching_witness_unit():
    cert = matching_witness(B((0, Interval(0, 10))), B((0, Interval(1, 11))), 1)
    assert cert is not None
    assert cert.a == cert.b == 1


def test_matching_witness_long_unmatched_bar():
    assert matching_witness(B((0, Interval(0, 10))), Barcode(), 1) is None


def test_matching_witness_upper_bounds_gamma(rng):
    for _ in range(15):
        F = rand_barcode(rng, rng.randint(0, 4))
        G = rand_barcode(rng, rng.randint(0, 4))
        value = gamma(F, G).value
        if not value.is_finite:
            continue
        # the symmetric matching bound is sound at delta = value
        delta = value.as_fraction()
        cert = matching_witness(F, G, delta)
        if cert is not None:
            assert ExtRat(cert.total) >= value

"""Round trips and error reporting for every text format."""

from fractions import Fraction

import pytest

from persimod import Barcode, Interval
from persimod.fields import GF2, PrimeField
from persimod.intervals import NEG_INF, POS_INF
from persimod.interleaving import InterleavingCertificate, check_interleaving, gamma
from persimod.io import (
    ParseError,
    emit_barcode,
    emit_certificate,
    emit_cloud,
    emit_plfunction,
    emit_system,
    load_certificate,
    load_system,
    parse_barcode,
    parse_barcode_text,
    parse_cloud,
    parse_plfunction,
    validate_file,
)
from persimod.limits import InductiveSystem
from persimod.morphisms import Morphism
from persimod.spectral import PLFunction

from test_limits import geometric_tower


def B(*bars):
    return Barcode(bars)


# --- barcodes ----------------------------------------------------------------


def test_barcode_round_trip():
    b = B(
        (0, Interval(0, Fraction(3, 2))),
        (0, Interval(0, Fraction(3, 2))),
        (2, Interval(Fraction(-1, 4), 7)),
        (0, Interval(1, POS_INF)),
    )
    assert parse_barcode_text(emit_barcode(b)) == b


def test_barcode_emit_folds_multiplicity():
    b = B((0, Interval(0, 1)), (0, Interval(0, 1)), (0, Interval(0, 1)))
    assert "0 0 1 3" in emit_barcode(b)


def test_barcode_parse_accepts_comments_and_infinities():
    text = """
    # clipped
    -1 -inf 5   # left-infinite
    0 1/2 inf
    """
    b = parse_barcode_text(text)
    assert len(b.bars) == 2
    assert b.bars[0].interval.lo == NEG_INF
    assert b.bars[1].interval.hi == POS_INF


def test_barcode_parse_errors_carry_position(tmp_path):
    p = tmp_path / "bad.bc"
    p.write_text("0 0 1\n0 5 5\n")
    with pytest.raises(ParseError, match=r"bad\.bc:2: empty interval \[5,5\)"):
        parse_barcode(p)
    with pytest.raises(ParseError, match="unknown token"):
        parse_barcode_text("0 zero 1\n")
    with pytest.raises(ParseError, match="multiplicity must be >= 1"):
        parse_barcode_text("0 0 1 0\n")
    with pytest.raises(ParseError, match="expected 'degree lo hi"):
        parse_barcode_text("0 0\n")
    with pytest.raises(ParseError, match="cannot read"):
        parse_barcode(tmp_path / "absent.bc")


# --- PL functions ------------------------------------------------------------


def test_plfunction_round_trip(tmp_path):
    f = PLFunction("circle", [0, Fraction(1, 2), 2], [1, Fraction(-3, 4), 0])
    p = tmp_path / "f.plf"
    p.write_text(emit_plfunction(f))
    assert parse_plfunction(p) == f


def test_plfunction_parse_errors(tmp_path):
    p = tmp_path / "f.plf"
    p.write_text("0 1\n1 2\n")
    with pytest.raises(ParseError, match="missing 'domain"):
        parse_plfunction(p)
    p.write_text("domain: circle\ndomain: interval\n0 1\n1 2\n")
    with pytest.raises(ParseError, match="duplicate domain"):
        parse_plfunction(p)
    p.write_text("domain: circle\n0 1 2\n")
    with pytest.raises(ParseError, match="expected '<breakpoint> <value>'"):
        parse_plfunction(p)
    p.write_text("domain: circle\n1 0\n0 1\n")
    with pytest.raises(ParseError, match="strictly increasing"):
        parse_plfunction(p)


# --- point clouds ------------------------------------------------------------


def test_cloud_round_trip(tmp_path):
    from persimod.cones import PointCloud

    cloud = PointCloud([[0.0, 0.25], [1.5, -2.0], [0.1, 0.3]])
    p = tmp_path / "c.csv"
    p.write_text(emit_cloud(cloud))
    back = parse_cloud(p)
    assert back.points.tolist() == cloud.points.tolist()


def test_cloud_parse_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("0,1\n2\n")
    with pytest.raises(ParseError, match="ragged row"):
        parse_cloud(p)
    p.write_text("0,x\n")
    with pytest.raises(ParseError, match="unknown token"):
        parse_cloud(p)
    p.write_text("# only a comment\n")
    with pytest.raises(ParseError, match="empty point cloud"):
        parse_cloud(p)
    p.write_text("0,1,2\n")
    with pytest.raises(ParseError, match="even"):
        parse_cloud(p)


# --- tower directories -------------------------------------------------------


def test_system_round_trip(tmp_path):
    system = geometric_tower(2, 6)
    d = tmp_path / "tower"
    emit_system(d, system)
    back = load_system(d)
    assert back.stages == system.stages
    assert back.slacks == system.slacks
    assert [f.entries for f in back.maps] == [f.entries for f in system.maps]
    assert [g.target for g in back.reverses] == [g.target for g in system.reverses]


def test_system_without_reverses(tmp_path):
    system = geometric_tower(2, 5, with_reverses=False)
    d = tmp_path / "tower"
    emit_system(d, system)
    back = load_system(d)
    assert tuple(back.reverses) == (None, None)


def test_load_system_directory_errors(tmp_path):
    with pytest.raises(ParseError, match="not a directory"):
        load_system(tmp_path / "nowhere")
    d = tmp_path / "empty"
    d.mkdir()
    with pytest.raises(ParseError, match="no stage files"):
        load_system(d)


def test_load_system_gap_in_stages(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    (d / "F1.bc").rename(d / "F9.bc")
    with pytest.raises(ParseError, match="not contiguous"):
        load_system(d)


def test_load_system_slack_count(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    (d / "slacks.txt").write_text("1/8\n")
    with pytest.raises(ParseError, match="expected 2 slacks, found 1"):
        load_system(d)


def test_load_system_missing_forward(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    (d / "f1.mor").unlink()
    with pytest.raises(ParseError, match="missing forward map"):
        load_system(d)


def test_load_system_header_mismatch(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    body = (d / "f0.mor").read_text()
    (d / "f0.mor").write_text("source: F1.bc\n" + body)
    with pytest.raises(ParseError, match="source header is not F0.bc"):
        load_system(d)


def test_load_system_rejects_broken_round_trip(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    (d / "g0.mor").write_text("# target source scalar\n")
    with pytest.raises(ParseError, match="inconsistent tower"):
        load_system(d)


def test_morphism_entry_errors(tmp_path):
    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    (d / "f0.mor").write_text("0 7 1\n")
    with pytest.raises(ParseError, match=r"entry \(0,7\) out of range"):
        load_system(d)
    (d / "f0.mor").write_text("0 0 1\n0 0 1\n")
    with pytest.raises(ParseError, match=r"duplicate entry \(0,0\)"):
        load_system(d)
    (d / "f0.mor").write_text("0 0\n")
    with pytest.raises(ParseError, match="expected '<target> <source> <scalar>'"):
        load_system(d)


# --- certificates ------------------------------------------------------------


def unit_shift_certificate():
    F, G = B((0, Interval(0, 10))), B((0, Interval(1, 10)))
    cert = check_interleaving(F, G, 0, 1)
    assert cert is not None
    return F, G, cert


def test_certificate_round_trip(tmp_path):
    F, G, cert = unit_shift_certificate()
    p = tmp_path / "unit.cert"
    p.write_text(emit_certificate(F, G, cert))
    F2, G2, cert2 = load_certificate(p)
    assert (F2, G2) == (F, G)
    assert (cert2.a, cert2.b) == (cert.a, cert.b)
    assert cert2.u.entries == cert.u.entries


def test_certificate_gf5_field_round_trip(tmp_path):
    F = B((0, Interval(0, 4)))
    u = Morphism(F, F, {(0, 0): 2}, field=PrimeField(5))
    v = Morphism(F, F, {(0, 0): 3}, field=PrimeField(5))
    cert = InterleavingCertificate(0, 0, u, v)
    p = tmp_path / "scale.cert"
    p.write_text(emit_certificate(F, F, cert))
    _, _, back = load_certificate(p)
    assert back.u.field.p == 5
    assert back.u.entries == {(0, 0): 2}


def test_load_certificate_reverifies(tmp_path):
    F, G, cert = unit_shift_certificate()
    p = tmp_path / "doctored.cert"
    p.write_text(emit_certificate(F, G, cert).replace("a: 0", "a: -1"))
    with pytest.raises(ValueError):
        load_certificate(p)
    # shrinking the source bar makes the reverse map unrealizable
    p.write_text(emit_certificate(F, G, cert).replace("0 0 10", "0 0 3"))
    with pytest.raises(ValueError):
        load_certificate(p)


def test_load_certificate_structure_errors(tmp_path):
    F, G, cert = unit_shift_certificate()
    text = emit_certificate(F, G, cert)
    p = tmp_path / "c.cert"
    p.write_text(text.replace("[reverse]\n", ""))
    with pytest.raises(ParseError, match=r"missing section \[reverse\]"):
        load_certificate(p)
    p.write_text(text.replace("a: 0\n", ""))
    with pytest.raises(ParseError, match="missing a:/b: headers"):
        load_certificate(p)
    p.write_text(text + "[forward]\n")
    with pytest.raises(ParseError, match=r"duplicate section \[forward\]"):
        load_certificate(p)
    p.write_text("a: 0\nb: 1\nnonsense\n")
    with pytest.raises(ParseError, match="expected header or section"):
        load_certificate(p)


def test_emitted_certificate_matches_gamma(tmp_path):
    F, G = B((0, Interval(0, 10))), B((0, Interval(1, 10)))
    report = gamma(F, G)
    p = tmp_path / "g.cert"
    p.write_text(emit_certificate(F, G, report.certificate))
    _, _, cert = load_certificate(p)
    assert cert.total == report.value.as_fraction()


# --- validate_file -----------------------------------------------------------


def test_validate_file_summaries(tmp_path):
    (tmp_path / "b.bc").write_text(emit_barcode(B((0, Interval(0, 1)), (2, Interval(0, 1)))))
    assert validate_file(tmp_path / "b.bc") == "barcode: 2 bars, degrees 0,2"

    f = PLFunction("interval", [0, 1], [0, 1])
    (tmp_path / "f.plf").write_text(emit_plfunction(f))
    assert validate_file(tmp_path / "f.plf") == "pl-function: interval, 2 breakpoints"

    (tmp_path / "c.csv").write_text("0,1\n2,3\n")
    assert validate_file(tmp_path / "c.csv") == "point-cloud: 2 points in R^2"

    F, G, cert = unit_shift_certificate()
    (tmp_path / "u.cert").write_text(emit_certificate(F, G, cert))
    assert validate_file(tmp_path / "u.cert") == "certificate: shifts (0,1) verified"

    d = tmp_path / "tower"
    emit_system(d, geometric_tower(2, 5))
    assert validate_file(d) == "tower: 3 stages, 2 reverse maps"


def test_validate_standalone_morphism(tmp_path):
    src = B((0, Interval(0, 2)))
    tgt = B((0, Interval(1, 3)))
    (tmp_path / "src.bc").write_text(emit_barcode(src))
    (tmp_path / "tgt.bc").write_text(emit_barcode(tgt))
    (tmp_path / "u.mor").write_text(
        "source: src.bc\ntarget: tgt.bc\nshift: 0\nfield: 2\n0 0 1\n"
    )
    assert validate_file(tmp_path / "u.mor") == "morphism: 1 entries, shift 0"
    (tmp_path / "bare.mor").write_text("0 0 1\n")
    with pytest.raises(ParseError, match="needs source:/target: headers"):
        validate_file(tmp_path / "bare.mor")


def test_validate_unknown_extension(tmp_path):
    (tmp_path / "x.xyz").write_text("")
    with pytest.raises(ParseError, match="unknown fixture kind"):
        validate_file(tmp_path / "x.xyz")

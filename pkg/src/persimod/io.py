"""Text formats: barcodes, morphisms, PL functions, point clouds, tower
directories, and interleaving-certificate files.

All emitters are deterministic (sorted, canonical spellings) so emitted
bytes are diffable; every parser round-trips its emitter exactly.
"""

from __future__ import annotations

import csv
import io as _io
import os
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .barcodes import Bar, Barcode
from .fields import GF2, field_by_name
from .intervals import Interval, parse_endpoint
from .interleaving import InterleavingCertificate
from .limits import InductiveSystem
from .morphisms import Morphism
from .spectral import PLFunction

__all__ = [
    "ParseError",
    "parse_barcode",
    "parse_barcode_text",
    "emit_barcode",
    "parse_plfunction",
    "emit_plfunction",
    "parse_cloud",
    "emit_cloud",
    "load_system",
    "emit_system",
    "load_certificate",
    "emit_certificate",
    "validate_file",
]


class ParseError(Exception):
    """Malformed input file; carries path and (when known) line number."""

    def __init__(self, path, line: Optional[int], msg: str):
        self.path = str(path)
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {msg}")


def _lines(text: str):
    """Yield (lineno, content) with comments and blank lines removed."""
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


# -- barcodes ---------------------------------------------------------------


def parse_barcode_text(text: str, path="<string>") -> Barcode:
    bars: List[Bar] = []
    for n, line in _lines(text):
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(path, n, f"expected 'degree lo hi [mult]', got {line!r}")
        try:
            degree = int(parts[0])
            lo = parse_endpoint(parts[1])
            hi = parse_endpoint(parts[2])
            mult = int(parts[3]) if len(parts) == 4 else 1
        except (ValueError, ZeroDivisionError, TypeError) as err:
            raise ParseError(path, n, f"unknown token ({err})") from None
        if mult < 1:
            raise ParseError(path, n, "multiplicity must be >= 1")
        if lo >= hi:
            raise ParseError(path, n, f"empty interval [{lo},{hi})")
        bars.extend([Bar(degree, Interval(lo, hi))] * mult)
    return Barcode(bars)


def parse_barcode(path) -> Barcode:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_barcode_text(fh.read(), path)
    except OSError as err:
        raise ParseError(path, None, f"cannot read ({err})") from None


def emit_barcode(b: Barcode) -> str:
    out = ["# degree lo hi [multiplicity]"]
    for bar, count in b.counts():
        line = f"{bar.degree} {bar.interval.lo} {bar.interval.hi}"
        out.append(line if count == 1 else f"{line} {count}")
    return "\n".join(out) + "\n"


# -- PL functions -----------------------------------------------------------


def parse_plfunction(path) -> PLFunction:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ParseError(path, None, f"cannot read ({err})") from None
    domain = None
    bps: List[Fraction] = []
    vals: List[Fraction] = []
    for n, line in _lines(text):
        if line.startswith("domain:"):
            if domain is not None:
                raise ParseError(path, n, "duplicate domain header")
            domain = line.split(":", 1)[1].strip()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(path, n, f"expected '<breakpoint> <value>', got {line!r}")
        try:
            bps.append(Fraction(parts[0]))
            vals.append(Fraction(parts[1]))
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(path, n, f"unknown token ({err})") from None
    if domain is None:
        raise ParseError(path, None, "missing 'domain: circle|interval' header")
    try:
        return PLFunction(domain, bps, vals)
    except ValueError as err:
        raise ParseError(path, None, str(err)) from None


def emit_plfunction(f: PLFunction) -> str:
    out = [f"domain: {f.domain}"]
    out.extend(f"{b} {v}" for b, v in zip(f.breakpoints, f.values))
    return "\n".join(out) + "\n"


# -- point clouds -----------------------------------------------------------


def parse_cloud(path):
    from .cones import PointCloud

    rows: List[List[float]] = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for n, row in enumerate(csv.reader(fh), 1):
                cells = [c.strip() for c in row if c.strip()]
                if not cells or cells[0].startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in cells])
                except ValueError as err:
                    raise ParseError(path, n, f"unknown token ({err})") from None
                if len(rows) > 1 and len(rows[-1]) != len(rows[0]):
                    raise ParseError(path, n, "ragged row")
    except OSError as err:
        raise ParseError(path, None, f"cannot read ({err})") from None
    if not rows:
        raise ParseError(path, None, "empty point cloud")
    try:
        return PointCloud(rows)
    except ValueError as err:
        raise ParseError(path, None, str(err)) from None


def emit_cloud(cloud) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in cloud.points:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


# -- morphism entry files ---------------------------------------------------

_HEADER_RE = re.compile(r"^(source|target|shift|field)\s*:\s*(.+)$")


def _parse_morphism_entries(path) -> Tuple[Dict[str, str], List[Tuple[int, int, Fraction, int]]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ParseError(path, None, f"cannot read ({err})") from None
    headers: Dict[str, str] = {}
    entries: List[Tuple[int, int, Fraction, int]] = []
    for n, line in _lines(text):
        m = _HEADER_RE.match(line)
        if m:
            if m.group(1) in headers:
                raise ParseError(path, n, f"duplicate {m.group(1)} header")
            headers[m.group(1)] = m.group(2).strip()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(path, n, f"expected '<target> <source> <scalar>', got {line!r}")
        try:
            entries.append((int(parts[0]), int(parts[1]), Fraction(parts[2]), n))
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(path, n, f"unknown token ({err})") from None
    return headers, entries


def _build_morphism(path, source: Barcode, target: Barcode, entries, field) -> Morphism:
    table = {}
    for t, s, scalar, n in entries:
        if not (0 <= t < len(target.bars) and 0 <= s < len(source.bars)):
            raise ParseError(path, n, f"entry ({t},{s}) out of range")
        if (t, s) in table:
            raise ParseError(path, n, f"duplicate entry ({t},{s})")
        table[(t, s)] = field.canon(scalar)
    return Morphism(source, target, table, field)


# -- tower directories ------------------------------------------------------

_STAGE_RE = re.compile(r"^F(\d+)\.bc$")


def load_system(dirpath, field=GF2) -> InductiveSystem:
    """Read `F0.bc .. FN.bc`, `f0.mor ..`, optional `g*.mor`, `slacks.txt`."""
    if not os.path.isdir(dirpath):
        raise ParseError(dirpath, None, "not a directory")
    stage_ids = sorted(
        int(m.group(1)) for f in os.listdir(dirpath) if (m := _STAGE_RE.match(f))
    )
    if not stage_ids:
        raise ParseError(dirpath, None, "no stage files F<n>.bc")
    if stage_ids != list(range(len(stage_ids))):
        raise ParseError(dirpath, None, f"stage files not contiguous from F0: {stage_ids}")
    stages = [parse_barcode(os.path.join(dirpath, f"F{i}.bc")) for i in stage_ids]
    n_steps = len(stages) - 1

    slacks: List[Fraction] = []
    slacks_path = os.path.join(dirpath, "slacks.txt")
    if n_steps > 0 or os.path.exists(slacks_path):
        try:
            with open(slacks_path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise ParseError(slacks_path, None, f"cannot read ({err})") from None
        for n, line in _lines(text):
            for tok in line.split():
                try:
                    slacks.append(Fraction(tok))
                except (ValueError, ZeroDivisionError) as err:
                    raise ParseError(slacks_path, n, f"unknown token ({err})") from None
        if len(slacks) != n_steps:
            raise ParseError(
                slacks_path, None, f"expected {n_steps} slacks, found {len(slacks)}"
            )

    maps, reverses = [], []
    for n in range(n_steps):
        fpath = os.path.join(dirpath, f"f{n}.mor")
        if not os.path.exists(fpath):
            raise ParseError(fpath, None, "missing forward map")
        headers, entries = _parse_morphism_entries(fpath)
        _check_headers(fpath, headers, f"F{n}.bc", f"F{n + 1}.bc", Fraction(0))
        maps.append(_build_morphism(fpath, stages[n], stages[n + 1], entries, field))
        gpath = os.path.join(dirpath, f"g{n}.mor")
        if os.path.exists(gpath):
            headers, entries = _parse_morphism_entries(gpath)
            _check_headers(gpath, headers, f"F{n + 1}.bc", f"F{n}.bc", slacks[n])
            reverses.append(
                _build_morphism(gpath, stages[n + 1], stages[n].shift(slacks[n]), entries, field)
            )
        else:
            reverses.append(None)
    try:
        return InductiveSystem(stages, maps, slacks, reverses, field)
    except ValueError as err:
        raise ParseError(dirpath, None, f"inconsistent tower: {err}") from None


def _check_headers(path, headers, want_source, want_target, want_shift):
    if "source" in headers and os.path.basename(headers["source"]) != want_source:
        raise ParseError(path, None, f"source header is not {want_source}")
    if "target" in headers and os.path.basename(headers["target"]) != want_target:
        raise ParseError(path, None, f"target header is not {want_target}")
    if "shift" in headers and Fraction(headers["shift"]) != want_shift:
        raise ParseError(path, None, f"shift header is not {want_shift}")


def emit_system(dirpath, system: InductiveSystem) -> None:
    os.makedirs(dirpath, exist_ok=True)
    for i, stage in enumerate(system.stages):
        _write(os.path.join(dirpath, f"F{i}.bc"), emit_barcode(stage))
    if system.maps:
        _write(
            os.path.join(dirpath, "slacks.txt"),
            "\n".join(str(s) for s in system.slacks) + "\n",
        )
    for n, f in enumerate(system.maps):
        _write(os.path.join(dirpath, f"f{n}.mor"), _emit_entries(f))
    for n, g in enumerate(system.reverses):
        if g is not None:
            _write(os.path.join(dirpath, f"g{n}.mor"), _emit_entries(g))


def _emit_entries(f: Morphism) -> str:
    out = ["# target source scalar"]
    for (t, s), val in sorted(f.entries.items()):
        out.append(f"{t} {s} {val}")
    return "\n".join(out) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# -- certificate files ------------------------------------------------------

_SECTION_RE = re.compile(r"^\[(source|target|forward|reverse)\]$")
_CERT_HEADER_RE = re.compile(r"^(a|b|field)\s*:\s*(.+)$")


def load_certificate(path):
    """Read a self-contained certificate file and re-verify it.

    Returns (F, G, certificate); the certificate constructor re-checks the
    round-trip identities, so a doctored file fails loudly.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ParseError(path, None, f"cannot read ({err})") from None
    headers: Dict[str, str] = {}
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[str] = None
    for n, line in _lines(text):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current in sections:
                raise ParseError(path, n, f"duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            hm = _CERT_HEADER_RE.match(line)
            if not hm:
                raise ParseError(path, n, f"expected header or section, got {line!r}")
            headers[hm.group(1)] = hm.group(2).strip()
            continue
        sections[current].append((n, line))
    for need in ("source", "target", "forward", "reverse"):
        if need not in sections:
            raise ParseError(path, None, f"missing section [{need}]")
    if "a" not in headers or "b" not in headers:
        raise ParseError(path, None, "missing a:/b: headers")
    try:
        a, b = Fraction(headers["a"]), Fraction(headers["b"])
    except (ValueError, ZeroDivisionError) as err:
        raise ParseError(path, None, f"bad shift ({err})") from None
    field = field_by_name(headers.get("field", "2"))

    def bc(name):
        body = "\n".join(line for _, line in sections[name])
        return parse_barcode_text(body, f"{path}[{name}]")

    def entries(name):
        out = []
        for n, line in sections[name]:
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(path, n, f"expected '<target> <source> <scalar>', got {line!r}")
            try:
                out.append((int(parts[0]), int(parts[1]), Fraction(parts[2]), n))
            except (ValueError, ZeroDivisionError) as err:
                raise ParseError(path, n, f"unknown token ({err})") from None
        return out

    source, target = bc("source"), bc("target")
    u = _build_morphism(path, source, target.shift(a), entries("forward"), field)
    v = _build_morphism(path, target, source.shift(b), entries("reverse"), field)
    return source, target, InterleavingCertificate(a, b, u, v)


def _field_name(field) -> str:
    return str(field.p) if hasattr(field, "p") else "q"


def emit_certificate(F: Barcode, G: Barcode, cert: InterleavingCertificate) -> str:
    out = [
        "# interleaving certificate",
        f"a: {cert.a}",
        f"b: {cert.b}",
        f"field: {_field_name(cert.u.field)}",
        "[source]",
        emit_barcode(F).rstrip("\n"),
        "[target]",
        emit_barcode(G).rstrip("\n"),
        "[forward]",
        _emit_entries(cert.u).rstrip("\n"),
        "[reverse]",
        _emit_entries(cert.v).rstrip("\n"),
    ]
    return "\n".join(out) + "\n"


# -- validation front door --------------------------------------------------


def validate_file(path) -> str:
    """Parse any supported fixture and return a one-line summary."""
    if os.path.isdir(path):
        system = load_system(path)
        return (
            f"tower: {len(system.stages)} stages, "
            f"{sum(g is not None for g in system.reverses)} reverse maps"
        )
    ext = os.path.splitext(str(path))[1]
    if ext == ".bc":
        b = parse_barcode(path)
        degs = ",".join(str(d) for d in b.degrees()) or "-"
        return f"barcode: {len(b.bars)} bars, degrees {degs}"
    if ext == ".plf":
        f = parse_plfunction(path)
        return f"pl-function: {f.domain}, {len(f.breakpoints)} breakpoints"
    if ext == ".csv":
        cloud = parse_cloud(path)
        return f"point-cloud: {len(cloud)} points in R^{cloud.dimension}"
    if ext == ".cert":
        F, G, cert = load_certificate(path)
        return f"certificate: shifts ({cert.a},{cert.b}) verified"
    if ext == ".mor":
        headers, entries = _parse_morphism_entries(path)
        if "source" not in headers or "target" not in headers:
            raise ParseError(path, None, "standalone morphism needs source:/target: headers")
        base = os.path.dirname(os.path.abspath(str(path)))
        source = parse_barcode(os.path.join(base, headers["source"]))
        target = parse_barcode(os.path.join(base, headers["target"]))
        shift = Fraction(headers.get("shift", 0))
        field = field_by_name(headers.get("field", "2"))
        f = _build_morphism(path, source, target.shift(shift), entries, field)
        return f"morphism: {len(f.entries)} entries, shift {shift}"
    raise ParseError(path, None, f"unknown fixture kind {ext!r}")

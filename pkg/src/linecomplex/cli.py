"""Command-line front end.

    linecomplex generate      random Cauchy data, filled M-lattice
    linecomplex to-geometry   M-lattice -> line complex
    linecomplex from-geometry line complex -> M-lattice
    linecomplex verify        every applicable identity suite, exit 0 iff all pass
    linecomplex hex           hexahedron run and its M-system equivalence
    linecomplex export-obj    line complex -> Wavefront OBJ polylines

Every option can also come from a JSON config file (``--config``); flags
given on the command line win.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import random
import sys
from dataclasses import dataclass
from typing import Optional

from . import complexes as cxm
from . import correlation as corr
from . import hexahedron as hx
from . import linalg
from . import msystem as ms
from . import projective as pg
from . import serialize as ser
from .errors import LineComplexError, NormalizationFailure
from .field import DEFAULT_TOL_ABS, DEFAULT_TOL_REL, get_field
from .lattice import Box, parse_box, shift, sweep_order
from .report import Report

log = logging.getLogger("linecomplex")

COMMANDS = ("generate", "to-geometry", "from-geometry", "verify", "hex", "export-obj")


@dataclass
class RunConfig:
    command: str
    backend: str = "rational"
    seed: int = 0
    box: str = "0..2,0..2,0..2"
    tol_rel: float = DEFAULT_TOL_REL
    tol_abs: float = DEFAULT_TOL_ABS
    input: Optional[str] = None
    out: Optional[str] = None
    report: Optional[str] = None
    size: int = 5
    symmetric: bool = False
    rechart: bool = False
    printed: bool = False
    no_edge_points: bool = False
    verbose: bool = False

    @property
    def field(self):
        return get_field(self.backend, self.tol_rel, self.tol_abs)

    @property
    def tol(self):
        return (self.tol_rel, self.tol_abs)

    def parsed_box(self) -> Box:
        return parse_box(self.box)

    def rng(self, stream: int = 0) -> random.Random:
        # independent deterministic streams per purpose
        return random.Random(f"{self.seed}:{stream}")


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with option values (flags win)")
    common.add_argument("--backend", choices=("rational", "gauss", "f64"))
    common.add_argument("--seed", type=int)
    common.add_argument("--box", help='bounds "a..b,a..b,a..b"')
    common.add_argument("--tol-rel", dest="tol_rel", type=float)
    common.add_argument("--tol-abs", dest="tol_abs", type=float)
    common.add_argument("--in", dest="input", help="input JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="linecomplex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    kw = dict(parents=[common], argument_default=argparse.SUPPRESS)
    g = sub.add_parser("generate", **kw, help="random Cauchy data and the filled M-lattice")
    g.add_argument("--size", type=int, help="matrix size (default 5)")
    g.add_argument("--symmetric", action="store_true", help="symmetric Cauchy data")
    t = sub.add_parser("to-geometry", **kw, help="M-lattice to line complex")
    t.add_argument("--no-edge-points", dest="no_edge_points", action="store_true")
    f = sub.add_parser("from-geometry", **kw, help="line complex to M-lattice")
    f.add_argument("--rechart", action="store_true", help="random projective chart when g01 vanishes")
    v = sub.add_parser("verify", **kw, help="run every applicable identity suite")
    v.add_argument("--rechart", action="store_true")
    h = sub.add_parser("hex", **kw, help="hexahedron recurrence run")
    h.add_argument("--printed", action="store_true", help="use the printed variant of the recurrence")
    h.add_argument("--report", help="write the report JSON here")
    sub.add_parser("export-obj", **kw, help="line complex to OBJ")
    return p


def build_config(argv=None) -> RunConfig:
    ns = vars(_parser().parse_args(argv))
    values = {}
    cfg_path = ns.pop("config", None)
    if cfg_path:
        raw = ser.load_file(cfg_path)
        if not isinstance(raw, dict):
            raise ser.FormatError("config must be a JSON object", cfg_path)
        for k, val in raw.items():
            key = k.replace("-", "_")
            if key == "in":
                key = "input"
            if key not in _FIELDS or key == "command":
                raise ser.FormatError(f"unknown config key {k!r}", cfg_path)
            values[key] = val
    values.update(ns)
    cfg = RunConfig(**values)
    cfg.parsed_box()
    get_field(cfg.backend)  # fail early on a bad backend name
    return cfg


# -- I/O ------------------------------------------------------------------------


def _read(cfg: RunConfig):
    if cfg.input is None:
        text, path = sys.stdin.read(), "<stdin>"
    else:
        with open(cfg.input, "r", encoding="utf-8") as fh:
            text, path = fh.read(), cfg.input
    return ser.from_json(ser.loads(text, path), path, cfg.tol)


def _write(cfg: RunConfig, text: str, path: Optional[str] = None):
    path = path if path is not None else cfg.out
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _expect(kind, want, what):
    if kind != want:
        raise ser.FormatError(f"{what} expects a {want} document, got a {kind} document")


# -- commands -------------------------------------------------------------------


def cmd_generate(cfg: RunConfig) -> int:
    box, field = cfg.parsed_box(), cfg.field
    shape = ms.MSystemShape.square(box.dim, cfg.size)
    make = ms.symmetric_cauchy if cfg.symmetric else ms.random_cauchy
    lat, _ = ms.generate(shape, box, field, rng=cfg.rng(), cauchy=make)
    _write(cfg, ser.dumps(ser.msystem_to_json(lat)))
    return 0


def cmd_to_geometry(cfg: RunConfig) -> int:
    kind, lat = _read(cfg)
    _expect(kind, "msystem", "to-geometry")
    cx = cxm.complex_from_msystem(lat, edge_points=not cfg.no_edge_points)
    _write(cfg, ser.dumps(ser.complex_to_json(cx)))
    return 0


def _charted(cx, cfg: RunConfig):
    """The complex itself, or a recharted copy when --rechart is set and needed."""
    try:
        for n in cx.sites():
            cxm.normalized_lift(cx[n], cx.field, n)
        return cx, None
    except NormalizationFailure:
        if not cfg.rechart:
            raise
    moved, A = cxm.rechart(cx, cfg.rng(2))
    moved.metadata["chart"] = [[cx.field.format(x) for x in row] for row in A]
    return moved, A


def cmd_from_geometry(cfg: RunConfig) -> int:
    kind, cx = _read(cfg)
    _expect(kind, "complex", "from-geometry")
    if cx.dim == 4:
        cx = cx.project()
    cx, _ = _charted(cx, cfg)
    lat = cxm.extract_msystem(cx, seed=cfg.seed)
    _write(cfg, ser.dumps(ser.msystem_to_json(lat)))
    return 0


def _edge_cubes(cubes, n, l):
    """Base corners of the elementary cubes containing the edge (n, n + e_l)."""
    others = [d for d in (1, 2, 3) if d != l]
    out = []
    for da in (0, 1):
        for db in (0, 1):
            b = shift(shift(n, others[0], -da), others[1], -db)
            if b in cubes:
                out.append(b)
    return out


def verify_msystem(lat, cfg: RunConfig, report: Report) -> Report:
    ms.check_evolution(lat, report.tally("msystem_evolution"))
    rng = cfg.rng(1)
    sh = lat.shape
    if min(len(sh.Ul), len(sh.Ur)) >= 4:
        t = report.tally("jacobi_identities")
        for n in sweep_order(lat.box):
            ms.check_identities(lat[n], rng, lat.field, t)
    if len(sh.L) == 3 and all(lo == 0 for lo, _ in lat.box.bounds):
        t = report.tally("msystem_consistency")
        data = {(i, k, n): lat.entry(n, i, k) for i, k, n in ms.cauchy_keys(sh, lat.box)}
        for order in ms.all_direction_orders(sh.L):
            try:
                other = ms.fill_from_cauchy(sh, data, lat.box, lat.field, order)
            except LineComplexError as exc:
                t.record(False, {"order": list(order), "error": str(exc)})
                continue
            if lat.field.exact:
                t.record(other == lat, {"order": list(order)})
            else:
                t.record(ms.check_evolution(other).ok, {"order": list(order)})
    if sh.Ul == sh.Ur == sh.L:
        try:
            tau = ms.tau_fill(lat)
        except LineComplexError as exc:
            report.tally("tau_path_independence").record(False, str(exc))
        else:
            report.tally("tau_path_independence").record(True)
            ms.check_tau(lat, tau, report.tally("tau_principal_minors"))
    if 0 in sh.Ul:
        ms.check_conjugate_lattice(lat, report.tally("conjugate_lattice"))
    try:
        cxm._check_complex_shape(lat)
    except ValueError:
        return report
    cxm.check_diagonals(lat, report)
    verify_line_complex(cxm.complex_from_msystem(lat), cfg, report, source=lat)
    return report


def verify_line_complex(cx, cfg: RunConfig, report: Report, source=None) -> Report:
    field = cx.field
    cxm.verify_complex(cx, report, census=cx.dim == 3)
    bad = set()
    cubes = set(cx.cubes())
    t_edge = report.tally("edge_intersections")
    for n in cx.sites():
        for l in (1, 2, 3):
            m = shift(n, l)
            if m in cx and not (pg.lines_intersect(cx[n], cx[m], field) if cx.dim == 3 else pg.lines_meet_cp4(cx[n], cx[m])):
                bad.update(_edge_cubes(cubes, n, l))
    if cx.dim == 4:
        proj = Report()
        cxm.verify_complex(cx.project(), proj)
        for name, t in proj.tallies.items():
            report.tallies[f"projected_{name}"] = t
        if not t_edge.ok:
            report.notes.append({"failing_cubes": sorted(list(b) for b in bad)})
        return report

    t8 = report.tally("eighth_line")
    t_des = report.tally("desargues_determinant") if field.exact else None
    t_pol = report.tally("polarity")
    for b in cx.cubes():
        lines = cx.cube(b)
        where = {"cube": list(b)}
        rep = cxm.check_fundamental_cube(lines, field, 3, census=False)
        if not (all(rep.edges.values()) and all(rep.coplanarity.values()) and all(rep.concurrent.values())):
            bad.add(b)
        if rep.degenerate:
            continue
        try:
            got = cxm.eighth_from_cube(lines, (1, 1, 1), field, b)
            ok = pg.lines_equal(got, lines[(1, 1, 1)], field)
        except LineComplexError as exc:
            ok, where = False, {"cube": list(b), "error": str(exc)}
        t8.record(ok, where)
        if not ok:
            bad.add(b)
        if t_des is not None:
            L = lambda *d: lines[cxm.corner(*d)]  # noqa: E731
            try:
                det = cxm.desargues_determinant(L(), L(1), L(2), L(3), L(1, 2), L(2, 3), L(1, 3), field)
                t_des.record(det == 0, {"cube": list(b)})
            except LineComplexError as exc:
                t_des.record(False, {"cube": list(b), "error": str(exc)})
        try:
            prep = corr.verify_cube_polarity(lines, field)
            ok = prep.ok
            failing = [k for k, v in prep.checks.items() if not v]
            res = max(prep.residuals.values(), default=None)
        except LineComplexError as exc:
            ok, failing, res = False, [str(exc)], None
        t_pol.record(ok, {"cube": list(b), "failing": failing}, res)
        if not ok:
            bad.add(b)

    try:
        cxc, _ = _charted(cx, cfg)
        ex = cxm.extract_msystem_detailed(cxc, seed=cfg.seed)
    except NormalizationFailure as exc:
        report.notes.append(f"extraction skipped: {exc}")
    except (LineComplexError, ValueError, ZeroDivisionError) as exc:
        report.tally("extraction").record(False, str(exc))
    else:
        for name, t in ex.report.tallies.items():
            report.tallies[f"extraction_{name}"] = t
        back = cxm.complex_from_msystem(ex.lattice, edge_points=False)
        t = report.tally("extraction_round_trip")
        for n in cxc.sites():
            t.record(cxc.lines_equal(n, back[n]), list(n))
        if source is not None and cxc is cx and source.shape == ex.lattice.shape:
            # only the lines are invariants; entries may differ by gauge
            same = (lambda u, v: u == v) if field.exact else (lambda u, v: field.equal(u, v, max(abs(u), abs(v), 1.0)))
            diff = sum(
                not same(source.entry(n, i, k), ex.lattice.entry(n, i, k))
                for n in source.sites() if n in ex.lattice
                for i, k in source.shape.entries()
            )
            report.notes.append({"extraction_entry_differences": diff})
            log.info("extraction: %d matrix entries differ from the source lattice (gauge)", diff)
    if bad:
        report.notes.append({"failing_cubes": sorted(list(b) for b in bad)})
    return report


def verify_hex(st, cfg: RunConfig, report: Report) -> Report:
    hx.check_equivalence(st, report)
    hx.check_dckp(hx.hex_tau(st), st.box, st.field, report)
    report.notes.append({"positive": hx.is_positive(st)})
    return report


def cmd_verify(cfg: RunConfig) -> int:
    kind, obj = _read(cfg)
    report = Report()
    report.notes.append({"document": kind})
    if kind == "msystem":
        verify_msystem(obj, cfg, report)
    elif kind == "complex":
        verify_line_complex(obj, cfg, report)
    else:
        verify_hex(obj, cfg, report)
    _finish(cfg, report, cfg.out)
    return 0 if report.ok else 1


def _finish(cfg, report: Report, path):
    if path is not None:
        _write(cfg, json.dumps(report.to_json(), indent=1, default=str) + "\n", path)
    for note in report.notes:
        if isinstance(note, dict) and "failing_cubes" in note:
            print("failing cubes: " + ", ".join(str(tuple(b)) for b in note["failing_cubes"]))
    print(report.summary())


def cmd_hex(cfg: RunConfig) -> int:
    box, field = cfg.parsed_box(), cfg.field
    rng = cfg.rng()
    positive = field.exact
    last = None
    for _ in range(100):
        cauchy = hx.random_hex_cauchy(box, field, rng, positive=positive)
        try:
            st = hx.hex_fill(cauchy, box, field, printed=cfg.printed)
            break
        except LineComplexError as exc:
            last = exc
    else:
        raise last
    report = Report()
    hx.check_equivalence(st, report)
    if positive:
        hx.check_positivity(st, report.tally("positivity"))
    hx.check_dckp(hx.hex_tau(st), box, field, report)
    sym_box = Box(tuple((0, hi - lo) for lo, hi in box.bounds))
    lat, tau = hx.symmetric_reduction(sym_box, field, rng=cfg.rng(3))
    hx.check_symmetry(lat, report.tally("symmetry_preserved"))
    sym = hx.check_dckp(tau, sym_box, field, expect_zero=True)
    report.tallies["symmetric_dckp_zero"] = sym.tallies["dckp_zero"]
    report.tallies["symmetric_dckp_equals_hyperdeterminant"] = sym.tallies["dckp_equals_hyperdeterminant"]
    if cfg.printed:
        report.notes.append("printed variant of the recurrence in use")
    if cfg.out is not None:
        _write(cfg, ser.dumps(ser.hex_to_json(st)))
    _finish(cfg, report, cfg.report)
    return 0 if report.ok else 1


# -- OBJ export -------------------------------------------------------------------


def _affine(p):
    """Dehomogenize by x0; None for points at infinity."""
    x0 = complex(p[0])
    if abs(x0) < 1e-300 or abs(x0) <= 1e-12 * linalg.vec_norm(p):
        return None
    return tuple((complex(x) / x0).real for x in p[1:4])


def _dist2(u, v):
    return sum((a - b) ** 2 for a, b in zip(u, v))


def line_segment(cx, n):
    """Endpoints for the line at n: its two most distant edge points, else a unit segment."""
    pts = []
    for l in (1, 2, 3):
        for key in ((n, l), (shift(n, l, -1), l)):
            p = cx.edge_points.get(key)
            if p is not None:
                q = _affine(p)
                if q is not None:
                    pts.append(q)
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = _dist2(pts[i], pts[j])
            if d > 0 and (best is None or d > best[0]):
                best = (d, pts[i], pts[j])
    if best is not None:
        return best[1], best[2]
    a, b = cx.points(n)
    fa, fb = _affine(a), _affine(b)
    if fa is None and fb is None:
        fa = _affine(linalg.add(a, b))
        if fa is None:
            return None
    if fa is None or fb is None or fa == fb:
        base = fa if fa is not None else fb
        other = _affine(linalg.add(a, b))
        if other is None or other == base:
            # the line's direction is the point at infinity among a, b
            inf = a if fa is None else b
            d = tuple(complex(x).real for x in inf[1:4])
        else:
            d = tuple(o - s for o, s in zip(other, base))
    else:
        base = fa
        d = tuple(y - x for x, y in zip(fa, fb))
    norm = sum(x * x for x in d) ** 0.5
    if norm == 0:
        return None
    d = tuple(x / norm / 2 for x in d)
    return tuple(x - y for x, y in zip(base, d)), tuple(x + y for x, y in zip(base, d))


def export_obj(cx) -> str:
    if cx.dim == 4:
        cx = cx.project()
    if not cx.edge_points:
        cx.compute_edge_points()
    out = ["# line complex on " + str(cx.box)]
    count = 0
    for n in sweep_order(cx.box):
        if n not in cx:
            continue
        seg = line_segment(cx, n)
        out.append("g n_" + "_".join(str(x) for x in n))
        if seg is None:
            out.append("# line at infinity")
            continue
        for p in seg:
            out.append("v " + " ".join(repr(float(x)) for x in p))
        out.append(f"l {count + 1} {count + 2}")
        count += 2
    return "\n".join(out) + "\n"


def cmd_export_obj(cfg: RunConfig) -> int:
    kind, cx = _read(cfg)
    _expect(kind, "complex", "export-obj")
    _write(cfg, export_obj(cx))
    return 0


HANDLERS = {
    "generate": cmd_generate,
    "to-geometry": cmd_to_geometry,
    "from-geometry": cmd_from_geometry,
    "verify": cmd_verify,
    "hex": cmd_hex,
    "export-obj": cmd_export_obj,
}


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except (ser.FormatError, OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if cfg.verbose else logging.WARNING, format="%(message)s")
    try:
        return HANDLERS[cfg.command](cfg)
    except (ser.FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LineComplexError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

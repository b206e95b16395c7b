"""JSON formats for M-lattices, line complexes and hexahedron states.

Scalars are written in the textual form of their backend, so exact data
round-trips bit for bit.
"""
from __future__ import annotations

import json
from typing import Any

from .field import Field, get_field
from .lattice import Box, sweep_order
from .msystem import MatrixLattice, MSystemShape, SiteMatrix
from .projective import Subspace


class FormatError(ValueError):
    """Malformed input file; carries the file path and byte offset when known."""

    def __init__(self, message: str, path: str | None = None, offset: int | None = None):
        self.path = path
        self.offset = offset
        where = path or "<input>"
        if offset is not None:
            where += f" at byte {offset}"
        super().__init__(f"{where}: {message}")


def loads(text: str, path: str | None = None) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise FormatError(exc.msg, path, offset) from None


def load_file(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), path)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def kind_of(obj) -> str:
    if not isinstance(obj, dict):
        raise FormatError("top-level value must be an object")
    if "shape" in obj and "sites" in obj:
        return "msystem"
    if "dim" in obj and "lines" in obj:
        return "complex"
    if "h" in obj and "hx" in obj:
        return "hexahedron"
    raise FormatError("unrecognised document (expected an M-lattice, line complex or hexahedron state)")


def _field(obj, path, tol=None) -> Field:
    try:
        return get_field(obj.get("backend", "rational"), *(tol or ()))
    except ValueError as exc:
        raise FormatError(str(exc), path) from None


def _scalars(field: Field, values, path, where):
    try:
        return [field.parse(v) for v in values]
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}", path) from None


def _box(obj, path) -> Box:
    try:
        return Box.from_json(obj["box"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad or missing box: {exc}", path) from None


# -- M-lattice --------------------------------------------------------------


def msystem_to_json(lat: MatrixLattice) -> dict:
    f = lat.field
    return {
        "shape": lat.shape.to_json(),
        "box": lat.box.to_json(),
        "backend": f.name,
        "sites": [
            {"n": list(n), "M": [[f.format(x) for x in row] for row in lat[n].rows]}
            for n in sweep_order(lat.box)
            if n in lat
        ],
    }


def msystem_from_json(obj, path: str | None = None, tol=None) -> MatrixLattice:
    field = _field(obj, path, tol)
    try:
        shape = MSystemShape.from_json(obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad shape: {exc}", path) from None
    lat = MatrixLattice(shape, _box(obj, path), field)
    for j, site in enumerate(obj.get("sites", [])):
        where = f"sites[{j}]"
        try:
            n = tuple(int(x) for x in site["n"])
            rows = [_scalars(field, r, path, where) for r in site["M"]]
            lat.matrices[n] = SiteMatrix(rows, shape.Ul, shape.Ur)
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(f"{where}: {exc}", path) from None
    return lat


# -- line complexes ---------------------------------------------------------


def complex_to_json(cx, edge_points: bool = True) -> dict:
    f = cx.field
    lines = []
    for n in sweep_order(cx.box):
        if n not in cx:
            continue
        if cx.dim == 3:
            lines.append({"n": list(n), "plucker": [f.format(x) for x in cx[n]]})
        else:
            lines.append({"n": list(n), "points": [[f.format(x) for x in p] for p in cx[n].basis]})
    out = {"dim": cx.dim, "box": cx.box.to_json(), "backend": f.name, "lines": lines}
    if edge_points and cx.edge_points:
        out["edge_points"] = [
            {"n": list(n), "l": l, "point": [f.format(x) for x in p]}
            for (n, l), p in sorted(cx.edge_points.items())
        ]
    if cx.metadata:
        out["metadata"] = dict(cx.metadata)
    return out


def complex_from_json(obj, path: str | None = None, tol=None):
    from .complexes import LineComplexLattice

    field = _field(obj, path, tol)
    dim = obj.get("dim")
    if dim not in (3, 4):
        raise FormatError(f"dim must be 3 or 4, got {dim!r}", path)
    cx = LineComplexLattice(dim, _box(obj, path), field, obj.get("metadata"))
    for j, entry in enumerate(obj["lines"]):
        where = f"lines[{j}]"
        try:
            n = tuple(int(x) for x in entry["n"])
            if dim == 3:
                V = tuple(_scalars(field, entry["plucker"], path, where))
                if len(V) != 6:
                    raise ValueError("a Plücker vector has 6 entries")
                cx[n] = V
            else:
                pts = [tuple(_scalars(field, p, path, where)) for p in entry["points"]]
                cx[n] = Subspace(pts, field)
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(f"{where}: {exc}", path) from None
    for j, entry in enumerate(obj.get("edge_points", [])):
        where = f"edge_points[{j}]"
        try:
            cx.edge_points[(tuple(int(x) for x in entry["n"]), int(entry["l"]))] = tuple(
                _scalars(field, entry["point"], path, where)
            )
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(f"{where}: {exc}", path) from None
    return cx


# -- hexahedron states --------------------------------------------------------


def hex_to_json(st) -> dict:
    f = st.field
    out = {"box": st.box.to_json(), "backend": f.name}
    for name, fld in st.fields().items():
        out[name] = [{"n": list(n), "v": f.format(v)} for n, v in sorted(fld.items(), key=lambda kv: (sum(kv[0]), kv[0]))]
    return out


def hex_from_json(obj, path: str | None = None, tol=None):
    from .hexahedron import FIELDS, HexState

    field = _field(obj, path, tol)
    st = HexState.empty(_box(obj, path), field)
    fields = st.fields()
    for name in FIELDS:
        for j, entry in enumerate(obj.get(name, [])):
            where = f"{name}[{j}]"
            try:
                fields[name][tuple(int(x) for x in entry["n"])] = _scalars(field, [entry["v"]], path, where)[0]
            except FormatError:
                raise
            except Exception as exc:
                raise FormatError(f"{where}: {exc}", path) from None
    return st


def from_json(obj, path: str | None = None, tol=None):
    """(kind, object); ``tol`` is an optional (tol_rel, tol_abs) pair for float data."""
    kind = kind_of(obj)
    if kind == "msystem":
        return kind, msystem_from_json(obj, path, tol)
    if kind == "complex":
        return kind, complex_from_json(obj, path, tol)
    return kind, hex_from_json(obj, path, tol)

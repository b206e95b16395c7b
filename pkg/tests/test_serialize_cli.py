import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linecomplex import cli
from linecomplex import complexes as cxm
from linecomplex import hexahedron as hx
from linecomplex import msystem as ms
from linecomplex import serialize as ser
from linecomplex.field import GAUSS, RATIONAL
from linecomplex.lattice import Box

seeds = st.integers(0, 2**32 - 1)
BOX = Box.cube(0, 2)


def _rt(obj):
    return ser.from_json(json.loads(ser.dumps(obj)))[1]


# -- formats ----------------------------------------------------------------------


@given(seeds)
def test_msystem_round_trip(seed):
    lat, _ = ms.generate(ms.MSystemShape.square(3, 5), BOX, seed=seed)
    back = _rt(ser.msystem_to_json(lat))
    assert ser.msystem_to_json(back) == ser.msystem_to_json(lat)
    assert all(back[n].rows == lat[n].rows for n in lat.sites())


@given(seeds)
def test_complex_round_trip(seed):
    _, cx = cxm.generated_complex(seed)
    back = _rt(ser.complex_to_json(cx))
    assert all(back[n] == cx[n] for n in cx.sites())
    assert back.edge_points == cx.edge_points


def test_cp4_complex_round_trip():
    _, cx = cxm.generated_complex(2)
    lifted = cxm.lift_to_cp4(cx, seed=2)
    back = _rt(ser.complex_to_json(lifted))
    assert back.dim == 4 and back.metadata == lifted.metadata
    assert all(back[n] == lifted[n] for n in lifted.sites())


@given(seeds)
@settings(max_examples=10)
def test_hex_round_trip(seed):
    box = Box.cube(0, 2)
    st_ = hx.hex_fill(hx.random_hex_cauchy(box, RATIONAL, random.Random(seed)), box)
    assert _rt(ser.hex_to_json(st_)) == st_


def test_gauss_round_trip():
    lat, _ = ms.generate(ms.MSystemShape.square(3, 5), BOX, GAUSS, seed=1)
    back = _rt(ser.msystem_to_json(lat))
    assert all(back[n].rows == lat[n].rows for n in lat.sites())


def test_malformed_json_reports_byte_offset():
    with pytest.raises(ser.FormatError) as exc:
        ser.loads('{"dim": 3,\n "lines": [}', "x.json")
    assert exc.value.path == "x.json" and exc.value.offset == 22
    assert "x.json at byte 22" in str(exc.value)


def test_structural_error_names_the_entry():
    obj = ser.complex_to_json(cxm.generated_complex(0)[1])
    obj["lines"][3]["plucker"] = ["1", "2"]
    with pytest.raises(ser.FormatError, match=r"lines\[3\]"):
        ser.from_json(obj, "c.json")


def test_unknown_document():
    with pytest.raises(ser.FormatError):
        ser.kind_of({"foo": 1})


# -- command line ------------------------------------------------------------------


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def lattice_file(tmp_path):
    out = tmp_path / "m.json"
    assert run("generate", "--seed", 42, "--box", "0..2,0..2,0..2", "--out", out) == 0
    return out


def test_generate_is_deterministic(tmp_path, lattice_file):
    again = tmp_path / "m2.json"
    assert run("generate", "--seed", 42, "--box", "0..2,0..2,0..2", "--out", again) == 0
    assert again.read_bytes() == lattice_file.read_bytes()
    other = tmp_path / "m3.json"
    run("generate", "--seed", 43, "--out", other)
    assert other.read_bytes() != lattice_file.read_bytes()


def test_verify_generated_lattice(tmp_path, lattice_file, capsys):
    rep = tmp_path / "r.json"
    assert run("verify", "--in", lattice_file, "--out", rep) == 0
    data = json.loads(rep.read_text())
    names = set(data["suites"])
    for name in ("msystem_evolution", "jacobi_identities", "msystem_consistency", "edge_intersections", "eighth_line"):
        assert name in names
    assert all(t["failed"] == 0 for t in data["suites"].values())


def test_geometry_round_trip(tmp_path, lattice_file):
    c1, m2, c2 = tmp_path / "c1.json", tmp_path / "m2.json", tmp_path / "c2.json"
    assert run("to-geometry", "--in", lattice_file, "--out", c1) == 0
    assert run("verify", "--in", c1) == 0
    assert run("from-geometry", "--in", c1, "--out", m2) == 0
    assert run("to-geometry", "--in", m2, "--out", c2) == 0
    a = ser.from_json(json.loads(c1.read_text()))[1]
    b = ser.from_json(json.loads(c2.read_text()))[1]
    assert a.same_lines(b)


def test_corrupted_line_names_its_cube(tmp_path, lattice_file, capsys):
    c = tmp_path / "c.json"
    run("to-geometry", "--in", lattice_file, "--no-edge-points", "--out", c)
    obj = json.loads(c.read_text())
    for entry in obj["lines"]:
        if entry["n"] == [2, 2, 2]:
            entry["plucker"] = ["1", "0", "0", "0", "0", "0"]
    c.write_text(json.dumps(obj))
    rep = tmp_path / "r.json"
    capsys.readouterr()
    assert run("verify", "--in", c, "--out", rep) == 1
    out = capsys.readouterr().out
    assert "failing cubes: (1, 1, 1)" in out
    notes = json.loads(rep.read_text())["notes"]
    assert {"failing_cubes": [[1, 1, 1]]} in notes


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7, "box": "0..1,0..1,0..1", "size": 5}))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("generate", "--config", cfg, "--out", a) == 0
    assert run("generate", "--seed", 7, "--box", "0..1,0..1,0..1", "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    assert run("generate", "--config", cfg, "--seed", 8, "--out", c) == 0
    assert c.read_bytes() != a.read_bytes()


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sede": 7}))
    assert run("generate", "--config", cfg) == 2


def test_malformed_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"shape": ')
    assert run("verify", "--in", bad) == 2
    assert "at byte 10" in capsys.readouterr().err


def test_hex_command(tmp_path):
    st_, rep = tmp_path / "h.json", tmp_path / "r.json"
    assert run("hex", "--seed", 1, "--box", "0..3,0..3,0..3", "--out", st_, "--report", rep) == 0
    data = json.loads(rep.read_text())
    for name in ("hex_equivalence", "dckp_equals_hyperdeterminant", "symmetric_dckp_zero", "positivity"):
        assert data["suites"][name]["failed"] == 0
    assert run("verify", "--in", st_) == 0
    assert run("hex", "--seed", 1, "--printed") == 1


def test_export_obj(tmp_path, lattice_file):
    c, obj = tmp_path / "c.json", tmp_path / "c.obj"
    run("to-geometry", "--in", lattice_file, "--out", c)
    assert run("export-obj", "--in", c, "--out", obj) == 0
    text = obj.read_text().splitlines()
    groups = [l for l in text if l.startswith("g ")]
    assert len(groups) == 27 and "g n_0_0_0" in groups and "g n_2_2_2" in groups
    assert sum(l.startswith("v ") for l in text) == 54
    assert sum(l.startswith("l ") for l in text) == 27


def test_float_backend_pipeline(tmp_path):
    m = tmp_path / "m.json"
    assert run("generate", "--backend", "f64", "--seed", 3, "--out", m) == 0
    assert run("verify", "--in", m) == 0

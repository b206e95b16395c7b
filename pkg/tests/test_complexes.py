import random

import pytest
from gmpy2 import mpq
from hypothesis import assume, given
from hypothesis import strategies as st

from linecomplex import complexes as cxm
from linecomplex import linalg
from linecomplex import msystem as ms
from linecomplex import projective as pg
from linecomplex.errors import DegeneratePair, NonGenericPosition, NormalizationFailure
from linecomplex.field import GAUSS, RATIONAL, get_field
from linecomplex.lattice import Box, shift, sweep_order
from linecomplex.msystem import inner

BOX = Box.cube(0, 2)
SHAPE5 = ms.MSystemShape.square(3, 5)
seeds = st.integers(0, 2**32 - 1)


def generic(fn, *args, **kw):
    """Run a construction; discard the example if the draw is in special position."""
    try:
        return fn(*args, **kw)
    except NonGenericPosition:
        assume(False)


def _matrix(block):
    rows = [[mpq(int(i == k)) for k in range(5)] for i in range(5)]
    rows[3][3], rows[3][4], rows[4][3], rows[4][4] = map(mpq, (block[0][0], block[0][1], block[1][0], block[1][1]))
    return ms.SiteMatrix(rows, SHAPE5.Ul, SHAPE5.Ur)


# -- algebra -> geometry ---------------------------------------------------------


def test_v_from_matrix_examples():
    assert cxm.v_from_matrix(_matrix([[1, 0], [0, 1]])) == (1, 1, 1, 1, 0, 0)
    V = cxm.v_from_matrix(_matrix([[2, 5], [3, 7]]))
    assert V == (1, -1, 2, 7, 3, 5)
    a, b = cxm.lift_points(_matrix([[2, 5], [3, 7]]))
    assert pg.lines_equal(pg.line_from_points(a, b), V)


def test_identity_data_gives_constant_complex():
    lat = ms.fill_from_cauchy(SHAPE5, ms.identity_cauchy(SHAPE5, BOX), BOX)
    cx = cxm.complex_from_msystem(lat, edge_points=False)
    first = cx[(0, 0, 0)]
    assert all(pg.lines_equal(cx[n], first) for n in cx.sites())


@given(seeds)
def test_generated_complexes_are_fundamental(seed):
    lat, cx = cxm.generated_complex(seed)
    rep = cxm.verify_complex(cx, census=True)
    assert rep.ok, rep.summary()
    assert rep.tallies["edge_intersections"].checked == 54
    assert rep.tallies["coplanarity"].checked == 24
    assert cxm.check_diagonals(lat).ok


@given(seeds)
def test_edge_points_match_formula(seed):
    lat, cx = cxm.generated_complex(seed)
    for (n, l), p in cx.edge_points.items():
        assert pg.point_on_line(p, cx[n]) and pg.point_on_line(p, cx[shift(n, l)])
        assert pg.points_equal(p, pg.meet_point(cx[n], cx[shift(n, l)]))


def test_diagonal_is_join_of_edge_points():
    lat, cx = cxm.generated_complex(3)
    n = (0, 0, 0)
    for l in (1, 2, 3):
        for m in (1, 2, 3):
            if l == m:
                continue
            D = cxm.diagonal_line(lat[n], l, m)
            J = pg.line_from_points(cx.edge_points[(n, l)], cx.edge_points[(shift(n, m), l)])
            assert pg.lines_equal(D, J)
            assert inner(D, cx[n]) == 0


# -- cube checks -----------------------------------------------------------------


def test_cube_census():
    _, cx = cxm.generated_complex(1)
    rep = cxm.check_fundamental_cube(cx.cube((0, 0, 0)))
    assert rep.ok and rep.census == (15, 20, 4, 3)
    assert len(rep.edges) == 12 and len(rep.coplanarity) == 3


def test_perturbed_line_breaks_coplanarity():
    rng = random.Random(0)
    _, cx = cxm.generated_complex(2)
    lines = dict(cx.cube((0, 0, 0)))
    a, b = pg.points_on_line(lines[(1, 1, 1)])
    lines[(1, 1, 1)] = pg.line_from_points(a, linalg.add(b, (mpq(1), mpq(0), mpq(0), mpq(1, 7))))
    rep = cxm.check_fundamental_cube(lines)
    assert not rep.ok


@given(seeds)
def test_one_coplanarity_forces_the_rest(seed):
    rng = random.Random(seed)
    try:
        lines = cxm.random_constrained_cube(RATIONAL, rng)
    except (NonGenericPosition, DegeneratePair):
        assume(False)
    rep = cxm.check_fundamental_cube(lines)
    assert rep.ok


# -- the eighth line ---------------------------------------------------------------


def _seven(lines):
    c = cxm.corner
    return (lines[c()], lines[c(1)], lines[c(2)], lines[c(3)], lines[c(1, 2)], lines[c(2, 3)], lines[c(1, 3)])


@given(seeds)
def test_eighth_line_reproduces_msystem(seed):
    _, cx = cxm.generated_complex(seed, Box.cube(0, 1))
    lines = cx.cube((0, 0, 0))
    assert pg.lines_equal(cxm.eighth_line(*_seven(lines)), lines[(1, 1, 1)])
    assert cxm.desargues_determinant(*_seven(lines)) == 0


def test_eighth_line_involution():
    _, cx = cxm.generated_complex(4, Box.cube(0, 1))
    lines = cx.cube((0, 0, 0))
    for missing in ((0, 0, 0), (1, 1, 1), (1, 0, 1)):
        got = cxm.eighth_from_cube({k: v for k, v in lines.items() if k != missing}, missing)
        assert pg.lines_equal(got, lines[missing])


@given(seeds)
def test_eighth_line_on_random_seven_lines(seed):
    rng = random.Random(seed)
    seven = cxm.random_seven_lines(RATIONAL, rng)
    try:
        top = cxm.eighth_from_cube(seven, (1, 1, 1))
    except NonGenericPosition:
        assume(False)
    full = dict(seven)
    full[(1, 1, 1)] = top
    assert cxm.check_fundamental_cube(full).ok


# -- geometric fills ------------------------------------------------------------------


@given(seeds)
def test_cp3_fill_reproduces_msystem_complex(seed):
    _, cx = cxm.generated_complex(seed)
    cauchy = {n: cx[n] for n in cxm.face_sites(BOX)}
    filled = generic(cxm.fill_geometric_cp3, cauchy, BOX, rng=random.Random(seed))
    assert filled.same_lines(cx)


def test_cp3_fill_constant():
    V = pg.line_from_points((mpq(1), 0, 0, 0), (0, mpq(1), 0, 0))
    cauchy = {n: V for n in cxm.face_sites(BOX)}
    filled = cxm.fill_geometric_cp3(cauchy, BOX)
    assert all(pg.lines_equal(filled[n], V) for n in filled.sites())


def test_cp3_fill_orders_agree():
    rng = random.Random(9)
    cauchy = cxm.random_cauchy_lines(BOX, 3, RATIONAL, rng)
    a = cxm.fill_geometric_cp3(cauchy, BOX, rng=random.Random(1))
    b = cxm.fill_geometric_cp3(cauchy, BOX, rng=random.Random(2))
    assert a.same_lines(b)
    assert cxm.verify_complex(a).ok


def test_cp3_fill_from_a_level_slab():
    # lines on levels 6..8 of [0,4]^3 determine everything above level 8
    _, cx = cxm.generated_complex(5, Box.cube(0, 4))
    slab = {n: cx[n] for n in cx.sites() if 6 <= sum(n) <= 8}
    targets = [n for n in cx.sites() if sum(n) >= 6]
    filled = cxm.fill_geometric_cp3(slab, Box.cube(0, 4), targets=targets)
    assert all(filled.lines_equal(n, cx[n]) for n in targets)


def test_cp3_fill_rejects_undetermined_targets():
    _, cx = cxm.generated_complex(5)
    slab = {n: cx[n] for n in cx.sites() if sum(n) == 3}
    with pytest.raises(ValueError):
        cxm.fill_geometric_cp3(slab, BOX)


@given(seeds)
def test_cp4_fill_projects_to_fundamental_complex(seed):
    rng = random.Random(seed)
    cauchy = cxm.random_cauchy_lines(BOX, 4, RATIONAL, rng)
    try:
        cx4 = cxm.fill_geometric_cp4(cauchy, BOX)
    except NonGenericPosition:
        assume(False)
    assert cxm.verify_complex(cx4).tallies["edge_intersections"].ok
    assert cxm.verify_complex(cx4.project()).ok


@given(seeds)
def test_lift_then_project_is_identity(seed):
    _, cx = cxm.generated_complex(seed)
    lifted = generic(cxm.lift_to_cp4, cx, seed=seed)
    assert lifted.metadata["lift_seed"] == seed
    assert lifted.project().same_lines(cx)
    assert cxm.verify_complex(lifted).tallies["edge_intersections"].ok
    other = generic(cxm.lift_to_cp4, cx, seed=seed + 1)
    assert other.project().same_lines(cx)


def test_per_cube_lift():
    _, cx = cxm.generated_complex(6, Box.cube(0, 1))
    lines = cx.cube((0, 0, 0))
    lifted = cxm.lift_cube_cp4(lines, seed=1)
    for e, X in lifted.items():
        assert pg.lines_equal(pg.project_line(X), lines[e])


# -- extraction ------------------------------------------------------------------------


@given(seeds)
def test_extraction_round_trip(seed):
    _, cx = cxm.generated_complex(seed)
    ex = generic(cxm.extract_msystem_detailed, cx, seed=seed)
    assert ex.report.ok, ex.report.summary()
    assert ms.check_evolution(ex.lattice).ok
    assert cxm.complex_from_msystem(ex.lattice, edge_points=False).same_lines(cx)


def test_extraction_constant_complex():
    lat = ms.fill_from_cauchy(SHAPE5, ms.identity_cauchy(SHAPE5, BOX), BOX)
    cx = cxm.complex_from_msystem(lat, edge_points=False)
    back = cxm.extract_msystem(cx)
    assert cxm.complex_from_msystem(back, edge_points=False).same_lines(cx)


def test_darboux_step_matches_stored_coefficients():
    _, cx = cxm.generated_complex(8)
    ex = cxm.extract_msystem_detailed(cx)
    for name in ("darboux_rotation", "darboux_combescure", "darboux_conservation", "expansion_compatibility"):
        t = ex.report.tallies[name]
        assert t.checked > 0 and t.ok


def test_extraction_needs_the_chart():
    # a line missing the chart g01 != 0 has no normalized lift
    V = pg.line_from_points((0, 0, mpq(1), 0), (0, 0, 0, mpq(1)))
    assert V[0] == 0
    with pytest.raises(NormalizationFailure):
        cxm.normalized_lift(V)
    _, cx = cxm.generated_complex(1)
    moved, A = cxm.rechart(cx, random.Random(0))
    assert cxm.complex_from_msystem(cxm.extract_msystem(moved), edge_points=False).same_lines(moved)


def test_float_round_trip(f64):
    lat, _ = ms.generate(SHAPE5, BOX, f64, seed=4)
    cx = cxm.complex_from_msystem(lat)
    assert cxm.verify_complex(cx).ok
    back = cxm.complex_from_msystem(cxm.extract_msystem(cx), edge_points=False)
    assert back.same_lines(cx)


def test_gaussian_complex():
    lat, _ = ms.generate(SHAPE5, BOX, GAUSS, seed=4)
    cx = cxm.complex_from_msystem(lat)
    assert cxm.verify_complex(cx, census=True).ok

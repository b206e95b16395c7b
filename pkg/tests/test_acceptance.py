"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""
import functools
import itertools
import random
import time

import numpy as np
import pytest

from linecomplex import complexes as cxm
from linecomplex import correlation as cr
from linecomplex import hexahedron as hx
from linecomplex import linalg
from linecomplex import msystem as ms
from linecomplex import projective as pg
from linecomplex.field import RATIONAL, get_field
from linecomplex.lattice import Box

BOX2 = Box.cube(0, 2)
BOX3 = Box.cube(0, 3)
SHAPE3 = ms.MSystemShape.square(3)
SHAPE5 = ms.MSystemShape.square(3, 5)
F64 = get_field("f64")
FLOAT_BOUND = 1e-9
# float seeds are kept when every pivot M^{ll} is at least this fraction of
# the largest entry of its matrix
PIVOT_FLOOR = 1e-6


@pytest.fixture
def announce(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


@functools.lru_cache(maxsize=None)
def generated(seed, field_name="rational"):
    field = get_field(field_name)
    lat, _ = ms.generate(SHAPE5, BOX2, field, seed=seed)
    return lat, cxm.complex_from_msystem(lat)


@functools.lru_cache(maxsize=None)
def generic_seeds(count, field_name="rational"):
    """The first ``count`` seeds whose complex is in general position, and the seeds skipped on the way.

    The geometric theorems assume general position; a seeded draw lands in
    special position (coincident edge points, four coplanar hexagon
    vertices) for well under 1% of seeds.
    """
    kept, skipped = [], []
    seed = 0
    while len(kept) < count:
        (kept if cxm.general_position(generated(seed, field_name)[1]) else skipped).append(seed)
        seed += 1
    return tuple(kept), tuple(skipped)


def _residual(tallies):
    return max((t.max_residual or 0.0) for t in tallies.values())


# 1 ------------------------------------------------------------------------------


def test_criterion_1_consistency(announce):
    t0 = time.perf_counter()
    bad = []
    for seed in range(100):
        lat, data = ms.generate(SHAPE3, BOX2, seed=seed)
        fills = [ms.fill_from_cauchy(SHAPE3, data, BOX2, RATIONAL, order) for order in ms.all_direction_orders(SHAPE3.L)]
        if not all(f == lat for f in fills):
            bad.append(seed)
    dt = time.perf_counter() - t0
    announce(1, not bad and dt < 10, f"100 seeds x 6 direction orders bit-identical, {len(bad)} mismatches, {dt:.2f} s (< 10 s)")


# 2 ------------------------------------------------------------------------------


def test_criterion_2_identity_suite(announce):
    rng = random.Random(2)
    nonzero = 0
    names = set()
    for j in range(1000):
        M = ms.random_matrix(4 + j % 4, RATIONAL, rng)
        for name, (value, _) in ms.identity_suite(M, rng, RATIONAL).items():
            names.add(name)
            nonzero += value != 0
    announce(2, nonzero == 0, f"{len(names)} identities x 1000 matrices of size 4..7, {nonzero} nonzero values")


# 3 ------------------------------------------------------------------------------


def test_criterion_3_tau(announce):
    failed = 0
    for seed in range(100):
        lat, _ = ms.generate(SHAPE3, BOX2, seed=seed)
        tau = ms.tau_fill(lat)  # raises PathInconsistency if any two paths disagree
        t = ms.check_tau(lat, tau)
        failed += t.failed + (t.checked == 0)
    announce(3, failed == 0, f"tau path-independent and tau_A = M^(A,A) tau on 100 seeds, {failed} failures")


# 4 ------------------------------------------------------------------------------


def _criterion_4(seed, field_name):
    lat, cx = generated(seed, field_name)
    rep = cxm.verify_complex(cx)
    ok = rep.tallies["edge_intersections"].checked == 54 and rep.tallies["coplanarity"].checked == 24
    diag = cxm.check_diagonals(lat)
    ok = ok and all(diag.tallies[k].ok for k in ("diagonal_orthogonality", "opposite_diagonals", "diagonals_same_type"))
    return ok and rep.ok, max(_residual(rep.tallies), _residual(diag.tallies))


def test_criterion_4_fundamental_complexes(announce):
    seeds, skipped = generic_seeds(100)
    bad = [s for s in seeds if not _criterion_4(s, "rational")[0]]
    announce(4, not bad, f"100 seeds x 8 cubes: 12 edges and 6 coplanarities per cube, diagonal relations exact; "
                         f"failing seeds {bad}; special-position seeds skipped {list(skipped)}")


# 5 ------------------------------------------------------------------------------


def _criterion_5(seed, field_name):
    field = get_field(field_name)
    _, cx = generated(seed, field_name)
    ok, worst = True, 0.0
    for b in cx.cubes():
        lines = cx.cube(b)
        got = cxm.eighth_from_cube(lines, (1, 1, 1), field, b)
        ok = ok and pg.lines_equal(got, lines[(1, 1, 1)], field)
        if field.exact:
            L = lambda *d: lines[cxm.corner(*d)]  # noqa: E731
            ok = ok and cxm.desargues_determinant(L(), L(1), L(2), L(3), L(1, 2), L(2, 3), L(1, 3)) == 0
        else:
            worst = max(worst, linalg.proportionality_residual(got, lines[(1, 1, 1)]))
    return ok, worst


def test_criterion_5_eighth_line(announce):
    seeds, skipped = generic_seeds(100)
    bad = [s for s in seeds if not _criterion_5(s, "rational")[0]]
    announce(5, not bad, f"eighth line equals stored l123 and Desargues determinant is 0 on 800 cubes; failing seeds {bad}; "
                         f"skipped {list(skipped)}")


# 6 ------------------------------------------------------------------------------


def test_criterion_6_extraction_round_trip(announce):
    t0 = time.perf_counter()
    bad = []
    seeds, skipped = generic_seeds(25)
    for seed in seeds:
        _, cx = generated(seed)
        back = cxm.complex_from_msystem(cxm.extract_msystem(cx, seed=seed), edge_points=False)
        if not back.same_lines(cx):
            bad.append(seed)
    dt = time.perf_counter() - t0
    announce(6, not bad and dt < 60, f"25 seeds reproduced line-for-line, failing {bad}, skipped {list(skipped)}, {dt:.2f} s (< 60 s)")


# 7 ------------------------------------------------------------------------------


def test_criterion_7_cp4(announce):
    bad_lift, bad_fill = [], []
    seeds, skipped = generic_seeds(25)
    for seed in seeds:
        _, cx = generated(seed)
        if not cxm.lift_to_cp4(cx, seed=seed).project().same_lines(cx):
            bad_lift.append(seed)
        cauchy = cxm.random_cauchy_lines(BOX2, 4, RATIONAL, random.Random(seed))
        proj = cxm.fill_geometric_cp4(cauchy, BOX2).project()
        rep = cxm.verify_complex(proj)
        if not (rep.ok and rep.tallies["coplanarity"].checked == 24):
            bad_fill.append(seed)
    announce(7, not bad_lift and not bad_fill,
             f"project(lift) = input on 25 seeds (failing {bad_lift}, skipped {list(skipped)}); 25 CP4 fills project to fundamental complexes (failing {bad_fill})")


# 8 ------------------------------------------------------------------------------


def test_criterion_8_hexahedron(announce):
    bad, negative = [], []
    for seed in range(100):
        st = hx.hex_fill(hx.random_hex_cauchy(BOX3, RATIONAL, random.Random(seed)), BOX3)
        rep = hx.check_equivalence(st)
        if not rep.ok or rep.tallies["hex_equivalence"].checked == 0:
            bad.append(seed)
        if not hx.is_positive(st):
            negative.append(seed)
    announce(8, not bad and not negative,
             f"hexahedron vs M-system bit-exact on [0,3]^3, 100 seeds (failing {bad}); positivity kept (violations {negative})")


# 9 ------------------------------------------------------------------------------


def test_criterion_9_dckp(announce):
    nonzero = 0
    for seed in range(100):
        _, tau = hx.symmetric_reduction(BOX2, seed=seed)
        nonzero += sum(hx.dckp_residual(hx.cube_values(tau, b)) != 0 for b in BOX2.cubes())
    rng = random.Random(9)
    mismatch = 0
    for _ in range(1000):
        a = [[[RATIONAL.random(rng) for _ in range(2)] for _ in range(2)] for _ in range(2)]
        mismatch += hx.dckp_residual(a) != hx.hyperdeterminant(a)
    announce(9, nonzero == 0 and mismatch == 0,
             f"symmetric tau: {nonzero} nonzero residuals on 800 cubes; hyperdeterminant mismatches on 1000 arrays: {mismatch}")


# 10 -----------------------------------------------------------------------------


def _criterion_10(seed, field):
    rng = random.Random(seed)
    xs = cr.random_hexagon(field, rng)
    ok = cr.polarity_nullity(xs, field) == 1
    pol = cr.polarity_from_hexagon(xs, field)
    edges = cr.hexagon_edges(xs, field)
    ok = ok and all(pg.lines_equal(pol.line(edges[i]), edges[(i + 3) % 6], field) for i in range(6))
    V = pg.line_from_points(cxm.random_point(4, field, rng), cxm.random_point(4, field, rng), field)
    ok = ok and pg.lines_equal(pol.line(pol.line(V)), V, field)
    worst = 0.0 if field.exact else linalg.proportionality_residual(pol.line(pol.line(V)), V)
    return ok, worst


def _criterion_10_cube(seed, field_name):
    field = get_field(field_name)
    _, cx = generated(seed, field_name)
    rep = cr.verify_cube_polarity(cx.cube((0, 0, 0)), field)
    return rep.ok, max(rep.residuals.values(), default=0.0)


def test_criterion_10_polarity(announce):
    bad_hex = [s for s in range(100) if not _criterion_10(s, RATIONAL)[0]]
    seeds, skipped = generic_seeds(100)
    bad_cube = [s for s in seeds if not _criterion_10_cube(s, "rational")[0]]
    announce(10, not bad_hex and not bad_cube,
             f"nullity 1, involution, edge swap on 100 hexagons (failing {bad_hex}); "
             f"kappa(l) = eighth line and coplanarity determinant 0 on 100 cubes (failing {bad_cube}, skipped {list(skipped)})")


# 11 -----------------------------------------------------------------------------


def conditioned(lat) -> bool:
    """Every pivot used by the fill is at least PIVOT_FLOOR times its matrix's largest entry."""
    for n in lat.sites():
        M = lat[n]
        big = max(abs(x) for row in M.rows for x in row)
        if min(abs(M[l, l]) for l in lat.shape.L) < PIVOT_FLOOR * big:
            return False
    return True


def test_criterion_11_float(announce):
    rng = random.Random(11)
    worst = {2: 0.0, 4: 0.0, 5: 0.0, 10: 0.0}
    failed = {k: [] for k in worst}
    for j in range(1000):
        M = ms.random_matrix(4 + j % 4, F64, rng)
        for value, sc in ms.identity_suite(M, rng, F64).values():
            worst[2] = max(worst[2], abs(complex(value)) / sc if sc else abs(complex(value)))
    kept, rejected = 0, 0
    seeds, skipped = generic_seeds(100, "f64")
    for seed in seeds:
        lat, _ = generated(seed, "f64")
        if not conditioned(lat):
            rejected += 1
            continue
        kept += 1
        for crit, fn in ((4, _criterion_4), (5, _criterion_5), (10, _criterion_10_cube)):
            ok, r = fn(seed, "f64")
            worst[crit] = max(worst[crit], r)
            if not ok:
                failed[crit].append(seed)
        ok, r = _criterion_10(seed, F64)
        worst[10] = max(worst[10], r)
        if not ok:
            failed[10].append(seed)
    ok = all(v < FLOAT_BOUND for v in worst.values()) and not any(failed.values()) and kept >= 90
    detail = ", ".join(f"c{k} max residual {v:.1e}" for k, v in worst.items())
    announce(11, ok, f"complex128, {kept} conditioned seeds ({rejected} ill-conditioned, {len(skipped)} special-position skipped): {detail} (< 1e-9); failing {failed}")


if __name__ == "__main__":  # pragma: no cover
    import sys

    sys.exit(pytest.main([__file__, "-v"]))

from fractions import Fraction

import numpy as np
import pytest

from abcf.attractor import (
    ConstructionError,
    RectDomain,
    Step,
    build_attractor,
    compare_with_oracle,
    reduction_scan,
    verify_bijectivity,
    verify_connectivity,
)
from abcf.cycles import truncated_orbits
from abcf.natext import F_step_array, sample_attractor, trapping_region
from abcf.params import Params, interior_rational_params
from abcf.scalars import NEG_INF, POS_INF, Surd, as_float


Z = Params.make("-4/5", "2/5")


def column_boxes(dom):
    """Steps as closed column boxes (x_lo, x_hi, y_lo, y_hi)."""
    from abcf.natext import Box

    cols = [Box(s.x_lo, s.x_hi, s.y, POS_INF) for s in dom.upper]
    cols += [Box(s.x_lo, s.x_hi, NEG_INF, s.y) for s in dom.lower]
    return sorted(b.floats() for b in cols)


def test_classical_m11_exact_boxes():
    dom = build_attractor(Params.make("-1", "1"))
    cols = [(s.x_lo, s.x_hi, s.y) for s in dom.upper] + [
        (s.x_lo, s.x_hi, s.y) for s in dom.lower
    ]
    assert cols == [
        (NEG_INF, Fraction(-1), Fraction(0)),
        (Fraction(-1), Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(1), Fraction(-1)),
        (Fraction(1), POS_INF, Fraction(0)),
    ]
    # coincides with the trapping region (same four columns)
    trap = sorted(b.floats() for b in trapping_region(dom.params).boxes)
    assert column_boxes(dom) == trap


def test_classical_minus_chart():
    dom = build_attractor(Params.make("-1", "0"))
    assert dom.lower == []
    assert [(as_float(s.y)) for s in dom.upper] == [-1.0, 0.0, 1.0]


def test_corner_special_cases():
    # the (1,1) pattern
    dom = build_attractor(Params.make("-7/10", "4/5"))
    assert (dom.x_a, dom.x_b) == (1, -1)
    # the (1,2) pattern
    dom = build_attractor(Z)
    assert (dom.x_a, dom.x_b) == (2, -1)
    # a <= -1 with Sb-digit m gives (m, -1)
    for b, m in [("1/2", 1), ("1/3", 2), ("1/4", 3)]:
        dom = build_attractor(Params.make("-6/5", b))
        assert (dom.x_a, dom.x_b) == (m, -1), (b, dom.x_a)
    dom = build_attractor(Params.make("-3/2", "1/4"))
    assert (dom.x_a, dom.x_b) == (3, -1)


def test_hurwitz_chart_golden_corners():
    dom = build_attractor(Params.make("-1/2", "1/2"))
    g = Surd.make(1, 1, 2, 5)
    assert dom.x_a == g and dom.x_b == -g


def test_level_multiset_identity():
    rng = np.random.default_rng(19)
    for p in interior_rational_params(rng, 8):
        dom = build_attractor(p)
        tro = truncated_orbits(p)
        assert sorted(map(as_float, tro.all_lower_values())) == [
            as_float(s.y) for s in dom.lower
        ]
        assert sorted(map(as_float, tro.all_upper_values())) == [
            as_float(s.y) for s in dom.upper
        ]


def test_monotone_steps():
    rng = np.random.default_rng(23)
    for p in interior_rational_params(rng, 8):
        dom = build_attractor(p)
        for steps in (dom.lower, dom.upper):
            xs = [s.x_lo for s in steps]
            for u, v in zip(xs, xs[1:]):
                from abcf.scalars import cmp_bound

                assert cmp_bound(u, v) <= 0


def test_connectivity_report_and_negative_control():
    dom = build_attractor(Z)
    rep = verify_connectivity(dom)
    assert rep["ok"] and not rep["failures"]
    # corrupt one join
    bad_lower = list(dom.lower)
    s = bad_lower[2]
    bad_lower[2] = Step(s.x_lo + Fraction(1, 100), s.x_hi, s.y, s.origin)
    bad = RectDomain(dom.params, dom.upper, bad_lower, dom.x_a, dom.x_b, orbits=dom.orbits)
    rep = verify_connectivity(bad)
    assert not rep["ok"] and rep["failures"]


def test_connectivity_named_joins_zagier():
    dom = build_attractor(Z)
    # levels STa | Sb join at 0 and Sa | ST^-1 b join at 0
    la1 = next(s for s in dom.lower if s.origin == "La[1]")
    lb0 = next(s for s in dom.lower if s.origin == "Lb[0]")
    assert la1.x_hi == 0 and lb0.x_lo == 0
    ua0 = next(s for s in dom.upper if s.origin == "Ua[0]")
    ub1 = next(s for s in dom.upper if s.origin == "Ub[1]")
    assert ua0.x_hi == 0 and ub1.x_lo == 0


def test_bijectivity_random_interior():
    rng = np.random.default_rng(29)
    for p in interior_rational_params(rng, 10):
        dom = build_attractor(p)
        rep = verify_bijectivity(dom)
        assert rep.ok, (p, rep.to_json())
        assert rep.overlap_measure == 0 and rep.uncovered_measure == 0


def test_bijectivity_locking_segments():
    rep = verify_bijectivity(build_attractor(Z))
    assert len(rep.locking_segments) == 2  # both endpoints strong
    rep = verify_bijectivity(build_attractor(Params.make("-1", "1")))
    assert rep.ok and len(rep.locking_segments) == 0  # weak cycles
    rep = verify_bijectivity(build_attractor(Params.make("-1", "0")))
    assert rep.ok


def test_boundary_absorption_strong_cycles():
    # both-strong parameters: every boundary segment is eventually interior
    for pair in [("-4/5", "2/5"), ("-7/10", "4/5")]:
        p = Params.make(*pair)
        dom = build_attractor(p)
        pts = []
        for s in dom.upper + dom.lower:
            lo = -8.0 if s.x_lo is NEG_INF else as_float(s.x_lo)
            hi = 8.0 if s.x_hi is POS_INF else as_float(s.x_hi)
            if hi > lo:
                pts.append(((lo + hi) / 2, as_float(s.y)))
        xs = np.array([q[0] for q in pts])
        ys = np.array([q[1] for q in pts])
        interior = np.zeros(len(xs), dtype=bool)
        for _ in range(200):
            xs, ys = F_step_array(xs, ys, p)
            ok = np.isfinite(xs) & np.isfinite(ys)
            interior |= ok & dom.contains_array(xs, ys, tol=-1e-7)
        assert interior.all()


def test_compare_with_oracle_zagier():
    dom = build_attractor(Z)
    cloud = sample_attractor(Z, burn_in=200, n_points=30_000, seed=5)
    rep = compare_with_oracle(dom, cloud)
    assert rep.inside_fraction >= 0.999
    assert rep.boundary_gap <= 0.05


def test_compare_with_oracle_m11_exact():
    p = Params.make("-1", "1")
    dom = build_attractor(p)
    cloud = sample_attractor(p, burn_in=200, n_points=20_000, seed=6)
    rep = compare_with_oracle(dom, cloud)
    assert rep.inside_fraction == 1.0


def test_compare_with_oracle_negative_control():
    dom = build_attractor(Z)
    shrunk_lower = [
        Step(s.x_lo, s.x_hi, s.y - Fraction(1, 2), s.origin) for s in dom.lower
    ]
    shrunk_upper = [
        Step(s.x_lo, s.x_hi, s.y + Fraction(1, 2), s.origin) for s in dom.upper
    ]
    bad = RectDomain(dom.params, shrunk_upper, shrunk_lower, dom.x_a, dom.x_b)
    cloud = sample_attractor(Z, burn_in=200, n_points=20_000, seed=7)
    rep = compare_with_oracle(bad, cloud)
    assert rep.inside_fraction < 0.95


def test_compare_with_oracle_empty_cloud_rejected():
    dom = build_attractor(Z)
    from abcf.natext import Cloud

    with pytest.raises(ValueError):
        compare_with_oracle(dom, Cloud(np.empty((0, 2))))


def test_reduction_scan_zagier():
    dom = build_attractor(Z)
    rep = reduction_scan(dom, grid=60, cap=5_000)
    assert rep.coverage == 1.0
    assert rep.max_time < 200


def test_reduction_scan_empty_grid():
    dom = build_attractor(Z)
    rep = reduction_scan(dom, grid=0)
    assert rep.n_points == 0 and np.isnan(rep.coverage)


def test_float_params_rejected():
    with pytest.raises(ConstructionError):
        build_attractor(Params.make(-0.8, 0.4))


def test_json_round_trip_shape():
    dom = build_attractor(Z)
    js = dom.to_json()
    assert js["x_a"] == "2" and js["x_b"] == "-1"
    assert all("x_lo" in s and "y_float" in s for s in js["upper"] + js["lower"])
    js2 = build_attractor(Params.make("-1/2", "1/2")).to_json()
    assert js2["x_a"] == "(1+1*sqrt(5))/2"


def test_corner_bounds_always_hold():
    rng = np.random.default_rng(31)
    for p in interior_rational_params(rng, 12):
        dom = build_attractor(p)
        assert dom.x_a >= 1 and dom.x_b <= -1


def test_oracle_agreement_random_interior():
    # the 0.05 gap bound needs acceptance-scale clouds: low-density
    # boundary steps (large |x - y|) are underwitnessed by small samples
    rng = np.random.default_rng(37)
    for p in interior_rational_params(rng, 10):
        dom = build_attractor(p)
        cloud = sample_attractor(p, burn_in=250, n_points=100_000, seed=8)
        rep = compare_with_oracle(dom, cloud)
        assert rep.inside_fraction >= 0.999, (p, rep.inside_fraction)
        assert rep.boundary_gap <= 0.05, (p, rep.boundary_gap)


def test_boundary_line_rationals():
    # rational pairs on b - a = 1 stay finite (only the exceptional
    # Cantor set on that line fails); cycles lengthen, corners go surd
    for num, den in [(3, 8), (7, 19)]:
        b = Fraction(num, den)
        dom = build_attractor(Params(b - 1, b))
        assert len(dom.lower) > 10
        from abcf.scalars import Surd

        assert isinstance(dom.x_a, Surd)
        assert verify_bijectivity(dom).ok


def test_b_above_one_construction():
    # b >= 1 with a > -1: strong a-cycle, weak b-cycle sharing level 0
    p = Params.make("-1/5", "1")
    dom = build_attractor(p)
    assert verify_bijectivity(dom).ok
    assert verify_connectivity(dom)["ok"]


def test_hyperbola_boundary_pairs():
    # -a*b = 1 (Sb = a exactly): coupling reroutes keep everything exact
    for a, b in [(Fraction(-5, 6), Fraction(6, 5)), (Fraction(-1, 2), Fraction(2))]:
        dom = build_attractor(Params(a, b))
        assert (dom.x_a, dom.x_b) == (1, -1)
        assert verify_bijectivity(dom).ok


def test_reduction_scan_weak_cycle_pair():
    # the classical nearest-integer pair is only weak-cycle; the scan must
    # still run (full coverage is not guaranteed there, only measured)
    dom = build_attractor(Params.make("-1/2", "1/2"))
    rep = reduction_scan(dom, grid=40, cap=2_000)
    assert 0.99 <= rep.coverage <= 1.0

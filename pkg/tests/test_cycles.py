from fractions import Fraction

from abcf.cycles import detect_cycle, finiteness_check, orbit, truncated_orbits
from abcf.params import Params, interior_rational_params
from abcf.scalars import Surd, as_float

import numpy as np


GOLDEN_B = Params(Surd.make(1, -1, 2, 5), Surd.make(-1, 1, 2, 5))  # a = -b = -(sqrt5-1)/2


def test_orbit_a_upper_minus_6_5():
    p = Params.make("-6/5", "1/2")
    rec = orbit(p, "a_upper", 50)
    # Sa = 5/6, then T^-1 -> -1/6, S -> 6, T^-1 -> 5, ...
    assert rec.values[:4] == [Fraction(5, 6), Fraction(-1, 6), Fraction(6), Fraction(5)]


def test_orbit_a_upper_degenerate_minus1():
    p = Params.make("-1", "1/2")
    rec = orbit(p, "a_upper", 10)
    assert rec.values[:2] == [Fraction(1), Fraction(0)]  # Sa = 1, T^-1 -> 0


def test_orbit_reroute_at_a():
    # lower orbit of b hitting a continues with Ta
    p = GOLDEN_B
    rec = orbit(p, "b_lower", 20)
    a = p.a
    idx = rec.values.index(a)
    assert rec.values[idx + 1] == a + 1
    assert rec.gens[idx].word == ("T",)


def test_a_cycle_strong_below_minus1():
    for b in ["1/2", "1/3", "2/3"]:
        p = Params.make("-6/5", b)
        res = detect_cycle(p, "a")
        assert res.classification == "strong"
        assert res.end == Fraction(5)  # c_a = -1/(a+1)


def test_b_cycle_weak_at_half():
    res = detect_cycle(Params.make("-3/5", "1/2"), "b")
    assert res.classification == "weak"
    assert res.end == 0


def test_b_cycle_zagier():
    res = detect_cycle(Params.make("-4/5", "2/5"), "b")
    assert res.classification == "strong"
    assert res.end == Fraction(2)  # c_b = b/(1-2b)
    res_a = detect_cycle(Params.make("-4/5", "2/5"), "a")
    assert res_a.classification == "strong"
    assert res_a.end == Fraction(-4)


def test_golden_periodic_no_cycle():
    res = detect_cycle(GOLDEN_B, "b")
    assert res.classification == "periodic_no_cycle"


def test_lockstep_meeting_values_equal():
    rng = np.random.default_rng(2)
    for p in interior_rational_params(rng, 15):
        res = detect_cycle(p, "b")
        if res.has_cycle:
            assert res.end_word_upper.apply(p.b) == res.end
            assert res.end_word_lower.apply(p.b) == res.end


def test_no_repeats_within_sides():
    rng = np.random.default_rng(3)
    for p in interior_rational_params(rng, 15):
        for which in ("a", "b"):
            res = detect_cycle(p, which)
            if res.has_cycle:
                assert len(set(res.upper_side)) == len(res.upper_side)
                assert len(set(res.lower_side)) == len(res.lower_side)


def test_weak_iff_end_zero():
    rng = np.random.default_rng(5)
    for p in interior_rational_params(rng, 25):
        for which in ("a", "b"):
            res = detect_cycle(p, which)
            if res.has_cycle:
                assert (res.classification == "weak") == (res.end == 0)


def test_strong_end_dichotomy():
    # for 0 < b <= -a < 1 and b strong: c_b < Sb or c_b > Sa
    rng = np.random.default_rng(7)
    found = 0
    for p in interior_rational_params(rng, 40):
        if not (0 < as_float(p.b) <= -as_float(p.a) < 1):
            continue
        res = detect_cycle(p, "b")
        if res.classification != "strong":
            continue
        found += 1
        sb, sa = -1 / p.b, -1 / p.a
        assert res.end < sb or res.end > sa
    assert found >= 5


def test_symmetry_mirror():
    rng = np.random.default_rng(11)
    for p in interior_rational_params(rng, 10):
        rb = detect_cycle(p, "b")
        ra = detect_cycle(p.mirrored(), "a")
        assert rb.classification == ra.classification
        if rb.has_cycle:
            assert ra.end == -rb.end
            # mirroring swaps the upper/lower sides of the cycle
            assert (ra.upper_steps, ra.lower_steps) == (rb.lower_steps, rb.upper_steps)


def test_truncated_orbits_simple_case():
    p = Params.make("-7/10", "4/5")
    tro = truncated_orbits(p)
    assert sorted(v for v, _ in tro.la) == [Fraction(-10, 3), Fraction(3, 10)]
    assert sorted(v for v, _ in tro.ua) == [Fraction(3, 7), Fraction(10, 7)]
    assert sorted(v for v, _ in tro.lb) == [Fraction(-5, 4), Fraction(-1, 4)]
    assert sorted(v for v, _ in tro.ub) == [Fraction(-1, 5), Fraction(5)]


def test_truncated_orbits_weak_include_zero():
    tro = truncated_orbits(Params.make("-1/2", "1/2"))
    assert Fraction(0) in [v for v, _ in tro.la]
    assert Fraction(0) in [v for v, _ in tro.ua]


def test_shift_consequence_flags_agree():
    # finiteness of the lower orbit data implies the upper's, per endpoint
    rng = np.random.default_rng(13)
    for p in interior_rational_params(rng, 15):
        tro = truncated_orbits(p)
        assert tro.finite
        assert bool(tro.la) == bool(tro.ua) or tro.cycle_a.has_cycle
        assert bool(tro.lb) == bool(tro.ub) or tro.cycle_b.has_cycle


def test_finiteness_interior_rationals():
    rng = np.random.default_rng(17)
    for p in interior_rational_params(rng, 10):
        assert finiteness_check(p, cap=10_000).finite
    assert finiteness_check(Params.make("-1", "1")).finite


def test_finiteness_golden():
    assert finiteness_check(GOLDEN_B, cap=1_000).finite  # periodic orbits are finite


def test_float_mode_never_claims_strength():
    res = detect_cycle(Params.make(-0.8, 0.4), "b", cap=500)
    assert res.classification in ("undetermined", "periodic_no_cycle")
    assert res.approximate


def test_seed_at_endpoint_reroutes():
    # Sb = a exactly (a*b = -1): the lower orbit of b continues with Ta
    p = Params.make("-1/2", "2")
    rec = orbit(p, "b_lower", 10)
    assert rec.values[0] == p.a
    assert rec.values[1] == p.a + 1
    assert rec.gens[0].word == ("T",)


def test_cycle_end_values_match_m1_diagrams():
    # for the simple four-box region: c_a = a/(a+1), c_b = b/(1-b)
    p = Params.make("-7/10", "4/5")
    assert detect_cycle(p, "a").end == Fraction(-7, 3)
    assert detect_cycle(p, "b").end == Fraction(4)


def test_zagier_cycle_diagram_stations():
    # the explicit m = 2, b < 1/2 diagram: upper side passes through
    # b-1, -1/(b-1), 1 + b/(1-2b); lower side through -1/b, -(1-2b)/b
    p = Params.make("-4/5", "2/5")
    res = detect_cycle(p, "b")
    b = p.b
    assert res.upper_side[0] == b - 1
    assert res.upper_side[1] == -1 / (b - 1)
    assert res.upper_side[-1] == 1 + b / (1 - 2 * b)
    assert res.lower_side[0] == -1 / b
    assert res.lower_side[-1] == -(1 - 2 * b) / b
    assert res.end == b / (1 - 2 * b)

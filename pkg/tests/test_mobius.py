import random
from fractions import Fraction

import pytest

from abcf.mobius import NonHyperbolicError, S, T, T_INV, T_pow, from_word, minus_cf_matrix
from abcf.scalars import INF, Surd, as_float


def rand_word(rng, n):
    return tuple(rng.choice(["T", "T'", "S"]) for _ in range(n))


def test_generators():
    assert T.apply(Fraction(1, 2)) == Fraction(3, 2)
    assert S.apply(Fraction(2)) == Fraction(-1, 2)
    assert S.apply(Fraction(0)) is INF
    assert T.apply(INF) is INF
    assert T_INV.apply(Fraction(0)) == -1


def test_t3s_sends_infinity_to_3():
    m = T_pow(3) @ S
    assert (m.a, m.b, m.c, m.d) == (3, -1, 1, 0)
    assert m.apply(INF) == 3


def test_word_multiplies_out():
    rng = random.Random(3)
    for _ in range(50):
        w = rand_word(rng, rng.randint(0, 12))
        m = from_word(w)
        assert m.word == w
        assert from_word(m.word) == m


def test_composition_matches_application():
    rng = random.Random(5)
    for _ in range(200):
        m = from_word(rand_word(rng, rng.randint(1, 8)))
        n = from_word(rand_word(rng, rng.randint(1, 8)))
        x = Fraction(rng.randint(-30, 30), rng.randint(1, 9))
        lhs = (m @ n).apply(x)
        rhs = m.apply(n.apply(x))
        assert lhs == rhs or (lhs is INF and rhs is INF)


def test_S_squared_acts_as_identity():
    ss = S @ S
    assert ss.is_identity_psl()
    assert (ss.a, ss.d) == (-1, -1)  # -Id in SL(2,Z), Id in PSL(2,Z)
    for x in [Fraction(2, 7), Fraction(-5), INF]:
        y = ss.apply(x)
        assert y == x or (y is INF and x is INF)


def test_fixed_points_t3s():
    att, rep = (T_pow(3) @ S).fixed_points()
    assert att == Surd.make(3, 1, 2, 5)
    assert rep == Surd.make(3, -1, 2, 5)


def test_fixed_points_t4s():
    att, _ = (T_pow(4) @ S).fixed_points()
    assert att == Surd.make(2, 1, 1, 3)  # 2 + sqrt(3)


def test_parabolic_rejected():
    m = T_pow(2) @ S
    with pytest.raises(NonHyperbolicError) as e:
        m.fixed_points()
    assert e.value.classification == "parabolic"
    with pytest.raises(NonHyperbolicError):
        (T @ S).fixed_points()  # elliptic, trace 1


def test_iteration_converges_to_attracting():
    rng = random.Random(11)
    for _ in range(20):
        k = rng.randint(3, 7)
        m = T_pow(k) @ S @ T_pow(rng.randint(3, 6)) @ S
        att, rep = m.fixed_points()
        x = 0.0
        for _ in range(60):
            x = as_float(m.apply(x))
        assert abs(x - as_float(att)) < 1e-12


def test_inverse_round_trips_words():
    rng = random.Random(13)
    for _ in range(50):
        m = from_word(rand_word(rng, rng.randint(1, 10)))
        assert (m @ m.inverse()).is_identity_psl()
        # word inversion is a PSL identity: S^-1 = -S as a matrix
        assert from_word(m.inverse().word).psl_eq(m.inverse())


def test_minus_cf_matrix_finite_values():
    assert minus_cf_matrix([2, 2]).apply(INF) == Fraction(3, 2)
    assert minus_cf_matrix([0, -2, 2]).apply(INF) == Fraction(2, 5)


def test_composition_float_tolerance():
    rng = random.Random(17)
    eps = 1e-12
    for _ in range(200):
        m = from_word(rand_word(rng, rng.randint(1, 8)))
        n = from_word(rand_word(rng, rng.randint(1, 8)))
        x = rng.uniform(-5, 5)
        lhs = (m @ n).apply(x)
        mid = n.apply(x)
        if mid is INF or isinstance(mid, float) and abs(mid) > 1e6:
            continue
        rhs = m.apply(mid)
        if lhs is INF or rhs is INF:
            continue
        scale = max(1.0, abs(lhs))
        assert abs(lhs - rhs) <= 10 * eps * scale * 1e3  # chained float error

import math
import random
from fractions import Fraction

import pytest

from ptbzero.cyclotomic import Cyclotomic, cyclotomic_polynomial, rot


def test_cyclotomic_polynomials_small():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_phi_240_degree():
    # phi(240) = 64; the sweep's common order
    assert len(cyclotomic_polynomial(240)) - 1 == 64


def test_root_of_unity_basics():
    z3 = Cyclotomic.from_rotation(rot(1, 3))
    assert (z3 ** 3) == 1
    assert z3 != 1
    assert (1 + z3 + z3 ** 2).is_zero()


def test_gauss_sum_square_is_minus_three():
    # (zeta_3 - zeta_3^2)^2 == -3, the classic quadratic Gauss sum check
    z3 = Cyclotomic.from_rotation(rot(1, 3))
    g = z3 - z3 ** 2
    assert (g * g).as_rational() == Fraction(-3)


def test_cross_order_equality_and_hash():
    a = Cyclotomic.from_rotation(rot(1, 2))       # -1 as zeta_2
    b = Cyclotomic.rational(-1)
    assert a == b
    assert hash(a) == hash(b)
    c = Cyclotomic.from_rotation(rot(2, 6))       # zeta_3 inside Q(zeta_6)
    d = Cyclotomic.from_rotation(rot(1, 3))
    assert c == d
    assert hash(c) == hash(d)


def test_inverse_random():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.choice([3, 4, 5, 8, 12])
        x = Cyclotomic(n, {rng.randrange(n): Fraction(rng.randint(-3, 3))
                           for _ in range(3)})
        if x.is_zero():
            continue
        assert (x * x.inverse()) == 1


def test_conj_is_complex_conjugation():
    z5 = Cyclotomic.from_rotation(rot(1, 5))
    x = 2 + 3 * z5 - z5 ** 2
    y = x * x.conj()
    r = y.as_rational()
    # |x|^2 need not be rational in Q(zeta_5), but it must be real:
    assert y == y.conj()
    assert abs(y.complex().imag) < 1e-9
    if r is not None:
        assert r > 0


def test_as_rotation_roundtrip():
    for num, den in [(0, 1), (1, 2), (1, 3), (5, 8), (7, 12)]:
        r = rot(num, den)
        assert Cyclotomic.from_rotation(r).as_rotation() == r
    x = Cyclotomic.from_rotation(rot(1, 3)) + 1
    assert x.as_rotation() is None


def test_mixed_order_arithmetic():
    z4 = Cyclotomic.from_rotation(rot(1, 4))
    z3 = Cyclotomic.from_rotation(rot(1, 3))
    w = z4 * z3
    assert w.order == 12
    assert w.as_rotation() == rot(7, 12)


def test_float_shadow_matches():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.choice([3, 8, 15])
        x = Cyclotomic(n, {rng.randrange(n): Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                           for _ in range(4)})
        y = Cyclotomic(n, {rng.randrange(n): Fraction(rng.randint(-2, 2))
                           for _ in range(4)})
        assert abs((x * y).complex() - x.complex() * y.complex()) < 1e-9
        assert abs((x + y).complex() - (x.complex() + y.complex())) < 1e-9


def test_galois_action_permutes_roots():
    z7 = Cyclotomic.from_rotation(rot(1, 7))
    for k in range(1, 7):
        assert z7.galois(k) == z7 ** k
    with pytest.raises(AssertionError):
        Cyclotomic.from_rotation(rot(1, 6)).galois(2)

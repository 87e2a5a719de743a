from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vlab.scalar import (
    GF,
    QQ,
    DenominatorDivisibleByP,
    FpElement,
    NotDivisibleByP,
    Zmod_p2,
    Zp2Element,
    check_prime,
    divide_by_p,
    format_rational,
    lift,
    parse_rational,
    reduce_mod_p,
)

primes = st.sampled_from([3, 5, 7, 11, 13, 101])


def test_parse_rational_forms():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" -4 ") == -4
    assert parse_rational(7) == 7
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert format_rational(Fraction(5)) == "5"


@pytest.mark.parametrize("bad", ["1/x", "", "1.5", "a"])
def test_parse_rational_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_parse_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


def test_bool_is_not_a_coefficient():
    with pytest.raises(TypeError):
        parse_rational(True)


@pytest.mark.parametrize("p", [2, 4, 9, 1, -3, 2**31 + 11])
def test_check_prime_rejects(p):
    with pytest.raises(ValueError):
        check_prime(p)


def test_reduction_examples():
    assert reduce_mod_p(Fraction(1, 2), 5).value == 3
    assert reduce_mod_p("-1", 3).value == 2
    with pytest.raises(DenominatorDivisibleByP):
        GF(3)(Fraction(1, 3))


def test_division_by_p_in_z_mod_p2():
    assert divide_by_p(Zp2Element(6, 3)) == FpElement(2, 3)
    with pytest.raises(NotDivisibleByP):
        divide_by_p(Zp2Element(4, 3))
    with pytest.raises(ZeroDivisionError):
        Zp2Element(1, 3) / 3


def test_rings():
    F = GF(7)
    assert F.modulus == 7 and F.is_field
    R = Zmod_p2(7)
    assert R.modulus == 49 and not R.is_field
    assert QQ.modulus is None
    assert F.inv(3) * 3 % 7 == 1


@given(primes, st.integers(), st.integers(), st.integers())
def test_field_axioms(p, a, b, c):
    x, y, z = FpElement(a, p), FpElement(b, p), FpElement(c, p)
    assert (x + y) * z == x * z + y * z
    assert x * (y * z) == (x * y) * z
    assert x - x == FpElement(0, p)
    if x.value:
        assert x * x.inverse() == FpElement(1, p)
        assert x ** (p - 1) == FpElement(1, p)


@given(primes, st.integers(), st.integers())
def test_lift_is_a_section_of_reduction(p, a, b):
    x, y = FpElement(a, p), FpElement(b, p)
    assert lift(x).reduce() == x
    # a lift shifted by a multiple of p reduces to the same class
    assert (lift(x) + p * b).reduce() == x
    assert (lift(x) * lift(y)).reduce() == x * y


@given(primes, st.fractions())
def test_reduction_is_a_ring_map(p, q):
    F = GF(p)
    if q.denominator % p == 0:
        with pytest.raises(DenominatorDivisibleByP):
            F(q)
        return
    assert F(q + 1) == F.norm(F(q) + 1)
    assert F(q * q) == F.norm(F(q) * F(q))

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvsynth import weyl
from cvsynth.weyl import commutator, const, number_operator, p, q

I = const(1j)


def monomials(max_mode=1):
    atom = st.sampled_from([q(m) for m in range(max_mode + 1)] + [p(m) for m in range(max_mode + 1)])
    return st.lists(atom, min_size=0, max_size=2).map(
        lambda xs: const(1) if not xs else xs[0] if len(xs) == 1 else xs[0] * xs[1]
    )


coeffs = st.sampled_from([Fraction(1), Fraction(-2), Fraction(1, 3), 1j, Fraction(5, 4)])
polys = st.lists(st.tuples(coeffs, monomials()), min_size=1, max_size=3).map(
    lambda terms: sum((const(c) * m for c, m in terms), const(0))
)


def test_canonical_commutator():
    assert commutator(q(0), p(0)) == I
    assert commutator(p(0), q(0)) == -I


@pytest.mark.parametrize("a,b", [(q(0), q(1)), (q(0), p(1)), (p(0), p(1)), (p(0), q(1))])
def test_distinct_modes_commute(a, b):
    assert commutator(a, b).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_commutator_of_powers(n):
    # [q, p^n] = i n p^(n-1)
    assert commutator(q(0), p(0) ** n) == const(1j * n) * p(0) ** (n - 1)


def test_nested_cubic_commutator():
    lhs = commutator(p(1) ** 3, commutator(p(0) ** 3, q(0) * q(1)))
    assert lhs == const(-9) * p(0) ** 2 * p(1) ** 2


def test_number_product_exceeds_quartic_form_by_quarter():
    e = weyl.expand_number_product()
    assert e.difference_is_scalar
    assert e.difference == const(Fraction(1, 4))
    assert e.product == number_operator(0) * number_operator(1)


def test_kerr_terms_sum_to_quartic_part():
    t = weyl.kerr_terms()
    quartic = const(Fraction(1, 4)) * (q(0) ** 2 + p(0) ** 2) * (q(1) ** 2 + p(1) ** 2)
    assert t["O1"] + t["O2"] + t["O3"] + t["O4"] == quartic


def test_number_operator_ladder():
    # [n, q] = -i p and [n, p] = i q
    n = number_operator(0)
    assert commutator(n, q(0)) == -I * p(0)
    assert commutator(n, p(0)) == I * q(0)


@given(polys, polys, polys)
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(polys, polys, polys)
def test_product_distributes(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@given(polys, polys)
def test_commutator_antisymmetric(a, b):
    assert commutator(a, b) == -commutator(b, a)


@given(polys, polys, polys)
def test_jacobi(a, b, c):
    total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    assert total.is_zero()

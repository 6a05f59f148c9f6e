from fractions import Fraction

import pytest

from tracelogic.errors import InvalidArgument
from tracelogic.terms import (
    CRational, Letter, One, Prod, Scale, StarMonomial, Sum, Var, Zero, enumerate_monomials,
    monomial_adjoint, monomial_count, op_norm_bound, term_from_monomial, term_lipschitz, term_vars,
)


def test_count_matches_enumeration():
    for n in range(1, 4):
        for d in range(1, 5):
            assert len(enumerate_monomials(n, d)) == monomial_count(n, d) == sum((2 * n) ** j for j in range(1, d + 1))


def test_small_cases():
    assert [str(m) for m in enumerate_monomials(1, 1)] == ["x1", "x1'"]
    assert len(enumerate_monomials(1, 2)) == 6
    assert len(enumerate_monomials(2, 4)) == 340


def test_canonical_order_degree_then_lex():
    mons = enumerate_monomials(2, 3)
    assert mons == sorted(mons)
    assert [str(m) for m in mons[:4]] == ["x1", "x1'", "x2", "x2'"]
    assert str(mons[4]) == "x1 * x1"
    assert all(a.degree <= b.degree for a, b in zip(mons, mons[1:]))


def test_identity_word_excluded():
    assert all(m.degree >= 1 for m in enumerate_monomials(3, 2))


@pytest.mark.parametrize("n,d", [(0, 1), (1, 0), (-1, 2), (1.5, 2)])
def test_invalid_arguments(n, d):
    with pytest.raises(InvalidArgument):
        monomial_count(n, d)
    with pytest.raises(InvalidArgument):
        enumerate_monomials(n, d)


def test_adjoint_is_involution_on_the_set():
    mons = enumerate_monomials(2, 3)
    assert {monomial_adjoint(m) for m in mons} == set(mons)
    assert all(monomial_adjoint(monomial_adjoint(m)) == m for m in mons)
    w = StarMonomial((Letter(1), Letter(2, True)))
    assert str(monomial_adjoint(w)) == "x2 * x1'"


def test_crational_printing_and_arithmetic():
    assert str(CRational(Fraction(1, 2), -3)) == "1/2-3i"
    assert str(CRational(0, -1)) == "-i"
    assert str(CRational(0, 1)) == "i"
    assert str(CRational(2)) == "2"
    z = CRational(1, 1) * CRational(1, -1)
    assert z == CRational(2, 0)
    assert complex(-CRational(1, 2)) == complex(-1, -2)
    assert CRational(3, -4).abs_bound() == 7


def test_bounds_and_vars():
    t = Sum(Prod(Var(1), Var(2)), Scale(CRational(0, 2), One()))
    assert term_vars(t) == {1, 2}
    assert op_norm_bound(t) == 3
    assert term_lipschitz(t) == 2
    assert op_norm_bound(Zero()) == 0
    m = enumerate_monomials(1, 3)[-1]
    assert term_lipschitz(term_from_monomial(m)) == 3


def test_letter_validation():
    with pytest.raises(InvalidArgument):
        Letter(0)
    with pytest.raises(InvalidArgument):
        Var(0)

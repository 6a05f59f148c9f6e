"""Terms of the free *-algebra and canonical *-monomial enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Union

from .errors import InvalidArgument


@dataclass(frozen=True, order=True)
class Letter:
    """A single generator ``x_i`` or its adjoint ``x_i*``."""

    var_index: int
    starred: bool = False

    def __post_init__(self):
        if self.var_index < 1:
            raise InvalidArgument(f"variable index must be >= 1, got {self.var_index}")

    @property
    def sort_key(self) -> int:
        # alphabet order x1 < x1* < x2 < x2* < ...
        return 2 * (self.var_index - 1) + int(self.starred)

    def adjoint(self) -> "Letter":
        return Letter(self.var_index, not self.starred)

    def __str__(self):
        return f"x{self.var_index}" + ("'" if self.starred else "")


@dataclass(frozen=True)
class StarMonomial:
    letters: tuple[Letter, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.letters)

    @property
    def sort_key(self):
        return (self.degree, tuple(l.sort_key for l in self.letters))

    def __lt__(self, other: "StarMonomial") -> bool:
        return self.sort_key < other.sort_key

    def max_var(self) -> int:
        return max((l.var_index for l in self.letters), default=0)

    def __str__(self):
        if not self.letters:
            return "1"
        return " * ".join(str(l) for l in self.letters)


def monomial_adjoint(m: StarMonomial) -> StarMonomial:
    """Reverse the word and flip every star; an involution."""
    return StarMonomial(tuple(l.adjoint() for l in reversed(m.letters)))


def _check_nd(n: int, d: int) -> None:
    if int(n) != n or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    if int(d) != d or d < 1:
        raise InvalidArgument(f"d must be a positive integer, got {d!r}")


def monomial_count(n: int, d: int) -> int:
    """Number of *-monomials of degree 1..d in n variables."""
    _check_nd(n, d)
    return sum((2 * n) ** j for j in range(1, d + 1))


def iter_monomials(n: int, d: int) -> Iterator[StarMonomial]:
    _check_nd(n, d)
    alphabet = [Letter(i, s) for i in range(1, n + 1) for s in (False, True)]
    for degree in range(1, d + 1):
        for word in itertools.product(alphabet, repeat=degree):
            yield StarMonomial(word)


def enumerate_monomials(n: int, d: int) -> list[StarMonomial]:
    """All *-monomials of degree 1..d, degree-ascending then lexicographic.

    The identity word is excluded. Examples::

        >>> [str(m) for m in enumerate_monomials(1, 1)]
        ['x1', "x1'"]
        >>> len(enumerate_monomials(2, 4))
        340
    """
    return list(iter_monomials(n, d))


# --------------------------------------------------------------------------
# exact complex-rational scalars


@dataclass(frozen=True)
class CRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "CRational":
        if isinstance(value, CRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __mul__(self, other):
        o = CRational.coerce(other)
        return CRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def abs_bound(self) -> Fraction:
        """Rational upper bound on the modulus (|re| + |im|)."""
        return abs(self.re) + abs(self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "" if abs(self.im) == 1 else str(abs(self.im))
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im + "i"
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{im}i"


# --------------------------------------------------------------------------
# term AST


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise InvalidArgument(f"variable index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Adjoint:
    arg: "Term"


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Prod:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Scale:
    coef: CRational
    arg: "Term"

    def __post_init__(self):
        object.__setattr__(self, "coef", CRational.coerce(self.coef))


Term = Union[Var, One, Zero, Adjoint, Sum, Prod, Scale]
TERM_TYPES = (Var, One, Zero, Adjoint, Sum, Prod, Scale)


def term_vars(t: Term) -> frozenset[int]:
    if isinstance(t, Var):
        return frozenset([t.index])
    if isinstance(t, (One, Zero)):
        return frozenset()
    if isinstance(t, (Adjoint, Scale)):
        return term_vars(t.arg)
    return term_vars(t.left) | term_vars(t.right)


def term_from_monomial(m: StarMonomial) -> Term:
    if not m.letters:
        return One()
    factors = [Adjoint(Var(l.var_index)) if l.starred else Var(l.var_index) for l in m.letters]
    return reduce(Prod, factors)


def sum_terms(terms) -> Term:
    terms = list(terms)
    if not terms:
        return Zero()
    return reduce(Sum, terms)


def op_norm_bound(t: Term) -> Fraction:
    """Upper bound on the operator norm of ``t`` over contraction tuples."""
    if isinstance(t, (Var, One)):
        return Fraction(1)
    if isinstance(t, Zero):
        return Fraction(0)
    if isinstance(t, Adjoint):
        return op_norm_bound(t.arg)
    if isinstance(t, Scale):
        return t.coef.abs_bound() * op_norm_bound(t.arg)
    if isinstance(t, Sum):
        return op_norm_bound(t.left) + op_norm_bound(t.right)
    return op_norm_bound(t.left) * op_norm_bound(t.right)


def term_lipschitz(t: Term) -> Fraction:
    """Lipschitz constant of ``t`` into the 2-norm, w.r.t. the l1-of-2-norm
    metric on contraction tuples."""
    if isinstance(t, Var):
        return Fraction(1)
    if isinstance(t, (One, Zero)):
        return Fraction(0)
    if isinstance(t, Adjoint):
        return term_lipschitz(t.arg)
    if isinstance(t, Scale):
        return t.coef.abs_bound() * term_lipschitz(t.arg)
    if isinstance(t, Sum):
        return term_lipschitz(t.left) + term_lipschitz(t.right)
    # |st - s't'|_2 <= |s|_op |t - t'|_2 + |s - s'|_2 |t'|_op
    return (op_norm_bound(t.left) * term_lipschitz(t.right)
            + term_lipschitz(t.left) * op_norm_bound(t.right))

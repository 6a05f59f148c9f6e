"""Restricted continuous-logic formulas over tracial matrix algebras.

Text grammar (EBNF)::

    formula  = quant | fsum ;
    quant    = ("sup" | "inf") var { [","] var } "." formula ;
    fsum     = fprod { ("+" | "-.") fprod } ;
    fprod    = fatom { "*" fatom } ;
    fatom    = rational
             | ("norm2" | "trRe" | "trIm") "(" term ")"
             | ("max" | "min") "(" formula "," formula ")"
             | "half" "(" formula ")"
             | "scale" "(" rational "," formula ")"
             | "(" formula ")" ;
    term     = tprod { ("+" | "-") tprod } ;
    tprod    = tunary { ["*"] tunary } ;
    tunary   = scalar tunary | "-" tunary | tpost ;
    tpost    = tatom { "'" } ;
    tatom    = var | "0" | "1" | rational | "(" term ")" ;
    scalar   = "[" cnum "]" | rational ;      (* rational only when a factor follows *)
    cnum     = ["-"] cpart [ ("+" | "-") cpart ] ;
    cpart    = rational [ "i" ] | "i" ;
    rational = digits [ "/" digits ] ;
    var      = "x" digits ;

``-.`` is truncated subtraction ``max(a - b, 0)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Union

from .errors import FreeVariableError, InvalidArgument, ParseError, ScaleNegative, UnsupportedError
from .terms import (
    Adjoint, CRational, One, Prod, Scale, Sum, Term, Var, Zero,
    op_norm_bound, term_lipschitz, term_vars,
)


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Norm2:
    term: Term


@dataclass(frozen=True)
class TraceRe:
    term: Term


@dataclass(frozen=True)
class TraceIm:
    term: Term


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        if self.value < 0:
            raise InvalidArgument(f"formula constants must be non-negative, got {self.value}")


@dataclass(frozen=True)
class Add:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Mul:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Scaled:
    coef: Fraction
    arg: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        if self.coef < 0:
            raise InvalidArgument(f"formula-level scale must be non-negative, got {self.coef}")


@dataclass(frozen=True)
class DotMinus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Max:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Min:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Half:
    arg: "Formula"


@dataclass(frozen=True)
class Sup:
    vars: tuple[int, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise InvalidArgument("quantifier needs at least one variable")


@dataclass(frozen=True)
class Inf:
    vars: tuple[int, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise InvalidArgument("quantifier needs at least one variable")


Formula = Union[Norm2, TraceRe, TraceIm, Const, Add, Mul, Scaled, DotMinus, Max, Min, Half, Sup, Inf]
ATOMIC = (Norm2, TraceRe, TraceIm)
BINARY = (Add, Mul, DotMinus, Max, Min)
QUANTIFIERS = (Sup, Inf)


def dotminus(a: float, b: float) -> float:
    """Truncated subtraction: ``max(a - b, 0)``."""
    return max(a - b, 0)


def max_of(formulas) -> Formula:
    return reduce(Max, formulas)


def sum_of(formulas) -> Formula:
    formulas = list(formulas)
    return reduce(Add, formulas) if formulas else Const(0)


def free_vars(f: Formula) -> frozenset[int]:
    if isinstance(f, ATOMIC):
        return term_vars(f.term)
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, (Scaled, Half)):
        return free_vars(f.arg)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - set(f.vars)
    return free_vars(f.left) | free_vars(f.right)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, QUANTIFIERS):
        return False
    if isinstance(f, ATOMIC + (Const,)):
        return True
    if isinstance(f, (Scaled, Half)):
        return is_quantifier_free(f.arg)
    return is_quantifier_free(f.left) and is_quantifier_free(f.right)


def sup_closure(f: Formula) -> Formula:
    """Universally close ``f`` over its free variables (identity on sentences)."""
    fv = sorted(free_vars(f))
    return Sup(tuple(fv), f) if fv else f


# --------------------------------------------------------------------------
# classification


QUANTIFIER_FREE = "quantifier-free"
UNIVERSAL = "universal"
EXISTENTIAL = "existential"
MIXED = "mixed"


def prenex_split(f: Formula):
    """Peel the outer quantifier block.

    Returns ``(kind, vars, body)`` where ``kind`` is ``Sup``, ``Inf`` or
    ``None``; consecutive quantifiers of the same kind are merged.
    """
    kind, bound = None, []
    while isinstance(f, QUANTIFIERS) and (kind is None or isinstance(f, kind)):
        kind = type(f)
        bound.extend(v for v in f.vars if v not in bound)
        f = f.body
    return kind, tuple(bound), f


def classify(f: Formula, allow_free: bool = False) -> str:
    """Classification tag of a sentence; raises on free variables unless
    ``allow_free``, which classifies the quantifier shape of an open formula."""
    fv = free_vars(f)
    if fv and not allow_free:
        raise FreeVariableError(f"formula has free variables {sorted(fv)}")
    kind, _, body = prenex_split(f)
    if not is_quantifier_free(body):
        return MIXED
    if kind is None:
        return QUANTIFIER_FREE
    return UNIVERSAL if kind is Sup else EXISTENTIAL


@dataclass(frozen=True)
class Sentence:
    formula: Formula
    classification: str

    @classmethod
    def from_formula(cls, f: Formula) -> "Sentence":
        return cls(f, classify(f))

    @classmethod
    def parse(cls, text: str) -> "Sentence":
        return cls.from_formula(parse(text))

    def split(self):
        """``(vars, quantifier-free body)`` for non-mixed sentences."""
        if self.classification == MIXED:
            raise UnsupportedError("mixed-quantifier sentences have no prenex split")
        _, bound, body = prenex_split(self.formula)
        return bound, body


# --------------------------------------------------------------------------
# continuity moduli


def range_bound(f: Formula) -> Fraction:
    """Bound on ``|f|`` over contraction tuples."""
    if isinstance(f, ATOMIC):
        return op_norm_bound(f.term)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, (Add, DotMinus)):
        return range_bound(f.left) + range_bound(f.right)
    if isinstance(f, Mul):
        return range_bound(f.left) * range_bound(f.right)
    if isinstance(f, (Max, Min)):
        return max(range_bound(f.left), range_bound(f.right))
    if isinstance(f, Scaled):
        return f.coef * range_bound(f.arg)
    if isinstance(f, Half):
        return range_bound(f.arg) / 2
    return range_bound(f.body)


def lipschitz_bound(f: Formula) -> Fraction:
    """Lipschitz constant of a quantifier-free formula on contraction tuples,
    w.r.t. the l1-of-2-norm metric."""
    if isinstance(f, QUANTIFIERS):
        raise UnsupportedError("modulus of continuity needs a quantifier-free formula")
    if isinstance(f, ATOMIC):
        # |tau(u)| <= |u|_2 and | |u|_2 - |v|_2 | <= |u - v|_2
        return term_lipschitz(f.term)
    if isinstance(f, Const):
        return Fraction(0)
    if isinstance(f, (Add, DotMinus)):
        return lipschitz_bound(f.left) + lipschitz_bound(f.right)
    if isinstance(f, (Max, Min)):
        # |max(a, b) - max(a', b')| <= max(|a - a'|, |b - b'|)
        return max(lipschitz_bound(f.left), lipschitz_bound(f.right))
    if isinstance(f, Mul):
        return (range_bound(f.left) * lipschitz_bound(f.right)
                + lipschitz_bound(f.left) * range_bound(f.right))
    if isinstance(f, Scaled):
        return f.coef * lipschitz_bound(f.arg)
    return lipschitz_bound(f.arg) / 2


@dataclass(frozen=True)
class Modulus:
    """A linear modulus ``delta(eps) = eps / lipschitz`` (infinite if constant)."""

    lipschitz: Fraction

    def __call__(self, eps):
        eps = Fraction(eps)
        if eps <= 0:
            raise InvalidArgument("modulus is defined for eps > 0")
        if self.lipschitz == 0:
            return float("inf")
        return eps / self.lipschitz

    def gap(self, radius) -> float:
        """Smallest eps with ``delta(eps) >= radius``."""
        return float(self.lipschitz) * float(radius)


def modulus_of_continuity(f: Formula) -> Modulus:
    return Modulus(lipschitz_bound(f))


# --------------------------------------------------------------------------
# printing


def _term_prec(t: Term) -> int:
    if isinstance(t, Sum):
        return 1
    if isinstance(t, Prod):
        return 2
    if isinstance(t, Scale):
        return 3
    return 4


def term_to_text(t: Term, min_prec: int = 0) -> str:
    prec = _term_prec(t)
    if isinstance(t, Var):
        s = f"x{t.index}"
    elif isinstance(t, One):
        s = "1"
    elif isinstance(t, Zero):
        s = "0"
    elif isinstance(t, Adjoint):
        s = term_to_text(t.arg, 4) + "'"
    elif isinstance(t, Sum):
        r = t.right
        if isinstance(r, Scale) and r.coef == CRational(-1):
            s = f"{term_to_text(t.left, 1)} - {term_to_text(r.arg, 2)}"
        else:
            s = f"{term_to_text(t.left, 1)} + {term_to_text(r, 2)}"
    elif isinstance(t, Prod):
        s = f"{term_to_text(t.left, 2)} * {term_to_text(t.right, 3)}"
    else:
        s = f"[{t.coef}] {term_to_text(t.arg, 3)}"
    return f"({s})" if prec < min_prec else s


def _formula_prec(f: Formula) -> int:
    if isinstance(f, QUANTIFIERS):
        return 0
    if isinstance(f, (Add, DotMinus)):
        return 1
    if isinstance(f, Mul):
        return 2
    return 3


def to_text(f: Formula, min_prec: int = 0) -> str:
    """Canonical text; ``parse(to_text(f)) == f``."""
    prec = _formula_prec(f)
    if isinstance(f, QUANTIFIERS):
        kw = "sup" if isinstance(f, Sup) else "inf"
        s = f"{kw} {', '.join(f'x{v}' for v in f.vars)} . {to_text(f.body)}"
    elif isinstance(f, Norm2):
        s = f"norm2({term_to_text(f.term)})"
    elif isinstance(f, TraceRe):
        s = f"trRe({term_to_text(f.term)})"
    elif isinstance(f, TraceIm):
        s = f"trIm({term_to_text(f.term)})"
    elif isinstance(f, Const):
        s = str(f.value)
    elif isinstance(f, (Add, DotMinus)):
        op = "+" if isinstance(f, Add) else "-."
        s = f"{to_text(f.left, 1)} {op} {to_text(f.right, 2)}"
    elif isinstance(f, Mul):
        s = f"{to_text(f.left, 2)} * {to_text(f.right, 3)}"
    elif isinstance(f, (Max, Min)):
        kw = "max" if isinstance(f, Max) else "min"
        s = f"{kw}({to_text(f.left)}, {to_text(f.right)})"
    elif isinstance(f, Half):
        s = f"half({to_text(f.arg)})"
    else:
        s = f"scale({f.coef}, {to_text(f.arg)})"
    return f"({s})" if prec < min_prec else s


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<dotminus>-\.)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[-+*()\[\],.'])
""", re.VERBOSE)

_KEYWORDS = {"sup", "inf", "norm2", "trRe", "trIm", "max", "min", "half", "scale"}
_VAR_RE = re.compile(r"x([1-9]\d*)$")


@dataclass(frozen=True)
class _Tok:
    kind: str      # num, var, kw, i, sym, eof
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        s = m.group()
        if kind == "ident":
            if s in _KEYWORDS:
                kind = "kw"
            elif s == "i":
                kind = "i"
            elif _VAR_RE.match(s):
                kind = "var"
            else:
                raise ParseError(f"unknown identifier {s!r}", pos, ["variable", "keyword"])
        elif kind in ("sym", "dotminus"):
            kind = "sym"
        if kind != "ws":
            toks.append(_Tok(kind, s, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


def _describe(tok: _Tok) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw", "i") and self.tok.text == text

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise ParseError(f"unexpected {_describe(self.tok)}", self.tok.pos, [repr(text)])
        return self.advance()

    def fail(self, expected):
        raise ParseError(f"unexpected {_describe(self.tok)}", self.tok.pos, expected)

    # formulas ------------------------------------------------------------

    def formula(self) -> Formula:
        if self.at("sup") or self.at("inf"):
            cls = Sup if self.advance().text == "sup" else Inf
            bound = [self.var()]
            while True:
                if self.at(","):
                    self.advance()
                    bound.append(self.var())
                elif self.tok.kind == "var":
                    bound.append(self.var())
                else:
                    break
            self.expect(".")
            return cls(tuple(bound), self.formula())
        return self.fsum()

    def var(self) -> int:
        if self.tok.kind != "var":
            self.fail(["variable"])
        return int(self.advance().text[1:])

    def fsum(self) -> Formula:
        left = self.fprod()
        while self.at("+") or self.at("-."):
            cls = Add if self.advance().text == "+" else DotMinus
            left = cls(left, self.fprod())
        return left

    def fprod(self) -> Formula:
        left = self.fatom()
        while self.at("*"):
            self.advance()
            left = Mul(left, self.fatom())
        return left

    def fatom(self) -> Formula:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(Fraction(tok.text))
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "kw" and tok.text in ("norm2", "trRe", "trIm"):
            self.advance()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return {"norm2": Norm2, "trRe": TraceRe, "trIm": TraceIm}[tok.text](t)
        if tok.kind == "kw" and tok.text in ("max", "min"):
            self.advance()
            self.expect("(")
            a = self.formula()
            self.expect(",")
            b = self.formula()
            self.expect(")")
            return (Max if tok.text == "max" else Min)(a, b)
        if tok.kind == "kw" and tok.text == "half":
            self.advance()
            self.expect("(")
            a = self.formula()
            self.expect(")")
            return Half(a)
        if tok.kind == "kw" and tok.text == "scale":
            self.advance()
            self.expect("(")
            pos = self.tok.pos
            negative = False
            if self.at("-"):
                self.advance()
                negative = True
            if self.tok.kind != "num":
                self.fail(["rational"])
            q = Fraction(self.advance().text)
            if negative and q != 0:
                raise ScaleNegative(f"formula-level scale must be non-negative, got -{q}", pos)
            self.expect(",")
            a = self.formula()
            self.expect(")")
            return Scaled(q, a)
        self.fail(["rational", "norm2", "trRe", "trIm", "max", "min", "half", "scale", "'('"])

    # terms ---------------------------------------------------------------

    def term(self) -> Term:
        left = self.tprod()
        while self.at("+") or self.at("-"):
            minus = self.advance().text == "-"
            right = self.tprod()
            left = Sum(left, Scale(CRational(-1), right) if minus else right)
        return left

    def _starts_tunary(self, tok: _Tok) -> bool:
        return tok.kind in ("var", "num") or (tok.kind == "sym" and tok.text in ("(", "[", "-"))

    def tprod(self) -> Term:
        left = self.tunary()
        while True:
            if self.at("*"):
                self.advance()
            elif not (self._starts_tunary(self.tok) and not self.at("-")):
                return left
            left = Prod(left, self.tunary())

    def tunary(self) -> Term:
        if self.at("["):
            self.advance()
            c = self.cnum()
            self.expect("]")
            return Scale(c, self.tunary())
        if self.at("-"):
            self.advance()
            return Scale(CRational(-1), self.tunary())
        if self.tok.kind == "num" and self._starts_tunary(self.peek()) and self.peek().text != "-":
            q = Fraction(self.advance().text)
            return Scale(CRational(q), self.tunary())
        return self.tpost()

    def tpost(self) -> Term:
        t = self.tatom()
        while self.at("'"):
            self.advance()
            t = Adjoint(t)
        return t

    def tatom(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            return Var(self.var())
        if tok.kind == "num":
            self.advance()
            q = Fraction(tok.text)
            if q == 0:
                return Zero()
            if q == 1:
                return One()
            return Scale(CRational(q), One())
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        self.fail(["variable", "rational", "'('", "'['"])

    def cpart(self):
        """One signed-less component; returns (value, is_imaginary)."""
        if self.at("i"):
            self.advance()
            return Fraction(1), True
        if self.tok.kind != "num":
            self.fail(["rational", "'i'"])
        q = Fraction(self.advance().text)
        if self.at("i"):
            self.advance()
            return q, True
        return q, False

    def cnum(self) -> CRational:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        re_, im_ = Fraction(0), Fraction(0)
        q, imag = self.cpart()
        if imag:
            im_ = sign * q
        else:
            re_ = sign * q
            if self.at("+") or self.at("-"):
                s2 = 1 if self.advance().text == "+" else -1
                q2, imag2 = self.cpart()
                if not imag2:
                    raise ParseError("second component of a complex scalar must be imaginary",
                                     self.toks[self.i - 1].pos, ["'i'"])
                im_ = s2 * q2
        return CRational(re_, im_)


def parse(text: str) -> Formula:
    """Parse formula text into an AST.

    >>> parse("1 -. 1")
    DotMinus(left=Const(value=Fraction(1, 1)), right=Const(value=Fraction(1, 1)))
    """
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(["'+'", "'-.'", "'*'", "end of input"])
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail(["'+'", "'-'", "'*'", "end of input"])
    return t


# --------------------------------------------------------------------------
# JSON AST


def _frac(q: Fraction) -> str:
    return str(Fraction(q))


def term_to_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"type": "Var", "index": t.index}
    if isinstance(t, One):
        return {"type": "One"}
    if isinstance(t, Zero):
        return {"type": "Zero"}
    if isinstance(t, Adjoint):
        return {"type": "Adjoint", "arg": term_to_json(t.arg)}
    if isinstance(t, Scale):
        return {"type": "Scale", "coef": {"re": _frac(t.coef.re), "im": _frac(t.coef.im)},
                "arg": term_to_json(t.arg)}
    return {"type": type(t).__name__, "left": term_to_json(t.left), "right": term_to_json(t.right)}


_TERM_BINARY = {"Sum": Sum, "Prod": Prod}


def term_from_json(obj: dict) -> Term:
    kind = obj.get("type")
    if kind == "Var":
        return Var(int(obj["index"]))
    if kind == "One":
        return One()
    if kind == "Zero":
        return Zero()
    if kind == "Adjoint":
        return Adjoint(term_from_json(obj["arg"]))
    if kind == "Scale":
        c = obj["coef"]
        return Scale(CRational(Fraction(c["re"]), Fraction(c.get("im", "0"))), term_from_json(obj["arg"]))
    if kind in _TERM_BINARY:
        return _TERM_BINARY[kind](term_from_json(obj["left"]), term_from_json(obj["right"]))
    raise InvalidArgument(f"unknown term node {kind!r}")


_F_BINARY = {"Add": Add, "Mul": Mul, "DotMinus": DotMinus, "Max": Max, "Min": Min}
_F_ATOMIC = {"Norm2": Norm2, "TraceRe": TraceRe, "TraceIm": TraceIm}


def to_json(f: Formula) -> dict:
    if isinstance(f, ATOMIC):
        return {"type": type(f).__name__, "term": term_to_json(f.term)}
    if isinstance(f, Const):
        return {"type": "Const", "value": _frac(f.value)}
    if isinstance(f, Scaled):
        return {"type": "Scale", "coef": _frac(f.coef), "arg": to_json(f.arg)}
    if isinstance(f, Half):
        return {"type": "Half", "arg": to_json(f.arg)}
    if isinstance(f, QUANTIFIERS):
        return {"type": type(f).__name__, "vars": list(f.vars), "body": to_json(f.body)}
    return {"type": type(f).__name__, "left": to_json(f.left), "right": to_json(f.right)}


def from_json(obj: dict) -> Formula:
    kind = obj.get("type")
    if kind in _F_ATOMIC:
        return _F_ATOMIC[kind](term_from_json(obj["term"]))
    if kind == "Const":
        return Const(Fraction(obj["value"]))
    if kind == "Scale":
        return Scaled(Fraction(obj["coef"]), from_json(obj["arg"]))
    if kind == "Half":
        return Half(from_json(obj["arg"]))
    if kind in ("Sup", "Inf"):
        return (Sup if kind == "Sup" else Inf)(tuple(obj["vars"]), from_json(obj["body"]))
    if kind in _F_BINARY:
        return _F_BINARY[kind](from_json(obj["left"]), from_json(obj["right"]))
    raise InvalidArgument(f"unknown formula node {kind!r}")


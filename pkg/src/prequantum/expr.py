"""Symbolic scalar expressions over real variables.

Expressions are immutable trees built through smart constructors that do
constant folding and flattening and nothing else. Constants are exact
Gaussian rationals; ``pi`` is kept as a formal symbol so that polynomial
identities involving the prequantum normalisation stay exact.

Polynomial (more precisely Laurent-monomial) expressions can be expanded to
a canonical monomial normal form, which is what :func:`expr_equal` uses to
decide equality exactly.  Everything else is compared by seeded sampling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Number", "Expr", "Const", "Sym", "Pi", "Add", "Mul", "Pow", "Div", "Func",
    "ParseError", "ExprSyntaxError", "UnknownIdentifier", "DomainError",
    "const", "sym", "add", "mul", "neg", "sub", "pow_", "div", "func", "PI", "I",
    "ZERO", "ONE", "parse", "to_str", "diff", "evaluate", "substitute",
    "free_symbols", "to_poly", "from_poly", "expand", "is_polynomial",
    "expr_equal", "is_zero", "conjugate", "imag_part", "real_part", "FUNCTIONS",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
RESERVED = frozenset(FUNCTIONS) | {"i", "pi"}


class ParseError(ValueError):
    """Raised for any input the expression grammar rejects."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class DomainError(ArithmeticError):
    """Evaluation left the domain of the expression (pole, log of zero, ...)."""


# ---------------------------------------------------------------------------
# exact complex constants


@dataclass(frozen=True)
class Number:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "Number":
        if isinstance(value, Number):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        if isinstance(value, str):
            return cls(Fraction(value))
        return cls(Fraction(value))

    def __add__(self, other: "Number") -> "Number":
        return Number(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Number") -> "Number":
        return Number(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "Number") -> "Number":
        return Number(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    def __neg__(self) -> "Number":
        return Number(-self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def inverse(self) -> "Number":
        den = self.re * self.re + self.im * self.im
        if den == 0:
            raise DomainError("division by zero")
        return Number(self.re / den, -self.im / den)

    def conjugate(self) -> "Number":
        return Number(self.re, -self.im)

    def __pow__(self, n: int) -> "Number":
        base = self if n >= 0 else self.inverse()
        out = Number(Fraction(1))
        for _ in range(abs(n)):
            out = out * base
        return out

    @property
    def is_real(self) -> bool:
        return self.im == 0

    @property
    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1


# ---------------------------------------------------------------------------
# nodes


class Expr:
    """Base class for expression nodes. Use the module constructors."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __pow__(self, n: int):
        return pow_(self, n)

    def __neg__(self):
        return neg(self)

    def __str__(self) -> str:
        return to_str(self)


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: Number

    def __repr__(self):
        return f"Const({to_str(self)})"


@dataclass(frozen=True, repr=False)
class Sym(Expr):
    name: str

    def __repr__(self):
        return f"Sym({self.name!r})"


@dataclass(frozen=True, repr=False)
class Pi(Expr):
    def __repr__(self):
        return "Pi()"


@dataclass(frozen=True, repr=False)
class Add(Expr):
    terms: tuple

    def __repr__(self):
        return f"Add{self.terms!r}"


@dataclass(frozen=True, repr=False)
class Mul(Expr):
    factors: tuple

    def __repr__(self):
        return f"Mul{self.factors!r}"


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    base: Expr
    exponent: int

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exponent})"


@dataclass(frozen=True, repr=False)
class Div(Expr):
    num: Expr
    den: Expr

    def __repr__(self):
        return f"Div({self.num!r}, {self.den!r})"


@dataclass(frozen=True, repr=False)
class Func(Expr):
    name: str
    arg: Expr

    def __repr__(self):
        return f"Func({self.name!r}, {self.arg!r})"


def const(value) -> Const:
    return Const(Number.of(value))


def sym(name: str) -> Sym:
    return Sym(name)


ZERO = const(0)
ONE = const(1)
PI = Pi()
I = Const(Number(Fraction(0), Fraction(1)))


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex, Fraction, Number, np.number)):
        return const(x)
    raise TypeError(f"cannot use {type(x).__name__} as an expression")


def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == Number.of(value)


def add(*terms) -> Expr:
    flat = []
    total = Number(Fraction(0))
    for t in map(_coerce, terms):
        parts = t.terms if isinstance(t, Add) else (t,)
        for part in parts:
            if isinstance(part, Const):
                total = total + part.value
            else:
                flat.append(part)
    if total:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    coeff = Number(Fraction(1))
    for f in map(_coerce, factors):
        parts = f.factors if isinstance(f, Mul) else (f,)
        for part in parts:
            if isinstance(part, Const):
                coeff = coeff * part.value
            else:
                flat.append(part)
    if not coeff:
        return ZERO
    if coeff != Number(Fraction(1)) or not flat:
        flat.insert(0, Const(coeff))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e: Expr) -> Expr:
    return mul(const(-1), e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(_coerce(b)))


def pow_(base: Expr, n: int) -> Expr:
    base = _coerce(base)
    if isinstance(n, Number):
        if not n.is_integer:
            raise ValueError("only integer powers are supported; use exp(log(.))")
        n = int(n.re)
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError("only integer powers are supported; use exp(log(.))")
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value ** n)
    return Pow(base, n)


def div(num: Expr, den: Expr) -> Expr:
    num, den = _coerce(num), _coerce(den)
    if isinstance(den, Const):
        return mul(num, Const(den.value.inverse()))
    if _is_const(num, 0):
        return ZERO
    return Div(num, den)


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    arg = _coerce(arg)
    if _is_const(arg, 0):
        if name in ("sin", "sqrt"):
            return ZERO
        if name in ("cos", "exp"):
            return ONE
    if name == "log" and _is_const(arg, 1):
        return ZERO
    return Func(name, arg)


def sin(e): return func("sin", e)
def cos(e): return func("cos", e)
def exp(e): return func("exp", e)
def log(e): return func("log", e)
def sqrt(e): return func("sqrt", e)


# ---------------------------------------------------------------------------
# canonical printer


def _fmt_rational(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator) if r >= 0 else f"({r.numerator})"
    return f"({r.numerator}/{r.denominator})"


def _fmt_number(v: Number) -> str:
    if v.im == 0:
        return _fmt_rational(v.re)
    imag = "i" if v.im == 1 else f"({_fmt_rational(v.im)} * i)"
    if v.re == 0:
        return imag
    return f"({_fmt_rational(v.re)} + {imag})"


def to_str(e: Expr) -> str:
    """Fully parenthesised infix form; ``parse`` reads it back to the same tree."""
    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Add):
        return "(" + " + ".join(map(to_str, e.terms)) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(map(to_str, e.factors)) + ")"
    if isinstance(e, Pow):
        exp_str = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"({to_str(e.base)} ^ {exp_str})"
    if isinstance(e, Div):
        return f"({to_str(e.num)} / {to_str(e.den)})"
    if isinstance(e, Func):
        return f"{e.name}({to_str(e.arg)})"
    raise TypeError(e)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.group("num") is not None:
            value = Number.of(m.group("num"))
            if m.group("imag"):
                value = Number(Fraction(0), value.re)
            tokens.append(("num", value, pos))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), pos))
        else:
            tokens.append(("op", m.group("op"), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: frozenset):
        self.tokens = _tokenize(text)
        self.k = 0
        self.names = names

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, op: str):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {value!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            inner = self.unary()
            return neg(inner) if value == "-" else inner
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.take()
            exponent = self.unary()
            if not (isinstance(exponent, Const) and exponent.value.is_integer):
                raise ExprSyntaxError("exponent must be an integer constant", pos)
            return pow_(base, int(exponent.value.re))
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.take()
        if kind == "num":
            return Const(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return func(value, arg)
            if value == "pi":
                return PI
            if value == "i":
                return I
            if value not in self.names:
                raise UnknownIdentifier(value, pos)
            return Sym(value)
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected token {value!r}", pos)


def parse(text: str, coords: Sequence[str], params: Sequence[str] = ()) -> Expr:
    """Parse infix ``text``; identifiers must be in ``coords`` or ``params``."""
    names = frozenset(coords) | frozenset(params)
    clash = names & RESERVED
    if clash:
        raise ValueError(f"reserved names used as symbols: {sorted(clash)}")
    return _Parser(text, names).parse()


# ---------------------------------------------------------------------------
# calculus


def diff(e: Expr, var: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``var``."""
    if isinstance(e, (Const, Pi)):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.name == var else ZERO
    if isinstance(e, Add):
        return add(*(diff(t, var) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        for k, factor in enumerate(e.factors):
            d = diff(factor, var)
            if not _is_const(d, 0):
                terms.append(mul(*e.factors[:k], d, *e.factors[k + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        d = diff(e.base, var)
        if _is_const(d, 0):
            return ZERO
        return mul(const(e.exponent), pow_(e.base, e.exponent - 1), d)
    if isinstance(e, Div):
        dn, dd = diff(e.num, var), diff(e.den, var)
        if _is_const(dd, 0):
            return div(dn, e.den)
        return div(sub(mul(dn, e.den), mul(e.num, dd)), pow_(e.den, 2))
    if isinstance(e, Func):
        d = diff(e.arg, var)
        if _is_const(d, 0):
            return ZERO
        u = e.arg
        if e.name == "sin":
            outer = cos(u)
        elif e.name == "cos":
            outer = neg(sin(u))
        elif e.name == "exp":
            outer = e
        elif e.name == "log":
            return div(d, u)
        else:  # sqrt
            return div(d, mul(const(2), e))
        return mul(outer, d)
    raise TypeError(e)


def free_symbols(e: Expr) -> frozenset:
    if isinstance(e, Sym):
        return frozenset((e.name,))
    if isinstance(e, (Const, Pi)):
        return frozenset()
    return frozenset().union(*(free_symbols(c) for c in _children(e)))


def _children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Func):
        return (e.arg,)
    return ()


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneously replace symbols by expressions."""
    if not mapping:
        return e
    if isinstance(e, Sym):
        return _coerce(mapping[e.name]) if e.name in mapping else e
    if isinstance(e, (Const, Pi)):
        return e
    if isinstance(e, Add):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Div):
        return div(substitute(e.num, mapping), substitute(e.den, mapping))
    if isinstance(e, Func):
        return func(e.name, substitute(e.arg, mapping))
    raise TypeError(e)


def conjugate(e: Expr) -> Expr:
    """Complex conjugate, treating every symbol as real.

    Uses conj(f(z)) = f(conj z), which holds for log and sqrt off the
    negative real axis (principal branch).
    """
    if isinstance(e, Const):
        return Const(e.value.conjugate())
    if isinstance(e, (Sym, Pi)):
        return e
    if isinstance(e, Add):
        return add(*map(conjugate, e.terms))
    if isinstance(e, Mul):
        return mul(*map(conjugate, e.factors))
    if isinstance(e, Pow):
        return pow_(conjugate(e.base), e.exponent)
    if isinstance(e, Div):
        return div(conjugate(e.num), conjugate(e.den))
    if isinstance(e, Func):
        return func(e.name, conjugate(e.arg))
    raise TypeError(e)


def real_part(e: Expr) -> Expr:
    return mul(const(Fraction(1, 2)), add(e, conjugate(e)))


def imag_part(e: Expr) -> Expr:
    return mul(Const(Number(Fraction(0), Fraction(-1, 2))), sub(e, conjugate(e)))


# ---------------------------------------------------------------------------
# evaluation

_NP_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def _eval(e: Expr, env):
    if isinstance(e, Const):
        return complex(e.value)
    if isinstance(e, Sym):
        try:
            return env[e.name]
        except KeyError:
            raise KeyError(f"no value supplied for symbol {e.name!r}") from None
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Add):
        out = _eval(e.terms[0], env)
        for t in e.terms[1:]:
            out = out + _eval(t, env)
        return out
    if isinstance(e, Mul):
        out = _eval(e.factors[0], env)
        for f in e.factors[1:]:
            out = out * _eval(f, env)
        return out
    if isinstance(e, Pow):
        base = _eval(e.base, env)
        if e.exponent < 0:
            if np.any(base == 0):
                raise DomainError(f"zero raised to negative power in {to_str(e)}")
            return (1.0 / base) ** (-e.exponent)
        return base ** e.exponent
    if isinstance(e, Div):
        den = _eval(e.den, env)
        if np.any(den == 0):
            raise DomainError(f"division by zero in {to_str(e)}")
        return _eval(e.num, env) / den
    if isinstance(e, Func):
        arg = _eval(e.arg, env)
        if e.name == "log" and np.any(arg == 0):
            raise DomainError(f"log of zero in {to_str(e)}")
        return _NP_FUNCS[e.name](np.asarray(arg, dtype=complex))
    raise TypeError(e)


def evaluate(e: Expr, env: Mapping[str, object]):
    """Evaluate at real (or complex) symbol values.

    Values may be scalars or broadcastable numpy arrays. Scalars give a Python
    complex; arrays give a complex array.
    """
    arrays = any(isinstance(v, np.ndarray) and v.ndim > 0 for v in env.values())
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    if arrays:
        return np.broadcast_to(np.asarray(out, dtype=complex),
                               np.broadcast_shapes(*(np.shape(v) for v in env.values())))
    out = complex(out)
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DomainError(f"non-finite value {out} from {to_str(e)}")
    return out


# ---------------------------------------------------------------------------
# monomial normal form
#
# A Poly maps monomials to exact coefficients. A monomial is a sorted tuple of
# (symbol, nonzero int exponent); ``pi`` appears as the symbol "pi". Negative
# exponents are allowed so that division by a monomial stays polynomial.

Poly = dict


def _poly_add(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for mono, c in b.items():
        c = c if sign > 0 else -c
        total = out.get(mono, Number(Fraction(0))) + c
        if total:
            out[mono] = total
        else:
            out.pop(mono, None)
    return out


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    exps = dict(m1)
    for name, k in m2:
        total = exps.get(name, 0) + k
        if total:
            exps[name] = total
        else:
            exps.pop(name, None)
    return tuple(sorted(exps.items()))


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = _mono_mul(m1, m2)
            total = out.get(mono, Number(Fraction(0))) + c1 * c2
            if total:
                out[mono] = total
            else:
                out.pop(mono, None)
    return out


def _poly_inverse(a: Poly):
    if len(a) != 1:
        return None
    (mono, c), = a.items()
    return {tuple((name, -k) for name, k in mono): c.inverse()}


def to_poly(e: Expr):
    """Monomial normal form of ``e``, or None when ``e`` is not polynomial."""
    if isinstance(e, Const):
        return {(): e.value} if e.value else {}
    if isinstance(e, Sym):
        return {((e.name, 1),): Number(Fraction(1))}
    if isinstance(e, Pi):
        return {(("pi", 1),): Number(Fraction(1))}
    if isinstance(e, Add):
        out: Poly = {}
        for t in e.terms:
            p = to_poly(t)
            if p is None:
                return None
            out = _poly_add(out, p)
        return out
    if isinstance(e, Mul):
        out = {(): Number(Fraction(1))}
        for f in e.factors:
            p = to_poly(f)
            if p is None:
                return None
            out = _poly_mul(out, p)
        return out
    if isinstance(e, Pow):
        base = to_poly(e.base)
        if base is None:
            return None
        if e.exponent < 0:
            base = _poly_inverse(base)
            if base is None:
                return None
        out = {(): Number(Fraction(1))}
        for _ in range(abs(e.exponent)):
            out = _poly_mul(out, base)
        return out
    if isinstance(e, Div):
        num, den = to_poly(e.num), to_poly(e.den)
        if num is None or den is None:
            return None
        inv = _poly_inverse(den)
        return None if inv is None else _poly_mul(num, inv)
    return None


def is_polynomial(e: Expr) -> bool:
    return to_poly(e) is not None


def _mono_key(mono: tuple):
    return (sum(k for _, k in mono), mono)


def from_poly(p: Poly) -> Expr:
    terms = []
    for mono in sorted(p, key=_mono_key):
        factors = [PI if name == "pi" else Sym(name) for name, _ in mono]
        terms.append(mul(Const(p[mono]), *(pow_(f, k) for f, (_, k) in zip(factors, mono))))
    return add(*terms)


def expand(e: Expr) -> Expr:
    """Canonical expanded form when polynomial; otherwise ``e`` unchanged."""
    p = to_poly(e)
    return e if p is None else from_poly(p)


# ---------------------------------------------------------------------------
# semantic equality


def _box_for(names: Iterable[str], domain) -> dict:
    if domain is None:
        domain = (-3.0, 3.0)
    if isinstance(domain, Mapping):
        return {n: domain.get(n, (-3.0, 3.0)) for n in names}
    return {n: tuple(domain) for n in names}


def expr_equal(a: Expr, b: Expr, domain=None, trials: int = 32, tol: float = 1e-10,
               seed: int = 0, env: Mapping[str, float] | None = None,
               retry_budget: int | None = None) -> bool:
    """Decide ``a == b`` as functions.

    Polynomial pairs are compared exactly in monomial normal form. Otherwise
    ``trials`` points are drawn from ``domain`` (a ``(lo, hi)`` pair applied to
    every free symbol, or a per-symbol mapping) with a seeded generator and the
    absolute difference must stay within ``tol``. Symbols fixed in ``env`` are
    not sampled. Points outside the domain of either side are redrawn up to
    ``retry_budget`` times, after which DomainError is raised.
    """
    a, b = _coerce(a), _coerce(b)
    pa, pb = to_poly(a), to_poly(b)
    if pa is not None and pb is not None:
        return not _poly_add(pa, pb, sign=-1)
    fixed = dict(env or {})
    names = sorted((free_symbols(a) | free_symbols(b)) - set(fixed))
    box = _box_for(names, domain)
    rng = np.random.default_rng(seed)
    budget = 10 * trials if retry_budget is None else retry_budget
    done = failures = 0
    while done < trials:
        point = dict(fixed)
        for n in names:
            lo, hi = box[n]
            point[n] = float(rng.uniform(lo, hi))
        try:
            diff_value = evaluate(a, point) - evaluate(b, point)
        except DomainError:
            failures += 1
            if failures > budget:
                raise DomainError("sampling retry budget exhausted") from None
            continue
        if abs(diff_value) > tol:
            return False
        done += 1
    return True


def is_zero(e: Expr, **kwargs) -> bool:
    return expr_equal(e, ZERO, **kwargs)

"""Exact sparse multivariate polynomial arithmetic over the rationals.

This module provides the ground-level objects everything else is built on:

* ``Ring`` -- a named tuple of variables.  The same ring doubles as the
  polynomial algebra and its dual algebra of differential / contraction
  operators; which role a polynomial plays is determined by argument
  position in the action functions.
* ``Polynomial`` -- immutable sparse polynomial with exact rational
  coefficients, stored as a map from exponent vectors to ``int`` or
  ``Fraction`` (integers are kept as ``int`` so the common all-integer
  paths avoid rational normalization).
* ``ParamPolynomial`` -- polynomial in the ring variables whose
  coefficients are themselves polynomials in a separate parameter ring.
* ``BaseChange`` -- square matrix of parameter-ring entries encoding a
  linear change of coordinates, e.g. the unipotent substitution that
  moves a symbolic linear form onto a chart variable.

It also implements the two apolarity module structures (differentiation
and contraction), divided powers, dehomogenization, parsing/printing of
the repo-wide polynomial grammar, and exact gcd / squarefree machinery.

Everything here is a pure function over immutable values; there is no
global mutable state.
"""

from __future__ import annotations

import math
import re
import warnings
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Coef = Union[int, Fraction]
Monomial = tuple  # exponent vector, one non-negative int per variable


# ---------------------------------------------------------------------------
# coefficients

def norm_coef(c: Coef) -> Coef:
    """Collapse a Fraction with denominator 1 back to int."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def coef_str(c: Coef) -> str:
    """Render a rational as ``p`` or ``p/q``."""
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
    return str(c)


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


# ---------------------------------------------------------------------------
# monomials

def mono_degree(m: Monomial) -> int:
    return sum(m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def mono_sub(a: Monomial, b: Monomial) -> Monomial:
    """Componentwise a - b; caller guarantees non-negative entries."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_factorial(m: Monomial) -> int:
    """alpha! = prod of factorials of the entries."""
    out = 1
    for e in m:
        out *= math.factorial(e)
    return out


def key_degrevlex(m: Monomial):
    """Sort key: ascending = increasing degrevlex order."""
    return (sum(m), tuple(-e for e in reversed(m)))


def key_lex(m: Monomial):
    return tuple(m)


ORDER_KEYS = {"degrevlex": key_degrevlex, "lex": key_lex}


def monomials_of_degree(nvars: int, d: int) -> list[Monomial]:
    """All exponent vectors of total degree d, degrevlex-descending."""
    if nvars == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, nvars)
    out.sort(key=key_degrevlex, reverse=True)
    return out


def monomials_up_to(nvars: int, d: int) -> list[Monomial]:
    """Exponent vectors of degree <= d: ascending degree, degrevlex-descending
    inside each degree.  This is the row/column index order used by the
    coefficient matrices."""
    out = []
    for t in range(d + 1):
        out.extend(monomials_of_degree(nvars, t))
    return out


# ---------------------------------------------------------------------------
# ring

class Ring:
    """A polynomial ring context: just the tuple of variable names."""

    __slots__ = ("names",)

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def var(self, i: int) -> "Polynomial":
        e = tuple(1 if k == i else 0 for k in range(self.nvars))
        return Polynomial(self, {e: 1})

    def variables(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c: Coef) -> "Polynomial":
        c = norm_coef(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
        if c == 0:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * self.nvars: c})

    def monomial(self, expo: Monomial, c: Coef = 1) -> "Polynomial":
        if len(expo) != self.nvars:
            raise ValueError("exponent length does not match ring")
        return Polynomial(self, {tuple(expo): c})

    def drop(self, j: int) -> "Ring":
        return Ring(self.names[:j] + self.names[j + 1:])

    def insert(self, j: int, name: str) -> "Ring":
        return Ring(self.names[:j] + (name,) + self.names[j:])

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({','.join(self.names)})"


#: conventional variable letters, in order, for small rings
LETTERS = ("x", "y", "z", "u")


def default_ring(nvars: int) -> Ring:
    """x,y,z,u for up to four variables, x0..xN beyond."""
    if nvars <= len(LETTERS):
        return Ring(LETTERS[:nvars])
    return Ring(tuple(f"x{i}" for i in range(nvars)))


def param_ring(n: int) -> Ring:
    """The parameter ring k[g1..gn] of a symbolic linear form."""
    return Ring(tuple(f"g{i}" for i in range(1, n + 1)))


# ---------------------------------------------------------------------------
# polynomials

class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        clean = {}
        for m, c in terms.items():
            c = norm_coef(c)
            if c != 0:
                clean[m] = c
        self.terms = clean
        self._hash = None

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def constant_term(self) -> Coef:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def coefficient(self, m: Monomial) -> Coef:
        return self.terms.get(tuple(m), 0)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=key_degrevlex, reverse=True)

    def leading(self, order: str = "degrevlex"):
        """(monomial, coefficient) of the leading term; None if zero."""
        if not self.terms:
            return None
        m = max(self.terms, key=ORDER_KEYS[order])
        return m, self.terms[m]

    def sorted_terms(self) -> list:
        return [(m, self.terms[m]) for m in self.monomials()]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.ring.zero()
            return Polynomial(self.ring, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of polynomial by zero")
            inv = Fraction(1, 1) / Fraction(other)
            return self * inv
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(
                (m, Fraction(c)) for m, c in self.terms.items())))
        return self._hash

    # -- substitution and evaluation ----------------------------------------

    def evaluate(self, point: Sequence[Coef]) -> Coef:
        if len(point) != self.ring.nvars:
            raise ValueError("point length does not match ring")
        total: Coef = 0
        for m, c in self.terms.items():
            v = c
            for e, p in zip(m, point):
                if e:
                    v = v * p ** e
            total += v
        return norm_coef(total)

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute variable i by images[i]; all images share one ring."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        target = images[0].ring if images else self.ring
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e
            return cache[key]

        out = target.zero()
        for m, c in self.terms.items():
            term = target.constant(c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def substitute(self, i: int, value: Coef) -> "Polynomial":
        """Set variable i to a constant and drop it from the ring."""
        target = self.ring.drop(i)
        out: dict = {}
        for m, c in self.terms.items():
            v = c * (value ** m[i] if m[i] else 1)
            key = m[:i] + m[i + 1:]
            s = out.get(key, 0) + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Polynomial(target, out)

    def partial(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable i."""
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c * m[i]
        return Polynomial(self.ring, out)

    def homogeneous_component(self, d: int) -> "Polynomial":
        return Polynomial(self.ring, {m: c for m, c in self.terms.items() if sum(m) == d})

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"<{poly_str(self)}>"


def poly_str(p: Polynomial) -> str:
    """Exact printer; emits degrevlex-descending terms, '^' powers, '*' products."""
    if p.is_zero():
        return "0"
    chunks = []
    for m, c in p.sorted_terms():
        factors = [f"{p.ring.names[i]}^{e}" if e > 1 else p.ring.names[i]
                   for i, e in enumerate(m) if e]
        neg = (c < 0)
        a = -c if neg else c
        if factors and a == 1:
            body = "*".join(factors)
        elif factors:
            body = "*".join([coef_str(a)] + factors)
        else:
            body = coef_str(a)
        if not chunks:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append(("- " if neg else "+ ") + body)
    return " ".join(chunks)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"unexpected character {text[pos:].strip()[0]!r}")
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op))
    return tokens


class _Parser:
    """Recursive-descent parser for sums of rational-coefficient monomial
    terms; also accepts parenthesized products so forms can be written the
    way they are usually quoted, e.g. ``x^2*(y+z) + y^2*(x+z)``."""

    def __init__(self, tokens, ring: Ring):
        self.tokens = tokens
        self.i = 0
        self.ring = ring
        self.index = {name: k for k, name in enumerate(ring.names)}

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> Polynomial:
        kind, val = self.peek()
        sign = 1
        while kind == "op" and val in "+-":
            self.take()
            if val == "-":
                sign = -sign
            kind, val = self.peek()
        out = self.product() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                nxt = self.product()
                out = out + nxt if val == "+" else out - nxt
            else:
                return out

    def product(self) -> Polynomial:
        out = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = out * self.power()
            elif kind == "op" and val == "/":
                self.take()
                k2, v2 = self.take()
                if k2 != "num":
                    raise ValueError("denominator must be an integer literal")
                out = out / v2
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                out = out * self.power()  # implicit product by juxtaposition
            else:
                return out

    def power(self) -> Polynomial:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k2, v2 = self.take()
            neg = False
            if k2 == "op" and v2 == "-":
                neg = True
                k2, v2 = self.take()
            if k2 != "num" or neg:
                raise ValueError("malformed exponent")
            return base ** v2
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return self.ring.constant(val)
        if kind == "name":
            if val not in self.index:
                raise ValueError(f"unknown variable name {val!r}")
            return self.ring.var(self.index[val])
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val = self.take()
            if kind != "op" or val != ")":
                raise ValueError("unbalanced parenthesis")
            return inner
        if kind == "op" and val == "-":
            return -self.atom()
        raise ValueError("malformed term")


def parse_poly(text: str, ring: Ring) -> Polynomial:
    """Parse the repo-wide polynomial grammar into a normalized Polynomial.

    Terms are separated by ``+``/``-``; a term is ``[rational][*]var[^int]...``
    with ``*`` optional; parenthesized sub-expressions are allowed.
    """
    if not text or not text.strip():
        raise ValueError("empty input")
    parser = _Parser(_tokenize(text), ring)
    out = parser.expr()
    if parser.i < len(parser.tokens):
        raise ValueError(f"trailing input near token {parser.tokens[parser.i]!r}")
    return out


# ---------------------------------------------------------------------------
# apolarity actions

def derivative_action(g: Polynomial, F: Polynomial) -> Polynomial:
    """Apply the differential operator g to F:
    y^b o x^a = a!/(a-b)! x^(a-b) when a >= b, else 0, extended bilinearly."""
    if g.ring.nvars != F.ring.nvars:
        raise ValueError("variable-count mismatch between operator and argument")
    out = F.ring.zero()
    acc: dict = {}
    for b, cg in g.terms.items():
        for a, cf in F.terms.items():
            if mono_divides(b, a):
                scale = 1
                for eb, ea in zip(b, a):
                    if eb:
                        scale *= math.factorial(ea) // math.factorial(ea - eb)
                m = mono_sub(a, b)
                s = acc.get(m, 0) + cg * cf * scale
                if s:
                    acc[m] = s
                else:
                    del acc[m]
    return Polynomial(F.ring, acc)


def contraction_action(g: Polynomial, f: Polynomial) -> Polynomial:
    """Apply g to f by contraction: y^b -| x^a = x^(a-b) when a >= b, else 0."""
    if g.ring.nvars != f.ring.nvars:
        raise ValueError("variable-count mismatch between operator and argument")
    acc: dict = {}
    for b, cg in g.terms.items():
        for a, cf in f.terms.items():
            if mono_divides(b, a):
                m = mono_sub(a, b)
                s = acc.get(m, 0) + cg * cf
                if s:
                    acc[m] = s
                else:
                    del acc[m]
    return Polynomial(f.ring, acc)


def divided_power(F: Polynomial) -> Polynomial:
    """Rescale every coefficient by the factorial of its exponent vector,
    converting the differentiation pairing into contraction."""
    return Polynomial(F.ring, {m: c * mono_factorial(m) for m, c in F.terms.items()})


def dehomogenize(F: Polynomial, j: int) -> Polynomial:
    """Set x_j = 1 in a homogeneous F, landing in the ring without x_j."""
    if not F.is_homogeneous():
        raise ValueError("polynomial is not homogeneous")
    target = F.ring.drop(j)
    out = {}
    for m, c in F.terms.items():
        out[m[:j] + m[j + 1:]] = c  # distinct images: degree fixes the x_j exponent
    return Polynomial(target, out)


# ---------------------------------------------------------------------------
# parameter polynomials

class ParamPolynomial:
    """Polynomial in the ring variables with parameter-polynomial coefficients.

    Canonically nested as x-monomial -> polynomial in the parameters, since
    every consumer indexes by x-monomials.
    """

    __slots__ = ("ring", "params", "terms")

    def __init__(self, ring: Ring, params: Ring, terms: dict):
        self.ring = ring
        self.params = params
        clean = {}
        for m, p in terms.items():
            if not p.is_zero():
                clean[m] = p
        self.terms = clean

    @classmethod
    def from_polynomial(cls, F: Polynomial, params: Ring) -> "ParamPolynomial":
        return cls(F.ring, params,
                   {m: params.constant(c) for m, c in F.terms.items()})

    @classmethod
    def zero(cls, ring: Ring, params: Ring) -> "ParamPolynomial":
        return cls(ring, params, {})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=key_degrevlex, reverse=True)

    def coefficient(self, m: Monomial) -> Polynomial:
        return self.terms.get(tuple(m), self.params.zero())

    def _check(self, other: "ParamPolynomial"):
        if self.ring != other.ring or self.params != other.params:
            raise ValueError("ring mismatch between parameter polynomials")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, p in other.terms.items():
            s = out.get(m, self.params.zero()) + p
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return ParamPolynomial(self.ring, self.params, out)

    def __neg__(self):
        return ParamPolynomial(self.ring, self.params,
                               {m: -p for m, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ParamPolynomial(self.ring, self.params,
                                   {m: p * other for m, p in self.terms.items()})
        if isinstance(other, Polynomial) and other.ring == self.params:
            return ParamPolynomial(self.ring, self.params,
                                   {m: p * other for m, p in self.terms.items()})
        self._check(other)
        out: dict = {}
        for m1, p1 in self.terms.items():
            for m2, p2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                prod = p1 * p2
                if m in out:
                    s = out[m] + prod
                    if s.is_zero():
                        del out[m]
                    else:
                        out[m] = s
                elif not prod.is_zero():
                    out[m] = prod
        return ParamPolynomial(self.ring, self.params, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ParamPolynomial.from_polynomial(self.ring.one(), self.params)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, ParamPolynomial):
            return NotImplemented
        return (self.ring == other.ring and self.params == other.params
                and self.terms == other.terms)

    def divided_power(self) -> "ParamPolynomial":
        return ParamPolynomial(self.ring, self.params,
                               {m: p * mono_factorial(m) for m, p in self.terms.items()})

    def dehomogenize(self, j: int) -> "ParamPolynomial":
        """Set x_j = 1; parameter coefficients of collapsing terms add up."""
        target = self.ring.drop(j)
        out: dict = {}
        for m, p in self.terms.items():
            key = m[:j] + m[j + 1:]
            if key in out:
                s = out[key] + p
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = p
        return ParamPolynomial(target, self.params, out)

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for m in self.monomials():
            p = self.terms[m]
            factors = [f"{self.ring.names[i]}^{e}" if e > 1 else self.ring.names[i]
                       for i, e in enumerate(m) if e]
            if not factors:
                chunks.append(f"({p})")
            elif len(p.terms) == 1 and p.constant_term() == 1:
                chunks.append("*".join(factors))
            elif len(p.terms) == 1:
                head = poly_str(p)
                chunks.append(f"{head}*" + "*".join(factors))
            else:
                chunks.append(f"({p})*" + "*".join(factors))
        return " + ".join(chunks)

    def __repr__(self):
        return f"<{self}>"


def specialize(P: ParamPolynomial, point: Sequence[Coef]) -> Polynomial:
    """Evaluate every parameter-polynomial coefficient at a rational point."""
    if len(point) != P.params.nvars:
        raise ValueError("point length does not match parameter count")
    out = {}
    for m, p in P.terms.items():
        v = p.evaluate(point)
        if v:
            out[m] = v
    return Polynomial(P.ring, out)


# ---------------------------------------------------------------------------
# base changes

class BaseChange:
    """Square matrix of parameter-ring entries acting on the variable vector."""

    __slots__ = ("params", "matrix")

    def __init__(self, params: Ring, matrix: Sequence[Sequence[Polynomial]]):
        n = len(matrix)
        for row in matrix:
            if len(row) != n:
                raise ValueError("base change matrix must be square")
        self.params = params
        self.matrix = tuple(tuple(row) for row in matrix)

    @property
    def size(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, nvars: int, params: Ring) -> "BaseChange":
        rows = [[params.constant(1 if i == j else 0) for j in range(nvars)]
                for i in range(nvars)]
        return cls(params, rows)

    @classmethod
    def phi_gamma(cls, nvars: int, chart: int, params: Ring) -> "BaseChange":
        """Unipotent substitution sending the chart variable to
        x_chart - sum_i g_i * x_i over the non-chart variables (in order).
        Its determinant is 1 and it moves the symbolic linear form
        x_chart + sum g_i x_i onto the chart variable."""
        if params.nvars != nvars - 1:
            raise ValueError("need one parameter per non-chart variable")
        rows = [[params.constant(1 if i == j else 0) for j in range(nvars)]
                for i in range(nvars)]
        k = 0
        for j in range(nvars):
            if j == chart:
                continue
            rows[chart][j] = -params.var(k)
            k += 1
        return cls(params, rows)

    @classmethod
    def from_rational(cls, matrix: Sequence[Sequence[Coef]]) -> "BaseChange":
        params = Ring(())
        rows = [[params.constant(v) for v in row] for row in matrix]
        return cls(params, rows)


def apply_base_change(F, M: BaseChange) -> ParamPolynomial:
    """Expand F(M x) exactly; accepts a Polynomial or a ParamPolynomial."""
    if isinstance(F, Polynomial):
        F = ParamPolynomial.from_polynomial(F, M.params)
    if M.size != F.ring.nvars:
        raise ValueError("base change size does not match variable count")
    images = []
    for i in range(M.size):
        img = ParamPolynomial(F.ring, M.params,
                              {tuple(1 if k == j else 0 for k in range(M.size)): M.matrix[i][j]
                               for j in range(M.size) if not M.matrix[i][j].is_zero()})
        images.append(img)
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = images[i] ** e
        return cache[key]

    out = ParamPolynomial.zero(F.ring, M.params)
    for m, p in F.terms.items():
        term = ParamPolynomial(F.ring, M.params,
                               {(0,) * F.ring.nvars: p})
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        out = out + term
    return out


def compose_linear(F: Polynomial, A: Sequence[Sequence[Coef]]) -> Polynomial:
    """Substitute x_i -> sum_j A[i][j] x_j with rational entries."""
    n = F.ring.nvars
    if len(A) != n or any(len(row) != n for row in A):
        raise ValueError("matrix size does not match variable count")
    images = []
    for i in range(n):
        images.append(Polynomial(F.ring, {
            tuple(1 if k == j else 0 for k in range(n)): A[i][j]
            for j in range(n) if A[i][j] != 0}))
    return F.compose(images)


# ---------------------------------------------------------------------------
# content, gcd, squarefree

def integer_content(p: Polynomial) -> Fraction:
    """Positive rational c such that p/c is primitive over the integers with a
    positive degrevlex-leading coefficient; content of 0 is 0."""
    if p.is_zero():
        return Fraction(0)
    nums = []
    dens = []
    for c in p.terms.values():
        f = Fraction(c)
        nums.append(abs(f.numerator))
        dens.append(f.denominator)
    g = 0
    for v in nums:
        g = math.gcd(g, v)
    l = 1
    for v in dens:
        l = l * v // math.gcd(l, v)
    cont = Fraction(g, l)
    if p.leading()[1] < 0:
        cont = -cont
    return cont


def primitive_part(p: Polynomial) -> Polynomial:
    """p divided by its integer content (0 stays 0)."""
    if p.is_zero():
        return p
    c = integer_content(p)
    return Polynomial(p.ring, {m: norm_coef(Fraction(v) / c) for m, v in p.terms.items()})


def poly_divexact(f: Polynomial, g: Polynomial, order: str = "degrevlex") -> Polynomial:
    """Exact division f/g; raises if g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return f
    key = ORDER_KEYS[order]
    gm = max(g.terms, key=key)
    gc = g.terms[gm]
    q: dict = {}
    r = f
    while not r.is_zero():
        rm = max(r.terms, key=key)
        rc = r.terms[rm]
        if not mono_divides(gm, rm):
            raise ValueError("inexact polynomial division")
        m = mono_sub(rm, gm)
        c = norm_coef(Fraction(rc) / Fraction(gc))
        q[m] = c
        r = r - Polynomial(r.ring, {m: c}) * g
    return Polynomial(f.ring, q)


def _to_univariate(p: Polynomial, i: int) -> list[Polynomial]:
    """Coefficient list of p as a univariate polynomial in variable i, with
    coefficients in the ring without variable i (index = degree in x_i)."""
    sub = p.ring.drop(i)
    d = max((m[i] for m in p.terms), default=0)
    coeffs = [dict() for _ in range(d + 1)]
    for m, c in p.terms.items():
        coeffs[m[i]][m[:i] + m[i + 1:]] = c
    return [Polynomial(sub, t) for t in coeffs]


def _from_univariate(coeffs: list[Polynomial], i: int, ring: Ring) -> Polynomial:
    out: dict = {}
    for e, p in enumerate(coeffs):
        for m, c in p.terms.items():
            out[m[:i] + (e,) + m[i:]] = c
    return Polynomial(ring, out)


def _uni_deg(coeffs: list[Polynomial]) -> int:
    for e in range(len(coeffs) - 1, -1, -1):
        if not coeffs[e].is_zero():
            return e
    return -1


def _list_gcd(coeffs: list[Polynomial]) -> Polynomial:
    acc = None
    for c in coeffs:
        if c.is_zero():
            continue
        acc = c if acc is None else poly_gcd(acc, c)
        if acc.is_constant():
            return acc.ring.one()
    return acc if acc is not None else coeffs[0].ring.zero()


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Multivariate gcd over the rationals, normalized to a primitive integer
    polynomial with positive leading coefficient (1 for coprime inputs).

    Uses the heuristic evaluation gcd (verified by exact trial division)
    with a primitive pseudo-remainder sequence as the fallback."""
    if f.ring != g.ring:
        raise ValueError("ring mismatch")
    if f.is_zero():
        return primitive_part(g)
    if g.is_zero():
        return primitive_part(f)
    if f.ring.nvars == 0 or f.is_constant() or g.is_constant():
        return f.ring.one()
    fp = primitive_part(f)
    gp = primitive_part(g)
    h = _heugcd(fp, gp)
    if h is not None:
        return primitive_part(h)
    return _prs_gcd(fp, gp)


def _prs_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    # recurse on the last variable occurring in either input
    i = f.ring.nvars - 1
    while all(m[i] == 0 for m in f.terms) and all(m[i] == 0 for m in g.terms):
        i -= 1
    fu = _to_univariate(f, i)
    gu = _to_univariate(g, i)
    cont_f = _list_gcd(fu)
    cont_g = _list_gcd(gu)
    cont = poly_gcd(cont_f, cont_g)
    fp = [poly_divexact(c, cont_f) for c in fu]
    gp = [poly_divexact(c, cont_g) for c in gu]
    prs = _primitive_prs(fp, gp)
    result = _from_univariate(prs, i, f.ring) * _from_univariate([cont], i, f.ring)
    return primitive_part(result)


def _maxnorm(p: Polynomial) -> int:
    out = 1
    for c in p.terms.values():
        v = abs(c.numerator if isinstance(c, Fraction) else c)
        if v > out:
            out = v
    return out


def _poly_int_div(p: Polynomial, xi: int) -> Polynomial:
    return Polynomial(p.ring, {m: c // xi for m, c in p.terms.items()})


def _balanced_mod(p: Polynomial, xi: int) -> Polynomial:
    out = {}
    for m, c in p.terms.items():
        r = c % xi
        if 2 * r > xi:
            r -= xi
        if r:
            out[m] = r
    return Polynomial(p.ring, out)


def _heugcd(f: Polynomial, g: Polynomial, depth: int = 0):
    """Heuristic gcd of primitive integer polynomials; None when the
    evaluation trick keeps failing and the caller should fall back."""
    ring = f.ring
    if all(sum(m) == 0 for m in f.terms) and all(sum(m) == 0 for m in g.terms):
        a = abs(int(f.constant_term()))
        b = abs(int(g.constant_term()))
        return ring.constant(math.gcd(a, b))
    # last variable occurring in either polynomial
    i = ring.nvars - 1
    while all(m[i] == 0 for m in f.terms) and all(m[i] == 0 for m in g.terms):
        i -= 1
    deg_bound = 1 + min(max(m[i] for m in f.terms), max(m[i] for m in g.terms))
    xi = 2 * min(_maxnorm(f), _maxnorm(g)) + 2
    for _ in range(6):
        fe = f.substitute(i, xi)
        ge = g.substitute(i, xi)
        sub = None
        if not fe.is_zero() and not ge.is_zero():
            sub = _heugcd(fe, ge, depth + 1)  # raw images: content carries information
        if sub is not None:
            # xi-adic reconstruction with balanced digits
            h: dict = {}
            cur = sub
            e = 0
            ok = True
            while not cur.is_zero():
                if e >= deg_bound:
                    ok = False
                    break
                digit = _balanced_mod(cur, xi)
                for m, c in digit.terms.items():
                    h[m[:i] + (e,) + m[i:]] = c
                cur = _poly_int_div(cur - digit, xi)
                e += 1
            if ok and h:
                # unnormalized on purpose: integer content carries gcd
                # information between recursion levels
                cand = Polynomial(ring, h)
                try:
                    poly_divexact(f, cand)
                    poly_divexact(g, cand)
                    return cand
                except (ValueError, ZeroDivisionError):
                    pass
        xi = xi * 73794 // 27011 + 1
    return None


def _primitive_prs(f: list[Polynomial], g: list[Polynomial]) -> list[Polynomial]:
    """Primitive pseudo-remainder sequence for primitive univariate inputs
    over a polynomial coefficient ring; returns the gcd's coefficient list."""
    a, b = f, g
    if _uni_deg(a) < _uni_deg(b):
        a, b = b, a
    while True:
        db = _uni_deg(b)
        if db < 0:
            out = a
            break
        if db == 0:
            out = [b[0].ring.one()]
            break
        # pseudo-remainder of a by b: r := lc(b)*r - lc(r)*x^(dr-db)*b until deg drops
        lc_b = b[db]
        r = list(a[:_uni_deg(a) + 1])
        while True:
            dr = _uni_deg(r)
            if dr < db:
                break
            lc_r = r[dr]
            r = [c * lc_b for c in r]
            for j in range(db + 1):
                r[dr - db + j] = r[dr - db + j] - lc_r * b[j]
            while r and r[-1].is_zero():
                r.pop()
            if not r:
                break
        if not r:
            out = b
            break
        cont = _list_gcd(r)
        r = [poly_divexact(c, cont) for c in r]
        a, b = b, r
    cont = _list_gcd(out)
    return [poly_divexact(c, cont) for c in out]


def _int_bareiss_det(m: list) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n):
        piv = None
        for i in range(k, n):
            if m[i][k]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, n):
                row_i[j] = (pk * row_i[j] - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    return sign * m[n - 1][n - 1]


def _sylvester_det(fc: list, gc: list):
    """Resultant of two univariate polynomials given as coefficient lists
    (index = degree), via the Sylvester matrix determinant."""
    df = len(fc) - 1
    dg = len(gc) - 1
    if df < 0 or dg < 0:
        return Fraction(0)
    if df == 0 and dg == 0:
        return 1
    n = df + dg
    if all(isinstance(c, int) for c in fc) and all(isinstance(c, int) for c in gc):
        rows = []
        for i in range(dg):
            row = [0] * n
            for k, c in enumerate(fc):
                row[i + df - k] = c
            rows.append(row)
        for i in range(df):
            row = [0] * n
            for k, c in enumerate(gc):
                row[i + dg - k] = c
            rows.append(row)
        return _int_bareiss_det(rows)
    from .linalg import frac_det
    rows = []
    for i in range(dg):
        row = [Fraction(0)] * n
        for k, c in enumerate(fc):
            row[i + df - k] = Fraction(c)
        rows.append(row)
    for i in range(df):
        row = [Fraction(0)] * n
        for k, c in enumerate(gc):
            row[i + dg - k] = Fraction(c)
        rows.append(row)
    return frac_det(rows)


def _uni_coeffs(p: Polynomial, var: int) -> list:
    d = max((m[var] for m in p.terms), default=0)
    out = [0] * (d + 1)
    for m, c in p.terms.items():
        out[m[var]] = c
    return out


def resultant(f: Polynomial, g: Polynomial, var: int) -> Polynomial:
    """Resultant of f and g with respect to one variable, exact, computed by
    evaluation and Newton interpolation in the remaining variables.

    Lies in the elimination ideal: it vanishes on every common zero, which
    is what the rational-point search needs.
    """
    if f.ring != g.ring:
        raise ValueError("ring mismatch")
    # integer coefficients once at the top; rescaling stays in the ideal.
    # (never rescale inside the recursion: interpolation samples must share
    # one consistent scale)
    return _resultant_raw(primitive_part(f), primitive_part(g), var)


def _resultant_raw(f: Polynomial, g: Polynomial, var: int) -> Polynomial:
    ring = f.ring
    df = max((m[var] for m in f.terms), default=0)
    dg = max((m[var] for m in g.terms), default=0)
    if df == 0 or dg == 0:
        # degenerate: the resultant reduces to a power of one input
        if df == 0 and dg == 0:
            return ring.one()
        low, high, dhigh = (f, g, dg) if df == 0 else (g, f, df)
        out = ring.one()
        for _ in range(dhigh):
            out = out * low
        return out
    others = [i for i in range(ring.nvars) if i != var and
              (any(m[i] for m in f.terms) or any(m[i] for m in g.terms))]
    if not others:
        val = _sylvester_det(_uni_coeffs(f, var), _uni_coeffs(g, var))
        return ring.constant(val)
    j = others[-1]
    fj = max(m[j] for m in f.terms) if any(m[j] for m in f.terms) else 0
    gj = max(m[j] for m in g.terms) if any(m[j] for m in g.terms) else 0
    bound = dg * fj + df * gj
    samples = []
    t = 0
    while len(samples) < bound + 1:
        for cand in (t, -t) if t else (0,):
            ft = f.substitute(j, cand)
            gt = g.substitute(j, cand)
            dft = max((m[var if var < j else var - 1] for m in ft.terms), default=0)
            dgt = max((m[var if var < j else var - 1] for m in gt.terms), default=0)
            if dft == df and dgt == dg:
                samples.append((cand, _resultant_raw(ft, gt, var if var < j else var - 1)))
                if len(samples) == bound + 1:
                    break
        t += 1
        if t > 4 * (bound + 2):
            raise RuntimeError("could not collect interpolation samples")
    return _newton_interpolate(samples, j, ring)


def _newton_interpolate(samples, j: int, ring: Ring) -> Polynomial:
    """Reassemble a polynomial in variable j from (value, polynomial) samples
    whose polynomials live in the ring without variable j."""
    pts = [Fraction(t) for t, _ in samples]
    vals = [p for _, p in samples]
    n = len(samples)
    dd = list(vals)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) * (Fraction(1) / (pts[i] - pts[i - level]))
    # embed into the full ring and assemble Newton form
    def embed(p: Polynomial) -> Polynomial:
        return Polynomial(ring, {m[:j] + (0,) + m[j:]: c for m, c in p.terms.items()})

    xj = ring.var(j)
    out = embed(dd[n - 1])
    for i in range(n - 2, -1, -1):
        out = out * (xj - ring.constant(pts[i])) + embed(dd[i])
    return out


def squarefree_part(p: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of p, primitive integer
    normalized.  Constants normalize to 1 (nonzero) or 0."""
    if p.is_zero():
        return p
    if p.is_constant():
        return p.ring.one()
    g = p
    for i in range(p.ring.nvars):
        d = p.partial(i)
        if d.is_zero():
            continue
        g = poly_gcd(g, d)
        if g.is_constant():
            return primitive_part(p)
    return primitive_part(poly_divexact(p, g))

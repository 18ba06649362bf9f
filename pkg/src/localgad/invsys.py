"""Symbolic dual generator, inverse system matrix, and catalecticants.

For a homogeneous F and a symbolic support l = x_j + g_1 x_1 + ... (one
parameter per non-chart variable), the symbolic dual generator f_g is the
divided-power dehomogenization of F after the unipotent substitution that
moves l onto the chart variable.  The inverse system matrix lists every
monomial contraction of f_g in the monomial basis: its entry at (a, b) is
the coefficient of x^(a+b) in f_g, a parameter polynomial.  The matrix is
therefore Hankel and symmetric, vanishes where |a+b| exceeds deg F, and its
rank at a specialized point is the length of the point scheme evinced
there, which is the quantity the search loop minimizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .polyring import (
    BaseChange,
    Coef,
    Monomial,
    ParamPolynomial,
    Polynomial,
    Ring,
    apply_base_change,
    divided_power,
    key_lex,
    mono_mul,
    monomials_of_degree,
    monomials_up_to,
    param_ring,
    specialize,
)


def symbolic_dual_generator(F: Polynomial, chart: int = 0) -> ParamPolynomial:
    """Dual generator of F at the symbolic support on the given chart.

    The chart variable plays the distinguished role; parameter g_i attaches
    to the i-th remaining variable, in order.
    """
    if not F.is_homogeneous() or F.is_zero():
        raise ValueError("input form must be nonzero homogeneous")
    n1 = F.ring.nvars
    params = param_ring(n1 - 1)
    phi = BaseChange.phi_gamma(n1, chart, params)
    moved = apply_base_change(F, phi)
    return moved.divided_power().dehomogenize(chart)


@dataclass(frozen=True)
class InverseSystemMatrix:
    """Square Hankel matrix of contraction coefficients of f_g.

    Rows and columns are indexed by the monomials of degree <= d in the
    non-chart variables (degree-ascending, degrevlex within each degree);
    entry (a, b) is the parameter-polynomial coefficient of x^(a+b).
    """

    chart: int
    degree: int
    ring: Ring          # the non-chart variables
    params: Ring
    index: tuple        # monomials of degree <= d
    fgamma: ParamPolynomial
    entries: tuple      # tuple of tuples of parameter Polynomials

    @property
    def size(self) -> int:
        return len(self.index)

    def position(self, m: Monomial) -> int:
        return self.index.index(tuple(m))

    def entry(self, a: Monomial, b: Monomial) -> Polynomial:
        return self.fgamma.coefficient(mono_mul(tuple(a), tuple(b)))

    def specialized(self, point: Sequence[Coef]) -> list:
        """Rational matrix at a parameter point."""
        f = specialize(self.fgamma, point)
        return [[f.coefficient(mono_mul(a, b)) for b in self.index]
                for a in self.index]

    def to_obj(self):
        return {
            "chart": self.chart,
            "degree": self.degree,
            "index": ["*".join(f"{self.ring.names[i]}^{e}" if e > 1 else self.ring.names[i]
                               for i, e in enumerate(m) if e) or "1" for m in self.index],
            "entries": [[str(e) for e in row] for row in self.entries],
        }


def inverse_system_matrix(F: Polynomial, chart: int = 0) -> InverseSystemMatrix:
    """The full C(n+d, n)-square symbolic matrix of F on the given chart."""
    fg = symbolic_dual_generator(F, chart)
    d = F.degree()
    n = F.ring.nvars - 1
    index = tuple(monomials_up_to(n, d))
    entries = tuple(tuple(fg.coefficient(mono_mul(a, b)) for b in index)
                    for a in index)
    return InverseSystemMatrix(chart, d, F.ring.drop(chart), fg.params,
                               index, fg, entries)


def specialized_rank(M: InverseSystemMatrix, point: Sequence[Coef]) -> int:
    """Exact rank of the matrix at a rational parameter point."""
    if len(point) != M.params.nvars:
        raise ValueError("point length does not match parameter count")
    return linalg.frac_rank(M.specialized(point))


def symbolic_rank(M: InverseSystemMatrix) -> int:
    """Rank over the fraction field of the parameter ring."""
    return linalg.poly_rank([list(row) for row in M.entries])


def rank_lower_bound(f) -> int:
    """1 + deg f: following one contraction chain down from a top-degree
    monomial gives that many independent contractions (0 for f = 0)."""
    d = f.degree()
    return 0 if d < 0 else 1 + d


def generic_local_rank(n: int, d: int) -> int:
    """Length of the scheme evinced at any support by a generic degree-d form
    in n+1 variables: the apolar algebra of a generic dual generator is
    compressed, so the length is the largest possible."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    k = d // 2
    if d % 2 == 0:
        return math.comb(n + k, n) + math.comb(n + k - 1, n)
    return 2 * math.comb(n + k, n)


def degree_d_equations(F: Polynomial, chart: int = 0) -> tuple:
    """Nonzero coefficients of the top-degree monomials of f_g.

    At any support whose local decomposition has size <= d these all vanish,
    so they seed the minor ideals when searching ranks <= d.
    """
    fg = symbolic_dual_generator(F, chart)
    d = F.degree()
    n = F.ring.nvars - 1
    out = []
    for m in monomials_of_degree(n, d):
        c = fg.coefficient(m)
        if not c.is_zero():
            out.append(c)
    return tuple(out)


# ---------------------------------------------------------------------------
# catalecticants

@dataclass(frozen=True)
class CatalecticantMatrix:
    """Matrix of the contraction pairing p -> p -| F_dp in monomial bases:
    rows are the degree-(d-i) monomials, columns the degree-i monomials,
    both in descending lexicographic order."""

    i: int
    degree: int
    rows: tuple   # monomials of degree d-i
    cols: tuple   # monomials of degree i
    entries: tuple

    def entry(self, r: Monomial, c: Monomial) -> Coef:
        return self.entries[self.rows.index(tuple(r))][self.cols.index(tuple(c))]

    def transpose(self) -> "CatalecticantMatrix":
        ent = tuple(tuple(self.entries[r][c] for r in range(len(self.rows)))
                    for c in range(len(self.cols)))
        return CatalecticantMatrix(self.degree - self.i, self.degree,
                                   self.cols, self.rows, ent)

    def to_obj(self):
        from .polyring import coef_str
        return {"i": self.i, "entries": [[coef_str(e) for e in row] for row in self.entries]}


def catalecticant(F: Polynomial, i: int) -> CatalecticantMatrix:
    """The i-th catalecticant matrix of F."""
    if not F.is_homogeneous() or F.is_zero():
        raise ValueError("input form must be nonzero homogeneous")
    d = F.degree()
    if not 0 <= i <= d:
        raise ValueError("catalecticant index out of range")
    n1 = F.ring.nvars
    Fdp = divided_power(F)
    rows = tuple(sorted(monomials_of_degree(n1, d - i), key=key_lex, reverse=True))
    cols = tuple(sorted(monomials_of_degree(n1, i), key=key_lex, reverse=True))
    entries = tuple(tuple(Fdp.coefficient(mono_mul(r, c)) for c in cols)
                    for r in rows)
    return CatalecticantMatrix(i, d, rows, cols, entries)


def embed_check(F: Polynomial, chart: int = 0) -> bool:
    """True iff every catalecticant of F appears, entry for entry, inside the
    inverse system matrix specialized at the zero parameter point.

    The index matching drops the chart exponent: a degree-(d-i) monomial in
    all the variables corresponds to the monomial of degree <= d-i in the
    non-chart variables left after erasing the chart power.
    """
    M = inverse_system_matrix(F, chart)
    zero = [Fraction(0)] * M.params.nvars
    numeric = M.specialized(zero)
    pos = {m: k for k, m in enumerate(M.index)}
    d = F.degree()
    for i in range(d + 1):
        cat = catalecticant(F, i)
        for r_full in cat.rows:
            r = r_full[:chart] + r_full[chart + 1:]
            for c_full in cat.cols:
                c = c_full[:chart] + c_full[chart + 1:]
                if numeric[pos[r]][pos[c]] != cat.entry(r_full, c_full):
                    return False
    return True

"""Local dual generators, annihilators, and natural apolar point schemes.

The central construction: a decomposition F = w * l^(d-k) of a homogeneous
F at a linear support l canonically determines a zero-dimensional point
scheme.  Its homogeneous ideal is computed in four steps: take the divided
power representation of F, dehomogenize by l (after moving l onto a chart
variable), compute the annihilator of the result under the contraction
action, and homogenize back using l.  The length of that scheme equals the
dimension of the space of all contractions of the dual generator, which is
what the rank machinery downstream minimizes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import groebner, linalg
from .polyring import (
    Coef,
    Monomial,
    Polynomial,
    Ring,
    compose_linear,
    contraction_action,
    dehomogenize,
    derivative_action,
    divided_power,
    key_degrevlex,
    mono_divides,
    mono_sub,
    monomials_of_degree,
    monomials_up_to,
    primitive_part,
)


class Ideal:
    """Generator list in a fixed ring, with a write-once cached Groebner
    basis per monomial order."""

    __slots__ = ("ring", "gens", "_gb")

    def __init__(self, ring: Ring, gens: Sequence[Polynomial] = ()):
        self.ring = ring
        self.gens = tuple(g for g in gens if not g.is_zero())
        self._gb: dict = {}

    def groebner(self, order: str = "degrevlex") -> tuple:
        if order not in self._gb:
            self._gb[order] = tuple(groebner.buchberger(list(self.gens), order))
        return self._gb[order]

    def normal_form(self, p: Polynomial, order: str = "degrevlex") -> Polynomial:
        return groebner.normal_form(p, list(self.groebner(order)), order)

    def contains(self, p: Polynomial, order: str = "degrevlex") -> bool:
        return self.normal_form(p, order).is_zero()

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        basis = self.groebner()
        return groebner.is_unit_basis(list(basis))

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def equals(self, other: "Ideal") -> bool:
        if self.ring != other.ring:
            return False
        return (all(self.contains(g) for g in other.gens)
                and all(other.contains(g) for g in self.gens))

    def generator_strings(self) -> list[str]:
        return [str(g) for g in self.gens]

    def __repr__(self):
        inside = ", ".join(self.generator_strings()) or "0"
        return f"Ideal<{inside}>"

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.gens == other.gens

    def __hash__(self):
        return hash((self.ring, self.gens))


@dataclass(frozen=True)
class HilbertPrefix:
    """Values H(0..t_max) of a Hilbert function plus a stabilization flag."""

    values: tuple
    stable: bool

    def stable_value(self) -> int:
        return self.values[-1]

    def to_obj(self):
        return {"values": list(self.values), "stable": self.stable}


# ---------------------------------------------------------------------------
# chart handling for linear supports

def chart_and_coefficients(ell: Polynomial):
    """Normalize a linear form to unit coefficient on its first supported
    variable; returns (chart index, full coefficient vector)."""
    if ell.is_zero():
        raise ValueError("support form is zero")
    if not ell.is_homogeneous() or ell.degree() != 1:
        raise ValueError("support form must be linear homogeneous")
    n = ell.ring.nvars
    coeffs = [ell.coefficient(tuple(1 if k == i else 0 for k in range(n)))
              for i in range(n)]
    j = next(i for i, c in enumerate(coeffs) if c != 0)
    cj = Fraction(coeffs[j])
    coeffs = [Fraction(c) / cj for c in coeffs]
    return j, coeffs


def _chart_substitution(ring: Ring, j: int, coeffs) -> list[list]:
    """Matrix of x_j -> x_j - sum_{i != j} c_i x_i, identity elsewhere."""
    n = ring.nvars
    A = [[1 if i == k else 0 for k in range(n)] for i in range(n)]
    for i in range(n):
        if i != j:
            A[j][i] = -coeffs[i]
    return A


# ---------------------------------------------------------------------------
# dual generators

def dual_generator(F: Polynomial, ell: Polynomial) -> Polynomial:
    """Dehomogenized divided-power dual generator f_l of F at the support l.

    Moves l onto its chart variable, takes the divided power representation,
    and sets the chart variable to 1; the result lives in the ring without
    the chart variable.
    """
    if not F.is_homogeneous():
        raise ValueError("input form must be homogeneous")
    j, coeffs = chart_and_coefficients(ell)
    G = compose_linear(F, _chart_substitution(F.ring, j, coeffs))
    return dehomogenize(divided_power(G), j)


def omega_dl(omega: Polynomial, d: int, ell: Polynomial) -> Polynomial:
    """Rewrite a degree-k cofactor in the basis {l, x_1..x_n}, scale the
    degree-j slice by (d-j)!, and sum; the local dual generator in the
    derivation picture."""
    if not omega.is_homogeneous():
        raise ValueError("cofactor must be homogeneous")
    k = max(omega.degree(), 0)
    if k > d:
        raise ValueError("cofactor degree exceeds the form degree")
    j, coeffs = chart_and_coefficients(ell)
    G = compose_linear(omega, _chart_substitution(omega.ring, j, coeffs))
    if not G.is_zero() and all(m[j] >= 1 for m in G.terms):
        warnings.warn("support divides the cofactor; the decomposition is not reduced")
    out: dict = {}
    for m, c in G.terms.items():
        p = sum(m) - m[j]  # degree of the slice in the non-chart variables
        out[m[:j] + m[j + 1:]] = c * math.factorial(d - p)
    return Polynomial(omega.ring.drop(j), out)


# ---------------------------------------------------------------------------
# annihilators and inverse systems

def _monomial_contraction(g: Monomial, f: Polynomial) -> dict:
    return {mono_sub(a, g): c for a, c in f.terms.items() if mono_divides(g, a)}


def annihilator(f: Polynomial, bound: Optional[int] = None) -> Ideal:
    """Ideal of all operators annihilating f under contraction.

    Kernel of g -> g -| f on operators of degree <= bound (default deg f),
    with all monomials of the next degree adjoined; a minimal generating
    set is extracted by Groebner reduction.
    """
    ring = f.ring
    n = ring.nvars
    deg = max(f.degree(), 0)
    d = deg if bound is None else bound
    if deg > d:
        raise ValueError("degree bound is below deg f")
    mons = monomials_up_to(n, d)
    col = {m: i for i, m in enumerate(mons)}
    # columns: operator monomials; rows: target monomials
    matrix = [[0] * len(mons) for _ in mons]
    for jcol, g in enumerate(mons):
        for m, c in _monomial_contraction(g, f).items():
            matrix[col[m]][jcol] = c
    kernel = linalg.frac_kernel(matrix)
    candidates = []
    for v in kernel:
        p = Polynomial(ring, {mons[i]: c for i, c in enumerate(v) if c != 0})
        candidates.append(primitive_part(p))
    candidates.extend(ring.monomial(m) for m in monomials_of_degree(n, d + 1))
    candidates.sort(key=lambda p: (p.degree(), key_degrevlex(p.leading()[0])))
    selected: list[Polynomial] = []
    basis: list[Polynomial] = []
    for p in candidates:
        if basis and groebner.normal_form(p, basis).is_zero():
            continue
        selected.append(p)
        basis = groebner.buchberger(selected)
    out = Ideal(ring, tuple(selected))
    out._gb["degrevlex"] = tuple(basis)
    return out


def inverse_system_dimension(f: Polynomial) -> int:
    """Dimension of the span of all monomial contractions of f."""
    if f.is_zero():
        return 0
    n = f.ring.nvars
    d = f.degree()
    mons = monomials_up_to(n, d)
    col = {m: i for i, m in enumerate(mons)}
    rows = []
    for g in mons:
        img = _monomial_contraction(g, f)
        if img:
            row = [0] * len(mons)
            for m, c in img.items():
                row[col[m]] = c
            rows.append(row)
    return linalg.frac_rank(rows)


# ---------------------------------------------------------------------------
# homogenization and the scheme construction

def homogenize_ideal(I: Ideal, j: int, var_name: str) -> Ideal:
    """Homogenization of an affine ideal, inserting the new variable at
    position j.  Homogenizes a degree-compatible Groebner basis, which
    yields the homogenized ideal exactly."""
    basis = I.groebner("degrevlex")
    target = I.ring.insert(j, var_name)
    gens = []
    for g in basis:
        D = g.degree()
        terms = {}
        for m, c in g.terms.items():
            terms[m[:j] + (D - sum(m),) + m[j:]] = c
        gens.append(primitive_part(Polynomial(target, terms)))
    return Ideal(target, tuple(gens))


def natural_apolar_scheme(F: Polynomial, ell: Polynomial) -> Ideal:
    """Homogeneous ideal of the point scheme evinced by the local
    decomposition of F at l, in the original coordinates.

    Composes dual generator, annihilator, and homogenization, then undoes
    the chart substitution.  Every generator is checked to annihilate F by
    derivation before returning.
    """
    if F.is_zero() or not F.is_homogeneous():
        raise ValueError("input form must be nonzero homogeneous")
    j, coeffs = chart_and_coefficients(ell)
    f = dual_generator(F, ell)
    affine = annihilator(f)
    homog = homogenize_ideal(affine, j, F.ring.names[j])
    n = F.ring.nvars
    # dual substitution y_i -> y_i - c_i y_j undoes the base change on operators
    M = [[1 if i == k else 0 for k in range(n)] for i in range(n)]
    for i in range(n):
        if i != j:
            M[i][j] = -coeffs[i]
    gens = tuple(primitive_part(compose_linear(g, M)) for g in homog.gens)
    for g in gens:
        if not derivative_action(g, F).is_zero():
            raise RuntimeError("apolarity self-check failed; internal bug")
    return Ideal(F.ring, gens)


# ---------------------------------------------------------------------------
# Hilbert functions

def hilbert_function(I: Ideal, t_max: int) -> HilbertPrefix:
    """H(t) = dim (S/I)_t for t <= t_max, counted as standard monomials of a
    degrevlex Groebner basis."""
    if not I.is_homogeneous():
        raise ValueError("ideal is not homogeneous")
    lms = groebner.leading_monomials(list(I.groebner("degrevlex")))
    n = I.ring.nvars
    values = []
    for t in range(t_max + 1):
        count = 0
        for m in monomials_of_degree(n, t):
            if not any(mono_divides(lm, m) for lm in lms):
                count += 1
        values.append(count)
    stable = t_max >= 1 and values[-1] == values[-2]
    return HilbertPrefix(tuple(values), stable)


def ideal_from_strings(texts: Sequence[str], ring: Ring) -> Ideal:
    from .polyring import parse_poly
    return Ideal(ring, tuple(parse_poly(t, ring) for t in texts))

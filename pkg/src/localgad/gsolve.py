"""Ideal-level Groebner kernel: unit tests, dimension, rational solving.

The solver targets the zero-dimensional ideals in the parameter ring that
the minor-collection loop produces.  Generators are replaced by their
primitive squarefree parts first (varieties are unchanged and the
arithmetic shrinks drastically, since minor determinants tend to be
square-full), then a lex basis is eliminated variable by variable:
rational roots of the univariate eliminant are found by the rational root
theorem and back-substituted exactly, recursing per root.  Univariate
factors with no rational roots are reported in a residual rather than
being adjoined through field extensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import groebner
from .apolar import Ideal
from .polyring import (
    Polynomial,
    Ring,
    coef_str,
    poly_divexact,
    poly_gcd,
    primitive_part,
    resultant,
    squarefree_part,
)

#: cap on divisor pairs tried per univariate eliminant before giving up
#: on exhaustiveness (degrees here are tiny; the cap is a safety valve)
ROOT_SEARCH_CAP = 20000


@dataclass(frozen=True)
class ResidualFactor:
    """A univariate eliminant factor with no rational root, recorded with the
    partial assignment of the previously eliminated variables."""

    variable: str
    factor: Polynomial
    under: tuple  # ((variable name, Fraction value), ...)

    def to_obj(self):
        return {
            "variable": self.variable,
            "factor": str(self.factor),
            "under": {k: coef_str(v) for k, v in self.under},
        }


@dataclass(frozen=True)
class SolutionSet:
    """Rational points of a zero-dimensional ideal plus non-rational residue.

    ``exhaustive`` is True iff every solution over the algebraic closure is
    rational and listed.
    """

    points: tuple
    residual: tuple = ()
    exhaustive: bool = True

    def to_obj(self):
        return {
            "points": [[coef_str(c) for c in p] for p in self.points],
            "residual": [r.to_obj() for r in self.residual],
            "exhaustive": self.exhaustive,
        }


def groebner_basis(I: Ideal, order: str = "degrevlex") -> Ideal:
    """Ideal with its reduced Groebner basis attached (idempotent)."""
    I.groebner(order)
    return I


def is_unit_ideal(I: Ideal) -> bool:
    return I.is_unit()


def ideal_dimension(I: Ideal) -> Optional[int]:
    """Krull dimension of the quotient via the staircase criterion;
    None for the unit ideal (empty variety)."""
    basis = list(I.groebner("degrevlex"))
    if groebner.is_unit_basis(basis):
        return None
    lms = groebner.leading_monomials(basis)
    return groebner.staircase_dimension(lms, I.ring.nvars)


def squarefree_generators(I: Ideal) -> Ideal:
    """Same variety, generators replaced by primitive squarefree parts."""
    seen = []
    for g in I.gens:
        s = squarefree_part(g)
        if not s.is_zero() and s not in seen:
            seen.append(s)
    return Ideal(I.ring, tuple(seen))


# ---------------------------------------------------------------------------
# univariate rational roots

def _divisors(n: int, cap: int):
    """(divisors, complete): positive divisors of n from bounded trial
    factorization.  complete is False when a large unfactored cofactor or the
    cap truncates the list, meaning rational roots may be missed."""
    n = abs(n)
    if n == 0:
        return [1], True
    factors: dict = {}
    m = n
    complete = True
    p = 2
    while p * p <= m:
        if p > 1_000_000:
            complete = False
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                e += 1
                m //= p
            factors[p] = e
        p += 1 if p == 2 else 2
    if m > 1:
        if complete:
            factors[m] = factors.get(m, 0) + 1
        # else: unfactored cofactor, its divisors are missed
    out = [1]
    for prime, e in factors.items():
        grown = []
        pk = 1
        for _ in range(e + 1):
            for d in out:
                grown.append(d * pk)
            pk *= prime
        out = grown
        if len(out) > cap:
            out = out[:cap]
            complete = False
    return sorted(set(out)), complete


def rational_roots(p: Polynomial, var: int):
    """(roots, root-free cofactor, search-complete flag) for a polynomial
    univariate in variable ``var``.  Multiplicity is discarded: roots of the
    squarefree part are found by the rational root theorem and divided out;
    whatever remains is the cofactor."""
    q = primitive_part(squarefree_part(p))
    roots = []
    x = p.ring.var(var)
    if q.constant_term() == 0 and not q.is_constant():
        roots.append(Fraction(0))
        q = poly_divexact(q, x)  # squarefree: the root 0 appears once
    if q.is_constant():
        return roots, p.ring.one(), True
    coeffs = {m[var]: c for m, c in q.terms.items()}
    c0 = coeffs.get(0, 0)
    lead = coeffs[max(coeffs)]
    ps, ok_p = _divisors(int(c0), ROOT_SEARCH_CAP)
    qs, ok_q = _divisors(int(lead), ROOT_SEARCH_CAP)
    complete = ok_p and ok_q
    seen = set()
    for num in ps:
        for den in qs:
            for sgn in (1, -1):
                cand = Fraction(sgn * num, den)
                if cand in seen:
                    continue
                seen.add(cand)
                value = sum(c * cand ** e for e, c in coeffs.items())
                if value == 0:
                    roots.append(cand)
    for r in roots:
        if r != 0:
            q = poly_divexact(q, x - p.ring.constant(r))
    return sorted(roots), q, complete


def _is_univariate_in_last(g: Polynomial) -> bool:
    n = g.ring.nvars
    return all(all(e == 0 for e in m[: n - 1]) for m in g.terms)


def _univariate_eliminant(gens, ring: Ring) -> Optional[Polynomial]:
    """A nonzero polynomial of the ideal in the last variable alone, found by
    cascading pairwise resultants; None when the cascade degenerates.

    Every output of the cascade stays inside the ideal, so the roots of the
    returned polynomial contain every solution's last coordinate.
    """
    work = sorted(gens, key=lambda g: (g.degree(), len(g.terms)))[:8]
    for v in range(ring.nvars - 1):
        free = [g for g in work if all(m[v] == 0 for m in g.terms)]
        dep = sorted((g for g in work if any(m[v] for m in g.terms)),
                     key=lambda g: (g.degree(), len(g.terms)))
        res: list = []
        pairs = [(a, b) for a in range(len(dep)) for b in range(a + 1, len(dep))]
        pairs.sort(key=lambda ab: dep[ab[0]].degree() + dep[ab[1]].degree())
        for a, b in pairs:
            if len(res) >= 3:
                break
            try:
                r = resultant(dep[a], dep[b], v)
            except RuntimeError:
                continue
            r = squarefree_part(r)
            if not r.is_zero():
                res.append(r)
        seen = []
        for g in free + res:
            g = squarefree_part(g) if g.degree() > 0 else g
            if not g.is_zero() and g not in seen:
                seen.append(g)
        work = sorted(seen, key=lambda g: (g.degree(), len(g.terms)))[:6]
        if not work:
            return None
        if any(g.is_constant() for g in work):
            return ring.one()  # no common zeros at all
    univ = [g for g in work if _is_univariate_in_last(g) and not g.is_zero()]
    if not univ:
        return None
    elim = univ[0]
    for g in univ[1:]:
        elim = poly_gcd(elim, g)
    return elim


def _permuted(p: Polynomial, perm, target: Ring) -> Polynomial:
    return Polynomial(target, {tuple(m[perm[k]] for k in range(len(m))): c
                               for m, c in p.terms.items()})


def eliminant_in_var(gens, ring: Ring, i: int) -> Optional[Polynomial]:
    """A nonzero element of the ideal involving only variable i, or None."""
    n = ring.nvars
    if i == n - 1:
        perm = list(range(n))
    else:
        perm = list(range(n))
        perm[i], perm[n - 1] = perm[n - 1], perm[i]
    pring = Ring(tuple(ring.names[perm[k]] for k in range(n)))
    pg = [_permuted(g, perm, pring) for g in gens]
    e = _univariate_eliminant(pg, pring)
    if e is None:
        basis = groebner.buchberger(groebner.buchberger(pg, "degrevlex"), "lex")
        univ = [g for g in basis if _is_univariate_in_last(g)]
        if not univ:
            return None
        e = univ[0]
        for g in univ[1:]:
            e = poly_gcd(e, g)
    # map back: e is univariate in the permuted last variable (= original i)
    return _permuted(e, perm, ring)


def zero_dim_radical(I: Ideal) -> Ideal:
    """Radical of a zero-dimensional ideal: adjoin the squarefree part of a
    univariate eliminant in every variable (Seidenberg's criterion).

    Works on the reduced Groebner basis, whose elements are far smaller than
    raw generators."""
    basis = [primitive_part(g) for g in I.groebner("degrevlex")]
    gens = []
    for g in basis:
        s = squarefree_part(g)
        if not s.is_zero() and s not in gens:
            gens.append(s)
    ring = I.ring
    out = list(gens)
    for i in range(ring.nvars):
        e = eliminant_in_var(gens, ring, i)
        if e is None:
            raise ValueError("could not eliminate down to a single variable")
        s = squarefree_part(e)
        if not s.is_zero() and s not in out:
            out.append(s)
    return Ideal(ring, tuple(out))


def quotient_dimension(I: Ideal) -> Optional[int]:
    """dim_k of k[params]/I for a zero-dimensional ideal (None otherwise);
    on a radical ideal this counts the solutions over the closure."""
    basis = list(I.groebner("degrevlex"))
    if groebner.is_unit_basis(basis):
        return 0
    if not basis:
        return None
    lms = groebner.leading_monomials(basis)
    n = I.ring.nvars
    if groebner.staircase_dimension(lms, n) != 0:
        return None
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if all(e == 0 for k, e in enumerate(m) if k != i)]
        bounds.append(min(pure))
    from itertools import product as _product
    from .polyring import mono_divides
    count = 0
    for mono in _product(*(range(b) for b in bounds)):
        if not any(mono_divides(lm, mono) for lm in lms):
            count += 1
    return count


def solution_count_closure(I: Ideal) -> Optional[int]:
    """Number of solutions over the algebraic closure of a zero-dimensional
    ideal (None when the ideal is not zero-dimensional)."""
    dim = ideal_dimension(I)
    if dim is None:
        return 0
    if dim != 0:
        return None
    return quotient_dimension(zero_dim_radical(I))


def solve_rational_points(I: Ideal) -> SolutionSet:
    """All rational points of a zero-dimensional ideal, with residual
    bookkeeping for irrational branches."""
    dim = ideal_dimension(I)
    if dim is None:
        return SolutionSet((), (), True)
    if dim != 0:
        raise ValueError("ideal is not zero-dimensional")
    work = []
    for g in I.groebner("degrevlex"):
        s = squarefree_part(primitive_part(g))
        if not s.is_zero() and s not in work:
            work.append(s)
    points, residual, exhaustive = _solve_rec(work, I.ring, ())
    pts = tuple(sorted(tuple(p) for p in points))
    for p in pts:
        for g in I.gens:
            if g.evaluate(list(p)) != 0:
                raise RuntimeError("solver returned a non-solution; internal bug")
    return SolutionSet(pts, tuple(residual), exhaustive)


def _solve_rec(gens, ring: Ring, under):
    """Eliminate the last ring variable; recurse per rational root."""
    n = ring.nvars
    if n == 0:
        return [()], [], True
    gens = [g for g in gens if not g.is_zero()]
    if any(g.is_constant() for g in gens):
        return [], [], True  # inconsistent branch: no solutions
    if n == 1:
        elim = gens[0]
        for g in gens[1:]:
            elim = poly_gcd(elim, g)
        if elim.is_constant():
            return [], [], True
        roots, cofactor, search_ok = rational_roots(elim, 0)
        residual = []
        exhaustive = search_ok
        if cofactor.degree() > 0:
            residual.append(ResidualFactor(ring.names[0], cofactor, tuple(under)))
            exhaustive = False
        return [(t,) for t in roots], residual, exhaustive
    elim = _univariate_eliminant(gens, ring)
    if elim is None:
        # fallback: lex Groebner elimination
        pre = groebner.buchberger(gens, "degrevlex")
        if groebner.is_unit_basis(pre):
            return [], [], True
        basis = groebner.buchberger(pre, "lex")
        if groebner.is_unit_basis(basis):
            return [], [], True
        gens = basis
        univ = [g for g in basis if _is_univariate_in_last(g)]
        if not univ:
            raise ValueError("no univariate eliminant; ideal is not zero-dimensional")
        elim = univ[0]
        for g in univ[1:]:
            elim = poly_gcd(elim, g)
    if elim.is_constant() and not elim.is_zero():
        return [], [], True
    roots, cofactor, search_ok = rational_roots(elim, n - 1)
    points = []
    residual = []
    exhaustive = search_ok
    if cofactor.degree() > 0:
        residual.append(ResidualFactor(ring.names[n - 1], cofactor, tuple(under)))
        exhaustive = False
    sub_ring = ring.drop(n - 1)
    for t in roots:
        sub = [g.substitute(n - 1, t) for g in gens]
        sub = [g for g in sub if not g.is_zero()]
        got, res, exh = _solve_rec(sub, sub_ring,
                                   under + ((ring.names[n - 1], t),))
        exhaustive = exhaustive and exh
        residual.extend(res)
        for p in got:
            points.append(tuple(p) + (t,))
    return points, residual, exhaustive

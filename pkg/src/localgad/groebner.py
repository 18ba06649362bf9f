"""Buchberger engine over the rationals.

Plain Buchberger with the normal selection strategy (pairs ordered by the
monomial order of their lcm), the coprime-leading-monomial criterion, and
integer-content stripping of intermediate remainders.  Output bases are
reduced: minimal, fully interreduced, monic, sorted by decreasing leading
monomial.  Desk-scale ideals only; no F4/F5 machinery.

Functions here work on plain lists of :class:`~localgad.polyring.Polynomial`;
the ideal-level wrappers live in :mod:`localgad.gsolve`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from .polyring import (
    ORDER_KEYS,
    Polynomial,
    integer_content,
    mono_divides,
    mono_lcm,
    mono_mul,
    mono_sub,
    norm_coef,
    primitive_part,
)


def normal_form(p: Polynomial, basis: list[Polynomial], order: str = "degrevlex",
                max_steps: int = 0) -> Polynomial:
    """Reduce p modulo the basis (head and tail terms), fraction-free.

    The result is the reduced normal form up to a positive rational scalar
    (exact zero iff p lies in the ideal of the basis), which is all any
    caller here needs; integer cross-scaling avoids rational blowup.
    ``max_steps`` > 0 caps the reduction length (raises EffortExceeded).
    """
    if not basis or p.is_zero():
        return p
    key = ORDER_KEYS[order]
    leads = [(max(g.terms, key=key), g) for g in basis if not g.is_zero()]
    work = primitive_part(p)
    rem: dict = {}
    steps = 0
    while not work.is_zero():
        if max_steps and steps > max_steps:
            raise EffortExceeded()
        wm = max(work.terms, key=key)
        wc = work.terms[wm]
        hit = None
        for lm, g in leads:
            if mono_divides(lm, wm):
                hit = (lm, g)
                break
        if hit is None:
            rem[wm] = wc
            work = Polynomial(work.ring, {m: c for m, c in work.terms.items() if m != wm})
            continue
        lm, g = hit
        gc = g.terms[lm]
        # scale work (and the saved remainder) by gc/d, subtract (wc/d) x^delta g
        if isinstance(gc, int) and isinstance(wc, int):
            d = math.gcd(gc, wc)
            mult_w = gc // d
            mult_g = wc // d
        else:
            a, b = Fraction(gc), Fraction(wc)
            d = Fraction(math.gcd(a.numerator * b.denominator,
                                  b.numerator * a.denominator),
                         a.denominator * b.denominator)
            mult_w = a / d
            mult_g = b / d
        shift = mono_sub(wm, lm)
        if mult_w < 0:
            mult_w, mult_g = -mult_w, -mult_g
        new = {}
        for m, c in work.terms.items():
            new[m] = c * mult_w
        for m, c in g.terms.items():
            key2 = mono_mul(shift, m)
            s = new.get(key2, 0) - mult_g * c
            if s:
                new[key2] = s
            else:
                new.pop(key2, None)
        if rem and mult_w != 1:
            for m in rem:
                rem[m] *= mult_w
        work = Polynomial(work.ring, new)
        steps += 1
        if steps % 4 == 0 and not work.is_zero():
            cont = integer_content(Polynomial(work.ring, {**work.terms, **rem}))
            if cont not in (0, 1):
                work = Polynomial(work.ring,
                                  {m: norm_coef(Fraction(c) / cont) for m, c in work.terms.items()})
                rem = {m: norm_coef(Fraction(c) / cont) for m, c in rem.items()}
    return Polynomial(p.ring, rem)


class EffortExceeded(Exception):
    """Raised when a capped Groebner run exceeds its reduction budget."""


def s_polynomial(f: Polynomial, g: Polynomial, order: str = "degrevlex") -> Polynomial:
    """Cross-scaled S-polynomial (a scalar multiple of the monic version)."""
    key = ORDER_KEYS[order]
    fm = max(f.terms, key=key)
    gm = max(g.terms, key=key)
    lcm = mono_lcm(fm, gm)
    fc, gc = Fraction(f.terms[fm]), Fraction(g.terms[gm])
    tf = Polynomial(f.ring, {mono_sub(lcm, fm): gc})
    tg = Polynomial(g.ring, {mono_sub(lcm, gm): fc})
    return tf * f - tg * g


def buchberger(gens: list[Polynomial], order: str = "degrevlex",
               max_additions: int = 0) -> list[Polynomial]:
    """Reduced Groebner basis of the ideal generated by gens.

    ``max_additions`` > 0 caps the number of new basis elements; exceeding it
    raises :class:`EffortExceeded` so callers can back off gracefully.
    """
    key = ORDER_KEYS[order]
    G = [primitive_part(g) for g in gens if not g.is_zero()]
    if not G:
        return []
    lead = [max(g.terms, key=key) for g in G]
    pairs = {(i, j) for i, j in combinations(range(len(G)), 2)}
    additions = 0
    while pairs:
        i, j = min(pairs, key=lambda p: key(mono_lcm(lead[p[0]], lead[p[1]])))
        pairs.discard((i, j))
        li, lj = lead[i], lead[j]
        if mono_lcm(li, lj) == mono_mul(li, lj):
            continue  # coprime leading monomials reduce to zero
        r = normal_form(s_polynomial(G[i], G[j], order), G, order,
                        max_steps=4000 if max_additions else 0)
        if not r.is_zero():
            r = primitive_part(r)
            G.append(r)
            lead.append(max(r.terms, key=key))
            k = len(G) - 1
            pairs.update((i2, k) for i2 in range(k))
            additions += 1
            if max_additions and additions > max_additions:
                raise EffortExceeded()
    return interreduce(G, order)


def interreduce(G: list[Polynomial], order: str = "degrevlex") -> list[Polynomial]:
    """Minimalize and fully reduce a Groebner basis; monic output sorted by
    decreasing leading monomial."""
    key = ORDER_KEYS[order]
    G = [g for g in G if not g.is_zero()]
    if not G:
        return []
    # minimal: drop any element whose lead is divisible by another lead
    G = sorted(G, key=lambda g: key(max(g.terms, key=key)))
    minimal = []
    for g in G:
        lm = max(g.terms, key=key)
        if not any(mono_divides(max(h.terms, key=key), lm) for h in minimal):
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        r = normal_form(g, others, order) if others else g
        if not r.is_zero():
            lm = max(r.terms, key=key)
            lc = Fraction(r.terms[lm])
            reduced.append(r * (Fraction(1) / lc))
    reduced.sort(key=lambda g: key(max(g.terms, key=key)), reverse=True)
    return reduced


def is_unit_basis(G: list[Polynomial]) -> bool:
    return len(G) == 1 and G[0].is_constant() and not G[0].is_zero()


def staircase_dimension(leading_monomials: list, nvars: int):
    """Krull dimension of R/I from the leading-monomial staircase: size of the
    largest variable subset S meeting no leading monomial's support.
    Returns None for the unit ideal (a degree-0 leading monomial)."""
    lms = list(leading_monomials)
    if any(sum(m) == 0 for m in lms):
        return None
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lms]
    best = 0
    for mask in range(1 << nvars):
        S = {i for i in range(nvars) if mask >> i & 1}
        if len(S) <= best:
            continue
        if all(not sup <= S for sup in supports):
            best = len(S)
    return best


def leading_monomials(G: list[Polynomial], order: str = "degrevlex") -> list:
    key = ORDER_KEYS[order]
    return [max(g.terms, key=key) for g in G if not g.is_zero()]

"""End-to-end search for minimal local decompositions.

The search loop on one chart: for candidate rank r = 1, 2, ... collect
symbolic determinants of (r+1) x (r+1) minors of the inverse system matrix
(seeded with the top-degree coefficient equations while r <= d) until the
ideal they generate in the parameter ring becomes the unit ideal (no
support of rank <= r exists on the chart, move on), becomes
zero-dimensional (solve, keep the rational points whose exact specialized
rank equals r), or stays positive-dimensional through the minor budget
(report the locus, with rational sample supports verified on it when they
exist).  The first nonempty level is the chart minimum.

All-charts mode runs every standard chart and keeps the supports of the
globally minimal rank, identifying proportional linear forms; generic mode
first applies a seeded random invertible integer change of coordinates and
maps the supports found on the distinguished chart back.  Every reported
support carries its evinced homogeneous ideal and Hilbert function prefix,
and the three quantities rank, stabilized Hilbert value, and inverse
system dimension are cross-checked on construction.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import groebner, gsolve, invsys, linalg, minors
from .apolar import (
    HilbertPrefix,
    Ideal,
    dual_generator,
    hilbert_function,
    inverse_system_dimension,
    natural_apolar_scheme,
)
from .groebner import leading_monomials, staircase_dimension
from .invsys import InverseSystemMatrix
from .minors import SeededRng
from .polyring import (
    Polynomial,
    Ring,
    coef_str,
    compose_linear,
    poly_gcd,
    primitive_part,
    squarefree_part,
)


class DeadlineExceeded(Exception):
    """Cooperative timeout raised between minor batches."""


# ---------------------------------------------------------------------------
# report types

@dataclass(frozen=True)
class SupportReport:
    """One minimal support: where it lives, what it evinces."""

    chart: int
    point: tuple                 # parameter values on that chart
    ell: Polynomial              # the linear form in the ambient ring
    rank: int
    ideal: Ideal                 # evinced homogeneous ideal
    hilbert: HilbertPrefix

    def to_obj(self):
        return {
            "chart": self.chart,
            "point": [coef_str(c) for c in self.point],
            "ell": str(self.ell),
            "rank": self.rank,
            "ideal": self.ideal.generator_strings(),
            "hilbert": self.hilbert.to_obj(),
        }


@dataclass(frozen=True)
class LocusReport:
    """A positive-dimensional family of supports on one chart, described by
    the collected minor-ideal generators."""

    chart: int
    rank: int
    generators: tuple            # squarefree primitive minor determinants
    dimension: int
    common_factor: Optional[Polynomial]
    samples: tuple               # verified SupportReports on the locus
    verified: bool
    generic: bool = False        # True when every sampled minor vanished

    def to_obj(self):
        return {
            "chart": self.chart,
            "rank": self.rank,
            "generators": [str(g) for g in self.generators],
            "dimension": self.dimension,
            "common_factor": str(self.common_factor) if self.common_factor else None,
            "samples": [s.to_obj() for s in self.samples],
            "verified": self.verified,
            "generic": self.generic,
        }


@dataclass(frozen=True)
class MinimalSupportsResult:
    form: str
    strategy: str
    seed: int
    chart_mode: str
    rank: Optional[int]
    supports: tuple              # SupportReports, deduplicated (rational)
    loci: tuple                  # LocusReports at the minimal rank
    exhaustive: bool
    warnings: tuple
    stats: dict
    support_count: Optional[int] = None  # over the closure, when certified
    timing_ms: float = 0.0

    def to_obj(self):
        return {
            "form": self.form,
            "strategy": self.strategy,
            "seed": self.seed,
            "chart_mode": self.chart_mode,
            "rank": self.rank,
            "support_count": self.support_count,
            "chart_reports": [s.to_obj() for s in self.supports],
            "loci": [l.to_obj() for l in self.loci],
            "exhaustive": self.exhaustive,
            "warnings": list(self.warnings),
            "stats": self.stats,
            "timing_ms": self.timing_ms,
        }


@dataclass(frozen=True)
class Stratum:
    rank: int
    supports: tuple
    loci: tuple

    @property
    def empty(self) -> bool:
        return not self.supports and not self.loci

    def to_obj(self):
        return {
            "rank": self.rank,
            "supports": [s.to_obj() for s in self.supports],
            "loci": [l.to_obj() for l in self.loci],
            "empty": self.empty,
        }


@dataclass(frozen=True)
class StratificationReport:
    form: str
    seed: int
    strategy: str
    generic_rank: int
    minimal_rank: int
    strata: tuple                # Stratum for minimal_rank .. generic_rank-1
    warnings: tuple

    def stratum(self, rank: int) -> Optional[Stratum]:
        for s in self.strata:
            if s.rank == rank:
                return s
        return None

    def to_obj(self):
        return {
            "form": self.form,
            "generic_rank": self.generic_rank,
            "minimal_rank": self.minimal_rank,
            "strata": [s.to_obj() for s in self.strata],
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class FinitenessCertificate:
    applicable: bool
    bound: Optional[int]
    rank: Optional[int]
    support_count: Optional[int]
    note: str

    def to_obj(self):
        return {
            "applicable": self.applicable,
            "bound": self.bound,
            "rank": self.rank,
            "support_count": self.support_count,
            "note": self.note,
        }


# ---------------------------------------------------------------------------
# internals

def _default_budget(n: int) -> int:
    return 50 * math.comb(n + 2, 2)


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded()


def _compression_det(M: InverseSystemMatrix, size: int, rng: SeededRng) -> Polynomial:
    """Determinant of a random integer compression L M R of shape size x size.

    By Cauchy-Binet it is an integer combination of the size-minors of M, so
    it belongs to the minor ideal and vanishes on the whole rank < size
    locus, while a point of larger rank survives a random compression with
    probability one.  Used to certify candidate varieties independently of
    the selection strategy's sparsity pattern.
    """
    n = M.size
    ring = M.params
    L = [[rng.randrange(3) - 1 for _ in range(n)] for _ in range(size)]
    R = [[rng.randrange(3) - 1 for _ in range(size)] for _ in range(n)]
    rows = []
    for i in range(size):
        middle = []
        for b in range(n):
            acc = ring.zero()
            for a in range(n):
                if L[i][a]:
                    e = M.entries[a][b]
                    if not e.is_zero():
                        acc = acc + e * L[i][a]
            middle.append(acc)
        rows.append([sum((middle[b] * R[b][j] for b in range(n) if R[b][j]),
                         ring.zero()) for j in range(size)])
    return linalg.poly_det(rows)


def _witness_selection(M: InverseSystemMatrix, point, size: int):
    """Rows and columns of a minor that is invertible at the given point
    (exists whenever the specialized rank is at least ``size``)."""
    m = [[Fraction(v) for v in row] for row in M.specialized(list(point))]
    n = M.size
    pivots = []
    used_r: set = set()
    used_c: set = set()
    for _ in range(size):
        hit = None
        for i in range(n):
            if i in used_r:
                continue
            for j in range(n):
                if j not in used_c and m[i][j] != 0:
                    hit = (i, j)
                    break
            if hit:
                break
        if hit is None:
            return None
        pi, pj = hit
        pivots.append(hit)
        used_r.add(pi)
        used_c.add(pj)
        pv = m[pi][pj]
        for i in range(n):
            if i != pi and i not in used_r and m[i][pj] != 0:
                f = m[i][pj] / pv
                for j in range(n):
                    if j not in used_c:
                        m[i][j] -= f * m[pi][j]
    rows = tuple(M.index[i] for i in sorted(used_r))
    cols = tuple(M.index[j] for j in sorted(used_c))
    return minors.MinorSelection(rows, cols, "W")


def _probe_rank(M: InverseSystemMatrix, rng: SeededRng) -> int:
    """Rank at random rational points; evidence for the chart's generic rank."""
    best = 0
    for _ in range(2):
        point = [Fraction(rng.randrange(2001) - 1000, 1 + rng.randrange(7))
                 for _ in range(M.params.nvars)]
        best = max(best, invsys.specialized_rank(M, point))
    return best


def _select(strategy: str, M: InverseSystemMatrix, size: int, rng: SeededRng):
    if strategy == "A":
        return minors.select_minor_A(M, size, rng)
    if strategy == "B":
        return minors.select_minor_B(M, size, rng)
    if strategy == "C":
        return minors.select_minor_C(M, size, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class _LevelOutcome:
    kind: str                    # "empty" | "points" | "locus" | "generic" | "nosignal"
    points: tuple = ()
    generators: tuple = ()
    dimension: int = 0
    exhaustive: bool = True
    warnings: tuple = ()
    raw_dets: tuple = ()         # original determinants, for the point re-check
    closure_count: Optional[int] = None   # certified #supports over the closure
    radical: Optional[Ideal] = None       # certified radical of the locus ideal


def _level_search(M: InverseSystemMatrix, r: int, rng: SeededRng, strategy: str,
                  batch: int, budget: int, deg_eqs, deadline, stats: dict,
                  probe: Optional[int] = None) -> _LevelOutcome:
    """Classify the locus {rank <= r} on one chart by sampled minors.

    ``probe`` is the observed rank at random points: identically vanishing
    minors are accepted as generic-stratum evidence only at or above it.
    """
    ring = M.params
    if r + 1 > M.size:
        stats["dets"] = stats.get("dets", 0)
        return _LevelOutcome("generic", dimension=ring.nvars)
    pool: list = []
    basis: list = []     # reduced degrevlex basis of the pool, kept incrementally
    seen = set()
    raw: list = []
    warnings_: list = []
    det_cache: dict = {}
    drawn = 0

    def done(outcome: _LevelOutcome) -> _LevelOutcome:
        stats["dets"] = stats.get("dets", 0) + drawn
        stats["draws"] = stats.get("draws", 0) + state["total"]
        return outcome

    def absorb(p: Polynomial) -> bool:
        nonlocal basis
        s = squarefree_part(p)
        if s.is_zero() or s in seen:
            return False
        seen.add(s)
        if basis:
            nf = groebner.normal_form(s, basis)
            if nf.is_zero():
                return False
            s_red = primitive_part(nf)
        else:
            s_red = s
        if len(s_red.terms) > 250 or s_red.degree() > 40:
            # oversized reduced generators stall the basis update; cheaper
            # constraints carrying the same cuts keep arriving
            return False
        try:
            new_basis = groebner.buchberger(basis + [s_red], "degrevlex",
                                            max_additions=40)
        except groebner.EffortExceeded:
            seen.discard(s)  # may become affordable once the basis shrinks
            return False
        pool.append(s)
        basis = new_basis
        return True

    def pool_ideal() -> Ideal:
        I = Ideal(ring, tuple(sorted(pool, key=str)))
        I._gb["degrevlex"] = tuple(basis)
        return I

    if r <= M.degree:
        for e in deg_eqs:
            absorb(e)
    zero_streak = 0
    stalled = 0          # evaluations in a row with an unchanged Groebner basis
    last_basis = None
    dirty = bool(pool)
    fallback = {"A": ("A",), "B": ("B", "A"), "C": ("C", "B", "A")}[strategy]
    state = {"active": 0, "total": 0}
    max_draws = 50 * budget
    cert_rounds = 0
    witness_rounds = 0
    boost_rounds = 0

    def try_boost() -> bool:
        """Absorb random compression determinants; returns True when the
        pool gained a new generator.  A genuine rank locus kills every
        compression, so boosts only dissolve sampling artifacts."""
        got = False
        for _ in range(3):
            det = _compression_det(M, r + 1, rng)
            if det.is_zero():
                continue
            raw.append(det)
            if absorb(det):
                got = True
        return got

    def draw_det():
        if state["total"] >= max_draws:
            return None
        sel = None
        while sel is None:
            try:
                sel = _select(fallback[state["active"]], M, r + 1, rng)
            except ValueError:
                # this strategy cannot assemble a selection of this size
                state["active"] += 1
                warnings_.append(
                    f"rank {r}: strategy {fallback[state['active'] - 1]} exhausted, "
                    f"falling back to {fallback[state['active']]}")
        key = (frozenset(sel.rows), frozenset(sel.cols))
        state["total"] += 1
        if key in det_cache:
            return det_cache[key]
        det = minors.symbolic_minor_determinant(M, sel)
        det_cache[key] = det
        return det

    while True:
        if dirty:
            if groebner.is_unit_basis(basis):
                return done(_LevelOutcome("empty", warnings=tuple(warnings_), raw_dets=tuple(raw)))
            dim = staircase_dimension(leading_monomials(basis), ring.nvars)
            if dim is None:
                return done(_LevelOutcome("empty", warnings=tuple(warnings_), raw_dets=tuple(raw)))
            if dim == 0:
                I = pool_ideal()
                rad = None
                count = None
                try:
                    rad = gsolve.zero_dim_radical(I)
                except ValueError:
                    pass
                if rad is not None and cert_rounds < 6:
                    # certify: fresh minors and random compressions of the
                    # minor module must all vanish on the candidate variety
                    bad = []
                    informative = 0
                    for _ in range(10 * batch):
                        if informative >= batch:
                            break
                        det = draw_det()
                        if det is None:
                            break
                        if det.is_zero():
                            continue
                        informative += 1
                        s = squarefree_part(det)
                        if not rad.contains(s):
                            bad.append(s)
                    for _ in range(2):
                        det = _compression_det(M, r + 1, rng)
                        if det.is_zero():
                            continue
                        s = squarefree_part(det)
                        if not rad.contains(s):
                            bad.append(s)
                    if bad:
                        cert_rounds += 1
                        for s in bad:
                            absorb(s)
                        dirty = True
                        continue
                    count = gsolve.quotient_dimension(rad)
                elif rad is not None:
                    warnings_.append(
                        f"rank {r}: minor certification unstable; closure count omitted")
                    rad = None
                sol = gsolve.solve_rational_points(rad if rad is not None else I)
                ranks = {p: invsys.specialized_rank(M, list(p)) for p in sol.points}
                spurious = [p for p in sol.points if ranks[p] > r]
                if spurious and witness_rounds < 6:
                    # exclude each spurious rational candidate by a minor
                    # that is provably invertible there
                    added_w = False
                    for p in spurious[:3]:
                        sel = _witness_selection(M, p, r + 1)
                        if sel is None:
                            continue
                        det = minors.symbolic_minor_determinant(M, sel)
                        if not det.is_zero():
                            raw.append(det)
                            if absorb(det):
                                added_w = True
                    if added_w:
                        witness_rounds += 1
                        dirty = True
                        continue
                survivors = tuple(p for p in sol.points if ranks[p] == r)
                if not sol.exhaustive:
                    warnings_.append(
                        f"rank {r}: non-rational solution content in the minor ideal")
                if count is not None and len(survivors) < len(sol.points):
                    # leftovers of lower rank (stratification levels) or
                    # unexcluded spurious points: the count is not a count
                    # of rank-r supports
                    count = None
                    rad = None
                return done(_LevelOutcome("points", points=survivors,
                                          exhaustive=sol.exhaustive,
                                          warnings=tuple(warnings_),
                                          raw_dets=tuple(raw),
                                          closure_count=count, radical=rad))
            key_now = tuple(basis)
            stalled = stalled + 1 if key_now == last_basis else 0
            last_basis = key_now
            dirty = False
        exhausted = (drawn >= budget or state["total"] >= max_draws
                     or (probe is not None and r >= probe and not pool
                         and zero_streak >= 2 * batch)
                     or (bool(pool) and stalled >= 8))
        if exhausted:
            if boost_rounds < 3 and try_boost():
                boost_rounds += 1
                dirty = True
                zero_streak = 0
                stalled = 0
                continue
            break
        _check_deadline(deadline)
        added = False
        for _ in range(batch):
            if drawn >= budget:
                break
            det = draw_det()
            if det is None:
                break
            if det.is_zero():
                zero_streak += 1
                continue
            zero_streak = 0
            drawn += 1
            raw.append(det)
            if absorb(det):
                added = True
        dirty = True if added else dirty
    if not pool:
        if probe is None or r >= probe:
            return done(_LevelOutcome("generic", dimension=ring.nvars,
                                      warnings=tuple(warnings_), raw_dets=tuple(raw)))
        warnings_.append(f"rank {r}: no informative minors sampled within budget")
        return done(_LevelOutcome("nosignal", exhaustive=False,
                                  warnings=tuple(warnings_), raw_dets=tuple(raw)))
    if groebner.is_unit_basis(basis):
        return done(_LevelOutcome("empty", warnings=tuple(warnings_), raw_dets=tuple(raw)))
    dim = staircase_dimension(leading_monomials(basis), ring.nvars)
    if dim is None:
        return done(_LevelOutcome("empty", warnings=tuple(warnings_), raw_dets=tuple(raw)))
    return done(_LevelOutcome("locus", generators=tuple(pool), dimension=dim,
                              warnings=tuple(warnings_), raw_dets=tuple(raw)))


def _independent_set(I: Ideal):
    """A maximum staircase-independent variable subset of the ideal."""
    basis = list(I.groebner("degrevlex"))
    lms = leading_monomials(basis)
    n = I.ring.nvars
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lms]
    best: tuple = ()
    for mask in range(1 << n):
        S = tuple(i for i in range(n) if mask >> i & 1)
        if len(S) <= len(best):
            continue
        sset = set(S)
        if all(not sup <= sset for sup in supports):
            best = S
    return best


def _sample_locus(M: InverseSystemMatrix, r: int, gens, rng: SeededRng,
                  tries: int = 8):
    """Rational points on the locus with specialized rank exactly r."""
    ring = M.params
    I = Ideal(ring, tuple(gens))
    free = _independent_set(I)
    found = []
    for _ in range(tries):
        # nonzero slice values: a zero slice can run through the isolated
        # special points embedded in a spurious curve
        values = {i: Fraction((-1) ** rng.randrange(2) * (1 + rng.randrange(9)))
                  for i in free}
        restricted = []
        for g in I.gens:
            h = g
            for i in sorted(free, reverse=True):
                h = h.substitute(i, values[i])
            restricted.append(h)
        sub_ring = ring
        for i in sorted(free, reverse=True):
            sub_ring = sub_ring.drop(i)
        restricted = [g for g in restricted if not g.is_zero()]
        if any(g.is_constant() for g in restricted):
            continue
        J = Ideal(sub_ring, tuple(restricted))
        try:
            if gsolve.ideal_dimension(J) != 0:
                continue
            sol = gsolve.solve_rational_points(J)
        except ValueError:
            continue
        for partial in sol.points:
            point = []
            it = iter(partial)
            for i in range(ring.nvars):
                point.append(values[i] if i in free else next(it))
            if invsys.specialized_rank(M, point) == r:
                tup = tuple(point)
                if tup not in found:
                    found.append(tup)
        if len(found) >= 3:
            break
    return found


# ---------------------------------------------------------------------------
# support assembly

def _ell_from_point(ring: Ring, chart: int, point) -> Polynomial:
    n = ring.nvars
    coeffs = []
    it = iter(point)
    for i in range(n):
        coeffs.append(Fraction(1) if i == chart else Fraction(next(it)))
    return Polynomial(ring, {tuple(1 if k == i else 0 for k in range(n)): c
                             for i, c in enumerate(coeffs) if c != 0})


def support_report(F: Polynomial, chart: int, point) -> SupportReport:
    """Assemble and cross-check one support's full report."""
    ell = _ell_from_point(F.ring, chart, point)
    ideal = natural_apolar_scheme(F, ell)
    rank = inverse_system_dimension(dual_generator(F, ell))
    hp = hilbert_function(ideal, max(rank, 2))
    if not hp.stable or hp.stable_value() != rank:
        raise RuntimeError("rank / Hilbert / inverse-system dimension mismatch")
    return SupportReport(chart, tuple(Fraction(c) for c in point), ell, rank, ideal, hp)


def _support_key(ell: Polynomial):
    """Projective normal form of a linear support, for deduplication."""
    n = ell.ring.nvars
    coeffs = [Fraction(ell.coefficient(tuple(1 if k == i else 0 for k in range(n))))
              for i in range(n)]
    lead = next(c for c in coeffs if c != 0)
    coeffs = [c / lead for c in coeffs]
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    ints = [int(c * denom) for c in coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    return tuple(v // g for v in ints)


# ---------------------------------------------------------------------------
# chart search

@dataclass
class _ChartResult:
    chart: int
    rank: Optional[int]
    points: tuple = ()
    locus: Optional[LocusReport] = None
    exhaustive: bool = True
    warnings: tuple = ()
    closure_count: Optional[int] = None
    radical: Optional[Ideal] = None


def _search_chart(F: Polynomial, chart: int, strategy: str, master: SeededRng,
                  batch: int, budget: int, deadline, rank_cap: Optional[int],
                  stats: dict) -> _ChartResult:
    M = invsys.inverse_system_matrix(F, chart)
    deg_eqs = invsys.degree_d_equations(F, chart)
    probe = _probe_rank(M, master.spawn(f"probe-{chart}"))
    warnings_: list = []
    exhaustive = True
    closure_sound = True   # all lower levels concluded empty over the closure
    r = 1
    limit = probe if rank_cap is None else min(probe, rank_cap)
    while r <= limit:
        _check_deadline(deadline)
        level_stats: dict = {}
        rng = master.spawn(f"chart{chart}-rank{r}")
        out = _level_search(M, r, rng, strategy, batch, budget, deg_eqs,
                            deadline, level_stats, probe)
        stats[f"chart{chart}/rank{r}"] = level_stats
        warnings_.extend(out.warnings)
        exhaustive = exhaustive and out.exhaustive
        if out.kind in ("empty", "nosignal"):
            if out.kind == "nosignal":
                closure_sound = False
            r += 1
            continue
        if out.kind == "points":
            if out.points or (out.closure_count is not None and out.closure_count > 0):
                for p in out.points:
                    for detpoly in out.raw_dets:
                        if detpoly.evaluate(list(p)) != 0:
                            raise RuntimeError("candidate fails a raw minor; internal bug")
                count = out.closure_count if closure_sound else None
                if count is not None and count > len(out.points):
                    exhaustive = False
                return _ChartResult(chart, r, points=out.points,
                                    exhaustive=exhaustive, warnings=tuple(warnings_),
                                    closure_count=count,
                                    radical=out.radical if closure_sound else None)
            closure_sound = False  # level not certified empty over the closure
            r += 1
            continue
        if out.kind == "generic":
            locus = LocusReport(chart, r, (), M.params.nvars, None, (), True, generic=True)
            return _ChartResult(chart, r, locus=locus, exhaustive=exhaustive,
                                warnings=tuple(warnings_))
        # positive-dimensional locus: verify by rational samples
        samples = _sample_locus(M, r, out.generators, master.spawn(f"sample{chart}-{r}"))
        common = None
        acc = None
        for g in out.generators:
            acc = g if acc is None else poly_gcd(acc, g)
        if acc is not None and not acc.is_constant():
            common = acc
        if samples:
            reports = tuple(support_report(F, chart, p) for p in samples)
            locus = LocusReport(chart, r, out.generators, out.dimension,
                                common, reports, True)
            return _ChartResult(chart, r, locus=locus, exhaustive=exhaustive,
                                warnings=tuple(warnings_))
        warnings_.append(
            f"chart {chart} rank {r}: positive-dimensional candidate locus "
            "without rational sample supports; continuing")
        exhaustive = False
        r += 1
    return _ChartResult(chart, None, exhaustive=exhaustive, warnings=tuple(warnings_))


# ---------------------------------------------------------------------------
# public driver operations

def minimal_supports(F: Polynomial, strategy: str = "C", seed: int = 0,
                     charts="all", *, minor_batch: int = 6,
                     budget: Optional[int] = None,
                     deadline: Optional[float] = None) -> MinimalSupportsResult:
    """All minimal local decomposition supports of F (Algorithm-level entry).

    ``charts`` is a chart index, "all", or "generic".  Identical inputs give
    identical results, byte for byte.
    """
    t0 = time.monotonic()
    if F.is_zero() or not F.is_homogeneous() or F.degree() < 1:
        raise ValueError("input form must be homogeneous of degree >= 1")
    n = F.ring.nvars - 1
    if n < 1:
        raise ValueError("need at least two variables")
    if budget is None:
        budget = _default_budget(n)
    master = SeededRng(seed)
    stats: dict = {}
    mode = charts if isinstance(charts, str) else f"chart{charts}"

    if charts == "generic":
        return _generic_mode(F, strategy, seed, master, minor_batch, budget,
                             deadline, stats, t0)

    chart_list = list(range(F.ring.nvars)) if charts == "all" else [int(charts)]
    results: list = []
    best: Optional[int] = None
    for j in chart_list:
        res = _search_chart(F, j, strategy, master, minor_batch, budget,
                            deadline, best, stats)
        results.append(res)
        if res.rank is not None and (best is None or res.rank < best):
            best = res.rank
    supports: dict = {}
    loci: list = []
    warnings_: list = []
    exhaustive = True
    for res in results:
        warnings_.extend(res.warnings)
        exhaustive = exhaustive and res.exhaustive
        if res.rank != best or best is None:
            continue
        for p in res.points:
            rep = support_report(F, res.chart, p)
            supports.setdefault(_support_key(rep.ell), rep)
        if res.locus is not None:
            loci.append(res.locus)
    ordered = tuple(supports[k] for k in sorted(supports))
    count = _closure_total(results, best)
    if count is not None and count > len(ordered):
        warnings_.append(f"{count - len(ordered)} minimal supports are not rational"
                         " (recorded in the solver residuals)")
    return MinimalSupportsResult(
        form=str(F), strategy=strategy, seed=seed, chart_mode=mode,
        rank=best, supports=ordered, loci=tuple(loci),
        support_count=count, exhaustive=exhaustive,
        warnings=tuple(warnings_), stats=stats,
        timing_ms=(time.monotonic() - t0) * 1000.0)


def _closure_total(results, best) -> Optional[int]:
    """Total number of minimal supports over the closure: each chart's
    certified count restricted to supports whose earlier coordinates vanish,
    so every projective support is counted exactly once."""
    if best is None:
        return None
    total = 0
    for res in results:
        if res.rank != best:
            continue
        if res.locus is not None or res.closure_count is None or res.radical is None:
            return None
        if res.chart == 0:
            total += res.closure_count
            continue
        params = res.radical.ring
        slice_gens = tuple(res.radical.gens) + tuple(
            params.var(i) for i in range(res.chart))
        cnt = gsolve.quotient_dimension(Ideal(params, slice_gens))
        if cnt is None:
            return None
        total += cnt
    return total


def _random_invertible(n1: int, rng: SeededRng):
    while True:
        A = [[rng.randrange(11) - 5 for _ in range(n1)] for _ in range(n1)]
        if linalg.frac_rank(A) == n1:
            return A


def _generic_mode(F, strategy, seed, master, batch, budget, deadline, stats, t0):
    n1 = F.ring.nvars
    A = _random_invertible(n1, master.spawn("generic-matrix"))
    G = compose_linear(F, A)
    Ainv = _frac_inverse(A)
    res = _search_chart(G, 0, strategy, master, batch, budget, deadline, None, stats)
    supports: dict = {}
    loci: list = []
    warnings_ = list(res.warnings)
    if res.locus is not None:
        loci.append(res.locus)
        warnings_.append("generic mode: locus reported in transformed coordinates")
    if res.rank is not None:
        for p in res.points:
            cprime = [Fraction(1)] + [Fraction(v) for v in p]
            c = [sum(cprime[i] * Ainv[i][k] for i in range(n1)) for k in range(n1)]
            ell = Polynomial(F.ring, {tuple(1 if t == k else 0 for t in range(n1)): v
                                      for k, v in enumerate(c) if v != 0})
            j, coeffs = _normalize_ell(ell)
            rep = support_report(F, j, [coeffs[i] for i in range(n1) if i != j])
            supports.setdefault(_support_key(rep.ell), rep)
    ordered = tuple(supports[k] for k in sorted(supports))
    count = res.closure_count if res.locus is None else None
    if count is not None and count > len(ordered):
        warnings_.append(f"{count - len(ordered)} minimal supports are not rational"
                         " (recorded in the solver residuals)")
    return MinimalSupportsResult(
        form=str(F), strategy=strategy, seed=seed, chart_mode="generic",
        rank=res.rank, supports=ordered, loci=tuple(loci),
        support_count=count, exhaustive=res.exhaustive,
        warnings=tuple(warnings_), stats=stats,
        timing_ms=(time.monotonic() - t0) * 1000.0)


def _normalize_ell(ell: Polynomial):
    from .apolar import chart_and_coefficients
    return chart_and_coefficients(ell)


def _frac_inverse(A):
    n = len(A)
    m = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(1 if k == i else 0)
         for k in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return [row[n:] for row in m]


def rank_stratification(F: Polynomial, seed: int = 0, strategy: str = "C", *,
                        minor_batch: int = 6, budget: Optional[int] = None,
                        deadline: Optional[float] = None) -> StratificationReport:
    """Supports of every rank between the minimum and the generic value.

    Point strata are merged across all standard charts; positive-dimensional
    strata are reported per chart, with verified sample supports.
    """
    base = minimal_supports(F, strategy=strategy, seed=seed, charts="all",
                            minor_batch=minor_batch, budget=budget,
                            deadline=deadline)
    n = F.ring.nvars - 1
    d = F.degree()
    if budget is None:
        budget = _default_budget(n)
    gmax = invsys.generic_local_rank(n, d)
    master = SeededRng(seed)
    warnings_ = list(base.warnings)
    strata = [Stratum(base.rank, base.supports, base.loci)]
    for r in range((base.rank or 1) + 1, gmax):
        points: dict = {}
        loci: list = []
        for chart in range(F.ring.nvars):
            _check_deadline(deadline)
            M = invsys.inverse_system_matrix(F, chart)
            deg_eqs = invsys.degree_d_equations(F, chart)
            probe = _probe_rank(M, master.spawn(f"strat-probe-{chart}"))
            rng = master.spawn(f"strat-chart{chart}-rank{r}")
            level_stats: dict = {}
            out = _level_search(M, r, rng, strategy, minor_batch, budget,
                                deg_eqs, deadline, level_stats, probe)
            warnings_.extend(out.warnings)
            if out.kind == "points":
                for p in out.points:
                    rep = support_report(F, chart, p)
                    points.setdefault(_support_key(rep.ell), rep)
            elif out.kind == "locus":
                samples = _sample_locus(M, r, out.generators,
                                        master.spawn(f"strat-sample{chart}-{r}"))
                acc = None
                for g in out.generators:
                    acc = g if acc is None else poly_gcd(acc, g)
                common = acc if acc is not None and not acc.is_constant() else None
                reports = tuple(support_report(F, chart, p) for p in samples)
                loci.append(LocusReport(chart, r, out.generators, out.dimension,
                                        common, reports, bool(samples)))
            elif out.kind == "generic":
                loci.append(LocusReport(chart, r, (), M.params.nvars, None, (),
                                        True, generic=True))
        ordered = tuple(points[k] for k in sorted(points))
        strata.append(Stratum(r, ordered, tuple(loci)))
    return StratificationReport(
        form=str(F), seed=seed, strategy=strategy, generic_rank=gmax,
        minimal_rank=base.rank, strata=tuple(strata), warnings=tuple(warnings_))


def finiteness_certificate(F: Polynomial, seed: int = 0, strategy: str = "C",
                           **kwargs) -> FinitenessCertificate:
    """If some support has rank <= d, the minimal supports are finite, at
    most d^n of them; otherwise the criterion does not apply."""
    res = minimal_supports(F, strategy=strategy, seed=seed, charts="all", **kwargs)
    d = F.degree()
    n = F.ring.nvars - 1
    if res.rank is not None and res.rank <= d and not res.loci:
        return FinitenessCertificate(True, d ** n, res.rank, len(res.supports),
                                     f"rank {res.rank} <= degree {d}: at most "
                                     f"{d ** n} minimal supports")
    return FinitenessCertificate(False, None, res.rank,
                                 len(res.supports) if res.supports else None,
                                 "criterion inapplicable: minimal rank exceeds the degree"
                                 if res.rank is not None and res.rank > d
                                 else "criterion inapplicable")


# ---------------------------------------------------------------------------
# benchmark harness

@dataclass(frozen=True)
class BenchCell:
    time_s: Optional[float]      # None = timed out (rendered as "-")
    supports: Optional[int]
    rank: Optional[int]
    consistent: bool

    def to_obj(self):
        return {"time_s": self.time_s, "supports": self.supports,
                "rank": self.rank, "consistent": self.consistent}


@dataclass(frozen=True)
class BenchRow:
    form: str
    repetitions: int
    supports: Optional[int]
    rank: Optional[int]
    cells: dict                  # (mode, strategy) -> BenchCell

    def to_obj(self):
        return {
            "form": self.form,
            "repetitions": self.repetitions,
            "supports": self.supports,
            "rank": self.rank,
            "cells": {f"{m}/{s}": c.to_obj() for (m, s), c in self.cells.items()},
        }


@dataclass(frozen=True)
class BenchTable:
    rows: tuple
    strategies: tuple
    modes: tuple
    plain_is_all_charts: bool = True   # recorded choice: "plain" = all charts

    def to_obj(self):
        return {
            "plain_is_all_charts": self.plain_is_all_charts,
            "strategies": list(self.strategies),
            "modes": list(self.modes),
            "rows": [r.to_obj() for r in self.rows],
        }

    def render(self) -> str:
        header = ["form", "#sup", "rank", "reps"]
        for m in self.modes:
            for s in self.strategies:
                header.append(f"{m}/{s}")
        lines = ["\t".join(header)]
        for row in self.rows:
            cells = []
            for m in self.modes:
                for s in self.strategies:
                    c = row.cells.get((m, s))
                    cells.append("-" if c is None or c.time_s is None
                                 else f"{c.time_s:.2f}")
            lines.append("\t".join(
                [row.form, str(row.supports), str(row.rank), str(row.repetitions)] + cells))
        return "\n".join(lines)


def bench(forms: Sequence[Polynomial], strategies: Sequence[str] = ("A", "B", "C"),
          repetitions: int = 1, seed: int = 0, *,
          modes: Sequence[str] = ("plain", "generic"),
          timeout: float = 300.0, minor_batch: int = 6,
          budget: Optional[int] = None) -> BenchTable:
    """Timing and support-count table over forms, strategies, and chart modes.

    "plain" runs every standard chart; "generic" runs a seeded random change
    of coordinates first.  A cell that exceeds the timeout is recorded with
    ``time_s = None`` and rendered as a dash.  Support counts and ranks are
    mathematical facts and must agree across repetitions; the consistency
    flag records that check.
    """
    rows = []
    for fidx, F in enumerate(forms):
        if not F.is_homogeneous() or F.is_zero():
            raise ValueError("bench forms must be nonzero homogeneous")
        cells = {}
        row_supports = None
        row_rank = None
        for mode in modes:
            for strat in strategies:
                t0 = time.monotonic()
                deadline = t0 + timeout
                counts = set()
                ranks = set()
                timed_out = False
                for rep in range(repetitions):
                    rep_seed = SeededRng(seed).spawn(
                        f"bench-{fidx}-{mode}-{strat}-{rep}").seed
                    try:
                        res = minimal_supports(
                            F, strategy=strat, seed=rep_seed,
                            charts="all" if mode == "plain" else "generic",
                            minor_batch=minor_batch, budget=budget,
                            deadline=deadline)
                    except DeadlineExceeded:
                        timed_out = True
                        break
                    if res.loci:
                        count = None
                    elif res.support_count is not None:
                        count = res.support_count
                    else:
                        count = len(res.supports)
                    counts.add(count)
                    ranks.add(res.rank)
                elapsed = time.monotonic() - t0
                if timed_out:
                    cells[(mode, strat)] = BenchCell(None, None, None, True)
                    continue
                consistent = len(counts) == 1 and len(ranks) == 1
                sup = counts.pop() if len(counts) == 1 else None
                rk = ranks.pop() if len(ranks) == 1 else None
                cells[(mode, strat)] = BenchCell(elapsed, sup, rk, consistent)
                if sup is not None and row_supports is None:
                    row_supports = sup
                    row_rank = rk
        rows.append(BenchRow(str(F), repetitions, row_supports, row_rank, cells))
    return BenchTable(tuple(rows), tuple(strategies), tuple(modes))


def result_to_json(result) -> str:
    return json.dumps(result.to_obj(), indent=2)

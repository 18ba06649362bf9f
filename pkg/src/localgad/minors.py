"""Minor selection strategies and exact symbolic minor determinants.

Three ways of picking an r x r submatrix of the inverse system matrix:

* (A) uniform rows and columns;
* (B) uniform pairs (a, b) with |a+b| = deg f_g, which makes the selected
  submatrix block anti-diagonal and its determinant a product of small
  blocks;
* (C) random chains of consecutive contractions walking one exponent unit
  at a time from (1, b) down to (b, 1) for a leading monomial b of f_g,
  which keeps the entries in very few parameters.

All randomness flows through a tiny deterministic generator so identical
seeds give identical selections regardless of platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import linalg
from .invsys import InverseSystemMatrix
from .polyring import (
    Monomial,
    ParamPolynomial,
    Polynomial,
    key_degrevlex,
    mono_degree,
)

#: bounded retry count for reject-and-resample duplicate handling
MAX_RETRIES = 1000


class SeededRng:
    """splitmix64: tiny, fast, and stable across platforms and versions."""

    __slots__ = ("seed", "_state")

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.seed = seed & self.MASK
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self.MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), order of a partial shuffle."""
        if k > n:
            raise ValueError("sample larger than population")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randrange(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def spawn(self, label: str) -> "SeededRng":
        """Independent stream derived deterministically from the base seed."""
        h = self.seed
        for ch in label.encode():
            h = ((h ^ ch) * 0x100000001B3) & self.MASK
        return SeededRng(h ^ 0xA5A5A5A55A5A5A5A)


@dataclass(frozen=True)
class MinorSelection:
    """Rows and columns (as index monomials) of one selected minor."""

    rows: tuple
    cols: tuple
    strategy: str
    chain: Optional[tuple] = None  # strategy C: the (alpha, beta) pair trace

    def __post_init__(self):
        if len(self.rows) != len(self.cols):
            raise ValueError("row and column counts differ")
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ValueError("duplicate row or column in selection")

    @property
    def size(self) -> int:
        return len(self.rows)


def select_minor_A(M: InverseSystemMatrix, r: int, rng: SeededRng) -> MinorSelection:
    """Uniformly sampled r rows and r columns, without replacement."""
    if r > M.size:
        raise ValueError("minor size exceeds matrix size")
    rows = tuple(M.index[i] for i in sorted(rng.sample(M.size, r)))
    cols = tuple(M.index[i] for i in sorted(rng.sample(M.size, r)))
    return MinorSelection(rows, cols, "A")


def _admissible_pairs(M: InverseSystemMatrix) -> list:
    """All (a, b) index pairs with |a+b| = deg f_g."""
    D = M.fgamma.degree()
    by_deg: dict = {}
    for m in M.index:
        by_deg.setdefault(mono_degree(m), []).append(m)
    pairs = []
    for da, rows in sorted(by_deg.items()):
        db = D - da
        for a in rows:
            for b in by_deg.get(db, ()):
                pairs.append((a, b))
    return pairs


def select_minor_B(M: InverseSystemMatrix, r: int, rng: SeededRng) -> MinorSelection:
    """r pairs (a, b) with |a+b| = deg f_g, resampled on duplicate row or
    column; rows are the a's, columns the b's."""
    pairs = _admissible_pairs(M)
    distinct_rows = len({a for a, _ in pairs})
    if r > distinct_rows:
        raise ValueError("fewer admissible rows than requested minor size")
    rows: list = []
    cols: list = []
    tries = 0
    while len(rows) < r:
        a, b = pairs[rng.randrange(len(pairs))]
        if a in rows or b in cols:
            tries += 1
            if tries > MAX_RETRIES:
                raise ValueError("could not assemble a duplicate-free selection")
            continue
        rows.append(a)
        cols.append(b)
    return MinorSelection(tuple(rows), tuple(cols), "B")


def _leading_monomials(fg: ParamPolynomial) -> list:
    """All monomials of maximal total degree with nonzero parameter
    coefficient, degrevlex-descending."""
    top = max(mono_degree(m) for m in fg.terms)
    return sorted((m for m in fg.terms if mono_degree(m) == top),
                  key=key_degrevlex, reverse=True)


def select_minor_C(M: InverseSystemMatrix, r: int, rng: SeededRng,
                   fgamma: Optional[ParamPolynomial] = None) -> MinorSelection:
    """Chains of consecutive contractions.

    Starting from (1, b) for a leading (maximal-degree) monomial b of f_g,
    repeatedly move one exponent unit from the column index to the row
    index; the unit leaves position j with probability b_j / |b|.  When the
    column index hits 1, restart from another monomial of f_g, keeping only
    pairs whose row and column are both unseen, until r pairs are collected.
    """
    fg = fgamma if fgamma is not None else M.fgamma
    if fg.is_zero():
        raise ValueError("zero dual generator")
    support = sorted(fg.terms, key=key_degrevlex, reverse=True)
    n = len(support[0])
    rows: list = []
    cols: list = []
    trace: list = []

    def try_add(a, b):
        if a not in rows and b not in cols:
            rows.append(a)
            cols.append(b)
            trace.append((a, b))

    leading = _leading_monomials(fg)
    start = leading[0] if len(leading) == 1 else leading[rng.randrange(len(leading))]
    tries = 0
    while len(rows) < r:
        alpha = (0,) * n
        beta = start
        try_add(alpha, beta)
        while mono_degree(beta) > 0 and len(rows) < r:
            total = mono_degree(beta)
            # branch k with probability beta_k / |beta|
            pick = rng.randrange(total)
            acc = 0
            for k in range(n):
                acc += beta[k]
                if pick < acc:
                    break
            alpha = alpha[:k] + (alpha[k] + 1,) + alpha[k + 1:]
            beta = beta[:k] + (beta[k] - 1,) + beta[k + 1:]
            try_add(alpha, beta)
        if len(rows) < r:
            tries += 1
            if tries > MAX_RETRIES:
                raise ValueError(
                    "could not collect enough distinct pairs from the support")
            start = support[rng.randrange(len(support))]
    return MinorSelection(tuple(rows), tuple(cols), "C", tuple(trace))


def symbolic_minor_determinant(M: InverseSystemMatrix, sel: MinorSelection) -> Polynomial:
    """Exact determinant of the selected submatrix over the parameter ring.

    Rows are pre-sorted by ascending and columns by descending degree (with
    the permutation sign restored) so the zero block structure of Hankel
    minors splits the elimination into small pieces.
    """
    rows = list(sel.rows)
    cols = list(sel.cols)
    valid = set(M.index)
    for m in rows + cols:
        if tuple(m) not in valid:
            raise ValueError("selection index outside the matrix")
    row_order = sorted(range(len(rows)), key=lambda i: (mono_degree(rows[i]), key_degrevlex(rows[i])))
    col_order = sorted(range(len(cols)), key=lambda j: (-mono_degree(cols[j]), key_degrevlex(cols[j])))
    sign = _perm_sign(row_order) * _perm_sign(col_order)
    sub = [[M.entry(rows[i], cols[j]) for j in col_order] for i in row_order]
    det = linalg.poly_det(sub)
    return det if sign > 0 else -det


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign

"""Exact linear algebra helpers.

Two flavors live here:

* plain Gaussian elimination over the rationals (rank and kernel bases for
  the contraction-map matrices), and
* fraction-free Bareiss elimination for matrices whose entries are exact
  polynomials, used for symbolic ranks and minor determinants.  Row and
  column swaps are allowed; the Bareiss division stays exact regardless of
  the pivoting path.  Determinants first strip rational row contents and
  recursively split off zero blocks, which makes the block-shaped minors
  produced by the degree-compatible selection strategies cheap.
"""

from __future__ import annotations

from fractions import Fraction

from .polyring import Polynomial, integer_content, norm_coef, poly_divexact


# ---------------------------------------------------------------------------
# rational matrices (lists of lists of int/Fraction)

def frac_rank(rows) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    m = [list(row) for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(m)):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for i in range(rank + 1, len(m)):
            if m[i][col] != 0:
                factor = Fraction(m[i][col], 1) / pv
                for j in range(col, ncols):
                    m[i][j] = norm_coef(m[i][j] - factor * m[rank][j])
        rank += 1
        if rank == len(m):
            break
    return rank


def frac_kernel(rows) -> list[list[Fraction]]:
    """Basis of the right null space {v : M v = 0} of a rational matrix.

    Vectors come out echelonized over the free columns, in column order.
    """
    m = [list(row) for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []  # (row, col)
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, nrows):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [norm_coef(Fraction(v, 1) / pv) for v in m[rank]]
        for i in range(nrows):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [norm_coef(a - f * b) for a, b in zip(m[i], m[rank])]
        pivots.append((rank, col))
        rank += 1
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for r, c in pivots:
            v[c] = -Fraction(m[r][free])
        basis.append(v)
    return basis


def frac_det(rows) -> Fraction:
    """Exact determinant of a rational matrix (Gaussian elimination)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = Fraction(m[col][col])
        det *= pv
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = Fraction(m[i][col]) / pv
                for j in range(col, n):
                    m[i][j] = m[i][j] - f * m[col][j]
    return det


# ---------------------------------------------------------------------------
# polynomial matrices

def _pivot_cost(p: Polynomial):
    return (len(p.terms), p.degree())


def poly_rank(rows: list[list[Polynomial]]) -> int:
    """Rank over the fraction field of the entry ring, by fraction-free
    elimination with full pivoting; pivots prefer few terms and low degree."""
    m = [list(row) for row in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = None  # previous pivot, Bareiss divisor
    rank = 0
    while rank < min(nrows, ncols):
        best = None
        for i in range(rank, nrows):
            for j in range(rank, ncols):
                if not m[i][j].is_zero():
                    cost = _pivot_cost(m[i][j])
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
        if best is None:
            break
        _, pi, pj = best
        m[rank], m[pi] = m[pi], m[rank]
        for row in m:
            row[rank], row[pj] = row[pj], row[rank]
        piv = m[rank][rank]
        for i in range(rank + 1, nrows):
            for j in range(rank + 1, ncols):
                num = piv * m[i][j] - m[i][rank] * m[rank][j]
                m[i][j] = poly_divexact(num, prev) if prev is not None else num
            m[i][rank] = piv.ring.zero()
        prev = piv
        rank += 1
    return rank


def poly_det(rows: list[list[Polynomial]]) -> Polynomial:
    """Exact determinant of a square polynomial matrix.

    Strips rational row contents first, then recursively splits off leading
    zero blocks (det [[A,B],[0,C]] = det A * det C), and finishes the
    unsplittable blocks with Bareiss elimination.
    """
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    ring = rows[0][0].ring
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    m = [list(r) for r in rows]
    scale = Fraction(1)
    for i in range(n):
        cont = Fraction(0)
        for e in m[i]:
            if not e.is_zero():
                cont = _gcd_frac(cont, integer_content(e))
        if cont == 0:
            return ring.zero()
        if cont != 1:
            scale *= cont
            m[i] = [Polynomial(ring, {mo: norm_coef(Fraction(v) / cont)
                                      for mo, v in e.terms.items()}) for e in m[i]]
    det = _det_split(m, ring)
    return det * scale if scale != 1 else det


def _gcd_frac(a: Fraction, b: Fraction) -> Fraction:
    from math import gcd
    a, b = abs(Fraction(a)), abs(Fraction(b))
    num = gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def _det_split(m: list[list[Polynomial]], ring) -> Polynomial:
    n = len(m)
    if n == 1:
        return m[0][0]
    # look for p with m[p:][:p] all zero -> block upper triangular split
    for p in range(1, n):
        if all(m[i][j].is_zero() for i in range(p, n) for j in range(p)):
            top = [row[:p] for row in m[:p]]
            bot = [row[p:] for row in m[p:]]
            return _det_split(top, ring) * _det_split(bot, ring)
    return _det_laplace(m, ring)


def _det_laplace(m: list[list[Polynomial]], ring) -> Polynomial:
    """Division-free determinant: row-by-row Laplace expansion memoized over
    column subsets.  Rows are processed sparsest first, and zero entries are
    skipped, which suits the patchy matrices the minor strategies produce."""
    n = len(m)
    order = sorted(range(n), key=lambda i: sum(1 for e in m[i] if not e.is_zero()))
    sign_rows = _perm_sign_list(order)
    rows = [m[i] for i in order]
    frontier = {0: ring.one()}  # bitmask of used columns -> accumulated minor
    for k in range(n):
        row = rows[k]
        row_sign = 1 if k % 2 == 0 else -1
        nxt: dict = {}
        for mask, val in frontier.items():
            parity = row_sign
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    parity = -parity
                    continue
                e = row[j]
                if e.is_zero():
                    continue
                term = e * val if parity > 0 else (-e) * val
                key = mask | bit
                if key in nxt:
                    s = nxt[key] + term
                    if s.is_zero():
                        del nxt[key]
                    else:
                        nxt[key] = s
                elif not term.is_zero():
                    nxt[key] = term
        frontier = nxt
        if not frontier:
            return ring.zero()
    out = frontier[(1 << n) - 1]
    return out if sign_rows > 0 else -out


def _perm_sign_list(perm) -> int:
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


def _det_bareiss(m: list[list[Polynomial]], ring) -> Polynomial:
    n = len(m)
    sign = 1
    prev = None
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                if not m[i][j].is_zero():
                    cost = _pivot_cost(m[i][j])
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
        if best is None:
            return ring.zero()
        _, pi, pj = best
        if pi != k:
            m[k], m[pi] = m[pi], m[k]
            sign = -sign
        if pj != k:
            for row in m:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign
        piv = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = piv * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = poly_divexact(num, prev) if prev is not None else num
            m[i][k] = ring.zero()
        prev = piv
    out = m[n - 1][n - 1]
    return -out if sign < 0 else out

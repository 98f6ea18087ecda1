"""Chern classes of products of projective spaces, Chern numbers, the SU
constraint system, exact integer/rational linear algebra, and the degree-8
Todd coefficient.

Cohomology of CP^(n1) x ... x CP^(nr) is Z[x1..xr]/(x_i^(n_i+1)); classes
are kept as dicts from bounded exponent tuples to integers.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch, UsageError

Rat = Fraction


class ProjProduct:
    """CP^(n1) x ... x CP^(nr), dims sorted for a canonical key."""

    def __init__(self, dims):
        dims = tuple(dims)
        if not dims or any(n < 1 for n in dims):
            raise UsageError(f"invalid projective product {dims}")
        self.dims = dims

    @property
    def complex_dim(self):
        return sum(self.dims)

    def label(self):
        from collections import Counter
        parts = []
        for n, mult in sorted(Counter(self.dims).items()):
            parts.append(f"CP{n}" + (f"^{mult}" if mult > 1 else ""))
        return "x".join(parts)

    def __repr__(self):
        return f"ProjProduct{self.dims}"

    def __eq__(self, other):
        return isinstance(other, ProjProduct) and self.dims == other.dims

    def __hash__(self):
        return hash(self.dims)


class CohClass:
    """Integer polynomial in x1..xr reduced modulo (x_i^(n_i+1))."""

    __slots__ = ("dims", "terms")

    def __init__(self, dims, terms=None):
        self.dims = tuple(dims)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if any(e > n for e, n in zip(exp, self.dims)):
                continue
            if c:
                clean[exp] = c
        self.terms = clean

    @classmethod
    def one(cls, dims):
        return cls(dims, {(0,) * len(tuple(dims)): 1})

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return CohClass(self.dims, terms)

    def __mul__(self, other):
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                if any(e > n for e, n in zip(exp, self.dims)):
                    continue
                terms[exp] = terms.get(exp, 0) + c1 * c2
        return CohClass(self.dims, terms)

    def __pow__(self, k):
        out = CohClass.one(self.dims)
        for _ in range(k):
            out = out * self
        return out

    def homogeneous(self, d):
        return CohClass(self.dims, {e: c for e, c in self.terms.items() if sum(e) == d})

    def top_coefficient(self):
        return self.terms.get(self.dims, 0)

    def __eq__(self, other):
        return isinstance(other, CohClass) and self.dims == other.dims and self.terms == other.terms

    def __repr__(self):
        return f"CohClass({self.terms})"


def total_chern(p: ProjProduct) -> CohClass:
    """c(T(CP^n1 x ...)) = prod_i (1 + x_i)^(n_i + 1) mod the truncation ideal."""
    out = CohClass.one(p.dims)
    for i, n in enumerate(p.dims):
        unit = CohClass.one(p.dims)
        xi = CohClass(p.dims, {tuple(1 if j == i else 0 for j in range(len(p.dims))): 1})
        out = out * (unit + xi) ** (n + 1)
    return out


def chern_number(p: ProjProduct, monomial) -> int:
    """Evaluate a Chern monomial (partition of indices) on the fundamental class."""
    if sum(monomial) != p.complex_dim:
        raise DimensionMismatch(
            f"monomial {monomial} has degree {sum(monomial)}, manifold has {p.complex_dim}")
    tc = total_chern(p)
    acc = CohClass.one(p.dims)
    for idx in monomial:
        acc = acc * tc.homogeneous(idx)
    return acc.top_coefficient()


def chern_monomials_with_c1(dim: int):
    """Partitions of ``dim`` containing a part 1, in the paper's display order.

    Order: c1^dim first, then by decreasing largest part (c1*c3 before
    c1^2*c2 in dimension 4, matching the constraint-system rows).
    """
    parts = []

    def rec(rem, mx, cur):
        if rem == 0:
            parts.append(tuple(cur))
            return
        for p in range(min(rem, mx), 0, -1):
            cur.append(p)
            rec(rem - p, p, cur)
            cur.pop()

    rec(dim, dim, [])
    keep = [p for p in parts if 1 in p]
    keep.sort(key=lambda p: (len([x for x in p if x == 1]) != len(p), -max(p), p))
    # c1^dim (all ones) sorts first, then larger top parts
    return keep


def monomial_label(mono) -> str:
    from collections import Counter
    out = []
    for idx, mult in sorted(Counter(mono).items()):
        out.append(f"c{idx}" + (f"^{mult}" if mult > 1 else ""))
    return "*".join(out)


class IntMatrix:
    """Dense arbitrary-precision integer matrix."""

    def __init__(self, rows):
        self.rows = [list(map(int, r)) for r in rows]
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise UsageError("ragged matrix")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __repr__(self):
        return f"IntMatrix({self.rows})"


def su_constraint_system(basis, dim) -> IntMatrix:
    """One row per Chern monomial divisible by c1, one column per basis manifold."""
    for p in basis:
        if p.complex_dim != dim:
            raise DimensionMismatch(f"{p} has dimension {p.complex_dim}, expected {dim}")
    rows = []
    for mono in chern_monomials_with_c1(dim):
        rows.append([chern_number(p, mono) for p in basis])
    return IntMatrix(rows)


def integer_reduce(m: IntMatrix) -> IntMatrix:
    """Hermite-style row echelon form over Z (unimodular row operations only).

    Canonical: positive pivots, entries above a pivot reduced into
    [0, pivot); zero rows dropped.  Row space (over Q and over Z) is
    preserved, which is what the golden comparison asserts.
    """
    rows = [r[:] for r in m.rows]
    nrows = len(rows)
    ncols = m.shape[1]
    r = 0
    for c in range(ncols):
        # find pivot: gcd-reduce column c below row r
        while True:
            nz = [i for i in range(r, nrows) if rows[i][c] != 0]
            if not nz:
                break
            if len(nz) == 1:
                i = nz[0]
                rows[r], rows[i] = rows[i], rows[r]
                break
            nz.sort(key=lambda i: abs(rows[i][c]))
            i0 = nz[0]
            for i in nz[1:]:
                q = rows[i][c] // rows[i0][c]
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[i0])]
        if r < nrows and rows[r][c] != 0:
            if rows[r][c] < 0:
                rows[r] = [-a for a in rows[r]]
            piv = rows[r][c]
            for i in range(r):
                q = rows[i][c] // piv
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
            r += 1
            if r == nrows:
                break
    out = [row for row in rows[:r] if any(row)]
    return IntMatrix(out)


def rref(rows):
    """Reduced row echelon form over Q; returns (rref_rows, pivot_columns)."""
    rows = [[Fraction(a) for a in r] for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return [row for row in rows if any(row)], pivots


def nullspace_rational(m: IntMatrix):
    """Basis of the rational kernel {v : m v = 0}, from the RREF free columns."""
    if not m.rows:
        raise UsageError("empty matrix")
    ncols = m.shape[1]
    red, pivots = rref(m.rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def in_span(vectors, v):
    """Exact membership of v in the rational span of ``vectors``."""
    if not vectors:
        return all(Fraction(a) == 0 for a in v)
    red, pivots = rref(vectors)
    w = [Fraction(a) for a in v]
    for row, pc in zip(red, pivots):
        if w[pc] != 0:
            f = w[pc]
            w = [a - f * b for a, b in zip(w, row)]
    return all(a == 0 for a in w)


def same_row_space(a_rows, b_rows) -> bool:
    return all(in_span(b_rows, r) for r in a_rows) and all(in_span(a_rows, r) for r in b_rows)


def matvec(m: IntMatrix, v):
    return [sum(Fraction(a) * Fraction(x) for a, x in zip(row, v)) for row in m.rows]


def todd_t4(c1_4, c1_c3, c1sq_c2, c2_sq, c4) -> Fraction:
    """Degree-8 Todd coefficient (-c4 + c3 c1 + 3 c2^2 + 4 c2 c1^2 - c1^4)/720."""
    return (Fraction(-1) * c4 + Fraction(c1_c3) + 3 * Fraction(c2_sq)
            + 4 * Fraction(c1sq_c2) - Fraction(c1_4)) / 720


def paper_dim8_basis():
    return [ProjProduct(d) for d in [(4,), (1, 3), (2, 2), (1, 1, 1, 1), (1, 1, 2)]]

"""Exact linear algebra: GF(2) bitset matrices, integer Smith normal form,
and cohomology of integer chain complexes over Z, Q and Z_q.

GF(2) matrices are lists of int bitmasks (bit j = column j).  Integer
matrices are dense lists of lists of Python ints, so intermediate entries
never overflow.  Finite-coefficient cohomology is computed exactly from
an integer lattice presentation, independently of any universal-coefficient
shortcut; the UCT prediction is available separately as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Sequence


class DifferentialNotSquareZero(Exception):
    pass


class NonSingularityViolation(Exception):
    pass


# ---------------------------------------------------------------------------
# GF(2) rows-as-bitmasks
# ---------------------------------------------------------------------------

def gf2_rref(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = list(rows)
    pivots: list[int] = []
    row_idx = 0
    for col in range(ncols):
        pivot = None
        for r in range(row_idx, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and ((work[r] >> col) & 1):
                work[r] ^= work[row_idx]
        pivots.append(col)
        row_idx += 1
        if row_idx == len(work):
            break
    return work[:row_idx], pivots


def gf2_rank(rows: Sequence[int], ncols: int) -> int:
    return len(gf2_rref(rows, ncols)[1])


def gf2_kernel_basis(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {x : A x = 0}, one vector per free column, ascending."""
    rref, pivots = gf2_rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for i, p in enumerate(pivots):
            if (rref[i] >> free) & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


def gf2_solve(rows: Sequence[int], ncols: int, rhs: Sequence[int]) -> int | None:
    """One solution of A x = b (free variables zero), or None if inconsistent.

    `rows` are the bitmask rows of A, `rhs` one bit per row.
    """
    aug = [row | ((rhs[i] & 1) << ncols) for i, row in enumerate(rows)]
    rref, pivots = gf2_rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = 0
    for i, p in enumerate(pivots):
        if (rref[i] >> ncols) & 1:
            x |= 1 << p
    return x


def mask_of(vertices: Iterable[int]) -> int:
    """Subset of [m] -> bitmask, vertex v <-> bit v-1."""
    mask = 0
    for v in vertices:
        mask |= 1 << (v - 1)
    return mask


def set_of(mask: int) -> frozenset[int]:
    out = []
    v = 1
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


@dataclass(frozen=True)
class CharMatrix:
    """An n x m matrix over GF(2), rows stored as bitmasks (vertex v <-> bit v-1)."""

    n: int
    m: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n != len(self.rows):
            raise ValueError("row count mismatch")
        for r in self.rows:
            if r < 0 or r >> self.m:
                raise ValueError("row has bits outside the m columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "CharMatrix":
        n = len(rows)
        m = len(rows[0]) if rows else 0
        masks = []
        for row in rows:
            if len(row) != m:
                raise ValueError("ragged rows")
            masks.append(sum((1 << j) for j, e in enumerate(row) if e % 2))
        return cls(n, m, tuple(masks))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column_mask(self, v: int) -> int:
        """Column of vertex v as a bitmask over the n rows."""
        return sum(((self.rows[i] >> (v - 1)) & 1) << i for i in range(self.n))

    def rank(self) -> int:
        return gf2_rank(self.rows, self.m)

    def kernel_basis(self) -> list[frozenset[int]]:
        return [set_of(v) for v in gf2_kernel_basis(self.rows, self.m)]

    def kernel_elements(self) -> list[frozenset[int]]:
        """All of ker, ordered by bitmask value (starts with the empty set)."""
        return [set_of(v) for v in _span(gf2_kernel_basis(self.rows, self.m))]

    def row_space(self) -> list[frozenset[int]]:
        """All 2^rank row-space elements, ordered by bitmask value."""
        basis, _ = gf2_rref(self.rows, self.m)
        return [set_of(v) for v in _span(basis)]

    def is_nonsingular_over(self, faces: Iterable[Iterable[int]]) -> bool:
        """Columns indexed by each face are linearly independent over GF(2)."""
        for face in faces:
            cols = [self.column_mask(v) for v in face]
            if gf2_rank(cols, self.n) != len(cols):
                return False
        return True


def _span(basis: Sequence[int]) -> list[int]:
    vecs = [0]
    for b in basis:
        vecs += [v ^ b for v in vecs]
    return sorted(vecs)


# ---------------------------------------------------------------------------
# Integer matrices and Smith normal form
# ---------------------------------------------------------------------------

Matrix = list[list[int]]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def identity(k: int) -> Matrix:
    out = zeros(k, k)
    for i in range(k):
        out[i][i] = 1
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            v = ai[k]
            if v:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += v * bk[j]
    return out


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [[a[i][j] for i in range(len(a))] for j in range(len(a[0]))]


def mat_vec(a: Matrix, x: Sequence[int]) -> list[int]:
    return [sum(row[j] * x[j] for j in range(len(x)) if x[j]) for row in a]


@dataclass
class SmithNormalForm:
    """U @ A @ V = diag(factors, 0...) with U, V unimodular; A = U_inv @ D @ V_inv."""

    factors: list[int]
    shape: tuple[int, int]
    U: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.factors)

    def diagonal_matrix(self) -> Matrix:
        r, c = self.shape
        d = zeros(r, c)
        for i, f in enumerate(self.factors):
            d[i][i] = f
        return d


def smith_normal_form(a: Matrix) -> SmithNormalForm:
    """Smith normal form with unimodular transforms and their inverses.

    Pivot rule: smallest nonzero absolute value, ties by lowest row then
    column index, which keeps intermediate entries small and the output
    deterministic.
    """
    rows = len(a)
    cols = len(a[0]) if a else 0
    d = [list(r) for r in a]
    u, u_inv = identity(rows), identity(rows)
    v, v_inv = identity(cols), identity(cols)

    def row_swap(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]
        for r in range(rows):
            u_inv[r][i], u_inv[r][k] = u_inv[r][k], u_inv[r][i]

    def row_add(i, k, q):
        # row_i += q * row_k
        di, dk = d[i], d[k]
        for j in range(cols):
            if dk[j]:
                di[j] += q * dk[j]
        ui, uk = u[i], u[k]
        for j in range(rows):
            if uk[j]:
                ui[j] += q * uk[j]
        for r in range(rows):
            if u_inv[r][i]:
                u_inv[r][k] -= q * u_inv[r][i]

    def row_neg(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for r in range(rows):
            u_inv[r][i] = -u_inv[r][i]

    def col_swap(j, k):
        for r in range(rows):
            d[r][j], d[r][k] = d[r][k], d[r][j]
        for r in range(cols):
            v[r][j], v[r][k] = v[r][k], v[r][j]
        v_inv[j], v_inv[k] = v_inv[k], v_inv[j]

    def col_add(j, k, q):
        # col_j += q * col_k
        for r in range(rows):
            if d[r][k]:
                d[r][j] += q * d[r][k]
        for r in range(cols):
            if v[r][k]:
                v[r][j] += q * v[r][k]
        vk, vj = v_inv[k], v_inv[j]
        for c in range(cols):
            if vj[c]:
                vk[c] -= q * vj[c]

    s = 0
    while s < rows and s < cols:
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                val = abs(d[i][j])
                if val and (best is None or val < best[0]):
                    best = (val, i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != s:
            row_swap(s, pi)
        if pj != s:
            col_swap(s, pj)

        while True:
            if d[s][s] < 0:
                row_neg(s)
            p = d[s][s]
            moved = False
            for i in range(s + 1, rows):
                if d[i][s]:
                    q = d[i][s] // p
                    if q:
                        row_add(i, s, -q)
                    if d[i][s]:  # 0 < remainder < p: better pivot
                        row_swap(s, i)
                        moved = True
                        break
            if moved:
                continue
            for j in range(s + 1, cols):
                if d[s][j]:
                    q = d[s][j] // p
                    if q:
                        col_add(j, s, -q)
                    if d[s][j]:
                        col_swap(s, j)
                        moved = True
                        break
            if moved:
                continue
            # row s and column s are clear; enforce divisibility of the rest
            bad = None
            for i in range(s + 1, rows):
                for j in range(s + 1, cols):
                    if d[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(s, bad, 1)
        s += 1

    factors = [d[i][i] for i in range(s) if d[i][i]]
    for i in range(len(factors) - 1):
        assert factors[i + 1] % factors[i] == 0
    return SmithNormalForm(factors, (rows, cols), u, v, u_inv, v_inv)


def integer_rank(a: Matrix) -> int:
    return smith_normal_form(a).rank


# ---------------------------------------------------------------------------
# Abelian groups and graded groups
# ---------------------------------------------------------------------------

def prime_power_factors(t: int) -> list[int]:
    """Split t >= 2 into its prime-power parts, e.g. 12 -> [3, 4]."""
    out = []
    p = 2
    while p * p <= t:
        if t % p == 0:
            q = 1
            while t % p == 0:
                q *= p
                t //= p
            out.append(q)
        p += 1
    if t > 1:
        out.append(t)
    return sorted(out)


@dataclass(frozen=True)
class AbelianGroup:
    """Z^rank + a multiset of prime-power cyclic summands, sorted."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    @classmethod
    def from_invariant_factors(cls, rank: int, factors: Iterable[int]) -> "AbelianGroup":
        parts: list[int] = []
        for f in factors:
            if f > 1:
                parts.extend(prime_power_factors(f))
        return cls(rank, tuple(sorted(parts)))

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def order(self) -> int | None:
        """Cardinality; None when infinite."""
        if self.rank:
            return None
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def torsion_count(self, p: int = 2, min_order: int = 2) -> int:
        """Number of p-primary summands of order >= min_order."""
        return sum(1 for t in self.torsion if t % p == 0 and t >= min_order)

    def odd_torsion(self) -> tuple[int, ...]:
        return tuple(t for t in self.torsion if t % 2)

    def two_torsion(self) -> tuple[int, ...]:
        return tuple(t for t in self.torsion if t % 2 == 0)

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append("Z^%d" % self.rank)
        parts.extend("Z_%d" % t for t in self.torsion)
        return " + ".join(parts) if parts else "0"


ZERO_GROUP = AbelianGroup()


@dataclass(frozen=True)
class GradedGroup:
    """Finitely many nonzero degrees; stored sorted with zero entries dropped."""

    groups: tuple[tuple[int, AbelianGroup], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, AbelianGroup]) -> "GradedGroup":
        items = tuple(sorted((d, g) for d, g in mapping.items() if not g.is_zero()))
        return cls(items)

    def group(self, degree: int) -> AbelianGroup:
        for d, g in self.groups:
            if d == degree:
                return g
        return ZERO_GROUP

    def degrees(self) -> list[int]:
        return [d for d, _ in self.groups]

    def rank(self, degree: int) -> int:
        return self.group(degree).rank

    def shift(self, offset: int) -> "GradedGroup":
        return GradedGroup(tuple((d + offset, g) for d, g in self.groups))

    def total_rank(self) -> int:
        return sum(g.rank for _, g in self.groups)

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join("H^%d = %s" % (d, g) for d, g in self.groups)


# ---------------------------------------------------------------------------
# Chain complexes and cohomology
# ---------------------------------------------------------------------------

class ChainComplex:
    """Free Z-complex with labeled bases; boundary maps degree k -> k-1.

    boundary[k][i][j] is the coefficient of basis[k-1][i] in the boundary of
    basis[k][j].  Missing maps are zero.
    """

    def __init__(self, basis: Mapping[int, Sequence], boundary: Mapping[int, Matrix]):
        self.basis = {k: list(v) for k, v in basis.items()}
        self.boundary = {k: m for k, m in boundary.items()}
        for k, mat in self.boundary.items():
            rows = len(self.basis.get(k - 1, []))
            cols = len(self.basis.get(k, []))
            if len(mat) != rows or (mat and any(len(r) != cols for r in mat)):
                raise ValueError("boundary matrix shape mismatch in degree %d" % k)

    def degrees(self) -> list[int]:
        return sorted(k for k, b in self.basis.items() if b)

    def dim(self, k: int) -> int:
        return len(self.basis.get(k, []))

    def boundary_matrix(self, k: int) -> Matrix:
        mat = self.boundary.get(k)
        if mat is None:
            return zeros(self.dim(k - 1), self.dim(k))
        return mat

    def check_square_zero(self) -> None:
        for k in self.degrees():
            a = self.boundary_matrix(k)
            b = self.boundary_matrix(k + 1)
            if a and b and b[0]:
                comp = mat_mul(a, b)
                if any(any(row) for row in comp):
                    raise DifferentialNotSquareZero("d.d != 0 out of degree %d" % (k + 1))

    def coboundary_apply(self, k: int, vec: Sequence[int]) -> list[int]:
        """Apply the dual map C^k -> C^{k+1}, i.e. transpose of boundary(k+1)."""
        mat = self.boundary_matrix(k + 1)
        return [sum(mat[i][j] * vec[i] for i in range(len(vec)) if vec[i])
                for j in range(self.dim(k + 1))]


def _mod_q_summands(a_t: Matrix, b_t: Matrix, n_k: int, q: int) -> list[int]:
    """Cyclic orders of ker(b_t mod q) / im(a_t mod q) inside (Z_q)^n_k.

    a_t is the incoming coboundary (n_k columns of image generators given as
    an n_k x n_{k-1} matrix), b_t the outgoing one (n_{k+1} x n_k).  Exact
    integer lattice computation: the kernel lattice L is read off from the
    Smith form of b_t, the image lattice (plus q Z^n_k) is expressed in
    L-coordinates, and the quotient is the Smith form of that expression.
    """
    if n_k == 0:
        return []
    if b_t:
        snf_b = smith_normal_form(b_t)
        v, v_inv = snf_b.V, snf_b.V_inv
        diag = snf_b.factors + [0] * (n_k - snf_b.rank)
    else:
        v, v_inv = identity(n_k), identity(n_k)
        diag = [0] * n_k
    t = [q // gcd(dd, q) for dd in diag]
    # generators of the image-plus-q lattice, in ambient coordinates
    gens: list[list[int]] = []
    cols_a = len(a_t[0]) if a_t else 0
    for j in range(cols_a):
        gens.append([a_t[i][j] for i in range(n_k)])
    for i in range(n_k):
        e = [0] * n_k
        e[i] = q
        gens.append(e)
    # rewrite in the kernel-lattice basis: x = V diag(t) c  =>  c = diag(1/t) V^-1 x
    pres = zeros(n_k, len(gens))
    for j, g in enumerate(gens):
        w = mat_vec(v_inv, g)
        for i in range(n_k):
            quot, rem = divmod(w[i], t[i])
            if rem:
                raise ArithmeticError("generator not in the kernel lattice")
            pres[i][j] = quot
    snf_c = smith_normal_form(pres)
    if snf_c.rank != n_k:
        raise ArithmeticError("finite quotient expected")
    orders = [c for c in snf_c.factors if c > 1]
    for c in orders:
        assert q % c == 0
    return orders


def cohomology(complex_: ChainComplex, coefficients="Z") -> GradedGroup:
    """Cohomology of Hom(C, R) for R = Z ("Z"), Q ("Q") or Z_q (int q >= 2).

    Over Z the result is rank plus prime-power torsion per degree; over a
    finite Z_q it is the multiset of prime-power cyclic summands (rank 0).
    """
    complex_.check_square_zero()
    if isinstance(coefficients, int) and coefficients < 2:
        raise ValueError("modulus must be >= 2")
    degs = complex_.degrees()
    out: dict[int, AbelianGroup] = {}
    snf_cache: dict[int, SmithNormalForm] = {}

    def snf_of(k: int) -> SmithNormalForm:
        if k not in snf_cache:
            snf_cache[k] = smith_normal_form(complex_.boundary_matrix(k))
        return snf_cache[k]

    for k in degs:
        n_k = complex_.dim(k)
        if coefficients == "Z":
            rank = n_k - snf_of(k).rank - snf_of(k + 1).rank
            out[k] = AbelianGroup.from_invariant_factors(
                rank, [f for f in snf_of(k).factors if f > 1])
        elif coefficients == "Q":
            rank = n_k - snf_of(k).rank - snf_of(k + 1).rank
            out[k] = AbelianGroup(rank)
        else:
            q = int(coefficients)
            a_t = transpose(complex_.boundary_matrix(k))      # incoming coboundary
            b_t = transpose(complex_.boundary_matrix(k + 1))  # outgoing coboundary
            orders = _mod_q_summands(a_t, b_t, n_k, q)
            parts: list[int] = []
            for c in orders:
                parts.extend(prime_power_factors(c))
            out[k] = AbelianGroup(0, tuple(sorted(parts)))
    return GradedGroup.of(out)


def uct_prediction(integral: GradedGroup, q: int) -> GradedGroup:
    """Mod-q cohomology predicted by universal coefficients from H^*(C; Z):
    H^k(C; Z_q) = H^k tensor Z_q + Tor(H^{k+1}, Z_q)."""
    degs = set(integral.degrees()) | {d - 1 for d in integral.degrees()}
    out = {}
    for k in sorted(degs):
        parts: list[int] = []
        g = integral.group(k)
        parts.extend([q] * g.rank)
        for t in g.torsion:
            d = gcd(t, q)
            if d > 1:
                parts.append(d)
        for t in integral.group(k + 1).torsion:
            d = gcd(t, q)
            if d > 1:
                parts.append(d)
        split: list[int] = []
        for p in parts:
            split.extend(prime_power_factors(p))
        out[k] = AbelianGroup(0, tuple(sorted(split)))
    return GradedGroup.of(out)

"""Cubical cell model of the real moment-angle complex and its quotient:
cells, the sign action of GF(2) vectors, canonical representatives, the
quotient chain complex (the brute-force cohomology oracle), aggregate
cochain words, and the transfer-divisibility computation."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable

from .linalg import (CharMatrix, ChainComplex, GradedGroup,
                     NonSingularityViolation, cohomology, gf2_solve,
                     gf2_kernel_basis, mask_of, set_of)
from .shelling import Shelling, first_containing_facet
from .simplicial import SimplicialComplex, face_key


class NoSolution(Exception):
    pass


class DivisibilityFailure(Exception):
    pass


@dataclass(frozen=True)
class CubicalCell:
    """A cell of the m-cube: interval coordinates, coordinates fixed at 1,
    and coordinates fixed at 0; the three sets partition [m]."""

    sigma: frozenset[int]
    tau_plus: frozenset[int]
    tau_minus: frozenset[int]

    @property
    def dim(self) -> int:
        return len(self.sigma)

    def sort_key(self) -> tuple:
        return (face_key(self.sigma), face_key(self.tau_minus))

    def __repr__(self) -> str:
        parts = []
        for v in sorted(self.sigma | self.tau_plus | self.tau_minus):
            parts.append("I" if v in self.sigma else ("1" if v in self.tau_plus else "0"))
        return "x".join(parts)


def make_cell(m: int, sigma: Iterable[int], tau_minus: Iterable[int]) -> CubicalCell:
    s = frozenset(sigma)
    t0 = frozenset(tau_minus)
    if s & t0 or not (s | t0) <= set(range(1, m + 1)):
        raise ValueError("sigma and tau_minus must be disjoint subsets of [m]")
    t1 = frozenset(range(1, m + 1)) - s - t0
    return CubicalCell(s, t1, t0)


def _subsets(vs: list[int]):
    for bits in range(1 << len(vs)):
        yield frozenset(v for i, v in enumerate(vs) if (bits >> i) & 1)


def enumerate_cells(k: SimplicialComplex, m: int | None = None) -> list[CubicalCell]:
    """All cells with interval support a face of K; count is
    sum over faces of 2^(m - |face|)."""
    if m is None:
        m = max(k.vertices, default=0)
    cells = []
    for sigma in k.faces():
        rest = sorted(set(range(1, m + 1)) - sigma)
        for t0 in _subsets(rest):
            cells.append(make_cell(m, sigma, t0))
    cells.sort(key=CubicalCell.sort_key)
    return cells


CellSum = dict[CubicalCell, int]


def _add_term(target: CellSum, cell: CubicalCell, coeff: int) -> None:
    new = target.get(cell, 0) + coeff
    if new:
        target[cell] = new
    else:
        target.pop(cell, None)


def boundary_cell(e: CubicalCell) -> CellSum:
    """Tensor-orientation boundary: sum over interval coordinates i of
    (-1)^(number of interval coordinates below i) (front face - back face)."""
    out: CellSum = {}
    ordered = sorted(e.sigma)
    for pos, i in enumerate(ordered):
        sign = (-1) ** pos
        front = CubicalCell(e.sigma - {i}, e.tau_plus | {i}, e.tau_minus)
        back = CubicalCell(e.sigma - {i}, e.tau_plus, e.tau_minus | {i})
        _add_term(out, front, sign)
        _add_term(out, back, -sign)
    return out


def act(g: Iterable[int], e: CubicalCell) -> tuple[int, CubicalCell]:
    """The GF(2) vector g flips the 0/1 coordinates on its support and
    reverses each interval coordinate it touches; returns (sign, g.e)."""
    gs = frozenset(g)
    sign = (-1) ** len(e.sigma & gs)
    t1 = (e.tau_plus - gs) | (e.tau_minus & gs)
    t0 = (e.tau_minus - gs) | (e.tau_plus & gs)
    return sign, CubicalCell(e.sigma, t1, t0)


def is_canonical(e: CubicalCell, shelling: Shelling) -> bool:
    return e.tau_minus <= first_containing_facet(shelling, e.sigma)


def canonicalize(e: CubicalCell, lam: CharMatrix,
                 shelling: Shelling) -> tuple[frozenset[int], CubicalCell, int]:
    """The unique kernel element g with g.e canonical, the canonical cell,
    and the orientation sign of the move."""
    f = first_containing_facet(shelling, e.sigma)
    target = e.tau_minus - f
    kernel = gf2_kernel_basis(lam.rows, lam.m)
    outside = sorted(set(range(1, lam.m + 1)) - f)
    # express: combination of kernel vectors whose restriction off f is target
    rows = [sum(((kv >> (v - 1)) & 1) << i for i, kv in enumerate(kernel))
            for v in outside]
    rhs = [1 if v in target else 0 for v in outside]
    combo = gf2_solve(rows, len(kernel), rhs)
    if combo is None:
        raise NoSolution("no kernel element moves the cell to canonical form")
    g_mask = 0
    for i, kv in enumerate(kernel):
        if (combo >> i) & 1:
            g_mask ^= kv
    g = set_of(g_mask)
    sign, moved = act(g, e)
    assert is_canonical(moved, shelling)
    return g, moved, sign


def canonical_cells(k: SimplicialComplex, lam: CharMatrix,
                    shelling: Shelling) -> list[CubicalCell]:
    cells = []
    for sigma in k.faces():
        f = first_containing_facet(shelling, sigma)
        for t0 in _subsets(sorted(f - sigma)):
            cells.append(make_cell(lam.m, sigma, t0))
    cells.sort(key=CubicalCell.sort_key)
    return cells


def quotient_complex(k: SimplicialComplex, lam: CharMatrix,
                     shelling: Shelling) -> ChainComplex:
    """Cellular chain complex of the quotient space on canonical cells; the
    boundary of a canonical cell canonicalizes every face term with its sign."""
    if not lam.is_nonsingular_over(k.facets):
        raise NonSingularityViolation("matrix is singular over some face")
    cells = canonical_cells(k, lam, shelling)
    by_deg: dict[int, list[CubicalCell]] = {}
    for c in cells:
        by_deg.setdefault(c.dim, []).append(c)
    basis = {d: cs for d, cs in sorted(by_deg.items())}
    index = {d: {c: i for i, c in enumerate(cs)} for d, cs in basis.items()}
    cache: dict[CubicalCell, tuple[CubicalCell, int]] = {}

    def to_canonical(e: CubicalCell) -> tuple[CubicalCell, int]:
        if e not in cache:
            _, moved, sign = canonicalize(e, lam, shelling)
            cache[e] = (moved, sign)
        return cache[e]

    boundary: dict[int, list[list[int]]] = {}
    for d, cs in basis.items():
        if d - 1 not in basis:
            continue
        mat = [[0] * len(cs) for _ in basis[d - 1]]
        for j, cell in enumerate(cs):
            for face, coeff in boundary_cell(cell).items():
                canon, sign = to_canonical(face)
                mat[index[d - 1][canon]][j] += coeff * sign
        boundary[d] = mat
    return ChainComplex(basis, boundary)


def oracle_cohomology(k: SimplicialComplex, lam: CharMatrix,
                      shelling: Shelling, coefficients="Z") -> GradedGroup:
    """Ground truth for every formula path: dualize the quotient complex and
    run the exact Smith-normal-form computation."""
    return cohomology(quotient_complex(k, lam, shelling), coefficients)


# ---------------------------------------------------------------------------
# Aggregate cochain words and the transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CochainWord:
    """The cochain with interval duals on sigma, 1-duals on tau, and the sum
    of both vertex duals elsewhere; the empty word is the void word."""

    sigma: frozenset[int]
    tau: frozenset[int]

    def __post_init__(self):
        if self.sigma & self.tau:
            raise ValueError("sigma and tau must be disjoint")


def expand_word(w: CochainWord, m: int) -> CellSum:
    """Dual-cell expansion: one term per choice of 0-coordinates outside
    sigma and tau, 2^(m - |sigma| - |tau|) in total, all with coefficient 1."""
    rest = sorted(set(range(1, m + 1)) - w.sigma - w.tau)
    return {make_cell(m, w.sigma, t0): 1 for t0 in _subsets(rest)}


def evaluate_word(w: CochainWord, e: CubicalCell) -> int:
    return 1 if e.sigma == w.sigma and w.tau <= e.tau_plus else 0


def cochain_coboundary(w: CochainWord, k: SimplicialComplex) -> dict[CochainWord, int]:
    """d(u_sigma t_tau) = sum over i in tau with sigma+{i} a face of
    (-1)^(sigma below i) u_{sigma+i} t_{tau-i}."""
    out: dict[CochainWord, int] = {}
    for i in sorted(w.tau):
        if not k.has_face(w.sigma | {i}):
            continue
        sign = (-1) ** sum(1 for j in w.sigma if j < i)
        word = CochainWord(w.sigma | {i}, w.tau - {i})
        out[word] = out.get(word, 0) + sign
    return {k_: v for k_, v in out.items() if v}


def transfer_cochain(w: CochainWord, k: SimplicialComplex, lam: CharMatrix,
                     shelling: Shelling) -> CellSum:
    """T*(w) as a cochain on the quotient: the coefficient on a canonical cell
    sums the evaluations of w over the whole kernel orbit of that cell."""
    kernel = lam.kernel_elements()
    out: CellSum = {}
    for e in canonical_cells(k, lam, shelling):
        if e.sigma != w.sigma:
            continue
        total = 0
        for g in kernel:
            sign, moved = act(g, e)
            total += sign * evaluate_word(w, moved)
        if total:
            out[e] = total
    return out


@dataclass
class TransferResult:
    word: CochainWord
    cochain: CellSum
    mu: int
    quotient: CellSum
    primitive_identity: bool | None  # None unless omega meets f(sigma) in sigma


def transfer_divisibility(sigma: Iterable[int], omega: Iterable[int],
                          k: SimplicialComplex, lam: CharMatrix,
                          shelling: Shelling) -> TransferResult:
    """Check that T*(u_sigma t_{omega-sigma}) is divisible by 2^mu with
    mu = max(m - n + |sigma| - |omega|, 0), and, when omega meets f(sigma)
    exactly in sigma, that the quotient is the primitive transfer cochain
    T*(u_sigma t_{[m]-f(sigma)})."""
    s = frozenset(sigma)
    w_set = frozenset(omega)
    if not k.has_face(s) or not s <= w_set:
        raise ValueError("sigma must be a face of K contained in omega")
    m, n = lam.m, lam.n
    mu = max(m - n + len(s) - len(w_set), 0)
    word = CochainWord(s, w_set - s)
    coch = transfer_cochain(word, k, lam, shelling)
    scale = 1 << mu
    if any(v % scale for v in coch.values()):
        raise DivisibilityFailure(
            "transfer not divisible by 2^%d for sigma=%s omega=%s"
            % (mu, sorted(s), sorted(w_set)))
    quotient = {c: v // scale for c, v in coch.items()}
    primitive_identity = None
    f = first_containing_facet(shelling, s)
    if w_set & f == s:
        prim_word = CochainWord(s, frozenset(range(1, m + 1)) - f)
        prim = transfer_cochain(prim_word, k, lam, shelling)
        content = 0
        for v in prim.values():
            content = gcd(content, v)
        primitive_identity = (quotient == prim) and content == 1
    return TransferResult(word, coch, mu, quotient, primitive_identity)

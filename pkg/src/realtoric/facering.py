"""Stanley-Reisner ring over GF(2): monomial bases, the linear system of
parameters carried by a characteristic matrix, reduction onto the shelling
quotient basis, and the first Bockstein differential via the Cartan formula."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .linalg import CharMatrix, gf2_rank, gf2_solve
from .shelling import Shelling
from .simplicial import SimplicialComplex, face_key


class DimensionMismatch(Exception):
    pass


class ReductionFailure(Exception):
    pass


Monomial = tuple[int, ...]  # exponent vector of length m
Element = frozenset[Monomial]  # GF(2) combination


def _support(mon: Monomial) -> frozenset[int]:
    return frozenset(i + 1 for i, e in enumerate(mon) if e)


def monomial_of(face: Iterable[int], m: int) -> Monomial:
    exps = [0] * m
    for v in face:
        exps[v - 1] = 1
    return tuple(exps)


def _ambient_m(k: SimplicialComplex) -> int:
    return max(k.vertices, default=0)


def lsop_check(k: SimplicialComplex, lam: CharMatrix) -> bool:
    """The rows of lam cut out a linear system of parameters iff the columns
    over every facet are independent, i.e. iff lam is non-singular over K."""
    if not k.is_pure():
        raise DimensionMismatch("complex must be pure")
    if lam.n != k.dim + 1 or lam.m < _ambient_m(k):
        raise DimensionMismatch("matrix shape does not fit the complex")
    return lam.is_nonsingular_over(k.facets)


def monomial_basis(k: SimplicialComplex, degree: int) -> list[Monomial]:
    """All exponent vectors of the given total degree whose support is a face."""
    m = _ambient_m(k)
    if degree == 0:
        return [tuple([0] * m)]
    out: list[Monomial] = []
    for face in k.faces():
        if not face or len(face) > degree:
            continue
        verts = sorted(face)
        for comp in _compositions(degree, len(verts)):
            exps = [0] * m
            for v, e in zip(verts, comp):
                exps[v - 1] = e
            out.append(tuple(exps))
    out.sort()
    return out


def _compositions(total: int, parts: int):
    """All tuples of `parts` positive integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def multiply(a: Monomial, b: Monomial, k: SimplicialComplex) -> Monomial | None:
    prod = tuple(x + y for x, y in zip(a, b))
    if not k.has_face(_support(prod)):
        return None
    return prod


def element_times_monomial(elt: Element, mon: Monomial,
                           k: SimplicialComplex) -> Element:
    out: set[Monomial] = set()
    for t in elt:
        p = multiply(t, mon, k)
        if p is not None:
            out ^= {p}
    return frozenset(out)


def lsop_generators(lam: CharMatrix, m: int) -> list[Element]:
    """l_i = sum of x_v over the support of row i."""
    gens = []
    for i in range(lam.n):
        gens.append(frozenset(monomial_of([v], m)
                              for v in range(1, m + 1) if lam.entry(i, v - 1)))
    return gens


def sq1_element(face: frozenset[int], k: SimplicialComplex) -> Element:
    """Sq1 of the square-free monomial of a face: sum over its vertices of
    the monomial with that exponent raised to two (Cartan formula, exponents
    one)."""
    m = _ambient_m(k)
    base = monomial_of(face, m)
    out: set[Monomial] = set()
    for v in sorted(face):
        doubled = list(base)
        doubled[v - 1] = 2
        prod = tuple(doubled)
        if k.has_face(_support(prod)):
            out ^= {prod}
    return frozenset(out)


def _degree_parts(elt: Element) -> dict[int, Element]:
    parts: dict[int, set[Monomial]] = {}
    for mon in elt:
        parts.setdefault(sum(mon), set()).add(mon)
    return {d: frozenset(s) for d, s in parts.items()}


def quotient_basis_reduce(elt: Iterable[Monomial], k: SimplicialComplex,
                          lam: CharMatrix,
                          shelling: Shelling) -> list[frozenset[int]]:
    """Coordinates of a face-ring element in the basis of restriction-face
    monomials modulo the l.s.o.p. ideal; solved degree by degree over GF(2).

    Returns the restriction faces with coefficient one, in shelling order.
    """
    m = _ambient_m(k)
    element = frozenset(t for t in elt if k.has_face(_support(t)))
    by_step = list(shelling.restrictions)
    result: list[frozenset[int]] = []
    for degree, part in sorted(_degree_parts(element).items()):
        basis_faces = [r for r in by_step if len(r) == degree]
        if degree == 0:
            # the only degree-0 monomial is 1 = x_{r(sigma_1)}
            result.extend(basis_faces[:1] if part else [])
            continue
        mons = monomial_basis(k, degree)
        mon_index = {t: i for i, t in enumerate(mons)}
        columns: list[int] = []
        lower = monomial_basis(k, degree - 1)
        for gen in lsop_generators(lam, m):
            for mu in lower:
                col = 0
                for t in element_times_monomial(gen, mu, k):
                    col ^= 1 << mon_index[t]
                columns.append(col)
        for face in basis_faces:
            columns.append(1 << mon_index[monomial_of(face, m)])
        rows = [sum(((col >> i) & 1) << c for c, col in enumerate(columns))
                for i in range(len(mons))]
        rhs = [1 if t in part else 0
               for t in mons]
        solution = gf2_solve(rows, len(columns), rhs)
        if solution is None:
            raise ReductionFailure("element does not reduce onto the basis")
        offset = len(columns) - len(basis_faces)
        for idx, face in enumerate(basis_faces):
            if (solution >> (offset + idx)) & 1:
                result.append(face)
    return result


@dataclass
class Sq1Data:
    """Per-degree matrices of the first Bockstein differential on the
    restriction-face basis; entry [t][j] pairs the degree-(d+1) basis face t
    with the degree-d basis face j."""

    basis_by_degree: dict[int, list[frozenset[int]]]
    matrices: dict[int, list[list[int]]]

    def rank(self, degree: int) -> int:
        mat = self.matrices.get(degree)
        if not mat or not mat[0]:
            return 0
        rows = [sum(bit << j for j, bit in enumerate(r)) for r in mat]
        return gf2_rank(rows, len(mat[0]))


def sq1_matrix(k: SimplicialComplex, lam: CharMatrix,
               shelling: Shelling) -> Sq1Data:
    """d_1 on the quotient basis: reduce Sq1 of each basis monomial."""
    by_degree: dict[int, list[frozenset[int]]] = {}
    for r in shelling.restrictions:
        by_degree.setdefault(len(r), []).append(r)
    matrices: dict[int, list[list[int]]] = {}
    for degree, faces in sorted(by_degree.items()):
        targets = by_degree.get(degree + 1, [])
        mat = [[0] * len(faces) for _ in targets]
        for j, face in enumerate(faces):
            if not face:
                continue  # Sq1 of 1 is 0
            image = quotient_basis_reduce(sq1_element(face, k), k, lam, shelling)
            for t in image:
                mat[targets.index(t)][j] = 1
        matrices[degree] = mat
    return Sq1Data(by_degree, matrices)

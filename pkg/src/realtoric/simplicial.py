"""Simplicial complexes on subsets of [m]: faces, f/h-vectors, full
subcomplexes, links, and the Cohen-Macaulay diagnostic over GF(2)."""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable

from .linalg import AbelianGroup, ChainComplex, GradedGroup, cohomology


class NotPure(Exception):
    pass


def face_key(face: frozenset[int]) -> tuple:
    return (len(face), tuple(sorted(face)))


def format_face(face: Iterable[int]) -> str:
    vs = sorted(face)
    if not vs:
        return "{}"
    return "".join(str(v) for v in vs) if max(vs) <= 9 else \
        "{" + ",".join(str(v) for v in vs) + "}"


class SimplicialComplex:
    """Stored as the antichain of facets; the void complex has facet set {[]}.

    Faces are frozensets of positive integer vertex labels.  A complex built
    from user input on [m] must cover every vertex of [m]; full subcomplexes
    keep the original labels of their vertex set.
    """

    def __init__(self, facets: Iterable[Iterable[int]]):
        fs = {frozenset(f) for f in facets}
        if not fs:
            fs = {frozenset()}
        for a in fs:
            for b in fs:
                if a != b and a <= b:
                    raise ValueError("facets must form an antichain")
            for v in a:
                if not isinstance(v, int) or v < 1:
                    raise ValueError("vertex labels must be positive integers")
        self.facets: tuple[frozenset[int], ...] = tuple(sorted(fs, key=face_key))
        self._faces: tuple[frozenset[int], ...] | None = None

    @classmethod
    def void(cls) -> "SimplicialComplex":
        return cls([[]])

    @classmethod
    def from_faces(cls, faces: Iterable[Iterable[int]]) -> "SimplicialComplex":
        fs = [frozenset(f) for f in faces]
        maximal = [f for f in fs if not any(f < g for g in fs)]
        return cls(maximal if maximal else [[]])

    @property
    def vertices(self) -> tuple[int, ...]:
        seen: set[int] = set()
        for f in self.facets:
            seen |= f
        return tuple(sorted(seen))

    @property
    def is_void(self) -> bool:
        return self.facets == (frozenset(),)

    @property
    def dim(self) -> int:
        return max(len(f) for f in self.facets) - 1

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) == 1

    def faces(self) -> tuple[frozenset[int], ...]:
        """Every face including the empty one, sorted by (cardinality, labels)."""
        if self._faces is None:
            seen: set[frozenset[int]] = set()
            for facet in self.facets:
                lst = sorted(facet)
                for k in range(len(lst) + 1):
                    for c in combinations(lst, k):
                        seen.add(frozenset(c))
            self._faces = tuple(sorted(seen, key=face_key))
        return self._faces

    def has_face(self, sigma: Iterable[int]) -> bool:
        s = frozenset(sigma)
        return any(s <= f for f in self.facets)

    def covers(self, m: int) -> bool:
        if self.is_void:
            return True
        return set(self.vertices) == set(range(1, m + 1))

    def full_subcomplex(self, omega: Iterable[int]) -> "SimplicialComplex":
        """Faces contained in omega, on the vertex set omega (original labels)."""
        w = frozenset(omega)
        if not w:
            return SimplicialComplex.void()
        return SimplicialComplex.from_faces([f & w for f in self.facets])

    def link(self, sigma: Iterable[int]) -> "SimplicialComplex":
        s = frozenset(sigma)
        if not self.has_face(s):
            raise ValueError("link of a non-face")
        return SimplicialComplex.from_faces([f - s for f in self.facets if s <= f])

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(f) + 1) for f in self.faces() if f)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.facets == other.facets

    def __hash__(self) -> int:
        return hash(self.facets)

    def __repr__(self) -> str:
        return "SimplicialComplex(%s)" % (
            ", ".join(format_face(f) for f in self.facets))


def f_vector(k: SimplicialComplex) -> tuple[int, ...]:
    """(f_-1, f_0, ..., f_{dim}) with f_-1 = 1 for the empty face."""
    counts = [0] * (k.dim + 2)
    for face in k.faces():
        counts[len(face)] += 1
    return tuple(counts)


def h_vector(k: SimplicialComplex) -> tuple[int, ...]:
    """h_j = sum_i (-1)^{j-i} C(n-i, j-i) f_{i-1} for a pure (n-1)-complex."""
    if not k.is_pure():
        raise NotPure("h-vector requires a pure complex")
    f = f_vector(k)
    n = k.dim + 1
    return tuple(
        sum((-1) ** (j - i) * comb(n - i, j - i) * f[i] for i in range(j + 1))
        for j in range(n + 1))


def augmented_chain_complex(k: SimplicialComplex) -> ChainComplex:
    """Ordered simplicial chains with the empty face in degree -1."""
    by_deg: dict[int, list[frozenset[int]]] = {}
    for face in k.faces():
        by_deg.setdefault(len(face) - 1, []).append(face)
    basis = {d: sorted(faces, key=face_key) for d, faces in by_deg.items()}
    index = {d: {f: i for i, f in enumerate(faces)} for d, faces in basis.items()}
    boundary: dict[int, list[list[int]]] = {}
    for d, faces in basis.items():
        if d - 1 not in basis:
            continue
        rows = len(basis[d - 1])
        mat = [[0] * len(faces) for _ in range(rows)]
        for j, face in enumerate(faces):
            verts = sorted(face)
            for pos, v in enumerate(verts):
                sub = frozenset(face - {v})
                mat[index[d - 1][sub]][j] += (-1) ** pos
        boundary[d] = mat
    return ChainComplex(basis, boundary)


def reduced_cohomology(k: SimplicialComplex, coefficients="Z") -> GradedGroup:
    return cohomology(augmented_chain_complex(k), coefficients)


def reduced_gf2_dims(k: SimplicialComplex) -> dict[int, int]:
    """dim_{GF(2)} of reduced (co)homology per degree."""
    graded = reduced_cohomology(k, 2)
    return {d: len(graded.group(d).torsion) for d in graded.degrees()}


def reisner_cm_check(k: SimplicialComplex) -> bool:
    """GF(2) Reisner criterion: reduced homology of every link (including the
    complex itself) vanishes below its dimension."""
    if k.is_void:
        raise ValueError("Cohen-Macaulay check needs a nonvoid complex")
    for sigma in k.faces():
        lk = k.link(sigma)
        if lk.is_void:
            continue
        dims = reduced_gf2_dims(lk)
        if any(d < lk.dim and count for d, count in dims.items()):
            return False
    return True

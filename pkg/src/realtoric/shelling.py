"""Shelling verification and search, restriction faces, first containing
facets, and the regular expanding sequences of full subcomplexes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .simplicial import NotPure, SimplicialComplex, face_key


class NotShellingStep(Exception):
    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or "facet %d is not a valid shelling step" % step)


class NonShellable(Exception):
    pass


class FaceNotInComplex(Exception):
    pass


@dataclass(frozen=True)
class Shelling:
    """A facet order with its restriction faces; r(sigma_1) is empty."""

    order: tuple[frozenset[int], ...]
    restrictions: tuple[frozenset[int], ...]

    @property
    def size(self) -> int:
        return len(self.order)

    def restriction_of(self, facet: frozenset[int]) -> frozenset[int]:
        return self.restrictions[self.order.index(facet)]


def _restriction(facet: frozenset[int], earlier: list[frozenset[int]]) -> frozenset[int]:
    # vertices whose opposite wall already lies in the union of earlier facets
    return frozenset(
        v for v in facet if any(facet - {v} <= g for g in earlier))


def _step_ok(facet: frozenset[int], earlier: list[frozenset[int]],
             restriction: frozenset[int]) -> bool:
    # the old part of the facet boundary must be pure of codimension one:
    # some wall is old, and no old facet intersection contains the restriction
    if not restriction:
        return False
    return all(not restriction <= g for g in earlier)


def verify_shelling(k: SimplicialComplex,
                    order: Iterable[Iterable[int]]) -> Shelling:
    """Check a facet order step by step and return it with restrictions."""
    if not k.is_pure():
        raise NotPure("shellings are defined for pure complexes")
    seq = [frozenset(f) for f in order]
    if sorted(seq, key=face_key) != list(k.facets) or len(seq) != len(k.facets):
        raise ValueError("order is not a permutation of the facets")
    restrictions = [frozenset()]
    for j in range(1, len(seq)):
        earlier = seq[:j]
        r = _restriction(seq[j], earlier)
        if not _step_ok(seq[j], earlier, r):
            raise NotShellingStep(j + 1)
        restrictions.append(r)
    return Shelling(tuple(seq), tuple(restrictions))


def find_shelling(k: SimplicialComplex) -> Shelling:
    """Backtracking search over facets in lexicographic order; the first
    completed order wins, so the result is deterministic."""
    if not k.is_pure():
        raise NotPure("shellings are defined for pure complexes")
    facets = sorted(k.facets, key=face_key)
    if len(facets) == 1:
        return Shelling((facets[0],), (frozenset(),))
    chosen: list[frozenset[int]] = []
    dead: set[frozenset[frozenset[int]]] = set()

    def extend() -> bool:
        if len(chosen) == len(facets):
            return True
        state = frozenset(chosen)
        if state in dead:
            return False
        for f in facets:
            if f in state:
                continue
            if chosen:
                r = _restriction(f, chosen)
                if not _step_ok(f, chosen, r):
                    continue
            chosen.append(f)
            if extend():
                return True
            chosen.pop()
        dead.add(state)
        return False

    if not extend():
        raise NonShellable("exhausted all facet orders")
    return verify_shelling(k, chosen)


def first_containing_facet(shelling: Shelling,
                           sigma: Iterable[int]) -> frozenset[int]:
    s = frozenset(sigma)
    for facet in shelling.order:
        if s <= facet:
            return facet
    raise FaceNotInComplex("no facet contains %s" % sorted(s))


@dataclass(frozen=True)
class ExpandingStep:
    face: frozenset[int]         # sigma_j intersect omega
    restriction: frozenset[int]  # empty for the first step of the sequence
    critical: bool
    facet_index: int             # 1-based position j in the shelling


@dataclass(frozen=True)
class ExpandingSequence:
    omega: frozenset[int]
    steps: tuple[ExpandingStep, ...]

    def critical_faces(self) -> list[frozenset[int]]:
        return [s.face for s in self.steps if s.critical]


def expanding_sequence(k: SimplicialComplex, shelling: Shelling,
                       omega: Iterable[int]) -> ExpandingSequence:
    """Regular expanding sequence of K_omega induced by the shelling.

    A shelling step j contributes iff its restriction lies in omega and the
    facet meets omega; the contributed simplex is sigma_j intersect omega with
    restriction r(sigma_j).  The first contributing step is the base simplex
    of the sequence, so its restriction is formally empty and it is never
    critical.
    """
    w = frozenset(omega)
    steps: list[ExpandingStep] = []
    for j, (facet, r) in enumerate(zip(shelling.order, shelling.restrictions), 1):
        face = facet & w
        if not face or not r <= w:
            continue
        if not steps:
            # the base simplex of the sequence: for a valid shelling it is
            # either step 1 (r empty) or a lone vertex equal to its restriction
            assert not r or face == r
            steps.append(ExpandingStep(face, frozenset(), False, j))
        else:
            steps.append(ExpandingStep(face, r, face == r, j))
    return ExpandingSequence(w, tuple(steps))


def critical_faces(seq: ExpandingSequence) -> list[frozenset[int]]:
    return seq.critical_faces()

"""Discrete-Morse machinery for full subcomplexes: the interval matching of
an expanding sequence, the gradient-flow retraction onto critical faces, the
critical chain complex, and the doubled complex computing H^{*+1}(Y; Z)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .linalg import (ChainComplex, CharMatrix, GradedGroup,
                     NonSingularityViolation, cohomology)
from .shelling import ExpandingSequence, Shelling, expanding_sequence
from .simplicial import SimplicialComplex, face_key

Chain = dict[frozenset, int]


@dataclass(frozen=True)
class AcyclicMatching:
    """Pairing (alpha, alpha + {v}) covering every non-critical face of the
    expanding-sequence intervals; unmatched faces are the critical ones.  For
    the void complex the empty face itself is the single critical cell."""

    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]
    critical: tuple[frozenset[int], ...]


def acyclic_matching(seq: ExpandingSequence) -> AcyclicMatching:
    pairs: list[tuple[frozenset[int], frozenset[int]]] = []
    critical: list[frozenset[int]] = []
    for step in seq.steps:
        if step.critical:
            critical.append(step.face)
            continue
        free = sorted(step.face - step.restriction)
        v = free[0]
        rest = [u for u in free if u != v]
        for bits in range(1 << len(rest)):
            alpha = set(step.restriction)
            for i, u in enumerate(rest):
                if (bits >> i) & 1:
                    alpha.add(u)
            a = frozenset(alpha)
            pairs.append((a, a | {v}))
    if not seq.steps:
        critical.append(frozenset())
    pairs.sort(key=lambda p: face_key(p[0]))
    return AcyclicMatching(tuple(pairs), tuple(critical))


def _simplicial_boundary(face: frozenset[int]) -> Chain:
    verts = sorted(face)
    if not verts:
        return {}
    out: Chain = {}
    for pos, v in enumerate(verts):
        out[frozenset(face - {v})] = (-1) ** pos
    return out


def _add(target: Chain, source: Chain, scale: int = 1) -> None:
    for face, coeff in source.items():
        new = target.get(face, 0) + scale * coeff
        if new:
            target[face] = new
        else:
            target.pop(face, None)


class GradientFlow:
    """Stabilized flow of an acyclic matching on the augmented complex.

    V sends an up-matched face alpha to -<d beta, alpha> beta for its partner
    beta; the flow map is 1 + dV + Vd, which stabilizes because matched pairs
    never move to later steps of the sequence.
    """

    def __init__(self, matching: AcyclicMatching):
        self.matching = matching
        self.critical = set(matching.critical)
        self._v: dict[frozenset, tuple[frozenset, int]] = {}
        for alpha, beta in matching.pairs:
            sign = _simplicial_boundary(beta)[alpha]
            self._v[alpha] = (beta, -sign)
        self.faces = sorted(
            {f for p in matching.pairs for f in p} | self.critical, key=face_key)
        self._flow_cache: dict[frozenset, Chain] = {}

    def _apply_v(self, chain: Chain) -> Chain:
        out: Chain = {}
        for face, coeff in chain.items():
            hit = self._v.get(face)
            if hit is not None:
                beta, s = hit
                _add(out, {beta: s * coeff})
        return out

    def _apply_boundary(self, chain: Chain) -> Chain:
        out: Chain = {}
        for face, coeff in chain.items():
            _add(out, _simplicial_boundary(face), coeff)
        return out

    def _flow_once(self, chain: Chain) -> Chain:
        out = dict(chain)
        _add(out, self._apply_boundary(self._apply_v(chain)))
        _add(out, self._apply_v(self._apply_boundary(chain)))
        return out

    def stabilize(self, chain: Chain) -> Chain:
        current = dict(chain)
        for _ in range(len(self.faces) + 2):
            nxt = self._flow_once(current)
            if nxt == current:
                return current
            current = nxt
        raise RuntimeError("gradient flow failed to stabilize")

    def flow_of(self, face: frozenset[int]) -> Chain:
        if face not in self._flow_cache:
            self._flow_cache[face] = self.stabilize({face: 1})
        return self._flow_cache[face]

    def rho(self, chain: Mapping[frozenset, int]) -> Chain:
        """Project a simplicial chain onto the critical complex."""
        out: Chain = {}
        for face, coeff in chain.items():
            stable = self.flow_of(face)
            for f, c in stable.items():
                if f in self.critical:
                    _add(out, {f: c * coeff})
        return out

    def morse_boundary(self, face: frozenset[int]) -> Chain:
        return self.rho(_simplicial_boundary(face))


@dataclass
class MorseComplex:
    """Critical faces with the induced boundary; wraps the flow for rho."""

    complex: ChainComplex
    flow: GradientFlow
    critical: tuple[frozenset[int], ...]

    def rho(self, chain: Mapping[frozenset, int]) -> Chain:
        return self.flow.rho(chain)


def morse_complex(k_omega: SimplicialComplex,
                  matching: AcyclicMatching) -> MorseComplex:
    """Build the critical complex; validates that the matching together with
    its critical faces covers the faces of K_omega exactly once."""
    covered = sorted({f for p in matching.pairs for f in p} |
                     set(matching.critical), key=face_key)
    if covered != list(k_omega.faces()):
        raise ValueError("matching does not partition the faces of the complex")
    if len(covered) != 2 * len(matching.pairs) + len(matching.critical):
        raise ValueError("matching is not a partial involution")
    flow = GradientFlow(matching)
    by_deg: dict[int, list[frozenset[int]]] = {}
    for c in matching.critical:
        by_deg.setdefault(len(c) - 1, []).append(c)
    basis = {d: sorted(faces, key=face_key) for d, faces in by_deg.items()}
    index = {d: {f: i for i, f in enumerate(fs)} for d, fs in basis.items()}
    boundary: dict[int, list[list[int]]] = {}
    for d, faces in basis.items():
        if d - 1 not in basis:
            continue
        mat = [[0] * len(faces) for _ in basis[d - 1]]
        for j, c in enumerate(faces):
            for f, coeff in flow.morse_boundary(c).items():
                mat[index[d - 1][f]][j] = coeff
        boundary[d] = mat
    cx = ChainComplex(basis, boundary)
    cx.check_square_zero()
    return MorseComplex(cx, flow, matching.critical)


def rho(mc: MorseComplex, chain: Mapping[frozenset, int]) -> Chain:
    return mc.rho(chain)


def morse_complex_of(k: SimplicialComplex, shelling: Shelling,
                     omega: Iterable[int]) -> MorseComplex:
    seq = expanding_sequence(k, shelling, omega)
    return morse_complex(k.full_subcomplex(omega), acyclic_matching(seq))


def assemble_critical_complex(
        k: SimplicialComplex, lam: CharMatrix, shelling: Shelling,
        double: bool = True) -> tuple[ChainComplex, dict[frozenset, MorseComplex]]:
    """Direct sum over row-space elements of the critical complexes, with the
    boundary doubled unless double=False.  Basis labels are (omega, face)."""
    if not lam.is_nonsingular_over(k.facets):
        raise NonSingularityViolation("matrix is singular over some face")
    per_omega: dict[frozenset, MorseComplex] = {}
    for omega in lam.row_space():
        per_omega[omega] = morse_complex_of(k, shelling, omega)
    scale = 2 if double else 1
    basis: dict[int, list] = {}
    boundary: dict[int, list[list[int]]] = {}
    omegas = list(per_omega)
    for d in sorted({d for mc in per_omega.values() for d in mc.complex.basis}):
        basis[d] = [(w, c) for w in omegas for c in per_omega[w].complex.basis.get(d, [])]
    for d in basis:
        if d - 1 not in basis:
            continue
        row_index = {lab: i for i, lab in enumerate(basis[d - 1])}
        mat = [[0] * len(basis[d]) for _ in basis[d - 1]]
        for j, (w, c) in enumerate(basis[d]):
            block = per_omega[w].complex.boundary.get(d)
            if block is None:
                continue
            col = per_omega[w].complex.basis[d].index(c)
            for i, lab in enumerate(per_omega[w].complex.basis[d - 1]):
                if block[i][col]:
                    mat[row_index[(w, lab)]][j] = scale * block[i][col]
        boundary[d] = mat
    return ChainComplex(basis, boundary), per_omega


def doubled_cohomology(k: SimplicialComplex, lam: CharMatrix,
                       shelling: Shelling, coefficients="Z") -> GradedGroup:
    """H^*(Y) through the doubled critical complex, degrees shifted up by one
    so the result is indexed like the cohomology of the space."""
    cx, _ = assemble_critical_complex(k, lam, shelling, double=True)
    return cohomology(cx, coefficients).shift(1)

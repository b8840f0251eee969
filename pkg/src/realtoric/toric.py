"""Top-level assembly: per-subcomplex cohomology tables, the integral
assembly from table plus h-vector, coefficient formulas with oracle
cross-checks, the modulus claim checker, Bockstein pages, the 3D/4D
small-cover tables, and the primitive cochain map from critical faces."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping

from . import cells as cells_mod
from .cells import (CochainWord, CubicalCell, oracle_cohomology,
                    quotient_complex, transfer_cochain, transfer_divisibility)
from .facering import lsop_check, sq1_matrix
from .linalg import (AbelianGroup, ChainComplex, CharMatrix, GradedGroup,
                     gf2_solve, set_of)
from .morse import MorseComplex, assemble_critical_complex, doubled_cohomology
from .shelling import (Shelling, expanding_sequence, find_shelling,
                       first_containing_facet, verify_shelling)
from .simplicial import (SimplicialComplex, h_vector, reduced_cohomology,
                         reduced_gf2_dims)


class InconsistentHVector(Exception):
    pass


class DimensionUnsupported(Exception):
    pass


class PipelineMismatch(Exception):
    pass


# ---------------------------------------------------------------------------
# Subcomplex table and integral assembly
# ---------------------------------------------------------------------------

def subcomplex_cohomology_table(k: SimplicialComplex,
                                lam: CharMatrix) -> dict[frozenset, GradedGroup]:
    """Reduced integral cohomology of K_omega for every row-space element;
    the empty set contributes the infinite cyclic group in degree -1."""
    return {omega: reduced_cohomology(k.full_subcomplex(omega))
            for omega in lam.row_space()}


def assemble_integral(table: Mapping[frozenset, GradedGroup],
                      h: Iterable[int]) -> GradedGroup:
    """H^*(Y; Z) from the subcomplex table and the h-vector.

    Ranks and odd torsion are copied degree-shifted from the table; every
    2-primary summand of the table doubles its order; the number of extra
    order-two summands per degree is solved top-down from the mod-2
    dimensions h_i = rank_i + t_i + t_{i+1}.
    """
    hv = list(h)
    n = len(hv) - 1
    ranks = [0] * (n + 2)
    odd: list[list[int]] = [[] for _ in range(n + 2)]
    doubled: list[list[int]] = [[] for _ in range(n + 2)]
    for graded in table.values():
        for deg, grp in graded.groups:
            target = deg + 1
            if target < 0 or target > n:
                raise InconsistentHVector("table entry out of degree range")
            ranks[target] += grp.rank
            for t in grp.torsion:
                (odd if t % 2 else doubled)[target].append(t if t % 2 else 2 * t)
    t_above = 0
    extra = [0] * (n + 1)
    for i in range(n, -1, -1):
        s = hv[i] - ranks[i] - t_above - len(doubled[i])
        if s < 0:
            raise InconsistentHVector(
                "negative order-two count in degree %d" % i)
        extra[i] = s
        t_above = s + len(doubled[i])
    out = {}
    for i in range(n + 1):
        torsion = tuple(sorted(odd[i] + doubled[i] + [2] * extra[i]))
        out[i] = AbelianGroup(ranks[i], torsion)
    return GradedGroup.of(out)


def formula_cohomology(k: SimplicialComplex, lam: CharMatrix,
                       shelling: Shelling) -> GradedGroup:
    """The table-plus-h-vector route to H^*(Y; Z)."""
    return assemble_integral(subcomplex_cohomology_table(k, lam), h_vector(k))


def three_way_cohomology(k: SimplicialComplex, lam: CharMatrix,
                         shelling: Shelling) -> GradedGroup:
    """Assert agreement of the cell oracle, the doubled critical complex and
    the assembly formula; returns the common answer."""
    oracle = oracle_cohomology(k, lam, shelling)
    morse = doubled_cohomology(k, lam, shelling)
    formula = formula_cohomology(k, lam, shelling)
    if oracle != morse or oracle != formula:
        raise PipelineMismatch(
            "cells: %s | morse: %s | formula: %s" % (oracle, morse, formula))
    return oracle


# ---------------------------------------------------------------------------
# Coefficient statements
# ---------------------------------------------------------------------------

def _merge_table_coefficients(k: SimplicialComplex, lam: CharMatrix,
                              q) -> GradedGroup:
    """Degree-shifted direct sum of reduced K_omega cohomology over Z_q/Q."""
    merged: dict[int, list[int]] = {}
    rank: dict[int, int] = {}
    for omega in lam.row_space():
        graded = reduced_cohomology(k.full_subcomplex(omega), q)
        for deg, grp in graded.groups:
            merged.setdefault(deg + 1, []).extend(grp.torsion)
            rank[deg + 1] = rank.get(deg + 1, 0) + grp.rank
    degrees = set(merged) | set(rank)
    return GradedGroup.of({
        d: AbelianGroup(rank.get(d, 0), tuple(sorted(merged.get(d, []))))
        for d in degrees})


def coefficient_cohomology(k: SimplicialComplex, lam: CharMatrix,
                           shelling: Shelling, coefficients) -> GradedGroup:
    """H^*(Y; R) for R = Q, odd Z_q (formula route, asserted against the
    oracle) or a 2-power modulus (oracle only)."""
    if coefficients == "Q":
        formula = _merge_table_coefficients(k, lam, "Q")
        oracle = oracle_cohomology(k, lam, shelling, "Q")
        if formula != oracle:
            raise PipelineMismatch("rational formula disagrees with oracle")
        return formula
    q = int(coefficients)
    if q % 2:
        formula = _merge_table_coefficients(k, lam, q)
        oracle = oracle_cohomology(k, lam, shelling, q)
        if formula != oracle:
            raise PipelineMismatch("mod-%d formula disagrees with oracle" % q)
        return formula
    if q & (q - 1):
        raise ValueError("even moduli must be powers of two")
    return oracle_cohomology(k, lam, shelling, q)


def claim_check_thm11(k: SimplicialComplex, lam: CharMatrix,
                      shelling: Shelling, power: int) -> dict:
    """Compare H^*(Y; Z_{2^{power+1}}) against the degree-shifted sum of
    H~^*(K_omega; Z_{2^power}), both literally and after doubling (the
    doubled critical complex with mod-2^{power+1} coefficients).  Reports
    only; never asserts either reading.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    q_lhs = 1 << (power + 1)
    q_rhs = 1 << power
    n = k.dim + 1
    lhs = oracle_cohomology(k, lam, shelling, q_lhs)
    doubled = doubled_cohomology(k, lam, shelling, q_lhs)
    literal: dict[int, list[int]] = {i: [] for i in range(n + 1)}
    for omega in lam.row_space():
        graded = reduced_cohomology(k.full_subcomplex(omega), q_rhs)
        for deg, grp in graded.groups:
            literal[deg + 1].extend(grp.torsion)
    rows = []
    for i in range(n + 1):
        lhs_orders = list(lhs.group(i).torsion)
        lit_orders = sorted(literal[i])
        dbl_orders = list(doubled.group(i).torsion)
        rows.append({
            "degree": i,
            "lhs": lhs_orders,
            "rhs_literal": lit_orders,
            "rhs_doubled": dbl_orders,
            "lhs_order": _orders_product(lhs_orders),
            "rhs_literal_order": _orders_product(lit_orders),
            "rhs_doubled_order": _orders_product(dbl_orders),
            "literal_match": lhs_orders == lit_orders,
            "doubled_match": lhs_orders == dbl_orders,
        })
    return {
        "power": power,
        "lhs_modulus": q_lhs,
        "rhs_modulus": q_rhs,
        "degrees": rows,
    }


def _orders_product(orders: list[int]) -> int:
    out = 1
    for t in orders:
        out *= t
    return out


# ---------------------------------------------------------------------------
# Bockstein pages
# ---------------------------------------------------------------------------

def _two_valuation(t: int) -> int:
    v = 0
    while t % 2 == 0:
        t //= 2
        v += 1
    return v


@dataclass
class BocksteinPages:
    """Per page and degree, the GF(2) dimension of the Bockstein spectral
    sequence determined by a finitely generated graded group."""

    dims: dict[int, dict[int, int]]
    k_max: int

    def dim(self, page: int, degree: int) -> int:
        page = min(page, self.k_max)
        return self.dims.get(page, {}).get(degree, 0)

    def page(self, page: int) -> dict[int, int]:
        page = min(page, self.k_max)
        return dict(self.dims.get(page, {}))

    def infinity(self) -> dict[int, int]:
        return self.page(self.k_max)


def bockstein_pages(graded: GradedGroup, k_max: int | None = None) -> BocksteinPages:
    """dim E_k^i = rank_i + #(2-primary summands of order >= 2^k in degrees i
    and i+1); a summand of order 2^v dies on page v via the v-th differential."""
    v_max = 0
    for _, grp in graded.groups:
        for t in grp.torsion:
            v_max = max(v_max, _two_valuation(t))
    if k_max is None:
        k_max = min(v_max + 1, 8)
    if k_max < v_max + 1 and k_max >= 8:
        raise ValueError("torsion beyond the supported page cap")
    degrees = set()
    for d, _ in graded.groups:
        degrees.add(d)
        degrees.add(d - 1)
    dims: dict[int, dict[int, int]] = {}
    for page in range(1, k_max + 1):
        row = {}
        for i in sorted(degrees):
            val = (graded.group(i).rank
                   + graded.group(i).torsion_count(2, 1 << page)
                   + graded.group(i + 1).torsion_count(2, 1 << page))
            if val:
                row[i] = val
        dims[page] = row
    return BocksteinPages(dims, k_max)


@dataclass
class Thm15Report:
    ok: bool
    k_top: int
    entries: list[dict]
    e2_entries: list[dict]


def bockstein_check_thm15(k: SimplicialComplex, lam: CharMatrix,
                          shelling: Shelling) -> Thm15Report:
    """Page identity: dim E_{k+1}^i(Y) equals the sum over omega of
    dim E_k^{i-1}(K_omega), for all pages; plus the page-two specialization
    against GF(2) subcomplex cohomology computed independently."""
    h_y = oracle_cohomology(k, lam, shelling)
    table = subcomplex_cohomology_table(k, lam)
    v_tops = [max((_two_valuation(t) for _, g in gg.groups for t in g.torsion),
                  default=0) for gg in list(table.values()) + [h_y]]
    k_top = max(1, max(v_tops) + 1)
    pages_y = bockstein_pages(h_y, k_max=k_top + 1)
    pages_sub = {w: bockstein_pages(gg, k_max=k_top) for w, gg in table.items()}
    n = k.dim + 1
    entries = []
    ok = True
    for page in range(1, k_top + 1):
        for i in range(0, n + 1):
            lhs = pages_y.dim(page + 1, i)
            rhs = sum(p.dim(page, i - 1) for p in pages_sub.values())
            entries.append({"degree": i, "page": page, "lhs": lhs, "rhs": rhs})
            ok = ok and lhs == rhs
    e2_entries = []
    gf2_dims = {w: reduced_gf2_dims(k.full_subcomplex(w)) for w in table}
    for i in range(0, n + 1):
        lhs = pages_y.dim(2, i)
        rhs = sum(d.get(i - 1, 0) for d in gf2_dims.values())
        e2_entries.append({"degree": i, "lhs": lhs, "rhs": rhs})
        ok = ok and lhs == rhs
    return Thm15Report(ok, k_top, entries, e2_entries)


# ---------------------------------------------------------------------------
# Small-cover tables (n = 3, 4)
# ---------------------------------------------------------------------------

@dataclass
class SmallCoverReport:
    n: int
    m: int
    orientable: bool
    betti_sums: tuple[int, ...]  # (b,) or (b, c, d)
    predicted: GradedGroup
    oracle: GradedGroup
    matches: bool


def small_cover_table(k: SimplicialComplex, lam: CharMatrix,
                      shelling: Shelling, strict: bool = True) -> SmallCoverReport:
    """Predict H^*(Y; Z) from the published 3- and 4-dimensional tables and
    compare with the oracle; orientability is read off the top oracle group."""
    n = k.dim + 1
    if n not in (3, 4):
        raise DimensionUnsupported("tables exist for n = 3 and 4 only")
    if reduced_cohomology(k) != GradedGroup.of({n - 1: AbelianGroup(1)}):
        raise DimensionUnsupported("the complex is not a simplicial sphere")
    m = lam.m
    table = subcomplex_cohomology_table(k, lam)
    sums = [0, 0, 0]
    for gg in table.values():
        for deg in (0, 1, 2):
            sums[deg] += gg.group(deg).rank
    b, c, d = sums
    oracle = oracle_cohomology(k, lam, shelling)
    top = oracle.group(n)
    if top == AbelianGroup(1):
        orientable = True
    elif top == AbelianGroup(0, (2,)):
        orientable = False
    else:
        raise PipelineMismatch("top cohomology is neither Z nor Z_2: %s" % top)
    z = AbelianGroup
    if n == 3:
        betti_sums = (b,)
        if orientable:
            predicted = {0: z(1), 1: z(b), 2: z(b, (2,) * (m - 3 - b)), 3: z(1)}
        else:
            predicted = {0: z(1), 1: z(b), 2: z(b - 1, (2,) * (m - 3 - b)),
                         3: z(0, (2,))}
    else:
        betti_sums = (b, c, d)
        if orientable:
            predicted = {0: z(1), 1: z(b), 2: z(c, (2,) * (m - 4 - b)),
                         3: z(b, (2,) * (m - 4 - b)), 4: z(1)}
        else:
            predicted = {0: z(1), 1: z(b), 2: z(c, (2,) * (m - 4 - b)),
                         3: z(d, (2,) * (m - 5 - d)), 4: z(0, (2,))}
    pred = GradedGroup.of(predicted)
    matches = pred == oracle
    if strict and not matches:
        raise PipelineMismatch("table row %s differs from oracle %s" % (pred, oracle))
    return SmallCoverReport(n, m, orientable, betti_sums, pred, oracle, matches)


# ---------------------------------------------------------------------------
# The cochain map phi and its checks
# ---------------------------------------------------------------------------

def row_space_partner(lam: CharMatrix, shelling: Shelling,
                      sigma: Iterable[int]) -> frozenset[int]:
    """The unique row-space element meeting the first containing facet of
    sigma exactly in sigma."""
    s = frozenset(sigma)
    f = first_containing_facet(shelling, s)
    verts = sorted(f)
    rows = [lam.column_mask(v) for v in verts]
    rhs = [1 if v in s else 0 for v in verts]
    combo = gf2_solve(rows, lam.n, rhs)
    if combo is None:
        raise PipelineMismatch("no row-space element matches the face")
    omega = 0
    for i in range(lam.n):
        if (combo >> i) & 1:
            omega ^= lam.rows[i]
    result = set_of(omega)
    assert result & f == s
    return result


def phi_cochain(omega: Iterable[int], critical: Iterable[int],
                k: SimplicialComplex, lam: CharMatrix, shelling: Shelling,
                mc: MorseComplex | None = None) -> dict[CubicalCell, int]:
    """Image of the dual of a critical face under the primitive cochain map:
    push the dual through the flow retraction, expand as transfer cochains of
    aggregate words, and divide by the divisibility exponent."""
    w = frozenset(omega)
    c = frozenset(critical)
    if mc is None:
        from .morse import morse_complex_of
        mc = morse_complex_of(k, shelling, w)
    if c not in mc.critical:
        raise ValueError("face is not critical for this subcomplex")
    card = len(c)
    mu = max(lam.m - lam.n + card - len(w), 0)
    k_omega = k.full_subcomplex(w)
    total: dict[CubicalCell, int] = {}
    for sigma in k_omega.faces():
        if len(sigma) != card:
            continue
        coeff = mc.rho({sigma: 1}).get(c, 0)
        if not coeff:
            continue
        word = CochainWord(sigma, w - sigma)
        for cell, val in transfer_cochain(word, k, lam, shelling).items():
            new = total.get(cell, 0) + coeff * val
            if new:
                total[cell] = new
            else:
                total.pop(cell, None)
    scale = 1 << mu
    out = {}
    for cell, val in total.items():
        if val % scale:
            raise PipelineMismatch("phi image is not divisible by 2^%d" % mu)
        out[cell] = val // scale
    return out


def _cochain_coboundary_on_quotient(qc: ChainComplex, degree: int,
                                    coch: Mapping[CubicalCell, int]) -> dict[CubicalCell, int]:
    cells = qc.basis.get(degree, [])
    vec = [coch.get(cell, 0) for cell in cells]
    image = qc.coboundary_apply(degree, vec)
    return {cell: v for cell, v in zip(qc.basis.get(degree + 1, []), image) if v}


@dataclass
class PhiReport:
    ok: bool
    entries: list[dict]


def check_phi(k: SimplicialComplex, lam: CharMatrix,
              shelling: Shelling) -> PhiReport:
    """For every row-space element and critical face: the doubled chain-map
    law d(phi(c)) = phi(2 d' c) holds exactly and the image is primitive."""
    qc = quotient_complex(k, lam, shelling)
    cx, per_omega = assemble_critical_complex(k, lam, shelling, double=False)
    entries = []
    ok = True
    for omega, mc in per_omega.items():
        images: dict[frozenset, dict[CubicalCell, int]] = {}
        for c in mc.critical:
            images[c] = phi_cochain(omega, c, k, lam, shelling, mc)
        for c in mc.critical:
            degree = len(c)
            lhs = _cochain_coboundary_on_quotient(qc, degree, images[c])
            # phi(2 d' c*) = 2 sum over criticals t of <boundary t, c> phi(t*)
            rhs: dict[CubicalCell, int] = {}
            d = len(c) - 1
            row = mc.complex.basis[d].index(c)
            mat = mc.complex.boundary.get(d + 1)
            for col, t in enumerate(mc.complex.basis.get(d + 1, [])):
                coeff = mat[row][col] if mat else 0
                if not coeff:
                    continue
                for cell, val in images[t].items():
                    new = rhs.get(cell, 0) + 2 * coeff * val
                    if new:
                        rhs[cell] = new
                    else:
                        rhs.pop(cell, None)
            content = 0
            for val in images[c].values():
                content = gcd(content, val)
            entry_ok = (lhs == rhs) and content == 1
            entries.append({"omega": tuple(sorted(omega)),
                            "critical": tuple(sorted(c)),
                            "chain_map": lhs == rhs,
                            "primitive": content == 1})
            ok = ok and entry_ok
    return PhiReport(ok, entries)


def sq1_agrees_with_morse(k: SimplicialComplex, lam: CharMatrix,
                          shelling: Shelling) -> bool:
    """The face-ring first differential in the restriction basis equals the
    mod-2 dual of the critical-complex boundary under the degree bijection
    between restriction faces and critical pairs."""
    data = sq1_matrix(k, lam, shelling)
    _, per_omega = assemble_critical_complex(k, lam, shelling, double=False)
    partner = {}
    for j, r in enumerate(shelling.restrictions):
        partner[r] = row_space_partner(lam, shelling, r)
    for degree, faces in data.basis_by_degree.items():
        targets = data.basis_by_degree.get(degree + 1, [])
        mat = data.matrices.get(degree, [])
        for j, r in enumerate(faces):
            omega = partner[r]
            mc = per_omega[omega]
            for t_idx, t in enumerate(targets):
                expected = mat[t_idx][j] if mat else 0
                actual = 0
                if partner[t] == omega:
                    d = degree - 1
                    basis_d = mc.complex.basis.get(d, [])
                    basis_d1 = mc.complex.basis.get(d + 1, [])
                    if r in basis_d and t in basis_d1:
                        block = mc.complex.boundary.get(d + 1)
                        if block:
                            actual = block[basis_d.index(r)][basis_d1.index(t)] % 2
                if expected != actual:
                    return False
    return True


def critical_count_identity(k: SimplicialComplex, lam: CharMatrix,
                            shelling: Shelling) -> bool:
    """Critical faces over all row-space elements biject with the shelling
    steps: their count plus the base generator equals the facet count."""
    total = 0
    pairs = set()
    for omega in lam.row_space():
        seq = expanding_sequence(k, shelling, omega)
        for c in seq.critical_faces():
            total += 1
            pairs.add((omega, c))
    if total + 1 != shelling.size:
        return False
    expected = set()
    for j in range(1, shelling.size):
        r = shelling.restrictions[j]
        expected.add((row_space_partner(lam, shelling, r), r))
    return pairs == expected


# ---------------------------------------------------------------------------
# The full cross-validation battery
# ---------------------------------------------------------------------------

@dataclass
class CheckItem:
    name: str
    ok: bool
    detail: str = ""


def full_check(k: SimplicialComplex, lam: CharMatrix,
               shelling: Shelling | None = None) -> list[CheckItem]:
    """The `check` battery: shelling validity, non-singularity, boundary
    squares to zero in both cell models, three-way agreement, the mod-2
    h-vector identity, exhaustive transfer divisibility, the Bockstein page
    identity, and the table row for 3- and 4-dimensional spheres."""
    items: list[CheckItem] = []
    try:
        sh = shelling if shelling is not None else find_shelling(k)
        verify_shelling(k, sh.order)
        items.append(CheckItem("shelling", True, "%d facets" % sh.size))
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        items.append(CheckItem("shelling", False, str(exc)))
        return items
    try:
        ok = lsop_check(k, lam)
        items.append(CheckItem("non-singularity", ok))
        if not ok:
            return items
    except Exception as exc:
        items.append(CheckItem("non-singularity", False, str(exc)))
        return items

    m = lam.m
    ambient_ok = True
    for cell in cells_mod.enumerate_cells(k, m):
        acc: dict[CubicalCell, int] = {}
        for face, coeff in cells_mod.boundary_cell(cell).items():
            for f2, c2 in cells_mod.boundary_cell(face).items():
                acc[f2] = acc.get(f2, 0) + coeff * c2
        if any(acc.values()):
            ambient_ok = False
            break
    items.append(CheckItem("dd-zero-ambient", ambient_ok))

    qc = quotient_complex(k, lam, shelling=sh)
    try:
        qc.check_square_zero()
        items.append(CheckItem("dd-zero-quotient", True))
    except Exception as exc:
        items.append(CheckItem("dd-zero-quotient", False, str(exc)))

    try:
        agreed = three_way_cohomology(k, lam, sh)
        items.append(CheckItem("three-way", True, str(agreed)))
    except PipelineMismatch as exc:
        items.append(CheckItem("three-way", False, str(exc)))

    hv = h_vector(k)
    mod2 = oracle_cohomology(k, lam, sh, 2)
    dims = [len(mod2.group(i).torsion) for i in range(len(hv))]
    items.append(CheckItem("mod2-h-vector", tuple(dims) == tuple(hv),
                           "dims %s vs h %s" % (dims, list(hv))))

    transfer_ok = True
    detail = ""
    for omega in lam.row_space():
        k_omega = k.full_subcomplex(omega)
        for sigma in k_omega.faces():
            try:
                res = transfer_divisibility(sigma, omega, k, lam, sh)
                if res.primitive_identity is False:
                    transfer_ok = False
                    detail = "primitive identity failed at %s, %s" % (
                        sorted(sigma), sorted(omega))
            except cells_mod.DivisibilityFailure as exc:
                transfer_ok = False
                detail = str(exc)
    items.append(CheckItem("transfer", transfer_ok, detail))

    report = bockstein_check_thm15(k, lam, sh)
    items.append(CheckItem("bockstein-thm15", report.ok))

    n = k.dim + 1
    if n in (3, 4) and reduced_cohomology(k) == GradedGroup.of({n - 1: AbelianGroup(1)}):
        try:
            row = small_cover_table(k, lam, sh, strict=False)
            items.append(CheckItem("table-row", row.matches, str(row.predicted)))
        except (DimensionUnsupported, PipelineMismatch) as exc:
            items.append(CheckItem("table-row", False, str(exc)))
    else:
        items.append(CheckItem("table-row", True, "skipped (not a 3/4-sphere)"))
    return items

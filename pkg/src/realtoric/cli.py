"""Command-line interface: instance parsing, command dispatch, and
deterministic report formatting.

Input files are JSON documents with keys `m` (vertex count), `facets`
(lists of 1-based vertices), `lambda` (rows of 0/1 of width m) and an
optional `shelling` (1-based indices into the facet list).  Bare instance
names are resolved against the directory in $REALTORIC_CORPUS.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .linalg import CharMatrix, GradedGroup
from .cells import oracle_cohomology
from .facering import lsop_check, sq1_matrix
from .morse import doubled_cohomology
from .shelling import Shelling, find_shelling, verify_shelling
from .simplicial import SimplicialComplex, format_face, h_vector
from .toric import (bockstein_check_thm15, bockstein_pages, claim_check_thm11,
                    coefficient_cohomology, formula_cohomology, full_check,
                    small_cover_table, three_way_cohomology)


class ParseError(Exception):
    pass


class ValidationError(Exception):
    pass


@dataclass
class ProblemInstance:
    m: int
    complex: SimplicialComplex
    lam: CharMatrix
    shelling_order: tuple[frozenset[int], ...] | None = None
    name: str = ""

    def shelling(self) -> Shelling:
        if self.shelling_order is not None:
            return verify_shelling(self.complex, self.shelling_order)
        return find_shelling(self.complex)


def parse_instance(text: str, name: str = "") -> ProblemInstance:
    """Validate a JSON instance document; errors carry the offending key."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    try:
        m = int(doc["m"])
        facets_raw = doc["facets"]
        lam_raw = doc["lambda"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("missing or malformed key: %s" % exc) from exc
    if m < 1:
        raise ValidationError("m must be positive")
    if not isinstance(facets_raw, list) or not facets_raw:
        raise ValidationError("facets must be a non-empty list")
    facets = []
    for f in facets_raw:
        if (not isinstance(f, list) or not f
                or any(not isinstance(v, int) or v < 1 or v > m for v in f)):
            raise ValidationError("facet %r is not a list of vertices in 1..m" % (f,))
        facets.append(frozenset(f))
    try:
        complex_ = SimplicialComplex(facets)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    if not complex_.is_pure():
        raise ValidationError("facets do not all have the same dimension")
    if not complex_.covers(m):
        raise ValidationError("every vertex of 1..m must lie in some facet")
    if (not isinstance(lam_raw, list) or not lam_raw
            or any(not isinstance(r, list) or len(r) != m for r in lam_raw)):
        raise ValidationError("lambda must be a non-empty list of rows of width m")
    for row in lam_raw:
        if any(e not in (0, 1) for e in row):
            raise ValidationError("lambda entries must be 0 or 1")
    lam = CharMatrix.from_rows(lam_raw)
    if lam.n > m:
        raise ValidationError("lambda cannot have more rows than columns")
    shelling_order = None
    if "shelling" in doc and doc["shelling"] is not None:
        idx = doc["shelling"]
        if (not isinstance(idx, list) or sorted(idx) != list(range(1, len(facets) + 1))):
            raise ValidationError(
                "shelling must be a permutation of facet indices 1..%d" % len(facets))
        shelling_order = tuple(facets[i - 1] for i in idx)
    return ProblemInstance(m, complex_, lam, shelling_order, name)


def load_instance(path: str) -> ProblemInstance:
    """Read an instance from a path, or a bare name from the corpus dir."""
    candidate = path
    if not os.path.exists(candidate):
        corpus = os.environ.get("REALTORIC_CORPUS", "corpus")
        named = os.path.join(corpus, path)
        if not named.endswith(".json"):
            named += ".json"
        if os.path.exists(named):
            candidate = named
        else:
            raise ParseError("no such instance file: %s" % path)
    with open(candidate, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read(), os.path.basename(candidate))


# ---------------------------------------------------------------------------
# Report helpers
# ---------------------------------------------------------------------------

def graded_to_json(g: GradedGroup) -> dict:
    return {str(d): {"rank": grp.rank, "torsion": [str(t) for t in grp.torsion]}
            for d, grp in g.groups}


def _parse_coeff(spec: str):
    if spec == "Z":
        return "Z"
    if spec == "Q":
        return "Q"
    if spec.startswith("Zq:"):
        q = int(spec[3:])
        if q < 2 or q % 2 == 0:
            raise ValidationError("Zq:<q> needs an odd modulus >= 3")
        return q
    if spec.startswith("Z2k:"):
        k = int(spec[4:])
        if k < 1:
            raise ValidationError("Z2k:<k> needs k >= 1")
        return 1 << k
    raise ValidationError("unknown coefficient spec %r" % spec)


def _emit(payload: dict, as_json: bool, lines: list[str]) -> str:
    if as_json:
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return "\n".join(lines) + "\n"


def run(command: str, instance: ProblemInstance, *, coeff: str = "Z",
        method: str = "all", pages: int = 0, as_json: bool = False) -> tuple[int, str]:
    """Dispatch one command; returns (exit code, report text)."""
    k, lam = instance.complex, instance.lam
    name = instance.name or "instance"
    if command == "validate":
        sh = instance.shelling()
        nonsingular = lsop_check(k, lam)
        payload = {
            "instance": name, "m": instance.m, "n": lam.n,
            "facets": len(k.facets), "pure": True,
            "h_vector": list(h_vector(k)),
            "nonsingular": nonsingular,
            "shelling": [sorted(f) for f in sh.order],
        }
        lines = ["instance %s: m=%d n=%d facets=%d" % (name, instance.m, lam.n,
                                                       len(k.facets)),
                 "h-vector: %s" % (list(h_vector(k)),),
                 "non-singular over K: %s" % nonsingular]
        return (0 if nonsingular else 1), _emit(payload, as_json, lines)

    sh = instance.shelling()

    if command == "shelling":
        payload = {
            "instance": name,
            "order": [sorted(f) for f in sh.order],
            "restrictions": [sorted(r) for r in sh.restrictions],
            "h_vector": list(h_vector(k)),
        }
        lines = ["shelling of %s:" % name]
        for f, r in zip(sh.order, sh.restrictions):
            lines.append("  %s  restriction %s" % (format_face(f), format_face(r)))
        lines.append("h-vector: %s" % (list(h_vector(k)),))
        return 0, _emit(payload, as_json, lines)

    if command == "cohomology":
        coefficients = _parse_coeff(coeff)
        results: dict[str, GradedGroup] = {}
        if method in ("cells", "all"):
            results["cells"] = oracle_cohomology(k, lam, sh, coefficients)
        if method in ("morse", "all"):
            results["morse"] = doubled_cohomology(k, lam, sh, coefficients)
        if method in ("formula", "all"):
            if coefficients == "Z":
                results["formula"] = formula_cohomology(k, lam, sh)
            elif coefficients == "Q" or (isinstance(coefficients, int)
                                         and coefficients % 2):
                results["formula"] = coefficient_cohomology(k, lam, sh, coefficients)
            elif method == "formula":
                raise ValidationError(
                    "the direct-sum formula does not apply to even moduli; "
                    "use --method cells or morse, or the check command")
        if not results:
            raise ValidationError("unknown method %r" % method)
        agree = len({g for g in results.values()}) == 1
        answer = next(iter(results.values()))
        payload = {
            "instance": name, "coefficients": coeff,
            "methods": {m_: graded_to_json(g) for m_, g in results.items()},
            "agree": agree,
            "result": graded_to_json(answer),
        }
        lines = ["cohomology of %s with coefficients %s" % (name, coeff)]
        for m_, g in sorted(results.items()):
            lines.append("  %-8s %s" % (m_, g))
        lines.append("agreement: %s" % agree)
        return (0 if agree else 1), _emit(payload, as_json, lines)

    if command == "bockstein":
        integral = oracle_cohomology(k, lam, sh)
        bp = bockstein_pages(integral, k_max=pages if pages else None)
        report = bockstein_check_thm15(k, lam, sh)
        sq1 = sq1_matrix(k, lam, sh)
        payload = {
            "instance": name,
            "pages": {str(p): {str(d): v for d, v in row.items()}
                      for p, row in bp.dims.items()},
            "thm15_ok": report.ok,
            "sq1_ranks": {str(d): sq1.rank(d) for d in sq1.basis_by_degree},
        }
        lines = ["Bockstein pages of %s (dim per degree):" % name]
        for p in sorted(bp.dims):
            row = bp.dims[p]
            lines.append("  E_%d: %s" % (p, {d: row[d] for d in sorted(row)}))
        lines.append("page identity: %s" % ("ok" if report.ok else "FAILED"))
        return (0 if report.ok else 1), _emit(payload, as_json, lines)

    if command == "table":
        row = small_cover_table(k, lam, sh, strict=False)
        payload = {
            "instance": name, "n": row.n, "m": row.m,
            "orientable": row.orientable,
            "betti_sums": list(row.betti_sums),
            "predicted": graded_to_json(row.predicted),
            "oracle": graded_to_json(row.oracle),
            "match": row.matches,
        }
        lines = ["small-cover table row for %s (n=%d, m=%d):" % (name, row.n, row.m),
                 "  orientable: %s, reduced Betti sums: %s" % (
                     row.orientable, list(row.betti_sums)),
                 "  predicted: %s" % row.predicted,
                 "  oracle:    %s" % row.oracle,
                 "  match: %s" % row.matches]
        return (0 if row.matches else 1), _emit(payload, as_json, lines)

    if command == "check":
        items = full_check(k, lam, sh)
        ok = all(i.ok for i in items)
        payload = {
            "instance": name,
            "checks": [{"name": i.name, "ok": i.ok, "detail": i.detail}
                       for i in items],
            "ok": ok,
        }
        lines = []
        for i in items:
            status = "PASS" if i.ok else "FAIL"
            suffix = (" (%s)" % i.detail) if i.detail else ""
            lines.append("%-18s %s%s" % (i.name, status, suffix))
        lines.append("overall: %s" % ("PASS" if ok else "FAIL"))
        return (0 if ok else 1), _emit(payload, as_json, lines)

    if command == "claim":
        power = pages if pages else 1
        report = claim_check_thm11(k, lam, sh, power)
        lines = ["claim check for %s, moduli %d vs %d:" % (
            name, report["lhs_modulus"], report["rhs_modulus"])]
        for row in report["degrees"]:
            lines.append(
                "  degree %d: lhs %s (order %d) literal %s (order %d) "
                "doubled %s (order %d) literal_match=%s doubled_match=%s" % (
                    row["degree"], row["lhs"], row["lhs_order"],
                    row["rhs_literal"], row["rhs_literal_order"],
                    row["rhs_doubled"], row["rhs_doubled_order"],
                    row["literal_match"], row["doubled_match"]))
        return 0, _emit(report, as_json, lines)

    raise ValidationError("unknown command %r" % command)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="realtoric",
        description="Exact cohomology of real toric spaces from shellable "
                    "complexes and GF(2) characteristic matrices.")
    parser.add_argument("command",
                        choices=["validate", "shelling", "cohomology",
                                 "bockstein", "table", "check", "claim"])
    parser.add_argument("instance", help="path to a JSON instance, or a "
                        "corpus name resolved via $REALTORIC_CORPUS")
    parser.add_argument("--coeff", default="Z",
                        help="Z | Q | Zq:<odd q> | Z2k:<k> (default Z)")
    parser.add_argument("--method", default="all",
                        choices=["formula", "morse", "cells", "all"])
    parser.add_argument("--pages", type=int, default=0,
                        help="page bound for bockstein, or the power k for claim")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="emit the structured report only")
    args = parser.parse_args(argv)
    try:
        instance = load_instance(args.instance)
        code, text = run(args.command, instance, coeff=args.coeff,
                         method=args.method, pages=args.pages,
                         as_json=args.as_json)
    except (ParseError, ValidationError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

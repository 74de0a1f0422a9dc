"""Batch command-line front end.

One invocation processes one polyhedron file and emits one report, as JSON
or text.  Output is deterministic: identical configuration produces
byte-identical output.

Exit codes: 0 success, 2 input/schema error, 3 precondition violation,
4 verified-property failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import jacobian as jc
from . import monoid as mo
from . import presentation as pr
from . import topology as tp
from .errors import PreconditionError, SchemaError, VerificationError
from .polyhedra import (check_delzant, check_vertex_and_splitting, is_compact,
                        monotone_normalization, parse_polyhedron,
                        polyhedron_to_json)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_PROPERTY = 4

COMMANDS = ("validate", "classical", "quantum", "cm", "jacobian", "invert",
            "audit")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="toricqh",
        description="Exact cohomology presentations of toric varieties from "
                    "Delzant polyhedra.")
    ap.add_argument("--input", required=True, help="polyhedron JSON file")
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--ring", default="z",
                    help="coefficient ring: z, q, or fp:P (default z)")
    ap.add_argument("--cutoff", default="1",
                    help="truncation cutoff g as an exact fraction (jacobian)")
    ap.add_argument("--margin", type=int, default=0,
                    help="extra T-degrees checked beyond 2*dim (quantum)")
    ap.add_argument("--bfield", default=None,
                    help="comma-separated unit rescalings, one per facet")
    ap.add_argument("--perturb", default=None,
                    help="JSON file with one perturbation per facet (jacobian)")
    ap.add_argument("--format", default="text", choices=("json", "text"))
    return ap


def _parse_ring(text: str):
    """Returns (label, prime or None); label in {Z, Q, Fp}."""
    t = text.lower()
    if t == "z":
        return "Z", None
    if t == "q":
        return "Q", None
    if t.startswith("fp:"):
        p = int(t[3:])
        if p < 2:
            raise SchemaError(f"bad prime in --ring {text!r}")
        return f"F{p}", p
    raise SchemaError(f"unknown ring {text!r} (expected z, q, or fp:P)")


def _parse_bfield(text: str | None, nfacets: int):
    if text is None:
        return None
    try:
        rho = tuple(Fraction(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad --bfield {text!r}: {exc}") from exc
    if len(rho) != nfacets:
        raise SchemaError(f"--bfield needs {nfacets} entries, got {len(rho)}")
    return rho


def _load_perturbations(path: str | None, P):
    if path is None:
        return None
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("perturbations")
    if not isinstance(data, list) or len(data) != P.nfacets:
        raise SchemaError(f"perturbation file must hold a list of "
                          f"{P.nfacets} filtered elements")
    ctx = mo.monoid_for(P)
    return [mo.filtered_from_json(ctx, item) for item in data]


def _poly_str(poly, unit):
    return pr.tpoly_str(tuple(str(c) if isinstance(c, Fraction) and
                              c.denominator != 1 else c for c in poly), unit)


def _as_poly(entry):
    """Normalize a structure-constant entry (scalar for classical tables,
    coefficient tuple for quantum ones) to a coefficient tuple."""
    if isinstance(entry, tuple):
        return entry
    return (entry,) if entry else ()


def _structure_entries(names, structure):
    """Sorted human-readable products a*b = ... for the upper triangle."""
    lines = []
    for a in range(len(names)):
        for b in range(a, len(names)):
            rhs = [pr.tpoly_str(_as_poly(structure[a][b][i]), names[i])
                   for i in range(len(names)) if structure[a][b][i]]
            simple = "^" not in names[a] and "*" not in names[a]
            lhs = (f"{names[a]}^2" if a == b and simple
                   else f"{names[a]}*{names[b]}")
            lines.append(f"{lhs} = {' + '.join(rhs) if rhs else '0'}")
    return lines


def _structure_json(structure):
    return [[[_stringify(list(_as_poly(entry))) for entry in row_b]
             for row_b in row_a] for row_a in structure]


def _stringify(obj):
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, (list, tuple)):
        return [_stringify(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _stringify(v) for k, v in obj.items()}
    return obj


def cmd_validate(P, args):
    delzant = check_delzant(P)
    split = check_vertex_and_splitting(P)
    mono = monotone_normalization(P)
    report = {
        "command": "validate",
        "facets": P.nfacets,
        "dim": P.dim,
        "delzant": {"passed": delzant.passed,
                    "violations": list(delzant.violations)},
        "vertex": {"has_vertex": split.has_vertex,
                   "split_rank": split.split_rank,
                   "annihilator_basis": [list(b) for b in
                                         split.annihilator_basis]},
        "compact": is_compact(P) if split.has_vertex else None,
        "monotone": None if mono is None else {
            "translation": [str(x) for x in mono.translation],
            "offset": str(mono.offset),
        },
    }
    ok = delzant.passed and split.has_vertex
    return report, (EXIT_OK if ok else EXIT_PROPERTY)


def cmd_classical(P, args):
    label, _ = _parse_ring(args.ring)
    cp = pr.classical_presentation(P, label)
    names = cp.basis_names()
    report = {
        "command": "classical",
        "ring": cp.ring,
        "generators": [f"v{j}" for j in range(1, P.nfacets + 1)],
        "linear_relations": _stringify(cp.linear_relations),
        "monomial_relations": [list(J) for J in cp.nonfaces],
        "ranks_by_monomial_degree": list(cp.ranks),
        "ranks_by_cohomological_degree": {str(2 * d): r
                                          for d, r in enumerate(cp.ranks)},
        "total_rank": cp.total_rank,
        "basis": list(names),
        "structure_constants": _structure_json(cp.structure),
        "relations_text": [
            " + ".join(_term(c, f"v{j + 1}")
                       for j, c in enumerate(row) if c).replace("+ -", "- ")
            + " = 0"
            for row in cp.linear_relations
        ] + ["*".join(f"v{j}" for j in J) + " = 0" for J in cp.nonfaces],
        "structure_text": _structure_entries(names, cp.structure),
    }
    return report, EXIT_OK


def _term(c, name):
    if c == 1:
        return name
    if c == -1:
        return f"-{name}"
    return f"{c}*{name}"


def _generator_products(Q):
    """Products of generator classes, re-expressed through a generator class
    when the reduction is a scalar T-power multiple of one."""
    ctx = mo.monoid_for(Q.normalized)
    gens = [mo.element_from_monomial(ctx.generator(j))
            for j in range(1, Q.normalized.nfacets + 1)]
    reductions = [pr.reduce_to_basis(v, Q) for v in gens]
    names = Q.basis_names()
    lines = []
    for a in range(len(gens)):
        for b in range(a, len(gens)):
            coords = pr.reduce_to_basis(gens[a] * gens[b], Q)
            lhs = f"v{a + 1}^2" if a == b else f"v{a + 1}*v{b + 1}"
            rhs = _match_generator(coords, reductions)
            if rhs is None:
                rhs = " + ".join(pr.tpoly_str(poly, names[i])
                                 for i, poly in enumerate(coords) if poly) or "0"
            lines.append(f"{lhs} = {rhs}")
    return lines


def _match_generator(coords, reductions):
    matches = []
    for l, red in enumerate(reductions):
        if all(not p for p in red):
            continue
        # is coords == c * T^shift * red for a single scalar and shift?
        shifts = set()
        scalars = set()
        ok = True
        for poly, rpoly in zip(coords, red):
            nz = [(e, c) for e, c in enumerate(poly) if c]
            rnz = [(e, c) for e, c in enumerate(rpoly) if c]
            if len(nz) != len(rnz) or len(nz) > 1:
                ok = False
                break
            if nz:
                shifts.add(nz[0][0] - rnz[0][0])
                scalars.add(Fraction(nz[0][1], 1) / Fraction(rnz[0][1], 1))
        if not ok or len(shifts) != 1 or len(scalars) != 1:
            continue
        shift = shifts.pop()
        scalar = scalars.pop()
        if shift >= 0:
            matches.append((scalar != 1, scalar != -1, l, shift, scalar))
    if not matches:
        return None
    _, _, l, shift, scalar = min(matches)
    t = "" if shift == 0 else ("T" if shift == 1 else f"T^{shift}")
    body = "*".join(x for x in (t, f"v{l + 1}") if x)
    if scalar == 1:
        return body
    if scalar == -1:
        return f"-{body}"
    return f"{scalar}*{body}"


def cmd_quantum(P, args):
    rho = _parse_bfield(args.bfield, P.nfacets)
    Q = pr.quantum_presentation(P, margin=args.margin, _rho=rho)
    names = Q.basis_names()
    ks = pr.kodaira_spencer_table(Q)
    report = {
        "command": "quantum",
        "ring": Q.ring,
        "rho": [str(r) for r in Q.rho],
        "normalization": {"translation": [str(x) for x in Q.translation],
                          "scale": str(Q.scale)},
        "generators": [f"v{j}" for j in range(1, P.nfacets + 1)],
        "linear_relations": _stringify(Q.linear_relations),
        "quantum_sr_relations": [str(r) for r in Q.qsr_relations],
        "basis": list(names),
        "basis_size": len(names),
        "verified_ranks_by_t_degree": list(Q.verified_ranks),
        "structure_constants": _structure_json(Q.structure),
        "structure_text": _structure_entries(names, Q.structure),
        "generator_products": _generator_products(Q),
        "kodaira_spencer": {
            "generators": {k: _stringify([list(p) for p in v])
                           for k, v in ks["generators"].items()},
        },
    }
    return report, EXIT_OK


def cmd_cm(P, args):
    _, p = _parse_ring(args.ring) if args.ring != "z" else ("Q", None)
    K = tp.build_nerve(P)
    cm = tp.reisner_cm_check(K, p)
    profile = tp.sphere_or_ball_profile(P, p)
    regseq = tp.regular_sequence_check(P, p)
    report = {
        "command": "cm",
        "field": cm.field,
        "nerve_maximal_faces": sorted(sorted(f) for f in K.maximal),
        "cohen_macaulay": {"passed": cm.passed, "witness": cm.witness},
        "profile": {"compact": profile.compact, "expected": profile.expected,
                    "match": profile.match,
                    "reduced_betti_from_degree_minus_1": list(profile.actual)},
        "regular_sequence": {"passed": regseq.passed,
                             "quotient_dims": list(regseq.quotient_dims),
                             "expected_dims": list(regseq.expected_dims)},
        "sr_hilbert": tp.sr_hilbert_function(P, P.dim + 2),
    }
    ok = cm.passed and profile.match and regseq.passed
    return report, (EXIT_OK if ok else EXIT_PROPERTY)


def cmd_jacobian(P, args):
    label, p = _parse_ring(args.ring)
    if label == "Z":
        p = None  # freeness over a field; default to Q
    rho = _parse_bfield(args.bfield, P.nfacets)
    perts = _load_perturbations(args.perturb, P)
    g = Fraction(args.cutoff)
    rep = jc.jacobian_freeness(P, perturbations=perts, rho=rho, g=g, p=p)
    report = {
        "command": "jacobian",
        "cutoff": str(rep.cutoff),
        "field": rep.field,
        "rho": [str(r) for r in rep.rho],
        "height_monoid": {"generators": [str(x) for x in rep.monoid_generators],
                          "levels_below_cutoff": [str(x) for x in rep.levels]},
        "weight_cap": str(rep.weight_cap),
        "escalations": rep.escalations,
        "dim_r": rep.dim_r,
        "classical_rank_m": rep.rank,
        "dim_s_window": rep.dim_s,
        "dim_quotient": rep.dim_quotient,
        "expected_dim": rep.rank * rep.dim_r,
        "free": rep.free,
        "basis": [pr.format_monomial(Fraction(0), e) for e in rep.basis],
        "note": rep.note,
    }
    return report, (EXIT_OK if rep.free else EXIT_PROPERTY)


def cmd_invert(P, args):
    certificates = {}
    for j in range(1, P.nfacets + 1):
        cert = pr.divisor_inverse_certificate(P, j)
        certificates[f"v{j}"] = {
            "multiplicities": list(cert.multiplicities),
            "t_exponent": str(cert.t_exponent),
            "identity": str(cert),
        }
    return {"command": "invert", "certificates": certificates}, EXIT_OK


def cmd_audit(P, args):
    audit = pr.basis_independence_audit(P, seed=0, trials=3)
    consistency = []
    consistent = True
    if monotone_normalization(P) is not None:
        Q = pr.quantum_presentation(P)
        for g in (1, 2, 3):
            rep = jc.jacobian_freeness(P, g=g)
            expected = len(Q.basis) * rep.dim_r
            ok = rep.free and rep.dim_quotient == expected
            consistent = consistent and ok
            consistency.append({"cutoff": g, "jacobian_dim": rep.dim_quotient,
                                "quantum_basis_times_levels": expected,
                                "match": ok})
    report = {
        "command": "audit",
        "basis_independence": {"passed": audit.passed,
                               "details": list(audit.details)},
        "quantum_jacobian_consistency": consistency,
    }
    ok = audit.passed and consistent
    return report, (EXIT_OK if ok else EXIT_PROPERTY)


_DISPATCH = {
    "validate": cmd_validate,
    "classical": cmd_classical,
    "quantum": cmd_quantum,
    "cm": cmd_cm,
    "jacobian": cmd_jacobian,
    "invert": cmd_invert,
    "audit": cmd_audit,
}


def _render_text(report) -> str:
    lines = []

    def compact(v):
        return json.dumps(_stringify(v), separators=(",", ":"))

    def walk(obj, indent=""):
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, dict):
                    lines.append(f"{indent}{k}:")
                    walk(v, indent + "  ")
                elif isinstance(v, list):
                    if all(not isinstance(x, (dict, list)) for x in v):
                        lines.append(f"{indent}{k}: "
                                     + (", ".join(str(x) for x in v) or "[]"))
                    elif len(compact(v)) <= 100:
                        lines.append(f"{indent}{k}: {compact(v)}")
                    else:
                        lines.append(f"{indent}{k}:")
                        for item in v:
                            if isinstance(item, dict):
                                walk(item, indent + "    ")
                            else:
                                lines.append(f"{indent}  - {compact(item)}")
                else:
                    lines.append(f"{indent}{k}: {v}")

    walk(report)
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        P = parse_polyhedron(data)
        report, code = _DISPATCH[args.command](P, args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY

    report["input"] = polyhedron_to_json(P)
    if args.format == "json":
        print(json.dumps(_stringify(report), indent=2, sort_keys=True))
    else:
        print(_render_text(report), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())

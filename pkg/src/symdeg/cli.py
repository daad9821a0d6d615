"""Command-line front end: ``symdeg <subcommand> [document.json] [options]``.

Exit codes: 0 ran, 1 input error, 2 numerical non-convergence, 3 a
validation check failed. The report is JSON; everything in it except the
``timing`` block is deterministic for a given document and options.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import gallery as gal
from . import integrate as integ
from .certify import (
    FAIL,
    BifurcationCertificate,
    best_bound,
    certify_nonorientable,
    certify_sw,
    certify_wu,
    is_prime,
)
from .problem import DocumentError, Problem, from_dict, load
from .symbol import SingularSymbolError, check_ellipticity, check_locality

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
SUBCOMMANDS = ("validate", "degree", "chern", "certify", "gallery")
GALLERY_PREFIX = "gallery:"

ORIENTATION = (
    "spheres oriented as boundaries of unit balls (outward normal first); "
    "S^q x S^(2n-1) carries the product orientation, parameter sphere first; "
    "fibre coordinates ordered (x_1..x_n, xi_1..xi_n)"
)


class InputError(Exception):
    def __init__(self, message, path="$"):
        super().__init__(message)
        self.path = path


def _clean(obj):
    """Make a report JSON-safe: complex -> {re, im}, non-finite floats -> strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):  # numpy scalars
        return _clean(obj.item())
    return obj


def _conventions(problem: Problem | None):
    out = {"orientation": ORIENTATION, "constants": {}}
    if problem is None:
        return out
    if problem.domain == "product":
        c = integ.degree_constant(problem.q, problem.n)
        s = problem.q // 2 + problem.n
        out["constants"] = {
            "degree": c.describe(),
            "chern_pairing": "-" + c.describe(),
            "form_degree": 2 * s - 1,
            "relation": (
                f"only the j = n + q/2 = {s} term of the Chern character pairs with [S^q]; "
                "chern_pairing = -degree"
            ),
        }
    else:
        j = (problem.sphere_dim + 1) // 2
        out["constants"] = {
            "odd_trace_integral": integ.trace_constant(j).describe(),
            "form_degree": problem.sphere_dim,
        }
    return out


def _resolve(document):
    if document is None:
        raise InputError("a problem document is required for this subcommand")
    if document.startswith(GALLERY_PREFIX):
        name = document[len(GALLERY_PREFIX):]
        try:
            return from_dict(gal.get(name))
        except KeyError as err:
            raise InputError(err.args[0]) from None
    return load(document)


def _validate(problem: Problem):
    """Run the sampled symbol checks; returns (reports, checklist)."""
    checklist = problem.checklist()
    if problem.mode != "symbol":
        return [], checklist
    f, v = problem.family, problem.validation
    ell = check_ellipticity(
        f, v["lambda_samples"], v["x_samples"], v["xi_directions"], v["sv_threshold"]
    )
    at_nu = check_ellipticity(
        f, x_samples=v["x_samples"], xi_count=v["xi_directions"], threshold=v["sv_threshold"],
        lambda_points=[f.basepoint],
    )
    at_nu.check = "invertible_at_basepoint"
    loc = check_locality(f, v["lambda_samples"], tolerance=v["locality_tolerance"])
    checklist.h1_interior_ellipticity = ell.status
    checklist.h2_invertible_at_nu = at_nu.status
    checklist.h3_interior_locality = loc.status
    return [ell, at_nu, loc], checklist


def _domain_label(problem: Problem) -> str:
    if problem.domain == "sphere":
        return f"S^{problem.sphere_dim}"
    return f"S^{problem.q} x S^{2 * problem.n - 1}"


def _degree(problem: Problem, kind, resolution, threads):
    q = problem.quadrature
    opts = dict(
        resolution=resolution or q["resolution"],
        max_refinements=q["max_refinements"],
        snap_tolerance=q["snap_tolerance"],
        imag_tolerance=q["imag_tolerance"],
        threads=threads,
    )
    if problem.domain == "sphere":
        if kind != "degree":
            raise InputError("the Chern pairing needs a product domain S^q x S^(2n-1)", "$.dims")
        j = (problem.sphere_dim + 1) // 2
        return integ.odd_trace_integral(problem.sigma, j, **opts), _domain_label(problem)
    fn = integ.chern_pairing if kind == "chern" else integ.degree
    return fn(problem.sigma, problem.q, problem.n, **opts), _domain_label(problem)


def _degree_entry(problem, result, label):
    entry = {"domain": label, "mode": "symbol" if problem.mode == "symbol" else "direct-sigma"}
    entry.update(result.to_dict())
    if result.snapped is None:
        entry["status"] = "refine"
    return entry


def _certificates(problem: Problem, deg, checklist):
    if problem.d is None:
        raise InputError("certification needs the parameter dimension d", "$.dims.d")
    if problem.domain != "product":
        raise InputError("certification needs a parameter sphere S^q", "$.dims")
    requests = problem.certificates_requested
    if not requests:
        raise InputError("no certificates requested", "$.certificates_requested")
    checklist.lambda_dimension = problem.d
    certs = []
    for idx, req in enumerate(requests):
        path = req["path"]
        if path == "wu":
            p = req.get("p")
            if p is None or p < 3 or not is_prime(p):
                raise InputError("the mod-p route needs an odd prime p", f"$.certificates_requested[{idx}].p")
            if 2 * (p - 1) != problem.q:
                certs.append(BifurcationCertificate(
                    "wu", False, problem.d, 2 * (p - 1), deg, prime=p, checklist=checklist,
                    reason=f"the document's sphere has q = {problem.q}; p = {p} needs q = {2 * (p - 1)}",
                ))
                continue
            certs.append(certify_wu(deg, problem.d, p, checklist))
        elif path == "sw":
            q = req.get("q", problem.q)
            if q not in (2, 4):
                raise InputError("the mod-2 route needs q = 2 or 4", f"$.certificates_requested[{idx}].q")
            if q != problem.q:
                certs.append(BifurcationCertificate(
                    "sw", False, problem.d, q, deg, checklist=checklist,
                    reason=f"the document's sphere has q = {problem.q}, not {q}",
                ))
                continue
            certs.append(certify_sw(deg, problem.d, q, checklist))
        else:
            if problem.assertions.get("index_bundle_nonorientable"):
                certs.append(certify_nonorientable(problem.d, checklist))
            else:
                certs.append(BifurcationCertificate(
                    "w1", False, problem.d, 1, None, checklist=checklist,
                    reason="index bundle not asserted nonorientable",
                ))
    return certs


def _expected_match(problem: Problem, snapped):
    exp = problem.expected
    if snapped is None:
        return None
    if "degree" in exp:
        return snapped == exp["degree"]
    if "abs_degree" in exp:
        return abs(snapped) == exp["abs_degree"]
    return None


def run(subcommand: str, document: str | None = None, *, threads=None, resolution=None):
    """Execute one subcommand; returns ``(exit_code, report)``."""
    t0 = time.perf_counter()
    timing = {}
    report = {
        "report_version": 1,
        "subcommand": subcommand,
        "input_echo": None,
        "validation": [],
        "degrees": [],
        "certificates": [],
        "summary": {},
        "timing": timing,
        "conventions": _conventions(None),
    }

    def finish(code, status, **summary):
        report["summary"] = {"status": status, "exit_code": code, **summary}
        timing["total_seconds"] = time.perf_counter() - t0
        return code, _clean(report)

    if subcommand not in SUBCOMMANDS:
        return finish(EXIT_INPUT, "input error", error={"path": "$", "message": f"unknown subcommand {subcommand!r}"})

    if subcommand == "gallery":
        if document is None:
            report["gallery"] = [
                {"name": d["name"], "description": d.get("description", ""), "expected": d["expected"]}
                for d in gal.gallery()
            ]
            return finish(EXIT_OK, "ok", entries=len(report["gallery"]))
        name = document[len(GALLERY_PREFIX):] if document.startswith(GALLERY_PREFIX) else document
        try:
            gal.get(name)
        except KeyError as err:
            return finish(EXIT_INPUT, "input error", error={"path": "$", "message": err.args[0]})
        doc = gal.get(name)
        sub = "certify" if doc.get("certificates_requested") else "degree"
        code, inner = run(sub, GALLERY_PREFIX + name, threads=threads, resolution=resolution)
        inner["subcommand"] = "gallery"
        inner["summary"]["ran"] = sub
        return code, inner

    try:
        problem = _resolve(document)
    except DocumentError as err:
        return finish(EXIT_INPUT, "input error", error={"path": err.path, "message": err.message})
    except InputError as err:
        return finish(EXIT_INPUT, "input error", error={"path": err.path, "message": str(err)})
    report["input_echo"] = problem.doc
    report["conventions"] = _conventions(problem)
    common = {"name": problem.name, "mode": "symbol" if problem.mode == "symbol" else "direct-sigma"}

    t = time.perf_counter()
    reports, checklist = _validate(problem)
    timing["validation_seconds"] = time.perf_counter() - t
    report["validation"] = [r.to_dict() for r in reports]
    if problem.mode != "symbol":
        report["validation_note"] = "direct-sigma map: symbol checks do not apply"
    failed = [r.check for r in reports if r.status == FAIL]
    if failed:
        return finish(EXIT_VALIDATION, "validation failed", failed_checks=failed, **common)
    if subcommand == "validate":
        return finish(EXIT_OK, "ok", **common, checks_passed=len(reports))

    kind = "chern" if subcommand == "chern" else "degree"
    t = time.perf_counter()
    try:
        result, label = _degree(problem, kind, resolution, threads)
    except InputError as err:
        return finish(EXIT_INPUT, "input error", error={"path": err.path, "message": str(err)}, **common)
    except SingularSymbolError as err:
        report["singular_witness"] = err.witness
        return finish(EXIT_VALIDATION, "singular map", error={"path": "$", "message": str(err)}, **common)
    except ValueError as err:
        return finish(EXIT_INPUT, "input error", error={"path": "$.quadrature", "message": str(err)}, **common)
    except integ.ConvergenceError as err:
        report["degrees"].append(_degree_entry(problem, err.result, _domain_label(problem)))
        timing["degree_seconds"] = time.perf_counter() - t
        return finish(EXIT_NUMERIC, "refine", error={"path": "$.quadrature", "message": str(err)}, **common)
    timing["degree_seconds"] = time.perf_counter() - t
    report["degrees"].append(_degree_entry(problem, result, label))
    value = result.snapped
    summary = dict(common, degree=value)
    if kind == "degree":
        summary["expected_match"] = _expected_match(problem, value)
    else:
        summary["chern_pairing"] = value
        del summary["degree"]

    if subcommand != "certify":
        return finish(EXIT_OK, "ok", **summary)

    try:
        certs = _certificates(problem, value, checklist)
    except InputError as err:
        return finish(EXIT_INPUT, "input error", error={"path": err.path, "message": str(err)}, **summary)
    report["certificates"] = [c.to_dict() for c in certs]
    best = best_bound(certs)
    report["best_bound"] = best
    summary["best_bound"] = best["best_bound"]
    summary["verdict"] = best["text"]
    return finish(EXIT_OK, "ok", **summary)


def dumps(report) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(
        prog="symdeg",
        description="Degrees of reduced principal symbols and bifurcation certificates.",
    )
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument(
        "document", nargs="?",
        help="problem document (JSON path, or gallery:NAME); for 'gallery' an entry name",
    )
    ap.add_argument("--threads", type=int, default=None, help="worker cap (default: $SYMDEG_THREADS or all cores)")
    ap.add_argument("--resolution", type=int, default=None, help="nodes per angle axis, overrides the document")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("symdeg: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    code, report = run(args.subcommand, args.document, threads=args.threads, resolution=args.resolution)
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        s = report["summary"]
        print(f"symdeg {args.subcommand}: {s.get('status')} (exit {code}); report written to {args.out}")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

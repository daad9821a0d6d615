"""JSON problem documents.

A document describes either a symbol family (coefficient table, reduced
internally) or a matrix map given directly ("sigma"), on either a product
``S^q x S^(2n-1)`` or a single odd sphere. See the README for the full schema;
:data:`SCHEMA` is the machine-checked part and :func:`load` adds the
cross-field checks. Every error carries the JSON path of the offending value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import expr as ex
from .certify import ASSERTED, UNASSERTED, HypothesisChecklist
from .integrate import IMAG_TOLERANCE, MAX_REFINEMENTS, SNAP_TOLERANCE
from .symbol import (
    DEFAULT_LOCALITY_TOL,
    DEFAULT_SV_THRESHOLD,
    DirectSigma,
    MultiIndex,
    SymbolFamily,
    Variables,
    reduce,
)

DOCUMENT_VERSION = 1

_names = {"type": "array", "items": {"type": "string"}}
_matrix = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "string"}},
}
_posint = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "required": ["version", "dims", "variables"],
    "properties": {
        "version": {"const": DOCUMENT_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "dims": {
            "type": "object",
            "properties": {
                "n": _posint,
                "m": _posint,
                "k": _posint,
                "d": {"type": "integer", "minimum": 0},
                "q": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "sphere_dim": _posint,
            },
            "required": ["m"],
            "additionalProperties": False,
        },
        "variables": {
            "type": "object",
            "properties": {
                "lambda": _names,
                "x": _names,
                "xi": _names,
                "sphere": _names,
                "angles": _names,
            },
            "additionalProperties": False,
        },
        "symbol": {
            "type": "object",
            "required": ["coefficients"],
            "properties": {
                "coefficients": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["alpha", "matrix"],
                        "properties": {
                            "alpha": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                            "matrix": _matrix,
                        },
                        "additionalProperties": False,
                    },
                }
            },
            "additionalProperties": False,
        },
        "sigma": _matrix,
        "basepoint": {"type": "array", "items": {"type": "number"}},
        "K_radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "quadrature": {
            "type": "object",
            "properties": {
                "resolution": {"type": "integer", "minimum": 4},
                "max_refinements": {"type": "integer", "minimum": 0},
                "snap_tolerance": {"type": "number", "exclusiveMinimum": 0},
                "imag_tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "validation": {
            "type": "object",
            "properties": {
                "lambda_samples": {"type": "integer", "minimum": 2},
                "x_samples": {"type": "integer", "minimum": 2},
                "xi_directions": {"type": "integer", "minimum": 2},
                "sv_threshold": {"type": "number", "exclusiveMinimum": 0},
                "locality_tolerance": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "assertions": {
            "type": "object",
            "properties": {
                name: {"type": "boolean"}
                for name in (
                    "h1_interior_ellipticity",
                    "h1_lopatinskij",
                    "h2_invertible_at_nu",
                    "h3_boundary_leading_terms",
                    "h3_interior_locality",
                    "lambda_orientable",
                    "sigma_orientation_preserving",
                    "h1prime_complex_structure",
                    "index_bundle_nonorientable",
                )
            },
            "additionalProperties": False,
        },
        "certificates_requested": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path"],
                "properties": {
                    "path": {"enum": ["wu", "sw", "w1"]},
                    "p": {"type": "integer"},
                    "q": {"type": "integer"},
                },
                "additionalProperties": False,
            },
        },
        "expected": {"type": "object"},
    },
    "additionalProperties": False,
}


class DocumentError(ValueError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def _jpath(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class Problem:
    doc: dict
    name: str
    mode: str  # "symbol" | "sigma"
    domain: str  # "product" | "sphere"
    m: int
    variables: Variables
    sigma: object
    family: SymbolFamily | None = None
    q: int | None = None
    n: int | None = None
    k: int | None = None
    d: int | None = None
    sphere_dim: int | None = None
    quadrature: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    assertions: dict = field(default_factory=dict)
    certificates_requested: list = field(default_factory=list)
    expected: dict = field(default_factory=dict)

    def checklist(self) -> HypothesisChecklist:
        """Checklist seeded from the user's assertions (computed checks not yet applied)."""
        a = self.assertions
        values = {
            name: ASSERTED if a.get(name) else UNASSERTED
            for name in (
                "h1_interior_ellipticity",
                "h1_lopatinskij",
                "h2_invertible_at_nu",
                "h3_boundary_leading_terms",
                "h3_interior_locality",
                "lambda_orientable",
                "sigma_orientation_preserving",
                "h1prime_complex_structure",
            )
        }
        return HypothesisChecklist(**values, lambda_dimension=self.d)


def _parse_matrix(rows, names, path, m):
    if len(rows) != m or any(len(r) != m for r in rows):
        raise DocumentError(path, f"expected a {m}x{m} matrix")
    out = []
    for i, r in enumerate(rows):
        row = []
        for j, s in enumerate(r):
            try:
                row.append(ex.parse(s, names))
            except ex.ExprError as err:
                raise DocumentError(f"{path}[{i}][{j}]", str(err)) from err
        out.append(tuple(row))
    return tuple(out)


def _require_names(variables, key, count, what):
    names = variables.get(key)
    if names is None:
        raise DocumentError(f"$.variables.{key}", f"missing declaration of {what}")
    if len(names) != count:
        raise DocumentError(f"$.variables.{key}", f"expected {count} names for {what}, got {len(names)}")
    return tuple(names)


def from_dict(doc: dict) -> Problem:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise DocumentError(_jpath(e.absolute_path), e.message)

    dims = doc["dims"]
    v = doc["variables"]
    m = dims["m"]
    has_symbol, has_sigma = "symbol" in doc, "sigma" in doc
    if has_symbol == has_sigma:
        raise DocumentError("$", "exactly one of 'symbol' and 'sigma' must be present")

    all_names = [name for names in v.values() for name in names]
    for name in all_names:
        if name in ex.RESERVED or not name.isidentifier():
            raise DocumentError("$.variables", f"{name!r} cannot be used as a variable name")
    if len(set(all_names)) != len(all_names):
        raise DocumentError("$.variables", "variable names must be distinct")

    if "sphere_dim" in dims:
        domain = "sphere"
        if has_symbol:
            raise DocumentError("$.dims.sphere_dim", "symbol families live on S^q x S^(2n-1); give q and n")
        sd = dims["sphere_dim"]
        if sd % 2 == 0:
            raise DocumentError("$.dims.sphere_dim", "sphere dimension must be odd")
        for key in ("q", "n", "k"):
            if key in dims:
                raise DocumentError(f"$.dims.{key}", "not used for a single-sphere map")
        variables = Variables(
            lam=_require_names(v, "sphere", sd + 1, "sphere coordinates"),
            angles=tuple(v.get("angles", ())),
        )
        if variables.angles and len(variables.angles) != sd:
            raise DocumentError("$.variables.angles", f"expected {sd} angle names")
        q = n = k = None
    else:
        domain = "product"
        sd = None
        for key in ("q", "n"):
            if key not in dims:
                raise DocumentError(f"$.dims.{key}", "required for a product domain")
        q, n = dims["q"], dims["n"]
        k = dims.get("k")
        variables = Variables(
            lam=_require_names(v, "lambda", q + 1, "parameter-sphere coordinates"),
            x=_require_names(v, "x", n, "space variables x"),
            xi=_require_names(v, "xi", n, "covariables xi"),
            angles=tuple(v.get("angles", ())),
        )
        if variables.angles and len(variables.angles) != q + 2 * n - 1:
            raise DocumentError("$.variables.angles", f"expected {q + 2 * n - 1} angle names")

    family = None
    if has_symbol:
        if k is None:
            raise DocumentError("$.dims.k", "operator order required for a symbol family")
        if variables.angles:
            raise DocumentError("$.variables.angles", "symbol coefficients are functions of lambda and x only")
        if "basepoint" not in doc:
            raise DocumentError("$.basepoint", "basepoint required for a symbol family")
        basepoint = tuple(doc["basepoint"])
        if len(basepoint) != q + 1:
            raise DocumentError("$.basepoint", f"expected {q + 1} coordinates")
        coeff_names = variables.lam + variables.x
        coeffs = {}
        for idx, entry in enumerate(doc["symbol"]["coefficients"]):
            path = f"$.symbol.coefficients[{idx}]"
            alpha = tuple(entry["alpha"])
            if len(alpha) != n:
                raise DocumentError(f"{path}.alpha", f"multi-index must have length n = {n}")
            if sum(alpha) != k:
                raise DocumentError(f"{path}.alpha", f"multi-index order {sum(alpha)} differs from k = {k}")
            if MultiIndex(alpha) in coeffs:
                raise DocumentError(f"{path}.alpha", "duplicate multi-index")
            coeffs[MultiIndex(alpha)] = _parse_matrix(entry["matrix"], coeff_names, f"{path}.matrix", m)
        family = SymbolFamily(
            n=n, m=m, k=k, coefficients=coeffs, variables=variables,
            basepoint=basepoint, K_radius=float(doc.get("K_radius", 1.0)), d=dims.get("d"),
        )
        sigma = reduce(family)
    else:
        entries = _parse_matrix(doc["sigma"], variables.all(), "$.sigma", m)
        sigma = DirectSigma(entries, variables)

    quad = {
        "resolution": 16,
        "max_refinements": MAX_REFINEMENTS,
        "snap_tolerance": SNAP_TOLERANCE,
        "imag_tolerance": IMAG_TOLERANCE,
    }
    quad.update(doc.get("quadrature", {}))
    val = {
        "lambda_samples": 8,
        "x_samples": 8,
        "xi_directions": 32,
        "sv_threshold": DEFAULT_SV_THRESHOLD,
        "locality_tolerance": DEFAULT_LOCALITY_TOL,
    }
    val.update(doc.get("validation", {}))

    return Problem(
        doc=doc,
        name=doc.get("name", "unnamed"),
        mode="symbol" if has_symbol else "sigma",
        domain=domain,
        m=m,
        variables=variables,
        sigma=sigma,
        family=family,
        q=q,
        n=n,
        k=k,
        d=dims.get("d"),
        sphere_dim=sd,
        quadrature=quad,
        validation=val,
        assertions=dict(doc.get("assertions", {})),
        certificates_requested=list(doc.get("certificates_requested", [])),
        expected=dict(doc.get("expected", {})),
    )


def load(path) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DocumentError("$", f"cannot read {path}: {err.strerror}") from err
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError("$", f"invalid JSON: {err}") from err
    return from_dict(doc)

"""Built-in problem documents with known degrees.

Each entry is a plain JSON-compatible dict (a problem document) whose
``expected`` block records the degree the tool must reproduce.
"""

from __future__ import annotations

import copy

# Unit quaternion (cos(phi/2) + sin(phi/2) u)(cos(phi/2) - sin(phi/2) k) for
# the point u = (l0, l1, l2) of S^2 (read as l0 i + l1 j + l2 k) and the fibre
# angle phi with x = cos(phi), xi = sin(phi), written as a 2x2 SU(2) matrix.
# At u = k (the basepoint) it is the identity; the map S^2 x S^1 -> S^3 has
# mapping degree one.
_CLUTCH_RE = "(1+x)/2 + (1-x)*l2/2"
_CLUTCH_I = "xi*l0/2 - (1-x)*l1/2"
_CLUTCH_J = "xi*l1/2 + (1-x)*l0/2"
_CLUTCH_K = "xi*(l2-1)/2"


def _su2(a, b, c, d):
    return [
        [f"({a}) + i*({b})", f"-({c}) + i*({d})"],
        [f"({c}) + i*({d})", f"({a}) - i*({b})"],
    ]


def identity_family():
    return {
        "version": 1,
        "name": "identity-family",
        "description": "constant symbol xi^2 Id; the reduced symbol is the identity",
        "dims": {"n": 1, "m": 2, "k": 2, "d": 4, "q": 2},
        "variables": {"lambda": ["l0", "l1", "l2"], "x": ["x"], "xi": ["xi"]},
        "symbol": {"coefficients": [{"alpha": [2], "matrix": [["1", "0"], ["0", "1"]]}]},
        "basepoint": [0.0, 0.0, 1.0],
        "K_radius": 1.0,
        "quadrature": {"resolution": 12},
        "expected": {"degree": 0},
    }


def scalar_winding(k: int = -2):
    """``z^k`` on the unit circle, ``z = c + i s``."""
    return {
        "version": 1,
        "name": "scalar-winding",
        "description": f"G(z) = z^{k} on S^1; winding number {k}",
        "dims": {"m": 1, "sphere_dim": 1},
        "variables": {"sphere": ["c", "s"]},
        "sigma": [[f"(c + i*s)^({k})"]],
        "quadrature": {"resolution": 32},
        "expected": {"degree": k, "winding": k},
    }


def su2_generator():
    """Identification of S^3 with SU(2) by unit quaternions."""
    return {
        "version": 1,
        "name": "su2-generator",
        "description": "S^3 -> SU(2), (a, b, c, d) -> [[a+ib, -c+id], [c+id, a-ib]]",
        "dims": {"m": 2, "sphere_dim": 3},
        "variables": {"sphere": ["a", "b", "c", "d"]},
        "sigma": _su2("a", "b", "c", "d"),
        "quadrature": {"resolution": 16},
        # the sign is fixed by the outward-normal orientation and the
        # normalisation; only |degree| = 1 is convention-free
        "expected": {"degree": -1, "abs_degree": 1},
    }


def su2_clutch():
    """Clutching map of S^2 x S^1 onto SU(2), basepoint the north pole."""
    return {
        "version": 1,
        "name": "su2-clutch",
        "description": (
            "sigma(u, phi) = (cos(phi/2) + sin(phi/2) u)(cos(phi/2) - sin(phi/2) k) "
            "on S^2 x S^1, collapsing onto SU(2) with mapping degree one"
        ),
        "dims": {"n": 1, "m": 2, "d": 5, "q": 2},
        "variables": {"lambda": ["l0", "l1", "l2"], "x": ["x"], "xi": ["xi"]},
        "sigma": _su2(_CLUTCH_RE, _CLUTCH_I, _CLUTCH_J, _CLUTCH_K),
        "quadrature": {"resolution": 16},
        "assertions": {
            "h1_interior_ellipticity": True,
            "h1_lopatinskij": True,
            "h1prime_complex_structure": True,
            "h2_invertible_at_nu": True,
            "h3_boundary_leading_terms": True,
            "h3_interior_locality": True,
            "lambda_orientable": True,
            "sigma_orientation_preserving": True,
        },
        "certificates_requested": [{"path": "sw", "q": 2}],
        "expected": {"degree": -1, "abs_degree": 1, "best_bound": 3},
    }


def laplacian_family():
    """``|xi|^2 Id`` on R^2 with a parameter sphere S^2 that it ignores."""
    return {
        "version": 1,
        "name": "laplacian-family",
        "description": "lambda-independent Laplacian system |xi|^2 Id; degree 0",
        "dims": {"n": 2, "m": 2, "k": 2, "d": 4, "q": 2},
        "variables": {"lambda": ["l0", "l1", "l2"], "x": ["x1", "x2"], "xi": ["xi1", "xi2"]},
        "symbol": {
            "coefficients": [
                {"alpha": [2, 0], "matrix": [["1", "0"], ["0", "1"]]},
                {"alpha": [0, 2], "matrix": [["1", "0"], ["0", "1"]]},
            ]
        },
        "basepoint": [0.0, 0.0, 1.0],
        "quadrature": {"resolution": 6},
        "expected": {"degree": 0},
    }


# cube of max(0, 1 - x^2/K^2), a C^2 bump supported in |x| < K = 0.8
_BUMP = "2*(((0.64 - x^2) + sqrt((0.64 - x^2)^2))/1.28)^3"


def ode_fold():
    """A genuinely parameter-dependent ODE system whose degree still vanishes.

    In one space dimension the reduced symbol does not depend on xi, so the map
    on S^q x S^1 factors through S^q x [-1, 1] and has degree zero even though
    the integrand is pointwise nonzero.
    """
    return {
        "version": 1,
        "name": "ode-fold",
        "description": "xi^2 (Id + bump(x) N(lambda)); n = 1 forces degree 0",
        "dims": {"n": 1, "m": 2, "k": 2, "d": 4, "q": 2},
        "variables": {"lambda": ["l0", "l1", "l2"], "x": ["x"], "xi": ["xi"]},
        "symbol": {
            "coefficients": [
                {
                    "alpha": [2],
                    "matrix": [
                        ["1", f"{_BUMP}*(l0 + i*l1)"],
                        [f"-{_BUMP}*(l0 - i*l1)", "1"],
                    ],
                }
            ]
        },
        "basepoint": [0.0, 0.0, 1.0],
        "K_radius": 0.8,
        "quadrature": {"resolution": 12},
        "expected": {"degree": 0},
    }


_ENTRIES = {
    "identity-family": identity_family,
    "scalar-winding": scalar_winding,
    "su2-generator": su2_generator,
    "su2-clutch": su2_clutch,
    "laplacian-family": laplacian_family,
    "ode-fold": ode_fold,
}


def names() -> list[str]:
    return list(_ENTRIES)


def get(name: str) -> dict:
    try:
        return copy.deepcopy(_ENTRIES[name]())
    except KeyError:
        raise KeyError(f"no gallery entry named {name!r}; available: {', '.join(_ENTRIES)}") from None


def gallery() -> list[dict]:
    """All built-in problem documents."""
    return [get(name) for name in _ENTRIES]

"""Lower bounds on the dimension of the bifurcation set from symbol degrees.

Two routes turn an integer degree on an embedded q-sphere into the bound
``dim B >= d - q`` (``d`` the dimension of the parameter manifold):

* mod p (odd prime ``p``, ``q = 2(p-1)``): the first Wu class pairs with the
  sphere to ``+-r(2r-1)! deg  (mod p)`` with ``r = (p-1)/2``; since ``r(2r-1)!``
  is a unit mod p this is nonzero iff ``p`` does not divide the degree.
* mod 2 (``q = 2s`` with ``s`` in {1, 2}, complex-coefficient problems): the
  top Stiefel-Whitney class pairs to ``(s-1)! deg  (mod 2)``, nonzero iff the
  degree is odd.

In both cases the bifurcation set also either disconnects the parameter
manifold or is not contractible in it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

PASS, FAIL, ASSERTED, UNASSERTED = "PASS", "FAIL", "asserted", "unasserted"

TOPOLOGY_CLAUSE = (
    "the bifurcation set either disconnects the parameter manifold "
    "or is not contractible in it to a point"
)

DICHOTOMY_NOTE = (
    "orientability of the index bundle is not required: if it is nonorientable, "
    "w_1 != 0 already gives dim B >= d - 1"
)

SPHERE_NOTE = (
    "only the first Wu class is paired with spheres: on S^(4r) the pairings of "
    "q_k with k > 1 vanish, so higher classes carry no information here"
)


@dataclass
class HypothesisChecklist:
    """Hypothesis status; computed entries are PASS/FAIL, the rest user assertions."""

    h1_interior_ellipticity: str = ASSERTED
    h1_lopatinskij: str = ASSERTED
    h2_invertible_at_nu: str = ASSERTED
    h3_boundary_leading_terms: str = ASSERTED
    h3_interior_locality: str = ASSERTED
    lambda_orientable: str = ASSERTED
    sigma_orientation_preserving: str = ASSERTED
    h1prime_complex_structure: str = ASSERTED
    lambda_dimension: int | None = None

    @classmethod
    def unasserted(cls, **overrides):
        base = {f.name: UNASSERTED for f in fields(cls) if f.name != "lambda_dimension"}
        base.update(overrides)
        return cls(**base)

    def failures(self, required) -> list[str]:
        return [name for name in required if getattr(self, name) not in (PASS, ASSERTED)]

    def to_dict(self):
        return asdict(self)


WU_REQUIRED = (
    "h1_interior_ellipticity",
    "h1_lopatinskij",
    "h2_invertible_at_nu",
    "h3_boundary_leading_terms",
    "h3_interior_locality",
    "lambda_orientable",
    "sigma_orientation_preserving",
)
SW_REQUIRED = (
    "h1_interior_ellipticity",
    "h1_lopatinskij",
    "h1prime_complex_structure",
    "h2_invertible_at_nu",
    "h3_boundary_leading_terms",
    "h3_interior_locality",
)


@dataclass
class BifurcationCertificate:
    theorem: str  # "wu", "sw" or "w1"
    granted: bool
    d: int
    q: int
    degree: int | None
    prime: int | None = None
    parity: str | None = None
    bound: int | None = None
    bound_text: str | None = None
    topology_clause: str | None = None
    reason: str | None = None
    arithmetic_trace: list[str] = field(default_factory=list)
    checklist: HypothesisChecklist = field(default_factory=HypothesisChecklist)

    def to_dict(self):
        out = asdict(self)
        out["status"] = "GRANT" if self.granted else "REFUSE"
        return out


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


def _grant(cert, bound):
    cert.granted = True
    cert.bound = bound
    cert.bound_text = f"covering dimension of B >= {bound}"
    cert.topology_clause = TOPOLOGY_CLAUSE
    return cert


def _refuse(cert, reason):
    cert.granted = False
    cert.reason = reason
    return cert


def certify_wu(deg: int, d: int, p: int, checklist: HypothesisChecklist | None = None):
    """Mod-p criterion for a degree on a sphere of dimension ``q = 2(p-1)``.

    Grants iff ``p <= d/2 + 1``, ``q <= d``, every required hypothesis is PASS
    or asserted (parameter manifold orientable among them) and ``p`` does not
    divide ``deg``. With no checklist all hypotheses are taken as asserted.
    """
    if not (isinstance(p, int) and p > 2 and is_prime(p)):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    checklist = checklist or HypothesisChecklist(lambda_dimension=d)
    q = 2 * (p - 1)
    r = (p - 1) // 2
    unit = r * math.factorial(2 * r - 1)
    cert = BifurcationCertificate("wu", False, d, q, deg, prime=p, checklist=checklist)
    if 2 * p > d + 2:
        return _refuse(cert, f"p = {p} exceeds d/2 + 1 = {d / 2 + 1:g}")
    if q > d:
        return _refuse(cert, f"sphere dimension q = {q} exceeds d = {d}")
    if checklist.lambda_orientable not in (PASS, ASSERTED):
        return _refuse(cert, "parameter manifold not asserted orientable")
    missing = checklist.failures(WU_REQUIRED)
    if missing:
        return _refuse(cert, "hypotheses not established: " + ", ".join(missing))
    if math.gcd(unit, p) != 1:  # pragma: no cover - r(2r-1)! < p! has no factor p
        raise AssertionError(f"r(2r-1)! = {unit} is not a unit mod {p}")
    residue = deg % p
    cert.arithmetic_trace = [
        f"r = (p-1)/2 = {r}",
        f"r(2r-1)! = {r}*{2 * r - 1}! = {unit}; gcd({unit}, {p}) = 1, a unit mod {p}",
        f"deg = {deg} = {residue} (mod {p})",
        f"<q_1, [S^{q}]> = +-{unit}*{deg} = +-{(unit * deg) % p} (mod {p})",
    ]
    if residue == 0:
        cert.arithmetic_trace.append(f"{p} divides deg: the pairing vanishes mod {p}")
        return _refuse(cert, f"deg = {deg} is divisible by p = {p}")
    cert.arithmetic_trace.append(f"pairing nonzero mod {p}: q_1 does not vanish")
    cert.arithmetic_trace.append(DICHOTOMY_NOTE)
    return _grant(cert, d - q)


def certify_sw(deg: int, d: int, q: int, checklist: HypothesisChecklist | None = None):
    """Mod-2 criterion for complex-coefficient problems on spheres of dimension 2 or 4."""
    if q not in (2, 4):
        raise ValueError(
            f"q must be 2 or 4, got {q!r}: for q = 2s >= 6 the factor (s-1)! is even "
            "and the mod-2 pairing carries no information"
        )
    checklist = checklist or HypothesisChecklist(lambda_dimension=d)
    s = q // 2
    cert = BifurcationCertificate(
        "sw", False, d, q, deg, parity="odd" if deg % 2 else "even", checklist=checklist
    )
    if q > d:
        return _refuse(cert, f"sphere dimension q = {q} exceeds d = {d}")
    missing = checklist.failures(SW_REQUIRED)
    if missing:
        return _refuse(cert, "hypotheses not established: " + ", ".join(missing))
    cert.arithmetic_trace = [
        f"s = q/2 = {s}; c_s = +-(s-1)! ch_s with (s-1)! = {math.factorial(s - 1)} (odd)",
        f"<w_{q}, [S^{q}]> = (s-1)! deg = {deg} (mod 2) = {deg % 2}",
    ]
    if deg % 2 == 0:
        return _refuse(cert, f"deg = {deg} is even")
    return _grant(cert, d - q)


def certify_nonorientable(d: int, checklist: HypothesisChecklist | None = None):
    """Manual route: the user asserts the index bundle is nonorientable.

    Then the first Stiefel-Whitney class is nonzero and ``dim B >= d - 1``;
    nothing is computed from the symbol.
    """
    checklist = checklist or HypothesisChecklist(lambda_dimension=d)
    cert = BifurcationCertificate("w1", False, d, 1, None, parity=None, checklist=checklist)
    missing = checklist.failures(WU_REQUIRED[:5])
    if missing:
        return _refuse(cert, "hypotheses not established: " + ", ".join(missing))
    cert.arithmetic_trace = ["index bundle asserted nonorientable: w_1 != 0 in H^1(Lambda; Z_2)"]
    return _grant(cert, d - 1)


def best_bound(certificates) -> dict:
    """Largest granted bound over a set of certificates."""
    granted = [c for c in certificates if c.granted]
    if not granted:
        return {"best_bound": None, "text": "no certificate", "granted": [], "note": SPHERE_NOTE}
    best = max(granted, key=lambda c: c.bound)
    return {
        "best_bound": best.bound,
        "text": f"covering dimension of B >= {best.bound} (via {best.theorem}, q = {best.q})",
        "granted": [c.to_dict() for c in granted],
        "note": SPHERE_NOTE,
    }

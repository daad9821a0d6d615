"""Reference computations that share no code with the package.

* :func:`su2_bi_invariant_degree` evaluates the SU(2) integrand once at the
  identity and uses bi-invariance to integrate it over S^3.
* :func:`preimage_degree` counts the preimages of a regular value with
  Jacobian signs, for maps from a product of charts onto S^3.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares


def trace_constant_exact(s):
    """``(s-1)!/((2 pi i)^s (2s-1)!)`` as (rational, pi power, i power)."""
    return Fraction(math.factorial(s - 1), 2**s * math.factorial(2 * s - 1)), -s, -s


def _sign(perm):
    inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inv % 2 else 1


def antisymmetrized_trace(mats):
    total = 0j
    for perm in itertools.permutations(range(len(mats))):
        P = np.eye(mats[0].shape[0], dtype=complex)
        for i in perm:
            P = P @ mats[i]
        total += _sign(perm) * np.trace(P)
    return total


def su2_matrix(a, b, c, d):
    return np.array([[a + 1j * b, -c + 1j * d], [c + 1j * d, a - 1j * b]])


def su2_bi_invariant_degree():
    """Normalised integral of tr((g^-1 dg)^3) over S^3 = SU(2).

    At the identity ``(1, 0, 0, 0)`` the tangent vectors ``e_b, e_c, e_d`` are
    an oriented orthonormal frame (``det[e_a, e_b, e_c, e_d] = 1``) and
    ``g^-1 dg = dg``. The form is bi-invariant, so its integral is its value
    on that frame times the volume ``2 pi^2``.
    """
    A = [su2_matrix(0, 1, 0, 0), su2_matrix(0, 0, 1, 0), su2_matrix(0, 0, 0, 1)]
    T = antisymmetrized_trace(A)
    r, _, _ = trace_constant_exact(2)
    # (2 pi i)^-2 = -1 / (4 pi^2): the pi powers cancel against 2 pi^2
    value = T * 2 * math.pi**2 * float(r) * (-1) / math.pi**2
    return value


# ---------------------------------------------------------------------------
# preimage counting


def quat_mul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def clutch_map(u):
    """S^2 x S^1 -> S^3: (cos(t/2) + sin(t/2) p)(cos(t/2) - sin(t/2) k).

    ``u = (theta, phi, t)`` with ``p = (sin theta cos phi, sin theta sin phi,
    cos theta)`` read as the pure quaternion ``p_0 i + p_1 j + p_2 k``.
    """
    th, ph, t = u
    p = np.array([0.0, math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    c, s = math.cos(t / 2), math.sin(t / 2)
    left = np.array([c, 0, 0, 0]) + s * p
    right = np.array([c, 0, 0, -s])
    return quat_mul(left, right)


def chart_point(u):
    """Embedding of the chart (theta, phi, t) into R^3 x R^2 (for deduplication)."""
    th, ph, t = u
    return np.array([
        math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th),
        math.cos(t), math.sin(t),
    ])


def _jacobian(F, u, h=1e-6):
    cols = []
    for i in range(len(u)):
        e = np.zeros(len(u))
        e[i] = h
        cols.append((F(u + e) - F(u - e)) / (2 * h))
    return np.column_stack(cols)


def preimage_degree(F, target, seeds, chart_orientation=1, tol=1e-11):
    """Mapping degree of ``F`` onto S^3 at the regular value ``target``.

    Solves ``F(u) = target`` from every seed, deduplicates the solutions and
    sums ``sign det[target, dF/du]`` times the chart's orientation sign.
    Returns ``(degree, preimages, signs)``.
    """
    target = np.asarray(target, dtype=float)
    target = target / np.linalg.norm(target)
    found = []
    for s in seeds:
        sol = least_squares(lambda u: F(u) - target, s, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.linalg.norm(F(sol.x) - target) > tol:
            continue
        p = chart_point(sol.x)
        if all(np.linalg.norm(p - chart_point(v)) > 1e-6 for v in found):
            found.append(sol.x)
    signs = []
    for u in found:
        J = _jacobian(F, u)
        det = np.linalg.det(np.column_stack([target, J]))
        if abs(det) < 1e-8:
            raise ValueError("target is not a regular value")
        signs.append(int(np.sign(det)) * chart_orientation)
    return sum(signs), found, signs


def product_chart_orientation():
    """Orientation of (theta, phi) on S^2 and t on S^1 against outward normals."""
    th, ph = 1.1, 0.4
    y = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    dth = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
    dph = np.array([-math.sin(th) * math.sin(ph), math.sin(th) * math.cos(ph), 0.0])
    s2 = np.sign(np.linalg.det(np.column_stack([y, dth, dph])))
    t = 0.3
    s1 = np.sign(np.linalg.det(np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])))
    return int(s2 * s1)


def clutch_mapping_degree(target=(0.31, -0.47, 0.62, 0.55)):
    seeds = [
        np.array([th, ph, t])
        for th in np.linspace(0.2, math.pi - 0.2, 6)
        for ph in np.linspace(0.1, 2 * math.pi - 0.1, 8)
        for t in np.linspace(0.1, 2 * math.pi - 0.1, 8)
    ]
    return preimage_degree(clutch_map, target, seeds, product_chart_orientation())


# Values produced by the oracles above, frozen for the test suite.
SU2_GENERATOR_DEGREE = -1
CLUTCH_MAPPING_DEGREE = 1

"""Degree and Chern-character pairings as integrals of ``tr((g^-1 dg)^D)``.

All three quantities share one normalisation: for an odd dimension
``D = 2s - 1`` the integral is multiplied by

    (s-1)! / ((2 pi i)^s (2s-1)!)

which for the degree on S^q x S^(2n-1) has ``s = q/2 + n``. The Chern pairing
carries an extra global minus sign, so ``chern_pairing == -degree``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import forms
from .expr import Dual
from .geometry import QuadratureGrid, build_product_grid, build_sphere_grid

SNAP_TOLERANCE = 0.05
IMAG_TOLERANCE = 1e-3
MAX_REFINEMENTS = 3
GROWTH = 1.5
CHUNK = 4096


class ConvergenceError(RuntimeError):
    """The integral did not settle on an integer within the refinement budget."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class NormalizationConstant:
    """``rational * pi^pi_power * i^i_power`` (exact description)."""

    rational: Fraction
    pi_power: int
    i_power: int

    @property
    def value(self) -> complex:
        return float(self.rational) * math.pi**self.pi_power * 1j ** (self.i_power % 4)

    def describe(self) -> str:
        return f"{self.rational} * pi^{self.pi_power} * i^{self.i_power}"


def trace_constant(s: int) -> NormalizationConstant:
    """``(s-1)! / ((2 pi i)^s (2s-1)!)`` in exact arithmetic."""
    if s < 1:
        raise ValueError("s must be >= 1")
    r = Fraction(math.factorial(s - 1), math.factorial(2 * s - 1) * 2**s)
    return NormalizationConstant(r, -s, -s)


def degree_constant(q: int, n: int) -> NormalizationConstant:
    return trace_constant(q // 2 + n)


@dataclass
class DegreeResult:
    raw: complex
    snapped: int | None
    abs_error_estimate: float
    imag_residual: float
    resolutions_used: list[int]
    orientation_sign: int
    constant_used: str
    trace: list[dict] = field(default_factory=list)
    kind: str = "degree"

    def to_dict(self):
        d = asdict(self)
        d["raw"] = {"re": float(self.raw.real), "im": float(self.raw.imag)}
        return d


def default_threads() -> int:
    env = os.environ.get("SYMDEG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def coordinate_env(grid: QuadratureGrid, variables, sl) -> dict:
    """Bind a map's variable names to dual numbers at the selected nodes."""
    D = grid.total_dim
    env = {}
    y = grid.ambient(0, sl)
    J = grid.ambient_tangents(0, sl)
    for a, name in enumerate(variables.lam):
        env[name] = Dual(y[:, a], J[:, a, :])
    if len(grid.factors) > 1:
        y = grid.ambient(1, sl)
        J = grid.ambient_tangents(1, sl)
        n = len(variables.x)
        for a, name in enumerate(variables.x):
            env[name] = Dual(y[:, a], J[:, a, :])
        for a, name in enumerate(variables.xi):
            env[name] = Dual(y[:, n + a], J[:, n + a, :])
    if variables.angles:
        u = grid.angles[sl]
        for a, name in enumerate(variables.angles):
            der = np.zeros((len(u), D))
            der[:, a] = 1.0
            env[name] = Dual(u[:, a], der)
    return env


def _check_domain(sigma, grid):
    v = sigma.variables
    if len(v.lam) != grid.factors[0].dim + 1:
        raise ValueError(
            f"map declares {len(v.lam)} sphere coordinates, grid needs {grid.factors[0].dim + 1}"
        )
    if len(grid.factors) > 1:
        n2 = grid.factors[1].dim + 1
        if len(v.x) + len(v.xi) != n2:
            raise ValueError(f"map declares {len(v.x) + len(v.xi)} fibre coordinates, grid needs {n2}")
    if v.angles and len(v.angles) != grid.total_dim:
        raise ValueError(f"map declares {len(v.angles)} angles, grid has {grid.total_dim}")


def node_values(sigma, grid: QuadratureGrid, threads: int | None = None) -> np.ndarray:
    """Top-form value at every node, in grid order.

    Nodes are processed in fixed-size chunks so the per-node values do not
    depend on the number of workers.
    """
    _check_domain(sigma, grid)
    D = grid.total_dim

    def work(start):
        sl = slice(start, min(start + CHUNK, grid.size))
        env = coordinate_env(grid, sigma.variables, sl)
        fr = forms.frame(sigma, env, D, where=grid.angles[sl])
        return forms.top_form(fr)

    starts = range(0, grid.size, CHUNK)
    threads = threads or default_threads()
    if threads == 1 or len(starts) == 1:
        parts = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    return np.concatenate(parts)


def oriented_integral(sigma, grid: QuadratureGrid, threads=None, orientation: int = 1) -> complex:
    """``int tr((g^-1 dg)^D)`` over the grid's oriented domain."""
    contrib = grid.chart_weights * node_values(sigma, grid, threads)
    # np.sum reduces contiguous arrays pairwise in a fixed order
    return complex(np.sum(contrib)) * grid.orientation_sign * orientation


def _snap(raw, err, snap_tol, imag_tol):
    nearest = int(round(raw.real))
    if abs(raw - nearest) <= snap_tol and abs(raw.imag) <= imag_tol and err <= snap_tol:
        return nearest
    return None


def _refine(make_grid, sigma, const, resolution, *, max_refinements, snap_tol,
            imag_tol, threads, orientation, kind, sign=1):
    c = const.value * sign
    res = [int(resolution)]
    trace = []
    grid = make_grid(res[0])
    prev = c * oriented_integral(sigma, grid, threads, orientation)
    trace.append({"resolution": res[0], "raw": {"re": prev.real, "im": prev.imag}})
    result = None
    for _ in range(max_refinements + 1):
        nxt_res = int(round(res[-1] * GROWTH))
        grid = make_grid(nxt_res)
        cur = c * oriented_integral(sigma, grid, threads, orientation)
        res.append(nxt_res)
        trace.append({"resolution": nxt_res, "raw": {"re": cur.real, "im": cur.imag}})
        err = abs(cur - prev)
        snapped = _snap(cur, err, snap_tol, imag_tol)
        result = DegreeResult(
            raw=cur,
            snapped=snapped,
            abs_error_estimate=err,
            imag_residual=abs(cur.imag),
            resolutions_used=list(res),
            orientation_sign=grid.orientation_sign * orientation,
            constant_used=("-" if sign < 0 else "") + const.describe(),
            trace=trace,
            kind=kind,
        )
        if snapped is not None:
            return result
        prev = cur
    raise ConvergenceError(
        f"{kind} did not converge to an integer after {max_refinements} refinements "
        f"(last raw {result.raw:.6g}, error estimate {result.abs_error_estimate:.3g}); refine",
        result,
    )


def degree(sigma, q: int, n: int, resolution: int = 16, *, max_refinements=MAX_REFINEMENTS,
           snap_tolerance=SNAP_TOLERANCE, imag_tolerance=IMAG_TOLERANCE, threads=None,
           orientation: int = 1) -> DegreeResult:
    """Degree of ``sigma`` on S^q x S^(2n-1).

    Evaluated at ``resolution`` and ``1.5 * resolution`` nodes per axis; the
    difference is the error estimate. If the value does not snap to an integer
    the ladder is climbed up to ``max_refinements`` more times, after which
    :class:`ConvergenceError` is raised.
    """
    if q < 2 or q % 2:
        raise ValueError(f"sphere dimension q must be even and >= 2, got {q}")
    return _refine(
        lambda r: build_product_grid(q, n, r), sigma, degree_constant(q, n), resolution,
        max_refinements=max_refinements, snap_tol=snap_tolerance, imag_tol=imag_tolerance,
        threads=threads, orientation=orientation, kind="degree",
    )


def odd_trace_integral(G, j: int, resolution: int = 16, *, max_refinements=MAX_REFINEMENTS,
                       snap_tolerance=SNAP_TOLERANCE, imag_tolerance=IMAG_TOLERANCE,
                       threads=None, orientation: int = 1) -> DegreeResult:
    """``(j-1)!/((2 pi i)^j (2j-1)!) int_{S^(2j-1)} tr((G^-1 dG)^(2j-1))``.

    For ``j = 1`` this is the winding number of ``G`` around the circle.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    return _refine(
        lambda r: build_sphere_grid(2 * j - 1, r), G, trace_constant(j), resolution,
        max_refinements=max_refinements, snap_tol=snap_tolerance, imag_tol=imag_tolerance,
        threads=threads, orientation=orientation, kind="odd_trace_integral",
    )


def chern_pairing(sigma, q: int, n: int, resolution: int = 16, *, max_refinements=MAX_REFINEMENTS,
                  snap_tolerance=SNAP_TOLERANCE, imag_tolerance=IMAG_TOLERANCE, threads=None,
                  orientation: int = 1) -> DegreeResult:
    """Pairing of the degree-``q`` Chern character component with [S^q].

    Only the single term with form degree ``q + 2n - 1`` survives the pairing,
    so the sum over ``j`` collapses to ``j = n + q/2``. With the overall minus
    sign of the index formula this equals ``-degree(sigma, q, n)``.
    """
    if q < 2 or q % 2:
        raise ValueError(f"sphere dimension q must be even and >= 2, got {q}")
    return _refine(
        lambda r: build_product_grid(q, n, r), sigma, trace_constant(n + q // 2), resolution,
        max_refinements=max_refinements, snap_tol=snap_tolerance, imag_tol=imag_tolerance,
        threads=threads, orientation=orientation, kind="chern_pairing", sign=-1,
    )

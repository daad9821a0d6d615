"""Angular charts and tensor quadrature grids on spheres and sphere products.

A point of the unit sphere S^d in R^(d+1) is parametrised by polar angles
``theta_1..theta_{d-1}`` in [0, pi] and an azimuth ``phi`` in [0, 2pi)::

    y_d     = cos(theta_1)
    y_{d-1} = sin(theta_1) cos(theta_2)
    ...
    y_1     = sin(theta_1) ... sin(theta_{d-1}) sin(phi)
    y_0     = sin(theta_1) ... sin(theta_{d-1}) cos(phi)

so for d = 2 this is the usual (sin t cos p, sin t sin p, cos t). Polar axes
use Gauss-Legendre nodes, the azimuth uses the periodic trapezoidal rule with
half-step offset, so no node ever sits on a pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MIN_RESOLUTION = 4


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere S^dim."""
    return 2 * math.pi ** ((dim + 1) / 2) / math.gamma((dim + 1) / 2)


def ambient(angles, dim: int | None = None):
    """Map chart angles ``(theta_1, ..., theta_{d-1}, phi)`` to R^(d+1).

    ``angles`` has shape ``(..., d)``; the result has shape ``(..., d+1)``.
    """
    angles = np.asarray(angles, dtype=float)
    d = angles.shape[-1] if dim is None else dim
    thetas, phi = angles[..., : d - 1], angles[..., d - 1]
    y = np.empty(angles.shape[:-1] + (d + 1,))
    s = np.ones(angles.shape[:-1])
    for j in range(d - 1):
        y[..., d - j] = s * np.cos(thetas[..., j])
        s = s * np.sin(thetas[..., j])
    y[..., 1] = s * np.sin(phi)
    y[..., 0] = s * np.cos(phi)
    return y


def ambient_jacobian(angles):
    """Derivatives of :func:`ambient`, shape ``(..., d+1, d)``."""
    angles = np.asarray(angles, dtype=float)
    d = angles.shape[-1]
    sin, cos = np.sin(angles), np.cos(angles)
    J = np.zeros(angles.shape[:-1] + (d + 1, d))
    for row in range(d + 1):
        # row d-j (0 <= j < d-1):  prod_{l<j} sin_l * cos_j
        # rows 1, 0:               prod_{l<d-1} sin_l * (sin phi | cos phi)
        if row >= 2:
            j = d - row
            factors = [sin[..., l] for l in range(j)] + [cos[..., j]]
            dfactors = [cos[..., l] for l in range(j)] + [-sin[..., j]]
            idx = list(range(j + 1))
        else:
            factors = [sin[..., l] for l in range(d - 1)]
            dfactors = [cos[..., l] for l in range(d - 1)]
            idx = list(range(d - 1))
            factors.append(sin[..., d - 1] if row == 1 else cos[..., d - 1])
            dfactors.append(cos[..., d - 1] if row == 1 else -sin[..., d - 1])
            idx.append(d - 1)
        for a, col in enumerate(idx):
            term = dfactors[a]
            for b in range(len(factors)):
                if b != a:
                    term = term * factors[b]
            J[..., row, col] = term
    return J


def chart_jacobian_weight(angles):
    """Volume element ``prod_j sin(theta_j)^(d-1-j)`` of the angular chart."""
    angles = np.asarray(angles, dtype=float)
    d = angles.shape[-1]
    w = np.ones(angles.shape[:-1])
    for j in range(d - 1):
        w = w * np.sin(angles[..., j]) ** (d - 1 - j)
    return w


def chart_orientation(dim: int) -> int:
    """Sign of the angular chart relative to the outward-normal orientation.

    Evaluated as ``sign det[y, dy/du_1, ..., dy/du_d]`` at an interior point;
    the sign is constant on the open angle box.
    """
    u = np.full(dim, 1.0)
    u[-1] = 0.7
    y = ambient(u)
    J = ambient_jacobian(u)
    return int(np.sign(np.linalg.det(np.column_stack([y, J]))))


@dataclass(frozen=True)
class SphereFactor:
    dim: int
    resolution: int
    angles: np.ndarray  # (N, dim)
    weights: np.ndarray  # (N,) surface measure
    chart_weights: np.ndarray  # (N,) Lebesgue measure on the angle box
    orientation_sign: int


def _axis_rules(dim, resolution):
    rules = []
    x, w = np.polynomial.legendre.leggauss(resolution)
    theta = 0.5 * np.pi * (x + 1.0)
    wt = 0.5 * np.pi * w
    for _ in range(dim - 1):
        rules.append((theta, wt))
    phi = 2 * np.pi * (np.arange(resolution) + 0.5) / resolution
    rules.append((phi, np.full(resolution, 2 * np.pi / resolution)))
    return rules


def _tensor(rules):
    nodes = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), axis=-1)
    weights = np.ones(nodes.shape[:-1])
    for axis, (_, w) in enumerate(rules):
        shape = [1] * len(rules)
        shape[axis] = -1
        weights = weights * w.reshape(shape)
    return nodes.reshape(-1, len(rules)), weights.reshape(-1)


def sphere_factor(dim: int, resolution: int) -> SphereFactor:
    if dim < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {dim}")
    if resolution < MIN_RESOLUTION:
        raise ValueError(
            f"resolution {resolution} below minimum {MIN_RESOLUTION} nodes per axis"
        )
    angles, w = _tensor(_axis_rules(dim, resolution))
    return SphereFactor(
        dim, resolution, angles, w * chart_jacobian_weight(angles), w, chart_orientation(dim)
    )


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor grid on a product of spheres.

    Chart coordinates are the concatenation of each factor's angles in factor
    order; ``orientation_sign`` converts the chart orientation into the product
    of the outward-normal orientations. ``weights`` integrate functions against
    surface measure; ``chart_weights`` integrate the coefficient of
    ``du_1 ^ ... ^ du_D`` of a top-degree form written in chart coordinates.
    """

    factors: tuple[SphereFactor, ...]
    angles: np.ndarray  # (N, total_dim)
    weights: np.ndarray  # (N,)
    chart_weights: np.ndarray  # (N,)
    orientation_sign: int
    resolution: int
    _offsets: tuple[int, ...] = field(repr=False, default=())

    @property
    def total_dim(self) -> int:
        return self.angles.shape[1]

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def factor_angles(self, i, sl=slice(None)):
        lo = self._offsets[i]
        return self.angles[sl, lo : lo + self.factors[i].dim]

    def ambient(self, i, sl=slice(None)):
        """Unit vectors of factor ``i`` at the selected nodes."""
        return ambient(self.factor_angles(i, sl))

    def ambient_tangents(self, i, sl=slice(None)):
        """Derivative of factor ``i``'s ambient point w.r.t. all chart coordinates.

        Shape ``(N, dim_i + 1, total_dim)``; zero outside the factor's block.
        """
        a = self.factor_angles(i, sl)
        J = ambient_jacobian(a)
        out = np.zeros(J.shape[:-1] + (self.total_dim,))
        lo = self._offsets[i]
        out[..., lo : lo + self.factors[i].dim] = J
        return out


def _product(factors, resolution):
    if len(factors) == 1:
        f = factors[0]
        return QuadratureGrid(
            (f,), f.angles, f.weights, f.chart_weights, f.orientation_sign, resolution, (0,)
        )
    a0, a1 = factors[0].angles, factors[1].angles
    n0, n1 = len(a0), len(a1)
    angles = np.concatenate(
        [np.repeat(a0, n1, axis=0), np.tile(a1, (n0, 1))], axis=1
    )
    weights = np.outer(factors[0].weights, factors[1].weights).reshape(-1)
    chart_weights = np.outer(factors[0].chart_weights, factors[1].chart_weights).reshape(-1)
    sign = factors[0].orientation_sign * factors[1].orientation_sign
    return QuadratureGrid(
        tuple(factors), angles, weights, chart_weights, sign, resolution, (0, factors[0].dim)
    )


def build_sphere_grid(dim: int, resolution: int) -> QuadratureGrid:
    """Quadrature grid on S^dim with ``resolution`` nodes per angle axis."""
    return _product([sphere_factor(dim, resolution)], resolution)


def build_product_grid(q: int, n: int, resolution: int) -> QuadratureGrid:
    """Quadrature grid on S^q x S^(2n-1), sphere factor first."""
    if n < 1:
        raise ValueError(f"space dimension n must be >= 1, got {n}")
    return _product([sphere_factor(q, resolution), sphere_factor(2 * n - 1, resolution)], resolution)


def integrate(grid: QuadratureGrid, f) -> float:
    """Integrate ``f(ambient_0, ambient_1, ...)`` over the grid (unoriented)."""
    vals = f(*[grid.ambient(i) for i in range(len(grid.factors))])
    return np.sum(grid.weights * vals)

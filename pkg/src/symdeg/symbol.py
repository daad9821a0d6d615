"""Principal symbol families, hypothesis screening and the reduced symbol.

A family is given by coefficient matrices ``a_alpha(lam, x)`` for multi-indices
of order ``k``; its principal symbol is ``p(lam, x, xi) = sum a_alpha xi^alpha``.
The reduced symbol is ``sigma = p(lam, x, xi) p(nu, x, xi)^-1`` for ``|x|`` inside
the coefficient support radius and the identity outside it.

Every matrix-valued map that can be integrated (reduced symbols, explicit test
maps, and their block sums and products) implements ``jet(env, k)``: given
variable bindings seeded as :class:`~symdeg.expr.Dual` numbers with ``k``
tangent directions, return the values ``(N, m, m)`` and derivatives
``(N, m, m, k)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .expr import Dual, Node

DEFAULT_SV_THRESHOLD = 1e-8
DEFAULT_LOCALITY_TOL = 1e-10


class SingularSymbolError(ValueError):
    """Raised when a symbol is (numerically) singular where it must be invertible."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        if any(int(a) != a or a < 0 for a in self.entries):
            raise ValueError(f"multi-index entries must be non-negative integers: {self.entries}")

    @property
    def order(self) -> int:
        return sum(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class Variables:
    """Names bound to the coordinates of the integration domain.

    ``lam`` are the ambient coordinates of the parameter sphere (or of the only
    sphere for single-sphere maps); ``x`` and ``xi`` split the ambient
    coordinates of the fibre sphere in R^(2n); ``angles`` name the chart
    angles, in grid order.
    """

    lam: tuple[str, ...] = ()
    x: tuple[str, ...] = ()
    xi: tuple[str, ...] = ()
    angles: tuple[str, ...] = ()

    def all(self):
        return self.lam + self.x + self.xi + self.angles


def _matrix(entries: Sequence[Sequence[Node]]):
    rows = tuple(tuple(r) for r in entries)
    m = len(rows)
    if m == 0 or any(len(r) != m for r in rows):
        raise ValueError("coefficient matrices must be square and non-empty")
    return rows


@dataclass(frozen=True)
class SymbolFamily:
    n: int
    m: int
    k: int
    coefficients: Mapping[MultiIndex, tuple[tuple[Node, ...], ...]]
    variables: Variables
    basepoint: tuple[float, ...]
    K_radius: float = 1.0
    d: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.k < 1:
            raise ValueError("need n >= 1, m >= 1, k >= 1")
        if not 0 < self.K_radius <= 1:
            raise ValueError(f"K_radius must lie in (0, 1], got {self.K_radius}")
        if len(self.variables.x) != self.n or len(self.variables.xi) != self.n:
            raise ValueError("need exactly n names for x and for xi")
        if len(self.basepoint) != len(self.variables.lam):
            raise ValueError("basepoint must give one value per parameter variable")
        allowed = set(self.variables.lam) | set(self.variables.x)
        coeffs = {}
        for alpha, mat in self.coefficients.items():
            alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(tuple(alpha))
            if len(alpha.entries) != self.n:
                raise ValueError(f"multi-index {alpha.entries} has wrong length for n={self.n}")
            if alpha.order != self.k:
                raise ValueError(
                    f"multi-index {alpha.entries} has order {alpha.order}, principal part needs {self.k}"
                )
            mat = _matrix(mat)
            if len(mat) != self.m:
                raise ValueError(f"coefficient for {alpha.entries} is not {self.m}x{self.m}")
            for e in itertools.chain.from_iterable(mat):
                bad = e.variables() - allowed
                if bad:
                    raise ValueError(
                        f"coefficient for {alpha.entries} uses {sorted(bad)}; "
                        "coefficients may depend on parameter and x variables only"
                    )
            coeffs[alpha] = mat
        object.__setattr__(self, "coefficients", coeffs)


def _coeff_env(f: SymbolFamily, lam, x):
    env = dict(zip(f.variables.lam, lam))
    env.update(zip(f.variables.x, x))
    return env


def eval_p(f: SymbolFamily, lam, x, xi) -> np.ndarray:
    """Principal symbol ``p(lam, x, xi)``.

    Arguments may carry a leading batch shape: ``lam`` is ``(..., len(lam))``
    and so on. Returns ``(..., m, m)``.
    """
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    batch = np.broadcast_shapes(lam.shape[:-1], x.shape[:-1], xi.shape[:-1])
    env = _coeff_env(f, np.moveaxis(lam, -1, 0), np.moveaxis(x, -1, 0))
    out = np.zeros(batch + (f.m, f.m), dtype=complex)
    for alpha, mat in f.coefficients.items():
        mono = np.ones(batch, dtype=complex)
        for j, a in enumerate(alpha):
            mono = mono * xi[..., j] ** a
        for i, j in itertools.product(range(f.m), repeat=2):
            try:
                v = ex.evaluate(mat[i][j], env)
            except ex.EvalError as err:
                raise ex.EvalError(f"coefficient {alpha.entries}[{i},{j}]: {err}") from err
            out[..., i, j] += v * mono
    return out


# ---------------------------------------------------------------------------
# sampling-based hypothesis checks


@dataclass
class ValidationReport:
    check: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    witness: dict | None = None
    samples: int = 0

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self):
        return {
            "check": self.check,
            "status": self.status,
            "samples": self.samples,
            "metrics": self.metrics,
            "witness": self.witness,
        }


def sphere_samples(dim_plus_one: int, per_axis: int) -> np.ndarray:
    """Deterministic sample points on the unit sphere in R^dim_plus_one."""
    from .geometry import build_sphere_grid

    if dim_plus_one == 1:
        return np.array([[1.0], [-1.0]])
    if dim_plus_one == 2:
        t = 2 * np.pi * np.arange(per_axis) / per_axis
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    return build_sphere_grid(dim_plus_one - 1, max(per_axis, 4)).ambient(0)


def xi_directions(n: int, count: int) -> np.ndarray:
    """Unit covectors used to probe ellipticity."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    rng = np.random.default_rng(0)
    v = rng.standard_normal((count, n))
    v = np.concatenate([np.eye(n), v], axis=0)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _lambda_samples(f, per_axis, lambda_points):
    if lambda_points is not None:
        pts = np.atleast_2d(np.asarray(lambda_points, dtype=float))
    else:
        pts = sphere_samples(len(f.variables.lam), per_axis)
    return np.concatenate([pts, np.asarray(f.basepoint, dtype=float)[None]], axis=0)


def check_ellipticity(
    f: SymbolFamily,
    lambda_samples: int = 8,
    x_samples: int = 8,
    xi_count: int = 32,
    threshold: float = DEFAULT_SV_THRESHOLD,
    lambda_points=None,
    chunk: int = 1 << 15,
) -> ValidationReport:
    """Screen interior ellipticity: ``p(lam, x, xi)`` invertible for ``|xi| = 1``.

    Samples parameters on the parameter sphere (plus the basepoint), ``x`` on a
    uniform grid over ``[-1, 1]^n`` and ``xi`` over unit directions. Passes iff
    the smallest singular value stays at or above ``threshold``.
    """
    lam = _lambda_samples(f, lambda_samples, lambda_points)
    xs = np.stack(
        np.meshgrid(*[np.linspace(-1.0, 1.0, x_samples)] * f.n, indexing="ij"), axis=-1
    ).reshape(-1, f.n)
    xis = xi_directions(f.n, xi_count)
    idx = np.stack(
        np.meshgrid(np.arange(len(lam)), np.arange(len(xs)), np.arange(len(xis)), indexing="ij"),
        axis=-1,
    ).reshape(-1, 3)

    best = (np.inf, None)
    min_det = np.inf
    worst_cond = 0.0
    for start in range(0, len(idx), chunk):
        ii = idx[start : start + chunk]
        P = eval_p(f, lam[ii[:, 0]], xs[ii[:, 1]], xis[ii[:, 2]])
        sv = np.linalg.svd(P, compute_uv=False)
        smin = sv[:, -1]
        min_det = min(min_det, float(np.min(np.prod(sv, axis=1))))
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(smin > 0, sv[:, 0] / smin, np.inf)
        worst_cond = max(worst_cond, float(np.max(cond)))
        j = int(np.argmin(smin))
        if smin[j] < best[0]:
            best = (float(smin[j]), ii[j])

    smin, at = best
    witness = {
        "lambda": lam[at[0]].tolist(),
        "x": xs[at[1]].tolist(),
        "xi": xis[at[2]].tolist(),
        "min_singular_value": smin,
    }
    return ValidationReport(
        "interior_ellipticity",
        smin >= threshold,
        {
            "min_abs_det": min_det,
            "min_singular_value": smin,
            "worst_condition_number": worst_cond,
            "threshold": threshold,
        },
        witness,
        samples=len(idx),
    )


def check_locality(
    f: SymbolFamily,
    lambda_samples: int = 8,
    x_directions: int = 8,
    radii=(1.0, 1.1, 1.25, 1.5),
    tolerance: float = DEFAULT_LOCALITY_TOL,
    lambda_points=None,
) -> ValidationReport:
    """Check that leading coefficients do not depend on the parameter for ``|x| >= K``.

    Each sampled parameter is compared with the basepoint, which bounds the
    deviation over all parameter pairs within a factor of two.
    """
    lam = _lambda_samples(f, lambda_samples, lambda_points)
    dirs = sphere_samples(f.n, x_directions)
    xs = np.concatenate([r * f.K_radius * dirs for r in radii], axis=0)
    nu = np.asarray(f.basepoint, dtype=complex)

    worst = 0.0
    witness = None
    for alpha, mat in f.coefficients.items():
        for i, j in itertools.product(range(f.m), repeat=2):
            e = mat[i][j]
            if not (e.variables() & set(f.variables.lam)):
                continue
            L, X = np.meshgrid(np.arange(len(lam)), np.arange(len(xs)), indexing="ij")
            env = _coeff_env(f, lam[L].transpose(2, 0, 1), xs[X].transpose(2, 0, 1))
            env_nu = _coeff_env(f, nu, xs[X].transpose(2, 0, 1))
            dev = np.abs(
                np.broadcast_to(ex.evaluate(e, env), L.shape)
                - np.broadcast_to(ex.evaluate(e, env_nu), L.shape)
            )
            a, b = np.unravel_index(int(np.argmax(dev)), dev.shape)
            if dev[a, b] > worst:
                worst = float(dev[a, b])
                witness = {
                    "multi_index": list(alpha.entries),
                    "entry": [i, j],
                    "lambda": lam[a].tolist(),
                    "x": xs[b].tolist(),
                    "deviation": worst,
                }
    return ValidationReport(
        "interior_locality",
        worst <= tolerance,
        {"max_deviation": worst, "tolerance": tolerance, "K_radius": f.K_radius},
        witness,
        samples=len(lam) * len(xs),
    )


# ---------------------------------------------------------------------------
# matrix-valued maps


def _entry_jets(entries, env, k):
    m = len(entries)
    jets = [[ex.evaluate_jet(entries[i][j], env, k) for j in range(m)] for i in range(m)]
    return _assemble(jets)


def _assemble(jets):
    m = len(jets)
    val = np.stack([np.stack([np.asarray(jets[i][j].val) for j in range(m)], -1) for i in range(m)], -2)
    der = np.stack([np.stack([np.asarray(jets[i][j].der) for j in range(m)], -2) for i in range(m)], -3)
    return val.astype(complex, copy=False), der.astype(complex, copy=False)


def _matmul_jet(a, b):
    va, da = a
    vb, db = b
    val = va @ vb
    der = np.einsum("...ijk,...jl->...ilk", da, vb) + np.einsum("...ij,...jlk->...ilk", va, db)
    return val, der


class MatrixMap:
    """Common interface for matrix-valued maps on a sphere or sphere product."""

    m: int
    variables: Variables

    def jet(self, env, k):
        raise NotImplementedError

    def __call__(self, **bindings):
        """Evaluate at a point given by keyword variable bindings."""
        env = {name: Dual(np.asarray(v, dtype=complex), np.zeros(np.shape(v) + (0,), complex))
               for name, v in bindings.items()}
        return self.jet(env, 0)[0]


@dataclass(frozen=True)
class ReducedSymbol(MatrixMap):
    family: SymbolFamily

    @property
    def m(self):
        return self.family.m

    @property
    def variables(self):
        return self.family.variables

    def _p_jet(self, env, k, lam_override=None):
        f = self.family
        cenv = dict(env)
        if lam_override is not None:
            cenv.update(zip(f.variables.lam, (complex(v) for v in lam_override)))
        xi = [env[name] for name in f.variables.xi]
        val = der = None
        for alpha, mat in f.coefficients.items():
            mono = None
            for xj, a in zip(xi, alpha):
                if a:
                    t = xj.ipow(a)
                    mono = t if mono is None else mono * t
            cv, cd = _entry_jets(mat, cenv, k)
            mv, md = mono.val, mono.der
            v = cv * mv[..., None, None]
            d = cd * mv[..., None, None, None] + cv[..., None] * md[..., None, None, :]
            val = v if val is None else val + v
            der = d if der is None else der + d
        return val, der

    def jet(self, env, k):
        f = self.family
        x = np.stack([np.asarray(env[name].val) for name in f.variables.x], axis=-1)
        inside = np.linalg.norm(x, axis=-1).real < f.K_radius
        shape = x.shape[:-1]
        val = np.broadcast_to(np.eye(f.m, dtype=complex), shape + (f.m, f.m)).copy()
        der = np.zeros(shape + (f.m, f.m, k), dtype=complex)
        if not np.any(inside):
            return val, der
        sub = {name: Dual(v.val[inside], v.der[inside]) for name, v in env.items()}
        pv, pd = self._p_jet(sub, k)
        nv, nd = self._p_jet(sub, k, lam_override=f.basepoint)
        try:
            sv = np.linalg.svd(nv, compute_uv=False)
        except np.linalg.LinAlgError as err:  # pragma: no cover - non-finite input
            raise SingularSymbolError(f"symbol evaluation failed: {err}") from err
        bad = sv[:, -1] <= 1e-14 * np.maximum(sv[:, 0], 1e-300)
        if np.any(bad):
            j = int(np.argmax(bad))
            raise SingularSymbolError(
                "p(nu, x, xi) is singular at a requested point",
                {name: complex(v.val[j]) for name, v in sub.items()},
            )
        nv_inv = np.linalg.inv(nv)
        sigma = pv @ nv_inv
        # d sigma = (dp - sigma dp_nu) p_nu^-1
        dd = pd - np.einsum("nij,njlk->nilk", sigma, nd)
        val[inside] = sigma
        der[inside] = np.einsum("nijk,njl->nilk", dd, nv_inv)
        return val, der


def reduce(f: SymbolFamily) -> ReducedSymbol:
    """Reduced symbol ``p p_nu^-1`` of a family (identity where ``|x| >= K``).

    Ellipticity is assumed to have been screened with :func:`check_ellipticity`.
    """
    return ReducedSymbol(f)


@dataclass(frozen=True)
class DirectSigma(MatrixMap):
    """A matrix map given directly by expressions in the domain coordinates."""

    entries: tuple[tuple[Node, ...], ...]
    variables: Variables

    def __post_init__(self):
        object.__setattr__(self, "entries", _matrix(self.entries))
        allowed = set(self.variables.all())
        for e in itertools.chain.from_iterable(self.entries):
            bad = e.variables() - allowed
            if bad:
                raise ValueError(f"undeclared variable(s) {sorted(bad)} in sigma entry {e}")

    @classmethod
    def from_strings(cls, rows, variables: Variables):
        names = variables.all()
        return cls(tuple(tuple(ex.parse(s, names) for s in r) for r in rows), variables)

    @property
    def m(self):
        return len(self.entries)

    def jet(self, env, k):
        return _entry_jets(self.entries, env, k)


def _same_domain(a, b):
    if a.variables != b.variables:
        raise ValueError("maps must be declared over the same variables")
    return a.variables


@dataclass(frozen=True)
class BlockSum(MatrixMap):
    """Pointwise block-diagonal sum ``a (+) b``."""

    a: MatrixMap
    b: MatrixMap

    def __post_init__(self):
        _same_domain(self.a, self.b)

    @property
    def m(self):
        return self.a.m + self.b.m

    @property
    def variables(self):
        return self.a.variables

    def jet(self, env, k):
        va, da = self.a.jet(env, k)
        vb, db = self.b.jet(env, k)
        ma = self.a.m
        shape = va.shape[:-2]
        val = np.zeros(shape + (self.m, self.m), dtype=complex)
        der = np.zeros(shape + (self.m, self.m, k), dtype=complex)
        val[..., :ma, :ma], val[..., ma:, ma:] = va, vb
        der[..., :ma, :ma, :], der[..., ma:, ma:, :] = da, db
        return val, der


@dataclass(frozen=True)
class MatrixProduct(MatrixMap):
    """Pointwise product ``a b``."""

    a: MatrixMap
    b: MatrixMap

    def __post_init__(self):
        _same_domain(self.a, self.b)
        if self.a.m != self.b.m:
            raise ValueError("matrix sizes differ")

    @property
    def m(self):
        return self.a.m

    @property
    def variables(self):
        return self.a.variables

    def jet(self, env, k):
        return _matmul_jet(self.a.jet(env, k), self.b.jet(env, k))


@dataclass(frozen=True)
class Conjugated(MatrixMap):
    """``U a U^-1`` for a constant invertible matrix ``U``."""

    a: MatrixMap
    U: np.ndarray

    @property
    def m(self):
        return self.a.m

    @property
    def variables(self):
        return self.a.variables

    def jet(self, env, k):
        U = np.asarray(self.U, dtype=complex)
        Ui = np.linalg.inv(U)
        v, d = self.a.jet(env, k)
        return U @ v @ Ui, np.einsum("ij,...jlk,lm->...imk", U, d, Ui)

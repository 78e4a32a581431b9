"""Gamma-regression design primitives.

The model is a generalized linear model with gamma response and inverse
link: the mean at covariate x is kappa / (f(x)'beta), which forces the
linear component f(x)'beta to stay positive on the experimental region.
The elemental information at x is lambda(f(x)'beta) f(x) f(x)' with
intensity lambda(z) = kappa / z^2, and a design's information matrix is
the weight-average of elemental matrices over its support.

The IMSE criterion additionally needs the weighting matrix
V(beta; nu) = integral of lambda(f(x)'beta)^2 f(x) f(x)' nu(dx) for a
standardized measure nu; discrete measures are summed exactly and the
continuous uniform measure on a box is integrated with tensor-product
Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    InvalidSpec,
    NonpositiveLinearComponent,
    OutOfRegion,
    WeightSumViolation,
)
from .region import Region

GAMMA_INVERSE_LINK = "gamma_inverse_link"
CUSTOM_INTENSITY = "custom"

WEIGHT_SUM_TOL = 1e-12
SUPPORT_MERGE_TOL = 1e-9
DEFAULT_QUAD_ORDER = 32

# positivity sampling for non-affine bases: 16 points per axis, capped
POSITIVITY_GRID_PER_DIM = 16
POSITIVITY_GRID_CAP = 65_536

_BUILTIN_AFFINE_BASES = ("linear", "additive")


def _affine_basis(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, float))
    return np.column_stack([np.ones(len(X)), X])


@dataclass(frozen=True)
class ModelSpec:
    """Regression basis, intensity family and experimental region.

    ``basis`` maps an (n, dim_x) array of points to an (n, p) array of
    basis values.  ``basis_name`` marks the built-in affine bases
    ("linear" and "additive" are synonyms: intercept plus coordinates),
    for which positivity checks on box regions reduce to the vertices.
    """

    dim_x: int
    p: int
    basis: Callable[[np.ndarray], np.ndarray]
    region: Region
    kappa: float = 1.0
    intensity_kind: str = GAMMA_INVERSE_LINK
    custom_intensity: Callable[[np.ndarray], np.ndarray] | None = None
    basis_name: str | None = None

    def __post_init__(self):
        if self.dim_x < 1:
            raise InvalidSpec("dim_x must be >= 1")
        if self.p < 2:
            raise InvalidSpec("basis length p must be >= 2")
        if not self.kappa > 0:
            raise InvalidSpec("kappa must be positive")
        if self.region.dim != self.dim_x:
            raise InvalidSpec("region dimension does not match dim_x")
        if self.intensity_kind == CUSTOM_INTENSITY and self.custom_intensity is None:
            raise InvalidSpec("custom intensity kind needs a function")
        self._check_basis()

    def _check_basis(self):
        pts = _independence_sample(self.region, self.p)
        vals = np.atleast_2d(np.asarray(self.basis(pts), float))
        if vals.shape != (len(pts), self.p):
            raise InvalidSpec(
                f"basis returned shape {vals.shape}, expected ({len(pts)}, {self.p})"
            )
        gram = vals.T @ vals
        if np.linalg.matrix_rank(gram) < self.p:
            raise InvalidSpec("basis components are linearly dependent on the region")

    @property
    def has_affine_basis(self) -> bool:
        return self.basis_name in _BUILTIN_AFFINE_BASES


def _independence_sample(region: Region, p: int) -> np.ndarray:
    """p + ceil(p/2) region points used for the linear-independence check."""
    need = p + (p + 1) // 2
    pts = region.extremal_points()
    if len(pts) < need and region.is_box:
        extra = region.grid(max(2, int(np.ceil(need ** (1 / region.dim)))) + 1)
        pts = np.vstack([pts, extra])
    if len(pts) < need:
        # finite candidate lists may be small; repeat is harmless for rank
        reps = int(np.ceil(need / len(pts)))
        pts = np.vstack([pts] * reps)
    return pts[:need]


def make_model(
    dim_x: int,
    basis: str | Callable = "linear",
    region: Region | None = None,
    lower=None,
    upper=None,
    points=None,
    kappa: float = 1.0,
    custom_intensity: Callable | None = None,
) -> ModelSpec:
    """Convenience constructor; the default is the unit-cube model with affine basis."""
    if region is None:
        if points is not None:
            region = Region.finite(points)
        else:
            lo = np.zeros(dim_x) if lower is None else np.asarray(lower, float)
            hi = np.ones(dim_x) if upper is None else np.asarray(upper, float)
            region = Region.box(lo, hi)
    if callable(basis):
        fn, name, p = basis, None, None
        probe = np.atleast_2d(region.extremal_points()[0])
        p = np.atleast_2d(np.asarray(fn(probe), float)).shape[1]
    elif basis in _BUILTIN_AFFINE_BASES:
        fn, name, p = _affine_basis, basis, dim_x + 1
    else:
        raise InvalidSpec(f"unknown basis {basis!r}; built-ins: {_BUILTIN_AFFINE_BASES}")
    kind = CUSTOM_INTENSITY if custom_intensity is not None else GAMMA_INVERSE_LINK
    return ModelSpec(
        dim_x=dim_x,
        p=p,
        basis=fn,
        region=region,
        kappa=kappa,
        intensity_kind=kind,
        custom_intensity=custom_intensity,
        basis_name=name,
    )


# ---------------------------------------------------------------------------
# designs and weighting measures
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Design:
    """Approximate design: distinct support points with positive weights summing to 1."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sup = np.atleast_2d(np.asarray(self.support, float))
        w = np.atleast_1d(np.asarray(self.weights, float))
        if len(sup) != len(w) or len(w) == 0:
            raise InvalidSpec("support and weights must be equal-length and nonempty")
        if np.any(w <= 0):
            raise InvalidSpec("design weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise WeightSumViolation(f"design weights sum to {w.sum()!r}, not 1")
        if len(sup) > 1:
            d = np.abs(sup[:, None, :] - sup[None, :, :]).max(axis=2)
            np.fill_diagonal(d, np.inf)
            if d.min() < SUPPORT_MERGE_TOL:
                raise InvalidSpec("support points closer than the merge tolerance")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.weights)

    def weight_at(self, x, tol: float = SUPPORT_MERGE_TOL) -> float:
        """Weight of the support point matching x in max-norm (0.0 if absent)."""
        d = np.abs(self.support - np.asarray(x, float)).max(axis=1)
        i = int(d.argmin())
        return float(self.weights[i]) if d[i] <= tol else 0.0


def merged_design(support, weights, drop_tol: float = 0.0) -> Design:
    """Build a design, merging coincident points and dropping ~zero weights.

    Coincident points (within the max-norm merge tolerance) get their
    weights summed; weights at or below ``drop_tol`` are removed and the
    remainder renormalized.
    """
    sup = np.atleast_2d(np.asarray(support, float))
    w = np.atleast_1d(np.asarray(weights, float)).copy()
    keep: list[int] = []
    for i in range(len(sup)):
        for j in keep:
            if np.abs(sup[i] - sup[j]).max() < SUPPORT_MERGE_TOL:
                w[j] += w[i]
                break
        else:
            keep.append(i)
    sup, w = sup[keep], w[keep]
    mask = w > drop_tol
    if not np.any(mask):
        raise InvalidSpec("all design weights vanished")
    sup, w = sup[mask], w[mask]
    return Design(sup, w / w.sum())


def design_in_region(model: ModelSpec, design: Design) -> None:
    model.region.require_inside(design.support, "design support point")


@dataclass(frozen=True)
class WeightingMeasure:
    """Standardized measure nu for the IMSE criterion.

    Discrete: atoms with positive weights summing to 1.  Uniform: the
    continuous uniform distribution over ``region`` (or over the model's
    region when ``region`` is None).
    """

    kind: str  # "discrete" | "uniform"
    points: np.ndarray | None = None
    weights: np.ndarray | None = None
    region: Region | None = None

    def __post_init__(self):
        if self.kind == "discrete":
            pts = np.atleast_2d(np.asarray(self.points, float))
            w = np.atleast_1d(np.asarray(self.weights, float))
            if len(pts) != len(w) or len(w) == 0:
                raise InvalidSpec("discrete measure needs matching points and weights")
            if np.any(w <= 0):
                raise InvalidSpec("measure weights must be positive")
            if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise WeightSumViolation(f"measure weights sum to {w.sum()!r}, not 1")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
        elif self.kind != "uniform":
            raise InvalidSpec(f"unknown measure kind {self.kind!r}")

    @classmethod
    def discrete(cls, points, weights) -> "WeightingMeasure":
        return cls(kind="discrete", points=points, weights=weights)

    @classmethod
    def uniform(cls, region: Region | None = None) -> "WeightingMeasure":
        return cls(kind="uniform", region=region)


# ---------------------------------------------------------------------------
# basis / intensity / information
# ---------------------------------------------------------------------------
def eval_basis(model: ModelSpec, x) -> np.ndarray:
    """f(x) for one region point; raises OutOfRegion outside the bounds."""
    x = np.atleast_1d(np.asarray(x, float))
    model.region.require_inside(x[None, :], "covariate point")
    return np.asarray(model.basis(x[None, :]), float)[0]


def basis_values(model: ModelSpec, X) -> np.ndarray:
    """f at many points, no region check (internal quadrature/grid use)."""
    return np.atleast_2d(np.asarray(model.basis(np.atleast_2d(np.asarray(X, float))), float))


def intensity(model: ModelSpec, z: float) -> float:
    return float(intensity_values(model, np.asarray([z], float))[0])


def intensity_values(model: ModelSpec, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, float)
    if model.intensity_kind == GAMMA_INVERSE_LINK:
        if np.any(z <= 0):
            bad = float(z[z <= 0].flat[0])
            raise NonpositiveLinearComponent(
                f"linear component {bad} is not positive under the gamma model"
            )
        return model.kappa / z**2
    vals = np.asarray(model.custom_intensity(z), float)
    if np.any(vals <= 0):
        raise InvalidSpec("custom intensity returned a nonpositive value")
    return vals


def linear_components(model: ModelSpec, X, beta) -> np.ndarray:
    return basis_values(model, X) @ np.asarray(beta, float)


def validate_beta(model: ModelSpec, beta) -> np.ndarray:
    """Check gamma positivity of beta over the region and return it as an array.

    Affine bases on boxes only need the vertices (positivity there implies
    positivity on the hull); otherwise a bounded sampling grid is used.
    """
    beta = np.atleast_1d(np.asarray(beta, float))
    if beta.shape != (model.p,):
        raise InvalidSpec(f"beta must have length {model.p}, got {beta.shape}")
    if model.intensity_kind != GAMMA_INVERSE_LINK:
        return beta
    if model.has_affine_basis or not model.region.is_box:
        pts = model.region.extremal_points()
    else:
        pts = model.region.grid(POSITIVITY_GRID_PER_DIM, cap=POSITIVITY_GRID_CAP)
        pts = np.vstack([model.region.extremal_points(), pts])
    z = linear_components(model, pts, beta)
    if np.any(z <= 0):
        i = int(np.argmin(z))
        raise NonpositiveLinearComponent(
            f"f(x)'beta = {z[i]:.6g} <= 0 at region point {pts[i].tolist()}"
        )
    return beta


def sample_parameters(
    model: ModelSpec,
    rng: np.random.Generator,
    n: int,
    margin: float = 0.05,
    slope_scale: float = 2.0,
    max_tries: int = 100_000,
) -> np.ndarray:
    """Rejection-sample admissible parameter vectors.

    Draws intercepts in [0.3, 2] and slopes in [-scale, scale], keeping
    vectors whose linear component clears ``margin`` on the positivity
    check points.  Used by group verification and the randomized tests.
    """
    if model.has_affine_basis or not model.region.is_box:
        pts = model.region.extremal_points()
    else:
        pts = model.region.grid(POSITIVITY_GRID_PER_DIM, cap=POSITIVITY_GRID_CAP)
    out: list[np.ndarray] = []
    for _ in range(max_tries):
        if len(out) == n:
            break
        beta = rng.uniform(-slope_scale, slope_scale, model.p)
        beta[0] = rng.uniform(0.3, 2.0)
        z = basis_values(model, pts) @ beta
        if z.min() > margin:
            out.append(beta)
    if len(out) < n:
        raise InvalidSpec("could not sample enough admissible parameter vectors")
    return np.array(out)


def elemental_info(model: ModelSpec, x, beta) -> np.ndarray:
    """lambda(f(x)'beta) f(x) f(x)': the rank-one information of one observation."""
    f = eval_basis(model, x)
    z = float(f @ np.asarray(beta, float))
    lam = intensity(model, z)
    return lam * np.outer(f, f)


def design_info(model: ModelSpec, design: Design, beta) -> np.ndarray:
    """Information matrix of a design: the weighted sum of elemental matrices."""
    design_in_region(model, design)
    F = basis_values(model, design.support)
    z = F @ np.asarray(beta, float)
    if model.intensity_kind == GAMMA_INVERSE_LINK and np.any(z <= 0):
        i = int(np.argmin(z))
        raise NonpositiveLinearComponent(
            f"nonpositive linear component {z[i]:.6g} at support index {i}"
        )
    lam = intensity_values(model, z)
    return (F * (design.weights * lam)[:, None]).T @ F


def info_from_support(F: np.ndarray, lam: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Information matrix from precomputed basis rows and intensities (hot path)."""
    return (F * (w * lam)[:, None]).T @ F


def _quad_nodes(region: Region, order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(order)
    axes, wts = [], []
    for lo, hi in zip(region.lower, region.upper):
        axes.append(0.5 * (hi - lo) * (t + 1) + lo)
        wts.append(0.5 * w)  # normalized: weights integrate the uniform density
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    wq = np.prod(np.stack([m.ravel() for m in wmesh]), axis=0)
    return pts, wq


def measure_nodes(
    model: ModelSpec, nu: WeightingMeasure, order: int = DEFAULT_QUAD_ORDER
) -> tuple[np.ndarray, np.ndarray]:
    """Atoms/quadrature nodes and weights representing nu as a discrete sum."""
    if nu.kind == "discrete":
        model.region.require_inside(nu.points, "measure atom")
        return nu.points, nu.weights
    region = nu.region if nu.region is not None else model.region
    if not region.is_box:
        raise InvalidSpec("uniform weighting measure requires a box region")
    return _quad_nodes(region, order)


def weight_matrix_v(
    model: ModelSpec, beta, nu: WeightingMeasure, order: int = DEFAULT_QUAD_ORDER
) -> np.ndarray:
    """V(beta; nu): the lambda^2-weighted moment matrix of the measure nu."""
    pts, wq = measure_nodes(model, nu, order)
    F = basis_values(model, pts)
    z = F @ np.asarray(beta, float)
    if model.intensity_kind == GAMMA_INVERSE_LINK and np.any(z <= 0):
        i = int(np.argmin(z))
        raise NonpositiveLinearComponent(
            f"nonpositive linear component {z[i]:.6g} at measure node {pts[i].tolist()}"
        )
    lam = intensity_values(model, z)
    return (F * (wq * lam**2)[:, None]).T @ F


def validate_info_matrix(m: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Enforce the information-matrix contract: symmetric and PSD up to tolerance."""
    m = np.asarray(m, float)
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > rel_tol * scale:
        raise InvalidSpec("information matrix is not symmetric")
    trace = float(np.trace(m))
    if np.linalg.eigvalsh(m).min() < -1e-10 * max(trace, 1.0):
        raise InvalidSpec("information matrix is not positive semidefinite")
    return m

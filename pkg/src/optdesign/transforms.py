"""Equivariance machinery.

An affine point map g(x) = b + A x together with the induced basis
matrix Q (satisfying f(g(x)) = Q f(x)) and a parameter-transform mode
forms a ``TransformPair``.  Parameter maps:

* linear mode:   beta -> Q^{-T} beta, which keeps the linear component
  (and hence the intensity) unchanged along g;
* intercept-rescaled mode:  beta -> c(beta) Q^{-T} beta with
  c(beta) = beta_0 / (Q^{-T} beta)_0, which keeps the intercept entry
  fixed and exists because the gamma intensity is scale-homogeneous.

Information matrices transform congruently, M -> Q M Q', so local D-
and IMSE-optimality transfers along pairs; ``transfer_optimal`` packages
the transported design, the parameter map and the pushed-forward
weighting measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSample,
    InvalidSpec,
    NotEquivariant,
    RescaleUndefined,
)
from .model import Design, ModelSpec, WeightingMeasure, basis_values, design_info, merged_design
from .region import Region

PARAM_LINEAR = "linear"
PARAM_RESCALED = "intercept_rescaled"

Q_RESIDUAL_TOL = 1e-9
_VERIFY_POINTS = 50
_VERIFY_SEED = 1729


@dataclass(frozen=True)
class AffinePointMap:
    """g(x) = b + A x with nonsingular A."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, float))
        b = np.atleast_1d(np.asarray(self.b, float))
        if a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
            raise InvalidSpec("point map needs square A and matching offset")
        if abs(np.linalg.det(a)) <= 1e-12:
            raise InvalidSpec("point map matrix is singular")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __call__(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, float))
        out = X @ self.a.T + self.b
        return out if np.asarray(x).ndim > 1 else out[0]

    def inverse(self) -> "AffinePointMap":
        ainv = np.linalg.inv(self.a)
        return AffinePointMap(ainv, -ainv @ self.b)

    def then(self, other: "AffinePointMap") -> "AffinePointMap":
        """The composition x -> other(self(x))."""
        return AffinePointMap(other.a @ self.a, other.a @ self.b + other.b)

    @classmethod
    def identity(cls, dim: int) -> "AffinePointMap":
        return cls(np.eye(dim), np.zeros(dim))


@dataclass(frozen=True)
class TransformPair:
    """Point map, induced basis matrix and parameter-transform mode."""

    g: AffinePointMap
    q: np.ndarray
    param_mode: str = PARAM_LINEAR

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.q, float))
        if q.shape[0] != q.shape[1]:
            raise InvalidSpec("Q must be square")
        if abs(np.linalg.det(q)) <= 1e-12:
            raise InvalidSpec("Q is singular")
        if self.param_mode not in (PARAM_LINEAR, PARAM_RESCALED):
            raise InvalidSpec(f"unknown param mode {self.param_mode!r}")
        object.__setattr__(self, "q", q)


def _q_sample_points(model: ModelSpec) -> np.ndarray:
    pts = model.region.extremal_points()
    if model.region.is_box:
        pts = np.vstack([pts, model.region.grid(5, cap=4096)])
    return pts


def derive_q(model: ModelSpec, g: AffinePointMap) -> np.ndarray:
    """Solve f(g(x)) = Q f(x) for Q from p well-spread region points.

    Points are chosen greedily for maximal volume of the basis sample so
    the linear system is well conditioned; the candidate Q is then
    verified on extra sample points and rejected if the basis is not
    actually equivariant under g.
    """
    pts = _q_sample_points(model)
    F = basis_values(model, pts)  # (n, p)
    chosen: list[int] = []
    residual = F.copy()
    for _ in range(model.p):
        norms = np.linalg.norm(residual, axis=1)
        i = int(np.argmax(norms))
        if norms[i] < 1e-10:
            raise DegenerateSample("could not find p basis-independent region points")
        chosen.append(i)
        u = residual[i] / norms[i]
        residual = residual - np.outer(residual @ u, u)
    Fsel = F[chosen]  # rows f(x_i)'
    Gsel = basis_values(model, g(pts[chosen]))
    # columns of F' are f(x_i); Q F' = G'  =>  Q = solve(F, G)'
    q = np.linalg.solve(Fsel, Gsel).T
    verify_equivariance(model, g, q)
    return q


def verify_equivariance(
    model: ModelSpec, g: AffinePointMap, q: np.ndarray, tol: float = Q_RESIDUAL_TOL
) -> float:
    """Max residual ||f(g(x)) - Q f(x)|| over a fixed verification sample."""
    rng = np.random.default_rng(_VERIFY_SEED)
    pts = np.vstack(
        [model.region.extremal_points(), model.region.sample_interior(rng, _VERIFY_POINTS)]
    )
    res = basis_values(model, g(pts)) - basis_values(model, pts) @ np.asarray(q, float).T
    worst = float(np.abs(res).max())
    if worst > tol:
        raise NotEquivariant(
            f"basis is not linearly equivariant under the point map (residual {worst:.3g})"
        )
    return worst


def make_pair(
    model: ModelSpec,
    g: AffinePointMap,
    param_mode: str = PARAM_LINEAR,
    q: np.ndarray | None = None,
) -> TransformPair:
    """Build a verified pair; Q is derived numerically unless supplied."""
    if q is None:
        q = derive_q(model, g)
    else:
        verify_equivariance(model, g, q)
    if param_mode == PARAM_RESCALED:
        ones = basis_values(model, _q_sample_points(model))[:, 0]
        if np.abs(ones - 1.0).max() > 1e-12:
            raise InvalidSpec("intercept-rescaled mode needs basis component 0 == 1")
    return TransformPair(g=g, q=q, param_mode=param_mode)


def identity_pair(model: ModelSpec, param_mode: str = PARAM_LINEAR) -> TransformPair:
    return TransformPair(
        g=AffinePointMap.identity(model.dim_x), q=np.eye(model.p), param_mode=param_mode
    )


def named_transform(
    model: ModelSpec, name: str, param_mode: str = PARAM_LINEAR
) -> TransformPair:
    """Shortcut transforms: "reflect:k", "swap:j,k" (1-based), "shift_scale:a,c".

    Reflection mirrors coordinate k within the region's bounds, swap
    permutes two coordinates, shift_scale applies x -> a + c x to every
    coordinate.
    """
    d = model.dim_x
    kind, _, args = name.partition(":")
    if kind == "reflect":
        k = int(args) - 1
        if not (0 <= k < d):
            raise InvalidSpec(f"reflect coordinate out of range in {name!r}")
        if not model.region.is_box:
            raise InvalidSpec("reflect shortcut needs a box region")
        a = np.eye(d)
        a[k, k] = -1.0
        b = np.zeros(d)
        b[k] = model.region.lower[k] + model.region.upper[k]
    elif kind == "swap":
        j, k = (int(s) - 1 for s in args.split(","))
        if not (0 <= j < d and 0 <= k < d and j != k):
            raise InvalidSpec(f"bad swap coordinates in {name!r}")
        a = np.eye(d)
        a[[j, k]] = a[[k, j]]
        b = np.zeros(d)
    elif kind == "shift_scale":
        shift, scale = (float(s) for s in args.split(","))
        if scale == 0:
            raise InvalidSpec("shift_scale needs a nonzero scale")
        a = scale * np.eye(d)
        b = shift * np.ones(d)
    else:
        raise InvalidSpec(f"unknown transform shortcut {name!r}")
    return make_pair(model, AffinePointMap(a, b), param_mode=param_mode)


# ---------------------------------------------------------------------------
# parameter maps
# ---------------------------------------------------------------------------
def linear_param_map(pair: TransformPair, beta) -> np.ndarray:
    """Q^{-T} beta."""
    return np.linalg.solve(pair.q.T, np.asarray(beta, float))


def rescale_factor(pair: TransformPair, beta) -> float:
    """c(beta) = beta_0 / (Q^{-T} beta)_0, the intercept-preserving scale."""
    beta = np.asarray(beta, float)
    image0 = float(linear_param_map(pair, beta)[0])
    if image0 <= 0:
        raise RescaleUndefined(
            f"intercept image (Q^-T beta)_0 = {image0:.6g} is not positive"
        )
    return float(beta[0]) / image0


def param_transform(pair: TransformPair, beta) -> np.ndarray:
    beta = np.asarray(beta, float)
    image = linear_param_map(pair, beta)
    if pair.param_mode == PARAM_LINEAR:
        return image
    return rescale_factor(pair, beta) * image


def inverse_pair(pair: TransformPair) -> TransformPair:
    """Group inverse: inverts g affinely and Q; the rescale factor self-inverts."""
    return TransformPair(
        g=pair.g.inverse(), q=np.linalg.inv(pair.q), param_mode=pair.param_mode
    )


def compose_pairs(first: TransformPair, second: TransformPair) -> TransformPair:
    """The pair acting as x -> second(first(x)); Q composes as Q2 Q1."""
    if first.param_mode != second.param_mode:
        raise InvalidSpec("cannot compose pairs with different parameter modes")
    return TransformPair(
        g=first.g.then(second.g), q=second.q @ first.q, param_mode=first.param_mode
    )


# ---------------------------------------------------------------------------
# designs, measures and models under a pair
# ---------------------------------------------------------------------------
def design_image(design: Design, pair: TransformPair, region: Region | None = None) -> Design:
    """Support mapped pointwise, weights kept; coincident images merge.

    When a target region is supplied, images falling outside raise
    OutOfRegion (listing the offenders).
    """
    image = pair.g(design.support)
    if region is not None:
        region.require_inside(image, "image support point")
    return merged_design(image, design.weights)


def map_region(region: Region, pair: TransformPair) -> Region:
    return region.map_affine(pair.g.a, pair.g.b)


def transform_model(model: ModelSpec, pair: TransformPair) -> ModelSpec:
    """Same basis and intensity over the image region."""
    return ModelSpec(
        dim_x=model.dim_x,
        p=model.p,
        basis=model.basis,
        region=map_region(model.region, pair),
        kappa=model.kappa,
        intensity_kind=model.intensity_kind,
        custom_intensity=model.custom_intensity,
        basis_name=model.basis_name,
    )


def push_measure(nu: WeightingMeasure, pair: TransformPair) -> WeightingMeasure:
    """nu^g: atoms map pointwise; a uniform measure maps to the image box."""
    if nu.kind == "discrete":
        return WeightingMeasure.discrete(pair.g(nu.points), nu.weights)
    if nu.region is None:
        raise InvalidSpec(
            "pushing a uniform measure needs its region resolved; "
            "use transfer_optimal or supply WeightingMeasure.uniform(region)"
        )
    return WeightingMeasure.uniform(map_region(nu.region, pair))


def verify_info_equivariance(model: ModelSpec, design: Design, beta, pair: TransformPair) -> float:
    """Entrywise max relative residual of M(xi^g; g~(beta)) against Q M Q'.

    In rescaled mode the right side is c(beta)^{-2} Q M Q', combining the
    congruence law with the scale law M(xi; c beta) = c^{-2} M(xi; beta).
    """
    target = transform_model(model, pair)
    m = design_info(model, design, beta)
    m_img = design_info(target, design_image(design, pair, target.region), param_transform(pair, beta))
    expected = pair.q @ m @ pair.q.T
    if pair.param_mode == PARAM_RESCALED:
        expected = expected / rescale_factor(pair, beta) ** 2
    scale = max(np.abs(expected).max(), np.abs(m_img).max(), 1e-300)
    return float(np.abs(m_img - expected).max() / scale)


@dataclass(frozen=True)
class TransferResult:
    design: Design
    beta: np.ndarray
    nu: WeightingMeasure | None
    model: ModelSpec
    pair: TransformPair


def transfer_optimal(
    model: ModelSpec, design: Design, pair: TransformPair, crit, beta=None
) -> TransferResult:
    """Transport a locally optimal design along a pair.

    The caller asserts that ``design`` is locally optimal at ``beta``
    under ``crit`` on the source model.  Returns the image design on the
    image region, the transformed parameter (when beta is given), and
    for IMSE the pushed-forward weighting measure.
    """
    target = transform_model(model, pair)
    image = design_image(design, pair, target.region)
    beta_image = None if beta is None else param_transform(pair, beta)
    nu_image = None
    if getattr(crit, "kind", None) == "IMSE":
        nu = crit.nu
        if nu.kind == "uniform" and nu.region is None:
            nu = WeightingMeasure.uniform(model.region)
        nu_image = push_measure(nu, pair)
    return TransferResult(design=image, beta=beta_image, nu=nu_image, model=target, pair=pair)

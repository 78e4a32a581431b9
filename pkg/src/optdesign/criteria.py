"""Local D- and IMSE-criteria, sensitivity functions and efficiencies.

Conventions:

* the D-criterion value is det(M^{-1}); its homogeneous version is
  det(M)^(-1/p), which is the one entering D-efficiencies;
* the IMSE value is trace(V M^{-1}) and is already homogeneous;
* singular information maps to +inf, never an exception, so optimizers
  can reject singular designs by plain comparison;
* sensitivity functions certify local optimality via the equivalence
  theorem: a design is locally D-optimal iff the D-sensitivity is
  bounded by p on the region, and locally IMSE-optimal iff the
  IMSE-sensitivity is bounded by trace(V M^{-1}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, SingularInformation
from .model import (
    DEFAULT_QUAD_ORDER,
    Design,
    ModelSpec,
    WeightingMeasure,
    basis_values,
    design_info,
    intensity_values,
    weight_matrix_v,
)

PD_EIG_TOL = 1e-12  # smallest eigenvalue relative to trace
EQUIV_GRID_PER_DIM = 101
EQUIV_GRID_CAP = 10_201
DEFAULT_SENSITIVITY_TOL = 1e-6


@dataclass(frozen=True)
class Criterion:
    """D or IMSE; the IMSE case carries its weighting measure."""

    kind: str
    nu: WeightingMeasure | None = None

    def __post_init__(self):
        if self.kind not in ("D", "IMSE"):
            raise InvalidSpec(f"unknown criterion kind {self.kind!r}")
        if self.kind == "IMSE" and self.nu is None:
            raise InvalidSpec("IMSE criterion needs a weighting measure")

    @classmethod
    def d(cls) -> "Criterion":
        return cls(kind="D")

    @classmethod
    def imse(cls, nu: WeightingMeasure) -> "Criterion":
        return cls(kind="IMSE", nu=nu)


def is_positive_definite(m: np.ndarray) -> bool:
    m = np.asarray(m, float)
    eig = np.linalg.eigvalsh(m)
    return bool(eig.min() > PD_EIG_TOL * max(np.trace(m), 0.0))


def d_value(m: np.ndarray) -> float:
    """det(M^{-1}); +inf when M is singular."""
    if not is_positive_definite(m):
        return np.inf
    return float(1.0 / np.linalg.det(m))


def d_homogeneous(m: np.ndarray, p: int | None = None) -> float:
    """det(M)^(-1/p); +inf when M is singular."""
    m = np.asarray(m, float)
    if p is None:
        p = m.shape[0]
    if not is_positive_definite(m):
        return np.inf
    return float(np.linalg.det(m) ** (-1.0 / p))


def imse_value(
    model: ModelSpec,
    design: Design,
    beta,
    nu: WeightingMeasure,
    order: int = DEFAULT_QUAD_ORDER,
) -> float:
    """trace(V(beta; nu) M(xi; beta)^{-1}); +inf when M is singular."""
    m = design_info(model, design, beta)
    if not is_positive_definite(m):
        return np.inf
    v = weight_matrix_v(model, beta, nu, order=order)
    return float(np.trace(np.linalg.solve(m, v)))


def criterion_value(model: ModelSpec, design: Design, beta, crit: Criterion) -> float:
    """Homogeneous criterion value (D uses det^(-1/p)); +inf for singular designs."""
    if crit.kind == "D":
        return d_homogeneous(design_info(model, design, beta), model.p)
    return imse_value(model, design, beta, crit.nu)


def _inverse_info(model: ModelSpec, design: Design, beta) -> np.ndarray:
    m = design_info(model, design, beta)
    if not is_positive_definite(m):
        raise SingularInformation("information matrix is singular")
    return np.linalg.inv(m)


def sensitivity_values(
    model: ModelSpec, design: Design, beta, crit: Criterion, X
) -> tuple[np.ndarray, float]:
    """Sensitivity at each row of X plus the equivalence-theorem bound.

    D: psi(x) = lambda(f'beta) f' M^{-1} f, bound p.
    IMSE: psi(x) = lambda(f'beta) f' M^{-1} V M^{-1} f, bound trace(V M^{-1}).
    """
    minv = _inverse_info(model, design, beta)
    F = basis_values(model, X)
    lam = intensity_values(model, F @ np.asarray(beta, float))
    if crit.kind == "D":
        core = minv
        bound = float(model.p)
    else:
        v = weight_matrix_v(model, beta, crit.nu)
        core = minv @ v @ minv
        bound = float(np.trace(v @ minv))
    vals = lam * np.einsum("ip,pq,iq->i", F, core, F)
    return vals, bound


def d_sensitivity(model: ModelSpec, design: Design, beta, x) -> float:
    vals, _ = sensitivity_values(model, design, beta, Criterion.d(), np.atleast_2d(x))
    return float(vals[0])


def imse_sensitivity(model: ModelSpec, design: Design, beta, nu: WeightingMeasure, x) -> float:
    vals, _ = sensitivity_values(
        model, design, beta, Criterion.imse(nu), np.atleast_2d(x)
    )
    return float(vals[0])


@dataclass(frozen=True)
class Certificate:
    """Result of an equivalence check over a candidate grid."""

    ok: bool
    max_sensitivity: float
    bound: float
    worst_point: np.ndarray
    n_points: int
    tol: float

    @property
    def gap(self) -> float:
        return self.max_sensitivity - self.bound


def equivalence_points(model: ModelSpec, per_dim: int = EQUIV_GRID_PER_DIM) -> np.ndarray:
    """Region extremal points plus a uniform grid capped at the standard size."""
    ext = model.region.extremal_points()
    grid = model.region.grid(per_dim, cap=EQUIV_GRID_CAP)
    return np.vstack([ext, grid])


def certify(
    model: ModelSpec,
    design: Design,
    beta,
    crit: Criterion,
    tol: float = DEFAULT_SENSITIVITY_TOL,
    points: np.ndarray | None = None,
) -> Certificate:
    """Equivalence check: sensitivity bounded over the region sample within tol.

    The optima of this model family sit at region vertices, so the vertex
    part of the sample is the binding one; the grid guards custom bases.
    """
    X = equivalence_points(model) if points is None else np.atleast_2d(points)
    vals, bound = sensitivity_values(model, design, beta, crit, X)
    i = int(np.argmax(vals))
    scale = max(abs(bound), 1.0)
    return Certificate(
        ok=bool(vals[i] <= bound + tol * scale),
        max_sensitivity=float(vals[i]),
        bound=bound,
        worst_point=X[i].copy(),
        n_points=len(X),
        tol=tol,
    )


@dataclass(frozen=True)
class EfficiencyReport:
    value: float
    criterion: Criterion
    beta: np.ndarray
    reference_design: Design


def efficiency(
    model: ModelSpec, design: Design, beta, crit: Criterion, reference: Design
) -> EfficiencyReport:
    """Criterion ratio Phi(reference) / Phi(design) against a locally optimal reference.

    The caller asserts local optimality of ``reference`` at beta; a
    singular candidate design reports efficiency 0.
    """
    beta = np.asarray(beta, float)
    num = criterion_value(model, reference, beta, crit)
    den = criterion_value(model, design, beta, crit)
    value = 0.0 if np.isinf(den) else num / den
    return EfficiencyReport(
        value=float(value), criterion=crit, beta=beta, reference_design=reference
    )


def maximin_objective(
    model: ModelSpec,
    design: Design,
    crit: Criterion,
    param_set,
    local_optima,
) -> float:
    """max over the parameter set of Phi_beta(design) / Phi_beta(optimum).

    This is the reciprocal of the worst-case efficiency; +inf when the
    design is singular at some parameter.
    """
    if len(param_set) == 0:
        raise InvalidSpec("maximin objective needs a nonempty parameter set")
    if len(param_set) != len(local_optima):
        raise InvalidSpec("param_set and local_optima lengths differ")
    worst = 0.0
    for beta, opt in zip(param_set, local_optima):
        denom = criterion_value(model, opt, beta, crit)
        numer = criterion_value(model, design, beta, crit)
        if np.isinf(numer):
            return np.inf
        worst = max(worst, numer / denom)
    return float(worst)

"""Locally optimal designs: closed forms, multiplicative weight iteration,
optimality-region classification and the maximin-efficiency search.

Weight optimization on a fixed support uses multiplicative updates
certified afterwards by the equivalence check:

* D:     w <- w * psi / p            (monotone as is);
* IMSE:  w <- w * sqrt(s / bound)    (exponent 1/2 is the classical
  monotone choice for linear criteria; the exponent-1 update overshoots
  and limit-cycles on this model family).

Closed forms cover the one-factor endpoint designs, the two-factor
model with one inactive slope, and the two-factor equal-slopes family;
each is cross-checked against the numerical optimizer in the tests.

The maximin search runs golden-section over the one-parameter family of
group-invariant designs, with the locally optimal design recomputed (and
cached) at every grid parameter, optionally appending the analytic
large-slope limit of the equal-slopes D-efficiency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .criteria import Certificate, Criterion, certify, criterion_value
from .errors import (
    EmptyGrid,
    EquivalenceCheckFailed,
    InvalidSpec,
    NoConvergence,
    OutOfParameterRegion,
    SingularInformation,
    WrongModelShape,
)
from .model import (
    Design,
    ModelSpec,
    WeightingMeasure,
    basis_values,
    info_from_support,
    intensity_values,
    merged_design,
    validate_beta,
    weight_matrix_v,
)


@dataclass(frozen=True)
class OptimizeOptions:
    max_iters: int = 10_000
    weight_tol: float = 1e-10
    sensitivity_tol: float = 1e-6
    prune_threshold: float = 1e-8

    def __post_init__(self):
        if min(self.max_iters, self.weight_tol, self.sensitivity_tol, self.prune_threshold) <= 0:
            raise InvalidSpec("optimizer options must all be positive")


DEFAULT_OPTIONS = OptimizeOptions()


class RegionLabel(enum.Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    INTERIOR = "interior"


# ---------------------------------------------------------------------------
# multiplicative weight iteration on a fixed support
# ---------------------------------------------------------------------------
def _support_inputs(model: ModelSpec, beta, crit: Criterion, support):
    support = np.atleast_2d(np.asarray(support, float))
    model.region.require_inside(support, "support candidate")
    F = basis_values(model, support)
    if np.linalg.matrix_rank(F) < model.p:
        raise SingularInformation("support cannot carry a nonsingular information matrix")
    lam = intensity_values(model, F @ np.asarray(beta, float))
    V = weight_matrix_v(model, beta, crit.nu) if crit.kind == "IMSE" else None
    return support, F, lam, V


def _sensitivities(F, lam, V, w):
    """Support sensitivities and the current bound (p or trace(V M^-1))."""
    M = info_from_support(F, lam, w)
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise SingularInformation("information matrix became singular") from exc
    if V is None:
        s = lam * np.einsum("ip,pq,iq->i", F, Minv, F)
        bound = float(F.shape[1])
    else:
        core = Minv @ V @ Minv
        s = lam * np.einsum("ip,pq,iq->i", F, core, F)
        bound = float(np.einsum("pq,qp->", V, Minv))
    return s, bound


def _iterate_weights(F, lam, V, opts: OptimizeOptions, w0=None, record: bool = False):
    """Run the multiplicative update until the support sensitivity gap closes.

    Returns (weights, iterations, gap, descent_trace).  The descent trace
    (criterion value per iteration) is only collected when asked for.
    """
    m, p = F.shape
    w = np.full(m, 1.0 / m) if w0 is None else np.asarray(w0, float) / np.sum(w0)
    trace: list[float] = []
    gap = np.inf
    for k in range(opts.max_iters):
        s, bound = _sensitivities(F, lam, V, w)
        if record:
            if V is None:
                trace.append(float(np.linalg.det(info_from_support(F, lam, w)) ** (-1.0 / p)))
            else:
                trace.append(bound)
        gap = float(s.max() - bound)
        if gap <= opts.sensitivity_tol * max(abs(bound), 1.0):
            return w, k, gap, trace
        w = w * (s / bound) if V is None else w * np.sqrt(s / bound)
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            raise SingularInformation("weight iteration degenerated")
        w = w / total
    raise NoConvergence(
        f"weight iteration missed tolerance after {opts.max_iters} iterations "
        f"(remaining gap {gap:.3g})",
        gap=gap,
        iterations=opts.max_iters,
    )


@dataclass(frozen=True)
class FixedSupportResult:
    design: Design
    iterations: int
    gap: float
    certificate: Certificate
    descent: tuple[float, ...] = ()


def certificate_tol(opts: OptimizeOptions) -> float:
    """Certification tolerance floor: pruning perturbs sensitivities by
    O(prune_threshold), so certificates cannot be tighter than that."""
    return max(opts.sensitivity_tol, 10.0 * opts.prune_threshold)


def fixed_support_result(
    model: ModelSpec,
    beta,
    crit: Criterion,
    support,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
    record_descent: bool = False,
) -> FixedSupportResult:
    """Optimal weights on a fixed support, pruned and support-certified.

    Weights below the prune threshold are dropped; the kept support is
    then re-polished to the sensitivity tolerance before the certificate
    over the full candidate set is taken.
    """
    beta = validate_beta(model, beta)
    support, F, lam, V = _support_inputs(model, beta, crit, support)
    w, iters, gap, trace = _iterate_weights(F, lam, V, opts, record=record_descent)
    keep = w > opts.prune_threshold
    if not np.all(keep):
        if np.linalg.matrix_rank(F[keep]) < model.p:
            raise SingularInformation("pruning left a rank-deficient support")
        w2, it2, gap, _ = _iterate_weights(F[keep], lam[keep], V, opts, w0=w[keep])
        iters += it2
        w = np.zeros_like(w)
        w[keep] = w2
    design = merged_design(support[keep], w[keep])
    cert = certify(
        model, design, beta, crit, tol=certificate_tol(opts), points=support
    )
    if not cert.ok:
        raise NoConvergence(
            "pruned design failed the support-restricted equivalence check",
            gap=cert.gap,
            iterations=iters,
        )
    return FixedSupportResult(
        design=design, iterations=iters, gap=gap, certificate=cert, descent=tuple(trace)
    )


def optimal_weights_fixed_support(
    model: ModelSpec, beta, crit: Criterion, support, opts: OptimizeOptions = DEFAULT_OPTIONS
) -> Design:
    return fixed_support_result(model, beta, crit, support, opts).design


def batch_fixed_support_weights(
    model: ModelSpec,
    betas,
    crit: Criterion,
    support,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized multiplicative iteration over many parameter vectors.

    Same update and stopping rule as the scalar path, run simultaneously
    for every row of ``betas`` with converged rows masked out.  Returns
    (weights, iterations, gaps); rows that missed the tolerance keep
    their last iterate with gaps above tolerance, callers decide.
    """
    betas = np.atleast_2d(np.asarray(betas, float))
    support = np.atleast_2d(np.asarray(support, float))
    model.region.require_inside(support, "support candidate")
    F = basis_values(model, support)
    if np.linalg.matrix_rank(F) < model.p:
        raise SingularInformation("support cannot carry a nonsingular information matrix")
    m, p = F.shape
    B = len(betas)
    lam = np.stack([intensity_values(model, F @ b) for b in betas])
    if crit.kind == "IMSE":
        V = np.stack([weight_matrix_v(model, b, crit.nu) for b in betas])
    else:
        V = None
    w = np.full((B, m), 1.0 / m)
    gaps = np.full(B, np.inf)
    iters = np.zeros(B, dtype=int)
    active = np.arange(B)
    for k in range(opts.max_iters):
        if len(active) == 0:
            break
        la = lam[active]
        M = np.einsum("bm,mp,mq->bpq", w[active] * la, F, F)
        Minv = np.linalg.inv(M)
        if V is None:
            s = la * np.einsum("mp,bpq,mq->bm", F, Minv, F)
            bound = np.full(len(active), float(p))
        else:
            core = Minv @ V[active] @ Minv
            s = la * np.einsum("mp,bpq,mq->bm", F, core, F)
            bound = np.einsum("bpq,bqp->b", V[active], Minv)
        g = s.max(axis=1) - bound
        gaps[active] = g
        done = g <= opts.sensitivity_tol * np.maximum(np.abs(bound), 1.0)
        iters[active[done]] = k
        still = ~done
        if np.any(still):
            idx = active[still]
            ratio = s[still] / bound[still, None]
            upd = w[idx] * (ratio if V is None else np.sqrt(ratio))
            w[idx] = upd / upd.sum(axis=1, keepdims=True)
        active = active[still]
    iters[active] = opts.max_iters
    return w, iters, gaps


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------
ONE_FACTOR_VARIANTS = ("uniform", "endpoints", "midpoint")


def one_factor_variant_measure(variant: str) -> WeightingMeasure:
    """The weighting measure each one-factor closed-form variant refers to."""
    if variant == "uniform":
        return WeightingMeasure.uniform()
    if variant == "endpoints":
        return WeightingMeasure.discrete([[0.0], [1.0]], [0.5, 0.5])
    if variant == "midpoint":
        return WeightingMeasure.discrete([[0.5]], [1.0])
    raise InvalidSpec(f"unknown variant {variant!r}; one of {ONE_FACTOR_VARIANTS}")


def _require_unit_interval_model(model: ModelSpec):
    ok = (
        model.dim_x == 1
        and model.p == 2
        and model.has_affine_basis
        and model.region.is_box
        and abs(model.region.lower[0]) <= 1e-12
        and abs(model.region.upper[0] - 1.0) <= 1e-12
    )
    if not ok:
        raise WrongModelShape("closed form needs the one-factor affine model on [0, 1]")


def one_factor_imse_weights(model: ModelSpec, beta, variant: str) -> Design:
    """Locally IMSE-optimal endpoint designs on [0, 1] for the three standard measures.

    Weights (1-w*, w*) at (0, 1):
      uniform    w* = 1/2,
      endpoints  w* = b0 / (2 b0 + b1),
      midpoint   w* = (b0 + b1) / (2 b0 + b1).
    """
    _require_unit_interval_model(model)
    beta = validate_beta(model, beta)
    b0, b1 = float(beta[0]), float(beta[1])
    if variant == "uniform":
        w = 0.5
    elif variant == "endpoints":
        w = b0 / (2 * b0 + b1)
    elif variant == "midpoint":
        w = (b0 + b1) / (2 * b0 + b1)
    else:
        raise InvalidSpec(f"unknown variant {variant!r}; one of {ONE_FACTOR_VARIANTS}")
    return Design([[0.0], [1.0]], [1.0 - w, w])


# two-factor vertex conventions: canonical support in lexicographic order
VERTICES_LEX = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
_X1, _X2, _X3, _X4 = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)


def zero_slope_optimal_weight(gamma2: float) -> float:
    """Optimal orbit weight for the two-factor model when the first slope is zero.

    The reflection-invariant design puts weight w on each of (0,0), (1,0)
    and 1/2 - w on each of (0,1), (1,1).  Maximizing the determinant
    2 (l1^2 l3 w^2 (1/2 - w) + l1 l3^2 w (1/2 - w)^2) over w gives, with
    u = g (g + 2) and g = beta2/beta0,

        w* = (u - 1 + sqrt(u^2 + u + 1)) / (6 u),

    and the continuous limit w* = 1/4 at g = 0.  The resulting design is
    exactly locally D-optimal (region-wide sensitivity equals p); see the
    brute-force oracle and certification tests.
    """
    g = float(gamma2)
    if not g > -0.5:
        raise OutOfParameterRegion(f"gamma2 = {g} outside (-1/2, inf)")
    if g == 0.0:
        return 0.25
    u = g * (g + 2.0)
    return float((u - 1.0 + np.sqrt(u * u + u + 1.0)) / (6.0 * u))


def equal_slopes_optimal_design(gamma: float) -> Design:
    """Locally D-optimal design for the two-factor model with equal slopes.

    g = beta/beta0 > -1/2.  Three regimes, continuous at both thresholds
    and each certified by the equivalence check in the tests:

      g >= 1:            equal weights 1/3 on (0,0), (1,0), (0,1);
      -1/3 < g < 1:      w1 = (3g+1)/(4(2g+1)) at (0,0),
                         w2 = (g+1)^2/(4(2g+1)) at (1,0) and (0,1),
                         w3 = (1-g)/4 at (1,1);
      -1/2 < g <= -1/3:  equal weights 1/3 on (1,0), (0,1), (1,1).

    Support is returned in lexicographic order with zero weights dropped.
    """
    g = float(gamma)
    if not g > -0.5:
        raise OutOfParameterRegion(f"gamma = {g} outside (-1/2, inf)")
    if g >= 1.0:
        pts = [_X1, _X2, _X3]
        wts = [1 / 3] * 3
    elif g <= -1 / 3:
        pts = [_X2, _X3, _X4]
        wts = [1 / 3] * 3
    else:
        w1 = (3 * g + 1) / (4 * (2 * g + 1))
        w2 = (g + 1) ** 2 / (4 * (2 * g + 1))
        w3 = (1 - g) / 4
        pts = [_X1, _X2, _X3, _X4]
        wts = [w1, w2, w2, w3]
    order = np.lexsort(np.array(pts, float).T[::-1])
    sup = np.array(pts, float)[order]
    w = np.array(wts, float)[order]
    keep = w > 0
    return Design(sup[keep], w[keep] / w[keep].sum())


def classify_two_factor_region(gamma1: float, gamma2: float) -> RegionLabel:
    """Optimality-region label for the two-factor model in reduced parameters.

    The minimally supported three-vertex design omitting one vertex is
    locally D-optimal exactly on the matching closed subregion; ties on
    boundaries resolve to the lowest region index.
    """
    g1, g2 = float(gamma1), float(gamma2)
    if not (g1 > -1 and g2 > -1 and g1 + g2 > -1):
        raise OutOfParameterRegion(f"({g1}, {g2}) outside the reduced parameter region")
    if 1 - g1 * g2 <= 0:
        return RegionLabel.B1
    if (1 + g1 + g2) ** 2 - g1 * g2 <= 0:
        return RegionLabel.B2
    if (1 + g1) ** 2 + g1 * g2 <= 0:
        return RegionLabel.B3
    if (1 + g2) ** 2 + g1 * g2 <= 0:
        return RegionLabel.B4
    return RegionLabel.INTERIOR


MINIMAL_SUPPORTS = {
    RegionLabel.B1: np.array([_X1, _X2, _X3]),
    RegionLabel.B2: np.array([_X2, _X3, _X4]),
    RegionLabel.B3: np.array([_X1, _X2, _X4]),
    RegionLabel.B4: np.array([_X1, _X3, _X4]),
}


def minimal_design(label: RegionLabel) -> Design:
    """The equal-1/3 three-vertex design attached to a non-interior label."""
    if label is RegionLabel.INTERIOR:
        raise InvalidSpec("interior points have no minimally supported optimum")
    return Design(MINIMAL_SUPPORTS[label], np.full(3, 1 / 3))


# ---------------------------------------------------------------------------
# general local optimization
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class OptimizeResult:
    design: Design
    criterion_value: float
    certificate: Certificate
    iterations: int


_MAX_AUGMENTATIONS = 50


def local_opt_result(
    model: ModelSpec,
    beta,
    crit: Criterion,
    candidates=None,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
) -> OptimizeResult:
    """Certified locally optimal design.

    Candidates default to the region's extremal points (optimal supports
    of this model family sit at vertices).  If the full-region check
    fails, the worst violator joins the candidate set and the weight
    step reruns, up to a fixed number of augmentations (relevant only for
    custom bases).
    """
    beta = validate_beta(model, beta)
    cand = (
        model.region.extremal_points()
        if candidates is None
        else np.atleast_2d(np.asarray(candidates, float))
    )
    iters = 0
    for _ in range(_MAX_AUGMENTATIONS + 1):
        res = fixed_support_result(model, beta, crit, cand, opts)
        iters += res.iterations
        cert = certify(model, res.design, beta, crit, tol=certificate_tol(opts))
        if cert.ok:
            return OptimizeResult(
                design=res.design,
                criterion_value=criterion_value(model, res.design, beta, crit),
                certificate=cert,
                iterations=iters,
            )
        worst = cert.worst_point
        if np.min(np.abs(cand - worst).max(axis=1)) < 1e-9:
            break  # violator already a candidate: augmentation cannot help
        cand = np.vstack([cand, worst])
    raise EquivalenceCheckFailed(
        f"equivalence check failed: sensitivity {cert.max_sensitivity:.9g} > "
        f"bound {cert.bound:.9g} at {cert.worst_point.tolist()}",
        worst_point=cert.worst_point,
        max_sensitivity=cert.max_sensitivity,
        bound=cert.bound,
    )


def local_opt_design(
    model: ModelSpec,
    beta,
    crit: Criterion,
    candidates=None,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
) -> Design:
    return local_opt_result(model, beta, crit, candidates, opts).design


# ---------------------------------------------------------------------------
# maximin efficiency over an invariant family
# ---------------------------------------------------------------------------
def equal_slopes_limit_efficiency_cubed(w) -> np.ndarray:
    """Large-slope limit of the cubed D-efficiency of the two-orbit family: 27 w (1-2w)(1-w) / 4."""
    w = np.asarray(w, float)
    return 27.0 * w * (1.0 - 2.0 * w) * (1.0 - w) / 4.0


def gamma_grid(lo: float = -0.499, hi: float = 1e4, n: int = 160, log_from: float = 1.0) -> np.ndarray:
    """Slope-ratio grid: linear up to ``log_from``, log-spaced beyond.

    Minimal efficiencies of this family are attained towards the region
    boundary and at large slopes, so half the points go to each part.
    """
    n_lin = n // 2
    lin = np.linspace(lo, log_from, n_lin, endpoint=False)
    log = np.geomspace(log_from, hi, n - n_lin)
    return np.concatenate([lin, log])


def equal_slopes_params(gammas) -> list[np.ndarray]:
    return [np.array([1.0, g, g]) for g in np.asarray(gammas, float)]


@dataclass(frozen=True)
class MaximinResult:
    design: Design
    w_star: float
    min_efficiency: float
    efficiencies: np.ndarray
    limit_efficiency: float | None
    boundary_attained: bool
    iterations: int


def invariant_family_design(partition, w: float) -> Design:
    """Two-orbit invariant design: per-point weight w on the first orbit."""
    sizes = [len(o) for o in partition.orbits]
    if len(sizes) != 2:
        raise InvalidSpec("the one-parameter family needs exactly two orbits")
    s0, s1 = sizes
    w2 = (1.0 - s0 * w) / s1
    if w <= 0 or w2 <= 0:
        raise InvalidSpec(f"family parameter w = {w} leaves a nonpositive orbit weight")
    from .invariance import invariant_design  # local import to avoid a cycle

    return invariant_design(partition, [w, w2])


def _family_weight_vector(partition, w: float, n: int) -> np.ndarray:
    sizes = [len(o) for o in partition.orbits]
    s0, s1 = sizes
    out = np.empty(n)
    out[list(partition.orbits[0])] = w
    out[list(partition.orbits[1])] = (1.0 - s0 * w) / s1
    return out


def _golden_max(f, lo: float, hi: float, xtol: float = 1e-8, max_iter: int = 200):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


@dataclass(frozen=True)
class _FamilyEvaluator:
    """Precomputed per-parameter data for fast efficiency evaluation of a family."""

    partition: object
    F: np.ndarray
    lam: np.ndarray
    opt_vals: np.ndarray
    v_mats: np.ndarray | None
    p: int
    iterations: int

    def efficiencies(self, w: float) -> np.ndarray:
        wvec = _family_weight_vector(self.partition, w, len(self.partition.candidates))
        M = np.einsum("bm,mp,mq->bpq", self.lam * wvec, self.F, self.F)
        if self.v_mats is None:
            det = np.linalg.det(M)
            vals = np.where(det > 0, det, np.nan) ** (-1.0 / self.p)
        else:
            vals = np.einsum("bpq,bqp->b", self.v_mats, np.linalg.inv(M))
        eff = self.opt_vals / vals
        return np.where(np.isfinite(eff), eff, 0.0)


def family_evaluator(
    model: ModelSpec,
    crit: Criterion,
    partition,
    param_grid,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
) -> _FamilyEvaluator:
    """Cache locally optimal criterion values and support data over a grid.

    The locally optimal design at each grid parameter is computed with
    ``local_opt_result`` (certified) on the partition's candidate set.
    """
    params = [np.asarray(b, float) for b in param_grid]
    if len(params) == 0:
        raise EmptyGrid("need a nonempty parameter grid")
    if len(partition.orbits) != 2:
        raise InvalidSpec("the one-parameter family needs exactly two orbits")
    cand = partition.candidates
    F = basis_values(model, cand)
    lam = np.stack([intensity_values(model, F @ validate_beta(model, b)) for b in params])
    opt_vals = np.empty(len(params))
    iters = 0
    for i, b in enumerate(params):
        res = local_opt_result(model, b, crit, candidates=cand, opts=opts)
        opt_vals[i] = res.criterion_value
        iters += res.iterations
    v_mats = (
        np.stack([weight_matrix_v(model, b, crit.nu) for b in params])
        if crit.kind == "IMSE"
        else None
    )
    return _FamilyEvaluator(
        partition=partition, F=F, lam=lam, opt_vals=opt_vals, v_mats=v_mats,
        p=model.p, iterations=iters,
    )


def maximin_invariant(
    model: ModelSpec,
    crit: Criterion,
    partition,
    param_grid,
    opts: OptimizeOptions = DEFAULT_OPTIONS,
    include_gamma_infinity_limit: bool = False,
    w_tol: float = 1e-8,
    evaluator: _FamilyEvaluator | None = None,
) -> MaximinResult:
    """Maximin-efficient member of a two-orbit invariant family.

    The inner loop computes (and caches) the certified locally optimal
    design at every grid parameter; the outer loop runs golden-section
    over the family parameter w.  ``include_gamma_infinity_limit``
    appends the analytic large-slope limit term of the equal-slopes
    D-family so the unattained infimum is represented exactly.

    ``boundary_attained`` flags a minimum at the grid's last parameter or
    at the limit term, i.e. a supremum the grid may not attain.
    """
    if include_gamma_infinity_limit and crit.kind != "D":
        raise InvalidSpec("the analytic limit term applies to the D-criterion family")
    ev = evaluator if evaluator is not None else family_evaluator(
        model, crit, partition, param_grid, opts
    )
    sizes = [len(o) for o in partition.orbits]

    eps = 1e-9
    lo, hi = eps, 1.0 / sizes[0] - eps

    def min_eff(w: float) -> float:
        worst = float(ev.efficiencies(w).min())
        if include_gamma_infinity_limit:
            worst = min(worst, float(equal_slopes_limit_efficiency_cubed(w)) ** (1.0 / 3.0))
        return worst

    w_star, best = _golden_max(min_eff, lo, hi, xtol=w_tol)
    eff_grid = ev.efficiencies(w_star)
    limit_eff = (
        float(equal_slopes_limit_efficiency_cubed(w_star)) ** (1.0 / 3.0)
        if include_gamma_infinity_limit
        else None
    )
    at_edge = bool(np.argmin(eff_grid) == len(eff_grid) - 1)
    at_limit = limit_eff is not None and limit_eff <= eff_grid.min()
    return MaximinResult(
        design=invariant_family_design(partition, w_star),
        w_star=float(w_star),
        min_efficiency=float(best),
        efficiencies=eff_grid,
        limit_efficiency=limit_eff,
        boundary_attained=at_edge or at_limit,
        iterations=ev.iterations,
    )

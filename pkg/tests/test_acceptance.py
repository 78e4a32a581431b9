"""Acceptance gate.

Eight end-to-end criteria, each asserted at its stated tolerance and
printing one pass/fail line (run with ``pytest -s`` to see every line).

Criterion 3 (reference-table reproduction at 1e-3) is known to fail on
one row: the embedded reference row for beta = (1, 1, 1) differs from
the certified optimum by 1.8e-3 in its first weight (two independent
optimizers agree on the optimum, and the equivalence certificate rejects
the reference row by a 1.4e-2 relative sensitivity violation).  The
check is asserted faithfully at its stated tolerance anyway; see
README and the reproduce target's diff report.
"""

import time

import numpy as np
import pytest

from optdesign import (
    Criterion,
    Design,
    WeightingMeasure,
    certify,
    criterion_value,
    design_image,
    design_info,
    generate_group,
    local_opt_design,
    make_model,
    make_pair,
    maximin_invariant,
    named_transform,
    one_factor_imse_weights,
    one_factor_variant_measure,
    param_transform,
    sample_parameters,
    symmetrize,
    transfer_optimal,
    transform_model,
    weight_matrix_v,
    zero_slope_optimal_weight,
)
from optdesign.criteria import equivalence_points, sensitivity_values
from optdesign.model import basis_values, intensity_values
from optdesign.optimize import (
    OptimizeOptions,
    RegionLabel,
    batch_fixed_support_weights,
    classify_two_factor_region,
    equal_slopes_params,
    gamma_grid,
    minimal_design,
)
from optdesign.reproduce import TABLE2_ROWS, equal_slopes_partition
from optdesign.transforms import AffinePointMap

ONE = make_model(1, "linear")
TWO = make_model(2, "additive")
VERTICES = TWO.region.extremal_points()
SEED = 20240101


def report(number: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")


# ---------------------------------------------------------------------------
# 1. one-factor endpoint closed forms vs the numerical optimizer
# ---------------------------------------------------------------------------
def test_criterion_1_closed_forms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    betas = sample_parameters(ONE, rng, 200)
    support = np.array([[0.0], [1.0]])
    opts = OptimizeOptions(sensitivity_tol=1e-12, max_iters=100_000)
    worst = 0.0
    for variant in ("uniform", "endpoints", "midpoint"):
        crit = Criterion.imse(one_factor_variant_measure(variant))
        W, iters, _ = batch_fixed_support_weights(ONE, betas, crit, support, opts)
        assert iters.max() < opts.max_iters  # every run met its stopping rule
        for beta, w_num in zip(betas, W):
            w_closed = one_factor_imse_weights(ONE, beta, variant).weights
            worst = max(worst, float(np.abs(w_num - w_closed).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 5.0
    report(1, "endpoint closed forms", ok,
           f"max |closed-numeric| = {worst:.2e} over 600 runs in {elapsed:.2f}s")
    assert worst <= 1e-6
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# 2. optimality-region classification over a 200 x 200 grid
# ---------------------------------------------------------------------------
def test_criterion_2_region_classification():
    t0 = time.perf_counter()
    crit = Criterion.d()
    vals = np.linspace(-1.0, 5.0, 201)[1:]
    check_points = equivalence_points(TWO)
    labelled = {lab: [] for lab in RegionLabel}
    for g1 in vals:
        for g2 in vals:
            if g1 + g2 <= -1.0:
                continue
            labelled[classify_two_factor_region(g1, g2)].append((g1, g2))

    n_checked, violations = 0, 0
    for lab in (RegionLabel.B1, RegionLabel.B2, RegionLabel.B3, RegionLabel.B4):
        design = minimal_design(lab)
        for g1, g2 in labelled[lab]:
            svals, bound = sensitivity_values(TWO, design, [1.0, g1, g2], crit, check_points)
            if svals.max() > 3.0 + 1e-6:
                violations += 1
            n_checked += 1

    interior = labelled[RegionLabel.INTERIOR]
    betas = np.array([[1.0, g1, g2] for g1, g2 in interior])
    W, iters, gaps = batch_fixed_support_weights(
        TWO, betas, crit, VERTICES, OptimizeOptions(max_iters=500_000)
    )
    interior_ok = np.all(gaps <= 1e-6 * 3.0) and np.all(W.min(axis=1) > 1e-8)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and interior_ok and elapsed < 60.0
    report(
        2, "optimality regions", ok,
        f"{n_checked} labelled points certified, {len(interior)} interior points "
        f"4-positive (min weight {W.min():.2e}) in {elapsed:.1f}s",
    )
    assert violations == 0
    assert interior_ok
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 3. reference table of IMSE-optimal weights (known one-row discrepancy)
# ---------------------------------------------------------------------------
def test_criterion_3_imse_reference_rows():
    t0 = time.perf_counter()
    crit = Criterion.imse(WeightingMeasure.uniform())
    opts = OptimizeOptions(sensitivity_tol=1e-9)
    diffs = {}
    for beta, expected in TABLE2_ROWS:
        d = local_opt_design(TWO, np.array(beta), crit, opts=opts)
        weights = np.array([d.weight_at(v) for v in VERTICES])
        diffs[beta] = float(np.abs(weights - np.array(expected)).max())
    elapsed = time.perf_counter() - t0
    worst_row = max(diffs, key=diffs.get)
    ok = max(diffs.values()) <= 1e-3 and elapsed < 10.0
    report(
        3, "IMSE reference rows", ok,
        f"max |computed-reference| = {diffs[worst_row]:.2e} at beta={worst_row} "
        f"in {elapsed:.2f}s"
        + ("" if ok else " (known reference-row imprecision, see README)"),
    )
    assert elapsed < 10.0
    assert max(diffs.values()) <= 1e-3, (
        f"row {worst_row}: 3-decimal reference values differ from the certified "
        f"optimum by {diffs[worst_row]:.2e}; the certified optimum at (1,1,1) is "
        "(0.251843, 0.299628, 0.299628, 0.148901)"
    )


# ---------------------------------------------------------------------------
# 4. closed-form invariant weight vs brute-force determinant maximizer
# ---------------------------------------------------------------------------
def brute_force_wstar(gamma2: float, n: int = 10**6) -> float:
    F = basis_values(TWO, VERTICES)
    lam = intensity_values(TWO, F @ np.array([1.0, 0.0, gamma2]))
    best_w, best_det = 0.0, -np.inf
    for chunk in np.array_split(np.linspace(1e-9, 0.5 - 1e-9, n), 8):
        wmat = np.empty((len(chunk), 4))
        wmat[:, 0] = chunk
        wmat[:, 2] = chunk
        wmat[:, 1] = 0.5 - chunk
        wmat[:, 3] = 0.5 - chunk
        det = np.linalg.det(np.einsum("bm,mp,mq->bpq", wmat * lam, F, F))
        i = int(det.argmax())
        if det[i] > best_det:
            best_det, best_w = det[i], chunk[i]
    return float(best_w)


def test_criterion_4_invariant_weight_curve():
    assert zero_slope_optimal_weight(0.0) == 0.25  # exact limit branch
    t0 = time.perf_counter()
    worst = 0.0
    for g2 in np.linspace(-0.45, 10.0, 50):
        diff = abs(zero_slope_optimal_weight(g2) - brute_force_wstar(g2))
        worst = max(worst, diff)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-5
    report(4, "invariant weight closed form", ok,
           f"max |closed-brute force| = {worst:.2e} over 50 slopes in {elapsed:.1f}s")
    assert worst <= 1e-5


# ---------------------------------------------------------------------------
# 5. maximin efficiency over the equal-slopes family
# ---------------------------------------------------------------------------
def test_criterion_5_maximin():
    t0 = time.perf_counter()
    part = equal_slopes_partition(TWO)
    params = equal_slopes_params(gamma_grid(lo=-0.499, hi=1e4, n=160))
    from optdesign.optimize import (
        equal_slopes_limit_efficiency_cubed,
        family_evaluator,
    )

    ev = family_evaluator(TWO, Criterion.d(), part, params)
    result = maximin_invariant(
        TWO, Criterion.d(), part, params,
        include_gamma_infinity_limit=True, evaluator=ev,
    )
    uniform_min = min(
        float(ev.efficiencies(0.25).min()),
        float(equal_slopes_limit_efficiency_cubed(0.25)) ** (1 / 3),
    )
    elapsed = time.perf_counter() - t0
    ok = (
        abs(result.w_star - 0.21132) <= 1e-4
        and abs(result.min_efficiency - 0.8660) <= 1e-3
        and abs(uniform_min - 0.8585) <= 1e-3
        and elapsed < 30.0
    )
    report(
        5, "maximin efficiency", ok,
        f"w* = {result.w_star:.6f}, min eff = {result.min_efficiency:.6f}, "
        f"uniform min eff = {uniform_min:.6f} in {elapsed:.1f}s",
    )
    assert abs(result.w_star - 0.21132) <= 1e-4
    assert abs(result.min_efficiency - 0.8660) <= 1e-3
    assert abs(uniform_min - 0.8585) <= 1e-3
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# 6. equivariance laws, 500 random cases each
# ---------------------------------------------------------------------------
def _random_case(rng):
    """Random model, admissible beta, design on the region, coordinatewise-affine map."""
    if rng.random() < 0.5:
        model = ONE
    else:
        model = TWO
    beta = sample_parameters(model, rng, 1)[0]
    k = int(rng.integers(model.p, model.p + 3))
    pts = np.vstack(
        [model.region.extremal_points(), model.region.sample_interior(rng, k)]
    )
    idx = rng.choice(len(pts), size=min(len(pts), k + 1), replace=False)
    pts = pts[idx]
    raw = rng.uniform(0.05, 1.0, len(pts))
    design = Design(pts, raw / raw.sum())
    d = model.dim_x
    scale = rng.uniform(0.3, 2.5, d) * rng.choice([-1.0, 1.0], d)
    a = np.diag(scale)
    if d == 2 and rng.random() < 0.3:
        a = a[[1, 0]]  # compose with a coordinate swap
    g = AffinePointMap(a, rng.uniform(-1.5, 1.5, d))
    pair = make_pair(model, g)
    return model, beta, design, pair


def test_criterion_6_equivariance_laws():
    rng = np.random.default_rng(SEED + 6)
    t0 = time.perf_counter()
    worst = dict(congruence=0.0, det=0.0, imse=0.0, scale_m=0.0, scale_v=0.0)
    for _ in range(500):
        model, beta, design, pair = _random_case(rng)
        target = transform_model(model, pair)
        m = design_info(model, design, beta)
        m_img = design_info(
            target, design_image(design, pair), param_transform(pair, beta)
        )
        expected = pair.q @ m @ pair.q.T
        worst["congruence"] = max(
            worst["congruence"],
            float(np.abs(m_img - expected).max() / np.abs(expected).max()),
        )
        det_lhs = np.linalg.det(m_img)
        det_rhs = np.linalg.det(m) * np.linalg.det(pair.q) ** 2
        worst["det"] = max(worst["det"], abs(det_lhs - det_rhs) / abs(det_rhs))

        # IMSE invariance with the pushed-forward uniform measure
        nu = WeightingMeasure.uniform(model.region)
        res = transfer_optimal(model, design, pair, Criterion.imse(nu), beta=beta)
        lhs = criterion_value(target, res.design, res.beta, Criterion.imse(res.nu))
        rhs = criterion_value(model, design, beta, Criterion.imse(nu))
        worst["imse"] = max(worst["imse"], abs(lhs - rhs) / abs(rhs))

        # scale laws
        c = rng.uniform(0.1, 10.0)
        m_scaled = design_info(model, design, c * beta)
        worst["scale_m"] = max(
            worst["scale_m"], float(np.abs(m_scaled - m / c**2).max() / np.abs(m / c**2).max())
        )
        v = weight_matrix_v(model, beta, nu)
        v_scaled = weight_matrix_v(model, c * beta, nu)
        worst["scale_v"] = max(
            worst["scale_v"], float(np.abs(v_scaled - v / c**4).max() / np.abs(v / c**4).max())
        )
    elapsed = time.perf_counter() - t0
    ok = (
        worst["congruence"] <= 1e-10
        and worst["det"] <= 1e-9
        and worst["imse"] <= 1e-9
        and worst["scale_m"] <= 1e-10
        and worst["scale_v"] <= 1e-10
    )
    report(
        6, "equivariance laws", ok,
        "max rel residuals: "
        + ", ".join(f"{k}={v:.1e}" for k, v in worst.items())
        + f" over 500 cases in {elapsed:.1f}s",
    )
    assert worst["congruence"] <= 1e-10
    assert worst["det"] <= 1e-9
    assert worst["imse"] <= 1e-9
    assert worst["scale_m"] <= 1e-10
    assert worst["scale_v"] <= 1e-10


# ---------------------------------------------------------------------------
# 7. invariance machinery
# ---------------------------------------------------------------------------
def test_criterion_7_invariance():
    t0 = time.perf_counter()
    g3 = named_transform(TWO, "reflect:1")
    g4 = named_transform(TWO, "reflect:2")
    full = generate_group(TWO, [g3, g4])
    from optdesign.transforms import compose_pairs

    double = compose_pairs(
        named_transform(TWO, "reflect:1"), named_transform(TWO, "reflect:2")
    )
    swap = named_transform(TWO, "swap:1,2")
    prime = generate_group(TWO, [double, swap])
    sizes_ok = len(full) == 4 and len(prime) == 4

    rng = np.random.default_rng(SEED + 7)
    slack_violations = 0
    idempotence_ok = True
    cases = [
        (full, Criterion.d(), np.array([1.0, 0.0, 0.0])),
        (full, Criterion.imse(WeightingMeasure.uniform()), np.array([1.0, 0.0, 0.0])),
        (generate_group(TWO, [swap]), Criterion.d(), np.array([1.0, 0.9, 0.9])),
        (generate_group(TWO, [swap]), Criterion.imse(WeightingMeasure.uniform()),
         np.array([1.0, 0.9, 0.9])),
    ]
    n_designs = 0
    for group, crit, beta in cases:
        for _ in range(50):
            k = int(rng.integers(3, 7))
            pts = rng.uniform(0.0, 1.0, (k, 2))
            raw = rng.uniform(0.05, 1.0, k)
            xi = Design(pts, raw / raw.sum())
            before = criterion_value(TWO, xi, beta, crit)
            sym = symmetrize(xi, group)
            after = criterion_value(TWO, sym, beta, crit)
            if after > before + 1e-9 * max(1.0, abs(before)):
                slack_violations += 1
            twice = symmetrize(sym, group)
            for x, w in zip(sym.support, sym.weights):
                if abs(twice.weight_at(x) - w) > 1e-12:
                    idempotence_ok = False
            n_designs += 1
    elapsed = time.perf_counter() - t0
    ok = sizes_ok and slack_violations == 0 and idempotence_ok
    report(
        7, "invariance machinery", ok,
        f"group sizes 4/4, {n_designs} symmetrizations monotone, idempotent, "
        f"in {elapsed:.1f}s",
    )
    assert sizes_ok
    assert slack_violations == 0
    assert idempotence_ok


# ---------------------------------------------------------------------------
# 8. transfer certification for random affine maps
# ---------------------------------------------------------------------------
def _random_axis_affine(rng, model, onto_itself=False):
    d = model.dim_x
    if onto_itself:
        a = np.eye(d)
        b = np.zeros(d)
        for k in range(d):
            if rng.random() < 0.5:
                a[k, k] = -1.0
                b[k] = model.region.lower[k] + model.region.upper[k]
        if d == 2 and rng.random() < 0.5:
            a = a[[1, 0]]
            b = b[[1, 0]]
    else:
        scale = rng.uniform(0.3, 2.0, d) * rng.choice([-1.0, 1.0], d)
        a = np.diag(scale)
        b = rng.uniform(-1.0, 1.0, d)
    return AffinePointMap(a, b)


def test_criterion_8_transfer_certification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 8)
    opts = OptimizeOptions(sensitivity_tol=1e-9, max_iters=400_000)
    n_done, failures = 0, 0
    while n_done < 100:
        model = ONE if rng.random() < 0.5 else TWO
        rescaled = n_done % 2 == 1
        mode = "intercept_rescaled" if rescaled else "linear"
        g = _random_axis_affine(rng, model, onto_itself=rescaled)
        try:
            pair = make_pair(model, g, param_mode=mode)
            beta = sample_parameters(model, rng, 1)[0]
            crit = (
                Criterion.d()
                if rng.random() < 0.7
                else Criterion.imse(WeightingMeasure.uniform(model.region))
            )
            opt = local_opt_design(model, beta, crit, opts=opts)
            res = transfer_optimal(model, opt, pair, crit, beta=beta)
        except Exception:
            continue  # inadmissible draw (rescale undefined etc.): redraw
        target_crit = crit if res.nu is None else Criterion.imse(res.nu)
        cert = certify(res.model, res.design, res.beta, target_crit, tol=1e-6)
        if not cert.ok:
            failures += 1
        n_done += 1

    # the exact reference case: (1,3,3) pushed through the double reflection
    beta = np.array([1.0, 3.0, 3.0])
    crit = Criterion.imse(WeightingMeasure.uniform(TWO.region))
    opt = local_opt_design(TWO, beta, crit, opts=opts)
    pair = make_pair(
        TWO, AffinePointMap(-np.eye(2), [1.0, 1.0]), param_mode="intercept_rescaled"
    )
    res = transfer_optimal(TWO, opt, pair, crit, beta=beta)
    exact_beta = np.allclose(res.beta, [1.0, -3.0 / 7.0, -3.0 / 7.0], atol=1e-12)
    cert = certify(res.model, res.design, res.beta, Criterion.imse(res.nu), tol=1e-6)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and exact_beta and cert.ok
    report(
        8, "transfer certification", ok,
        f"100 random transfers certified, reference case beta-image exact and "
        f"certified, in {elapsed:.1f}s",
    )
    assert failures == 0
    assert exact_beta
    assert cert.ok

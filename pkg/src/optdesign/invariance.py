"""Finite transformation groups, orbits, symmetrization, invariant designs.

A finite group of region-preserving transform pairs cuts the design
search down to orbit-uniform (invariant) designs: for a convex criterion
that is invariant under the group, the symmetrization of any design is
at least as good, so invariant designs form an essentially complete
class.  Local criteria are invariant exactly when the parameter vector
is a fixed point of every parameter map (and, for IMSE, the weighting
measure is group-invariant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import Criterion
from .errors import (
    CandidateSetNotClosed,
    GroupTooLarge,
    InvalidSpec,
    NotRegionPreserving,
    WeightSumViolation,
)
from .model import Design, ModelSpec, WeightingMeasure, merged_design, sample_parameters
from .transforms import (
    TransformPair,
    compose_pairs,
    design_image,
    identity_pair,
    map_region,
    param_transform,
)

POINT_MATCH_TOL = 1e-9
_GROUP_PROBE_INTERIOR = 8
_GROUP_PROBE_SEED = 24601
_PARAM_CHECK_COUNT = 20
_PARAM_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class TransformGroup:
    """Closed list of transform pairs including the identity."""

    elements: tuple[TransformPair, ...]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class OrbitPartition:
    """Partition of a candidate set into group orbits (index lists)."""

    candidates: np.ndarray
    orbits: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", np.atleast_2d(np.asarray(self.candidates, float)))
        flat = sorted(i for orbit in self.orbits for i in orbit)
        if flat != list(range(len(self.candidates))):
            raise InvalidSpec("orbits must partition the candidate indices")


def _probe_points(model: ModelSpec) -> np.ndarray:
    rng = np.random.default_rng(_GROUP_PROBE_SEED)
    return np.vstack(
        [model.region.extremal_points(), model.region.sample_interior(rng, _GROUP_PROBE_INTERIOR)]
    )


def _region_onto_itself(model: ModelSpec, pair: TransformPair, tol: float = 1e-10) -> bool:
    """g maps the region onto itself: extremal points permute, bounds match."""
    ext = model.region.extremal_points()
    img = pair.g(ext)
    d = np.abs(img[:, None, :] - ext[None, :, :]).max(axis=2)
    if d.min(axis=1).max() > tol:
        return False
    if model.region.is_box:
        mapped = map_region(model.region, pair)
        return bool(
            np.abs(mapped.lower - model.region.lower).max() <= tol
            and np.abs(mapped.upper - model.region.upper).max() <= tol
        )
    return True


def generate_group(
    model: ModelSpec, generators, max_size: int = 64
) -> TransformGroup:
    """Closure of the generators under composition, with the identity.

    Elements are identified by their point-map action on a fixed probe
    set (extremal plus a few interior points).  Each generator must map
    the region onto itself; the closure additionally verifies the group
    laws numerically, including the composition consistency of the
    intercept-rescaled parameter maps.
    """
    gens = list(generators)
    if not gens:
        raise InvalidSpec("need at least one generator")
    mode = gens[0].param_mode
    if any(g.param_mode != mode for g in gens):
        raise InvalidSpec("generators must share one parameter mode")
    for g in gens:
        if not _region_onto_itself(model, g):
            raise NotRegionPreserving("a generator does not map the region onto itself")

    probe = _probe_points(model)

    def action(pair: TransformPair) -> np.ndarray:
        return pair.g(probe)

    elements: list[TransformPair] = [identity_pair(model, mode)]
    actions: list[np.ndarray] = [action(elements[0])]

    def find(act: np.ndarray) -> int | None:
        for i, a in enumerate(actions):
            if np.abs(a - act).max() <= POINT_MATCH_TOL:
                return i
        return None

    frontier = list(gens)
    while frontier:
        cur = frontier.pop()
        if find(action(cur)) is not None:
            continue
        if len(elements) >= max_size:
            raise GroupTooLarge(f"group closure exceeded max_size = {max_size}")
        elements.append(cur)
        actions.append(action(cur))
        for other in list(elements):
            frontier.append(compose_pairs(cur, other))
            frontier.append(compose_pairs(other, cur))

    group = TransformGroup(elements=tuple(elements))
    _verify_group(model, group, actions, find)
    return group


def _verify_group(model: ModelSpec, group: TransformGroup, actions, find) -> None:
    """Closure + inverses on point maps; parameter maps agree on random beta."""
    rng = np.random.default_rng(_GROUP_PROBE_SEED + 1)
    betas = sample_parameters(model, rng, _PARAM_CHECK_COUNT)
    probe = _probe_points(model)
    identity_idx = find(probe)
    if identity_idx is None:
        raise InvalidSpec("group lost its identity element")
    for i, a in enumerate(group.elements):
        has_inverse = False
        for j, b in enumerate(group.elements):
            comp = compose_pairs(a, b)
            k = find(comp.g(probe))
            if k is None:
                raise InvalidSpec("group closure is not closed under composition")
            if k == identity_idx:
                has_inverse = True
            member = group.elements[k]
            for beta in betas:
                via_comp = param_transform(b, param_transform(a, beta))
                via_member = param_transform(member, beta)
                scale = max(np.abs(via_member).max(), 1.0)
                if np.abs(via_comp - via_member).max() > _PARAM_CHECK_TOL * scale:
                    raise InvalidSpec(
                        "parameter maps do not share the group structure "
                        "(rescale factor fails the group property)"
                    )
        if not has_inverse:
            raise InvalidSpec("a group element has no inverse in the closure")


def orbits(group: TransformGroup, candidates) -> OrbitPartition:
    """Union-find partition of the candidates under the group's point maps."""
    cand = np.atleast_2d(np.asarray(candidates, float))
    n = len(cand)
    parent = list(range(n))

    def root(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    missing = []
    for pair in group.elements:
        img = pair.g(cand)
        d = np.abs(img[:, None, :] - cand[None, :, :]).max(axis=2)
        j = d.argmin(axis=1)
        ok = d[np.arange(n), j] <= POINT_MATCH_TOL
        if not np.all(ok):
            missing.extend(img[~ok].tolist())
            continue
        for i in range(n):
            ri, rj = root(i), root(int(j[i]))
            if ri != rj:
                parent[ri] = rj
    if missing:
        raise CandidateSetNotClosed(
            f"candidate set not closed under the group; missing images: {missing[:4]}",
            missing=np.asarray(missing),
        )
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    # canonical order: orbits sorted by their smallest candidate index
    orbit_list = tuple(sorted((tuple(sorted(v)) for v in groups.values()), key=lambda o: o[0]))
    return OrbitPartition(candidates=cand, orbits=orbit_list)


def symmetrize(design: Design, group: TransformGroup) -> Design:
    """The mixture (1/|G|) sum of the design's images; idempotent and invariant."""
    sups, wts = [], []
    share = 1.0 / len(group)
    for pair in group.elements:
        img = design_image(design, pair)
        sups.append(img.support)
        wts.append(img.weights * share)
    return merged_design(np.vstack(sups), np.concatenate(wts))


def invariant_design(partition: OrbitPartition, orbit_weights) -> Design:
    """Design giving every point of orbit k the weight orbit_weights[k].

    Zero-weight orbits are dropped; the per-point weights must add up to
    one across the kept orbits.
    """
    w = np.atleast_1d(np.asarray(orbit_weights, float))
    if len(w) != len(partition.orbits):
        raise InvalidSpec("need one weight per orbit")
    if np.any(w < 0):
        raise InvalidSpec("orbit weights must be nonnegative")
    total = sum(len(orbit) * wk for orbit, wk in zip(partition.orbits, w))
    if abs(total - 1.0) > 1e-12:
        raise WeightSumViolation(f"orbit weights sum to {total!r} over the candidate set")
    sup, wts = [], []
    for orbit, wk in zip(partition.orbits, w):
        if wk == 0.0:
            continue
        for i in orbit:
            sup.append(partition.candidates[i])
            wts.append(wk)
    return Design(np.asarray(sup), np.asarray(wts))


def measure_invariant(model: ModelSpec, nu: WeightingMeasure, group: TransformGroup) -> bool:
    """nu^g == nu for every group element.

    Uniform measures are invariant iff the point maps send the region
    onto itself, which group construction already guarantees; discrete
    measures need their weighted atom set preserved.
    """
    if nu.kind == "uniform":
        region = nu.region if nu.region is not None else model.region
        if not region.is_box:
            return False
        return all(_region_onto_itself(model, pair) for pair in group.elements)
    for pair in group.elements:
        img = pair.g(nu.points)
        d = np.abs(img[:, None, :] - nu.points[None, :, :]).max(axis=2)
        j = d.argmin(axis=1)
        if d[np.arange(len(img)), j].max() > POINT_MATCH_TOL:
            return False
        if np.abs(nu.weights[j] - nu.weights).max() > 1e-12:
            return False
    return True


def check_invariant_criterion(
    model: ModelSpec,
    group: TransformGroup,
    crit: Criterion,
    beta,
    nu: WeightingMeasure | None = None,
) -> bool:
    """True iff every parameter map fixes beta (and, for IMSE, nu is invariant)."""
    beta = np.asarray(beta, float)
    scale = max(np.abs(beta).max(), 1.0)
    for pair in group.elements:
        if np.abs(param_transform(pair, beta) - beta).max() > 1e-9 * scale:
            return False
    measure = nu if nu is not None else crit.nu
    if crit.kind == "IMSE":
        return measure_invariant(model, measure, group)
    return True

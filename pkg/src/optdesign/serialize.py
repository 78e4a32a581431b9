"""JSON wire formats for models, designs, criteria, transforms and groups.

Schemas:

  model      {"dim_x": 1, "basis": "linear",
              "region": {"lower": [0], "upper": [1]} | {"points": [[...], ...]},
              "kappa": 1.0}
  design     {"support": [[0.0], [1.0]], "weights": [0.5, 0.5]}
  criterion  {"kind": "D"}
             {"kind": "IMSE", "nu": {"kind": "uniform"}}
             {"kind": "IMSE", "nu": {"kind": "discrete",
                                     "points": [[0], [1]], "weights": [0.5, 0.5]}}
  transform  {"a": [[-1]], "b": [1], "param_mode": "intercept_rescaled"}
             or a shortcut string "reflect:1" | "swap:1,2" | "shift_scale:a,c"
  group      {"generators": ["reflect:1", "swap:1,2"],
              "param_mode": "intercept_rescaled"}

Design round-trips are exact: floats serialize through Python's repr.
"""

from __future__ import annotations

import json
from pathlib import Path

from .criteria import Criterion
from .errors import InvalidSpec
from .invariance import TransformGroup, generate_group
from .model import Design, ModelSpec, WeightingMeasure, make_model
from .region import Region
from .transforms import (
    PARAM_LINEAR,
    AffinePointMap,
    TransformPair,
    make_pair,
    named_transform,
)


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InvalidSpec(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"invalid JSON in {path}: {exc}") from exc


def dump_json(obj, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise InvalidSpec(f"{where} is missing the {key!r} field")
    return obj[key]


# --- model ------------------------------------------------------------------
def model_from_dict(obj: dict) -> ModelSpec:
    dim_x = int(_require(obj, "dim_x", "model"))
    region_obj = _require(obj, "region", "model")
    if "points" in region_obj:
        region = Region.finite(region_obj["points"])
    else:
        region = Region.box(
            _require(region_obj, "lower", "model region"),
            _require(region_obj, "upper", "model region"),
        )
    return make_model(
        dim_x=dim_x,
        basis=obj.get("basis", "linear"),
        region=region,
        kappa=float(obj.get("kappa", 1.0)),
    )


def model_to_dict(model: ModelSpec) -> dict:
    if model.basis_name is None:
        raise InvalidSpec("only built-in bases serialize to JSON")
    region = (
        {"lower": model.region.lower.tolist(), "upper": model.region.upper.tolist()}
        if model.region.is_box
        else {"points": model.region.points.tolist()}
    )
    return {
        "dim_x": model.dim_x,
        "basis": model.basis_name,
        "region": region,
        "kappa": model.kappa,
    }


# --- design -----------------------------------------------------------------
def design_from_dict(obj: dict) -> Design:
    if "support" not in obj and "design" in obj:
        obj = obj["design"]  # accept optimizer result bundles as design inputs
    return Design(
        _require(obj, "support", "design"), _require(obj, "weights", "design")
    )


def design_to_dict(design: Design) -> dict:
    return {"support": design.support.tolist(), "weights": design.weights.tolist()}


# --- weighting measure / criterion ------------------------------------------
def measure_from_dict(obj: dict) -> WeightingMeasure:
    kind = _require(obj, "kind", "nu")
    if kind == "uniform":
        if "lower" in obj:
            return WeightingMeasure.uniform(Region.box(obj["lower"], obj["upper"]))
        return WeightingMeasure.uniform()
    if kind == "discrete":
        return WeightingMeasure.discrete(
            _require(obj, "points", "nu"), _require(obj, "weights", "nu")
        )
    raise InvalidSpec(f"unknown measure kind {kind!r}")


def measure_to_dict(nu: WeightingMeasure) -> dict:
    if nu.kind == "uniform":
        out = {"kind": "uniform"}
        if nu.region is not None:
            out["lower"] = nu.region.lower.tolist()
            out["upper"] = nu.region.upper.tolist()
        return out
    return {
        "kind": "discrete",
        "points": nu.points.tolist(),
        "weights": nu.weights.tolist(),
    }


def criterion_from_dict(obj: dict) -> Criterion:
    kind = _require(obj, "kind", "criterion")
    if kind == "D":
        return Criterion.d()
    if kind == "IMSE":
        return Criterion.imse(measure_from_dict(_require(obj, "nu", "criterion")))
    raise InvalidSpec(f"unknown criterion kind {kind!r}")


def criterion_to_dict(crit: Criterion) -> dict:
    if crit.kind == "D":
        return {"kind": "D"}
    return {"kind": "IMSE", "nu": measure_to_dict(crit.nu)}


# --- transforms and groups ----------------------------------------------------
def transform_from_spec(model: ModelSpec, spec, param_mode: str | None = None) -> TransformPair:
    """Build a pair from a shortcut string or an {"a", "b", "param_mode"} dict."""
    if isinstance(spec, str):
        return named_transform(model, spec, param_mode=param_mode or PARAM_LINEAR)
    mode = param_mode or spec.get("param_mode", PARAM_LINEAR)
    g = AffinePointMap(_require(spec, "a", "transform"), _require(spec, "b", "transform"))
    return make_pair(model, g, param_mode=mode)


def transform_to_dict(pair: TransformPair) -> dict:
    return {
        "a": pair.g.a.tolist(),
        "b": pair.g.b.tolist(),
        "param_mode": pair.param_mode,
    }


def group_from_dict(model: ModelSpec, obj: dict, max_size: int = 64) -> TransformGroup:
    mode = obj.get("param_mode", PARAM_LINEAR)
    gens = [
        transform_from_spec(model, g, param_mode=mode)
        for g in _require(obj, "generators", "group")
    ]
    return generate_group(model, gens, max_size=max_size)


# --- results ------------------------------------------------------------------
def optimize_result_to_dict(result) -> dict:
    cert = result.certificate
    return {
        "design": design_to_dict(result.design),
        "criterion_value": result.criterion_value,
        "certificate": {
            "max_sensitivity": cert.max_sensitivity,
            "bound": cert.bound,
            "ok": cert.ok,
            "worst_point": cert.worst_point.tolist(),
            "n_points": cert.n_points,
        },
        "iterations": result.iterations,
    }

"""Run configuration: JSON schema validation, defaults, and model construction."""
from __future__ import annotations

import copy
import json
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from . import interaction
from .energy import ModelParams
from .optimizer import OptimizerOptions

DEFAULTS = {
    "omega": [1 / 3, 1 / 3, 1 / 3],
    "tensions": {"c12": 1.0, "c13": 1.0, "c23": 1.0},
    "matrix": {"family": "ren", "gamma": 1.0},
    "tolerances": {
        "optimality_tol": 1e-6,
        "constraint_tol": 1e-6,
        "step_tol": 1e-6,
        "max_iters": 500,
        "symmetry_mode": "free",
    },
    "output": {},
}


def load_schema(name: str) -> dict:
    text = resources.files("ternok").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def _registry() -> Registry:
    resources_ = []
    for name in ("config.schema.json", "output.schema.json"):
        schema = load_schema(name)
        resources_.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources_)


def _validator(name: str):
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=_registry())


def validate_config(cfg: dict) -> None:
    """Raise ``jsonschema.ValidationError`` on unknown keys or bad types."""
    _validator("config.schema.json").validate(cfg)


def validate_output(doc: dict) -> None:
    _validator("output.schema.json").validate(doc)


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; ``override`` wins, ``None`` values are ignored."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if v is None:
            continue
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve(file_cfg: dict | None, flag_cfg: dict | None) -> dict:
    """Flags over file over defaults; both inputs are schema-checked."""
    file_cfg = file_cfg or {}
    validate_config(file_cfg)
    cfg = merge(DEFAULTS, file_cfg)
    cfg = merge(cfg, flag_cfg or {})
    validate_config(cfg)
    return cfg


def load_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config {path!r} must hold a JSON object")
    return data


def gamma_matrix(cfg: dict):
    m = cfg["matrix"]
    omega = cfg["omega"]
    fam = m.get("family", "ren")
    strength = m.get("gamma", 1.0)
    if fam == "general":
        if "gamma_tilde" not in m:
            raise ValueError("matrix family 'general' needs matrix.gamma_tilde")
        a, b, c = interaction.check_omega(omega)
        return strength * interaction.build_general(m["gamma_tilde"], a, b)
    if "gamma_tilde" in m:
        raise ValueError(f"matrix.gamma_tilde only applies to family 'general', not {fam!r}")
    return interaction.build_family(fam, omega, strength)


def model_params(cfg: dict) -> ModelParams:
    t = cfg["tensions"]
    return ModelParams(tuple(cfg["omega"]), t["c12"], t["c13"], t["c23"], gamma_matrix(cfg))


def optimizer_options(cfg: dict) -> OptimizerOptions:
    return OptimizerOptions(**cfg["tolerances"])

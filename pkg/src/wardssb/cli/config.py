"""Strict JSON run configuration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError, InputError
from ..fock_model import ModelParams

SUITES = ("we-check", "ward", "spectrum", "sweep", "all")

# config key -> ModelParams attribute
MODEL_KEYS = {
    "m": "m",
    "lambda": "lam",
    "v": "v",
    "mu": "mu",
    "box_length": "box_length",
    "dim": "dim",
    "modes_per_axis": "modes_per_axis",
    "n_max": "n_max",
}
DEFAULT_SWEEP = {"lambda": (0.5, 1.0, 2.0), "v": (0.5, 1.0, 2.0)}


@dataclass(frozen=True)
class Tolerances:
    identity: float = 1e-10
    exact: float = 1e-12
    exponential: float = 1e-8


@dataclass(frozen=True)
class OracleSettings:
    lam: float = 1.0
    v: float = 0.05
    n_max: int = 6
    assert_bound: float | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    suite: str = "all"
    sweep_lambda: tuple[float, ...] = DEFAULT_SWEEP["lambda"]
    sweep_v: tuple[float, ...] = DEFAULT_SWEEP["v"]
    sweep_mu: tuple[float, ...] = (0.0,)
    overlap_modes_per_axis: int = 3
    random_triples: int = 50
    seed: int = 2020
    output_dir: str = "out"
    tolerance: Tolerances = field(default_factory=Tolerances)
    oracle: OracleSettings = field(default_factory=OracleSettings)


def _number(name, value, *, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if integer and (not isinstance(value, int) and not float(value).is_integer()):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{name}: must be > 0, got {value!r}")
    if nonneg and value < 0:
        raise ConfigError(f"{name}: must be >= 0, got {value!r}")
    return int(value) if integer else float(value)


def _reject_unknown(section: str, data: dict, allowed):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        where = f" in {section!r}" if section else ""
        raise ConfigError(f"unknown key(s){where}: {', '.join(unknown)}")


def _float_list(name, value, nonneg=True):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{name}: expected a non-empty list of numbers")
    return tuple(_number(f"{name}[{i}]", x, nonneg=nonneg) for i, x in enumerate(value))


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    top = set(MODEL_KEYS) | {
        "suite", "sweep", "overlap_modes_per_axis", "random_triples", "seed",
        "output", "tolerance", "oracle",
    }
    _reject_unknown("", data, top)

    model_kw = {}
    for key, attr in MODEL_KEYS.items():
        if key not in data:
            continue
        integer = key in ("dim", "modes_per_axis", "n_max")
        positive = key in ("m", "box_length", "n_max", "modes_per_axis", "dim")
        model_kw[attr] = _number(key, data[key], integer=integer, positive=positive, nonneg=True)
    if "modes_per_axis" in model_kw and model_kw["modes_per_axis"] % 2 == 0:
        raise ConfigError(f"modes_per_axis: must be odd, got {model_kw['modes_per_axis']}")
    try:
        model = ModelParams(**model_kw)
    except InputError as exc:
        raise ConfigError(str(exc)) from exc

    kw = {"model": model}
    if "suite" in data:
        if data["suite"] not in SUITES:
            raise ConfigError(f"suite: must be one of {', '.join(SUITES)}, got {data['suite']!r}")
        kw["suite"] = data["suite"]

    if "sweep" in data:
        sweep = data["sweep"]
        if not isinstance(sweep, dict):
            raise ConfigError("sweep: expected an object")
        _reject_unknown("sweep", sweep, ("lambda", "v", "mu"))
        kw["sweep_lambda"] = _float_list("sweep.lambda", sweep["lambda"]) if "lambda" in sweep else (model.lam,)
        kw["sweep_v"] = _float_list("sweep.v", sweep["v"]) if "v" in sweep else (model.v,)
        kw["sweep_mu"] = _float_list("sweep.mu", sweep["mu"]) if "mu" in sweep else (model.mu,)
    else:
        kw["sweep_mu"] = (model.mu,)

    if "overlap_modes_per_axis" in data:
        n = _number("overlap_modes_per_axis", data["overlap_modes_per_axis"], integer=True, positive=True)
        if n % 2 == 0:
            raise ConfigError(f"overlap_modes_per_axis: must be odd, got {n}")
        kw["overlap_modes_per_axis"] = n
    if "random_triples" in data:
        kw["random_triples"] = _number("random_triples", data["random_triples"], integer=True, positive=True)
    if "seed" in data:
        kw["seed"] = _number("seed", data["seed"], integer=True, nonneg=True)

    if "output" in data:
        out = data["output"]
        if not isinstance(out, dict):
            raise ConfigError("output: expected an object")
        _reject_unknown("output", out, ("dir",))
        if "dir" in out:
            if not isinstance(out["dir"], str) or not out["dir"]:
                raise ConfigError("output.dir: expected a non-empty string")
            kw["output_dir"] = out["dir"]

    if "tolerance" in data:
        tol = data["tolerance"]
        if not isinstance(tol, dict):
            raise ConfigError("tolerance: expected an object")
        names = [f.name for f in fields(Tolerances)]
        _reject_unknown("tolerance", tol, names)
        kw["tolerance"] = Tolerances(**{k: _number(f"tolerance.{k}", v, positive=True) for k, v in tol.items()})

    if "oracle" in data:
        orc = data["oracle"]
        if not isinstance(orc, dict):
            raise ConfigError("oracle: expected an object")
        _reject_unknown("oracle", orc, ("lambda", "v", "n_max", "assert_bound"))
        okw = {}
        if "lambda" in orc:
            okw["lam"] = _number("oracle.lambda", orc["lambda"], nonneg=True)
        if "v" in orc:
            okw["v"] = _number("oracle.v", orc["v"], nonneg=True)
        if "n_max" in orc:
            okw["n_max"] = _number("oracle.n_max", orc["n_max"], integer=True, positive=True)
        if orc.get("assert_bound") is not None:
            okw["assert_bound"] = _number("oracle.assert_bound", orc["assert_bound"], positive=True)
        kw["oracle"] = OracleSettings(**okw)

    return RunConfig(**kw)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON document; unknown keys are errors."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {key: getattr(cfg.model, attr) for key, attr in MODEL_KEYS.items()}
    out.update(
        suite=cfg.suite,
        sweep={"lambda": list(cfg.sweep_lambda), "v": list(cfg.sweep_v), "mu": list(cfg.sweep_mu)},
        overlap_modes_per_axis=cfg.overlap_modes_per_axis,
        random_triples=cfg.random_triples,
        seed=cfg.seed,
        output={"dir": cfg.output_dir},
        tolerance=asdict(cfg.tolerance),
        oracle={
            "lambda": cfg.oracle.lam,
            "v": cfg.oracle.v,
            "n_max": cfg.oracle.n_max,
            "assert_bound": cfg.oracle.assert_bound,
        },
    )
    return out


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)

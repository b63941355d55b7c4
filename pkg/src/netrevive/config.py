"""Run configuration: one JSON file drives every CLI subcommand.

Prediction, simulation, sweeps and comparisons are only comparable when
they share network, model, control and numeric settings, so they all read
the same config. Parsing is strict: unknown keys anywhere are rejected, and
parse -> serialize -> parse returns an equal config.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import default_params, get_model, param_vector
from .errors import ConfigError

DEFAULT_AXIS = {"min": 0.0, "max": 3.0, "num": 11}


def _require(block, name, key):
    if key not in block:
        raise ConfigError(f"{name} block is missing required key {key!r}")
    return block[key]


def _reject_unknown(block, name, allowed):
    extra = set(block) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {name} block: {sorted(extra)}")


def _number(x, name, positive=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{name} must be a number, got {x!r}")
    x = float(x)
    if not np.isfinite(x):
        raise ConfigError(f"{name} must be finite")
    if positive and x <= 0:
        raise ConfigError(f"{name} must be positive")
    return x


def _integer(x, name, minimum=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{name} must be an integer, got {x!r}")
    if minimum is not None and x < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return x


@dataclass(frozen=True)
class NetworkConfig:
    type: str
    n: int = 0
    k: float = 0.0
    m: int = 0
    path: str = ""
    seed: int = 0

    @staticmethod
    def from_dict(block):
        kind = _require(block, "network", "type")
        if kind == "er":
            _reject_unknown(block, "network", {"type", "n", "k", "seed"})
            return NetworkConfig(
                type="er",
                n=_integer(_require(block, "network", "n"), "network.n", 3),
                k=_number(_require(block, "network", "k"), "network.k",
                          positive=True),
                seed=_integer(block.get("seed", 0), "network.seed", 0))
        if kind == "ba":
            _reject_unknown(block, "network", {"type", "n", "m", "seed"})
            return NetworkConfig(
                type="ba",
                n=_integer(_require(block, "network", "n"), "network.n", 3),
                m=_integer(_require(block, "network", "m"), "network.m", 1),
                seed=_integer(block.get("seed", 0), "network.seed", 0))
        if kind == "file":
            _reject_unknown(block, "network", {"type", "path"})
            path = _require(block, "network", "path")
            if not isinstance(path, str) or not path:
                raise ConfigError("network.path must be a non-empty string")
            return NetworkConfig(type="file", path=path)
        raise ConfigError(f"network.type must be er, ba or file, got {kind!r}")

    def to_dict(self):
        if self.type == "er":
            return {"type": "er", "n": self.n, "k": self.k, "seed": self.seed}
        if self.type == "ba":
            return {"type": "ba", "n": self.n, "m": self.m, "seed": self.seed}
        return {"type": "file", "path": self.path}


@dataclass(frozen=True)
class ModelConfig:
    variant: str
    parameters: tuple        # sorted (name, value) pairs

    @staticmethod
    def from_dict(block):
        _reject_unknown(block, "model", {"variant", "parameters"})
        variant = _require(block, "model", "variant")
        spec = get_model(variant)
        raw = block.get("parameters")
        if raw is None:
            raw = default_params(spec)
        if not isinstance(raw, dict):
            raise ConfigError("model.parameters must be an object")
        params = {str(k): _number(v, f"model.parameters.{k}")
                  for k, v in raw.items()}
        param_vector(spec, params)    # name and positivity check, fail early
        return ModelConfig(variant=variant,
                           parameters=tuple(sorted(params.items())))

    def to_dict(self):
        return {"variant": self.variant, "parameters": dict(self.parameters)}

    @property
    def spec(self):
        return get_model(self.variant)

    @property
    def params(self):
        return dict(self.parameters)


@dataclass(frozen=True)
class ControlConfig:
    u_s: float = 2.0
    v_s: float = 2.0
    t: float = 60.0
    post_release_time: float = 0.0
    num_clamped: int = 1
    nodes: object = "random"    # "random" or a tuple of node ids

    @staticmethod
    def from_dict(block):
        _reject_unknown(block, "control", {"u_s", "v_s", "t",
                                           "post_release_time",
                                           "num_clamped", "nodes"})
        nodes = block.get("nodes", "random")
        if nodes != "random":
            if (not isinstance(nodes, list) or not nodes
                    or not all(isinstance(i, int) and not isinstance(i, bool)
                               and i >= 0 for i in nodes)):
                raise ConfigError('control.nodes must be "random" or a '
                                  "non-empty list of node ids")
            nodes = tuple(nodes)
        cfg = ControlConfig(
            u_s=_number(block.get("u_s", 2.0), "control.u_s"),
            v_s=_number(block.get("v_s", 2.0), "control.v_s"),
            t=_number(block.get("t", 60.0), "control.t", positive=True),
            post_release_time=_number(block.get("post_release_time", 0.0),
                                      "control.post_release_time"),
            num_clamped=_integer(block.get("num_clamped", 1),
                                 "control.num_clamped", 1),
            nodes=nodes)
        if cfg.u_s < 0 or cfg.v_s < 0 or cfg.post_release_time < 0:
            raise ConfigError("control values and times must be non-negative")
        if isinstance(cfg.nodes, tuple) and "num_clamped" in block \
                and cfg.num_clamped != len(cfg.nodes):
            raise ConfigError("control.num_clamped contradicts control.nodes")
        if isinstance(cfg.nodes, tuple):
            cfg = ControlConfig(cfg.u_s, cfg.v_s, cfg.t,
                                cfg.post_release_time, len(cfg.nodes),
                                cfg.nodes)
        return cfg

    def to_dict(self):
        return {"u_s": self.u_s, "v_s": self.v_s, "t": self.t,
                "post_release_time": self.post_release_time,
                "num_clamped": self.num_clamped,
                "nodes": "random" if self.nodes == "random"
                else list(self.nodes)}


@dataclass(frozen=True)
class NumericsConfig:
    dt: float = 0.01
    record_stride: float = 0.0   # 0 = no trajectory output

    @staticmethod
    def from_dict(block):
        _reject_unknown(block, "numerics", {"dt", "record_stride"})
        cfg = NumericsConfig(
            dt=_number(block.get("dt", 0.01), "numerics.dt", positive=True),
            record_stride=_number(block.get("record_stride", 0.0),
                                  "numerics.record_stride"))
        if cfg.record_stride < 0:
            raise ConfigError("numerics.record_stride must be >= 0")
        return cfg

    def to_dict(self):
        return {"dt": self.dt, "record_stride": self.record_stride}

    def record_times(self, total_time):
        if self.record_stride <= 0:
            return None
        marks = np.arange(0.0, total_time + 0.5 * self.record_stride,
                          self.record_stride)
        if marks[-1] < total_time:
            marks = np.append(marks, total_time)
        return marks


@dataclass(frozen=True)
class AxisSpec:
    """Either a uniform grid {min,max,num} or an explicit value list."""
    kind: str
    min: float = 0.0
    max: float = 0.0
    num: int = 0
    explicit: tuple = ()

    @staticmethod
    def from_value(value, name):
        if isinstance(value, list):
            if not value:
                raise ConfigError(f"{name} axis list must be non-empty")
            vals = tuple(_number(v, name) for v in value)
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigError(f"{name} axis must be strictly increasing")
            return AxisSpec(kind="list", explicit=vals)
        if isinstance(value, dict):
            _reject_unknown(value, name, {"min", "max", "num"})
            lo = _number(_require(value, name, "min"), f"{name}.min")
            hi = _number(_require(value, name, "max"), f"{name}.max")
            num = _integer(_require(value, name, "num"), f"{name}.num", 2)
            if hi <= lo:
                raise ConfigError(f"{name}.max must exceed {name}.min")
            return AxisSpec(kind="linspace", min=lo, max=hi, num=num)
        raise ConfigError(f"{name} axis must be a list or a min/max/num object")

    def to_value(self):
        if self.kind == "list":
            return list(self.explicit)
        return {"min": self.min, "max": self.max, "num": self.num}

    def values(self):
        if self.kind == "list":
            return np.array(self.explicit, dtype=np.float64)
        return np.linspace(self.min, self.max, self.num)


@dataclass(frozen=True)
class SweepConfig:
    u: AxisSpec = field(default_factory=lambda: AxisSpec.from_value(
        dict(DEFAULT_AXIS), "sweep.u"))
    v: AxisSpec = field(default_factory=lambda: AxisSpec.from_value(
        dict(DEFAULT_AXIS), "sweep.v"))
    reps: int = 10
    master_seed: int = 0
    workers: int = 1

    @staticmethod
    def from_dict(block):
        _reject_unknown(block, "sweep", {"u", "v", "reps", "master_seed",
                                         "workers"})
        return SweepConfig(
            u=AxisSpec.from_value(block.get("u", dict(DEFAULT_AXIS)),
                                  "sweep.u"),
            v=AxisSpec.from_value(block.get("v", dict(DEFAULT_AXIS)),
                                  "sweep.v"),
            reps=_integer(block.get("reps", 10), "sweep.reps", 1),
            master_seed=_integer(block.get("master_seed", 0),
                                 "sweep.master_seed", 0),
            workers=_integer(block.get("workers", 1), "sweep.workers", 1))

    def to_dict(self):
        return {"u": self.u.to_value(), "v": self.v.to_value(),
                "reps": self.reps, "master_seed": self.master_seed,
                "workers": self.workers}


@dataclass(frozen=True)
class BoundaryConfig:
    n_rays: int = 16
    radial_tol: float = 1e-3

    @staticmethod
    def from_dict(block):
        _reject_unknown(block, "boundary", {"n_rays", "radial_tol"})
        return BoundaryConfig(
            n_rays=_integer(block.get("n_rays", 16), "boundary.n_rays", 2),
            radial_tol=_number(block.get("radial_tol", 1e-3),
                               "boundary.radial_tol", positive=True))

    def to_dict(self):
        return {"n_rays": self.n_rays, "radial_tol": self.radial_tol}


@dataclass(frozen=True)
class RunConfig:
    network: NetworkConfig
    model: ModelConfig
    control: ControlConfig = ControlConfig()
    numerics: NumericsConfig = NumericsConfig()
    sweep: SweepConfig = field(default_factory=SweepConfig)
    boundary: BoundaryConfig = BoundaryConfig()
    output_dir: str = "out"

    @staticmethod
    def from_dict(data):
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        _reject_unknown(data, "config", {"network", "model", "control",
                                         "numerics", "sweep", "boundary",
                                         "output_dir"})
        for key in ("network", "model"):
            if key not in data:
                raise ConfigError(f"config is missing the {key} block")
        for key in ("network", "model", "control", "numerics", "sweep",
                    "boundary"):
            if key in data and not isinstance(data[key], dict):
                raise ConfigError(f"{key} block must be a JSON object")
        out = data.get("output_dir", "out")
        if not isinstance(out, str) or not out:
            raise ConfigError("output_dir must be a non-empty string")
        return RunConfig(
            network=NetworkConfig.from_dict(data["network"]),
            model=ModelConfig.from_dict(data["model"]),
            control=ControlConfig.from_dict(data.get("control", {})),
            numerics=NumericsConfig.from_dict(data.get("numerics", {})),
            sweep=SweepConfig.from_dict(data.get("sweep", {})),
            boundary=BoundaryConfig.from_dict(data.get("boundary", {})),
            output_dir=out)

    def to_dict(self):
        return {"network": self.network.to_dict(),
                "model": self.model.to_dict(),
                "control": self.control.to_dict(),
                "numerics": self.numerics.to_dict(),
                "sweep": self.sweep.to_dict(),
                "boundary": self.boundary.to_dict(),
                "output_dir": self.output_dir}


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def save_config(cfg, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

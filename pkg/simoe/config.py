# simoe/config.py
"""Simulation configuration.

Configurations are YAML mappings whose keys mirror the `SimConfig`
field names; nested blocks are nested mappings.

It contains the following functions:
    - `config_from_dict(data)` - Returns: validated SimConfig from a mapping.
    - `config_to_dict(cfg)` - Returns: plain mapping of a SimConfig.
    - `set_field(data, key, value)` - Returns: None, sets a dotted-path key.
    - `apply_overrides(data, overrides)` - Returns: mapping with dotted-path overrides applied.
    - `read_config_dict(config_path)` - Returns: raw mapping of a config or manifest file.
    - `load_config(config_path, overrides, seed)` - Returns: validated SimConfig from a file.
    - `validate_config(cfg)` - Returns: None, raises ConfigError on the first invalid field.
    - `config_hash(cfg)` - Returns: sha256 of the canonical config.
"""

import copy
import dataclasses
import enum
import hashlib
import json
import math
import yaml
from simoe.errors import ConfigError
from simoe.gate import DeviceProfile, HardwareModel

ALLOWED_NUM_EXPERTS = (8, 16, 32, 64)
ALLOWED_REQUEST_RATES = (2.0, 4.0, 6.0, 8.0, 10.0)
ALLOWED_FLUCTUATIONS = (0.0, 0.1, 0.2, 0.3, 0.4)
REQUIRED_FIELDS = ("seed", "mode", "num_experts", "request_rate", "duration")


class Mode(enum.Enum):
    CLOUD_ONLY = "cloud_only"
    EDGE_ONLY = "edge_only"
    COLLABORATIVE = "collaborative"


class Arrival(enum.Enum):
    DETERMINISTIC = "deterministic"
    POISSON = "poisson"


@dataclasses.dataclass(frozen=True)
class SchedulerConfig:
    """Placement constants; rates are taken from the device and cloud."""

    alpha: float = 0.5
    beta: float = 1.0
    t_end: float = 1.2e10
    eps_priority: float = 1e-6


@dataclasses.dataclass(frozen=True)
class AblationFlags:
    disable_hlggn: bool = False
    disable_poecc: bool = False


@dataclasses.dataclass(frozen=True)
class SimConfig:
    """One simulation run.

    Attributes:
        seed: Root seed of every random stream.
        mode: cloud_only, edge_only or collaborative.
        num_experts: M.
        num_groups: K.
        top_groups: G, groups evaluated in the second gate stage.
        duration: Arrival horizon (s).
        request_rate: Offered load (req s^-1).
        arrival: deterministic or poisson.
        link_mbps_mean: Mean link rate (Mbps).
        link_fluctuation: Relative amplitude of the link rate.
        fluctuation_interval: Length of a constant-rate window (s).
        device: End device profile.
        hardware: Capability function constants.
        cloud_flops_rate: Rate of one cloud lane (FLOPs s^-1).
        cloud_lanes: Parallel cloud executions.
        scheduler: Placement constants.
        codec_rank: r.
        tokens_per_request: Tokens of one sequence.
        batch_size: Sequences per request.
        feature_dim: d.
        expert_hidden_dim: Hidden width of a unit-cost expert.
        expert_cost_spread: Cost scale of the first and last expert.
        storage_mb_per_s: Rate of loading expert weights on a cache miss.
        eps_complexity: Tolerated complexity mismatch.
        local_cap_fraction: Largest share of experts kept locally.
        epoch: Scheduling epoch (s).
        warmup_fraction: Share of the duration excluded from metrics.
        drain_timeout: Time after the duration to stop, None drains fully.
        keep_trace: Keep the per-request trace.
        allow_override: Lift the enumerated value restrictions.
        ablation: Ablation flags.
    """

    seed: int = 42
    mode: Mode = Mode.COLLABORATIVE
    num_experts: int = 32
    num_groups: int = 4
    top_groups: int = 1
    duration: float = 60.0
    request_rate: float = 8.0
    arrival: Arrival = Arrival.DETERMINISTIC
    link_mbps_mean: float = 300.0
    link_fluctuation: float = 0.2
    fluctuation_interval: float = 1.0
    device: DeviceProfile = dataclasses.field(default_factory=DeviceProfile)
    hardware: HardwareModel = dataclasses.field(default_factory=HardwareModel)
    cloud_flops_rate: float = 1.0e12
    cloud_lanes: int = 8
    scheduler: SchedulerConfig = dataclasses.field(default_factory=SchedulerConfig)
    codec_rank: int = 16
    tokens_per_request: int = 256
    batch_size: int = 4
    feature_dim: int = 768
    expert_hidden_dim: int = 3072
    expert_cost_spread: tuple[float, float] = (0.5, 2.0)
    storage_mb_per_s: float = 200.0
    eps_complexity: float = 0.0
    local_cap_fraction: float = 0.4
    epoch: float = 0.05
    warmup_fraction: float = 0.1
    drain_timeout: float | None = None
    keep_trace: bool = False
    allow_override: bool = False
    ablation: AblationFlags = dataclasses.field(default_factory=AblationFlags)


_NESTED = {
    "device": DeviceProfile,
    "hardware": HardwareModel,
    "scheduler": SchedulerConfig,
    "ablation": AblationFlags,
}
_ENUMS = {"mode": Mode, "arrival": Arrival}


def _coerce(field: str, value, default):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(field, f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(field, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float) or (default is None and value is not None):
        # PyYAML reads 1.2e10 (no exponent sign) as a string
        if isinstance(value, str):
            try:
                number = float(value)
            except ValueError:
                raise ConfigError(field, f"expected a number, got {value!r}") from None
            if not math.isfinite(number):
                raise ConfigError(field, f"expected a finite number, got {value!r}")
            return number
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(field, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(default):
            raise ConfigError(field, f"expected {len(default)} numbers, got {value!r}")
        return tuple(_coerce(f"{field}[{i}]", v, d) for i, (v, d) in enumerate(zip(value, default)))
    return value


def _build(cls, data: dict, prefix: str = ""):
    if not isinstance(data, dict):
        raise ConfigError(prefix.rstrip(".") or "config", "expected a mapping")
    defaults = cls()
    names = {field.name for field in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{prefix}{key}", "unknown field")
    values = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key in _NESTED and cls is SimConfig:
            values[key] = _build(_NESTED[key], value, f"{path}.")
        elif key in _ENUMS and cls is SimConfig:
            try:
                values[key] = _ENUMS[key](value)
            except ValueError:
                choices = [m.value for m in _ENUMS[key]]
                raise ConfigError(path, f"expected one of {choices}, got {value!r}")
        else:
            values[key] = _coerce(path, value, getattr(defaults, key))
    try:
        return cls(**values)
    except ValueError as error:
        raise ConfigError(prefix.rstrip(".") or "config", str(error)) from error


def config_from_dict(data: dict) -> SimConfig:
    """Build and validate a SimConfig.

    Args:
        data: Mapping with SimConfig field names.

    Returns:
        Validated configuration.
    """
    if not isinstance(data, dict):
        raise ConfigError("config", "expected a mapping")
    for name in REQUIRED_FIELDS:
        if name not in data:
            raise ConfigError(name, "missing required field")
    cfg = _build(SimConfig, data)
    validate_config(cfg)
    return cfg


def config_to_dict(cfg: SimConfig) -> dict:
    """Plain mapping of a config, enums as their values."""

    def plain(value):
        if isinstance(value, enum.Enum):
            return value.value
        if isinstance(value, tuple):
            return list(value)
        if isinstance(value, dict):
            return {k: plain(v) for k, v in value.items()}
        return value

    return plain(dataclasses.asdict(cfg))


def set_field(data: dict, key: str, value) -> None:
    """Set a dotted-path key in a raw config mapping, in place."""
    *parents, leaf = key.split(".")
    node = data
    for parent in parents:
        node = node.setdefault(parent, {})
        if not isinstance(node, dict):
            raise ConfigError(key, f"{parent} is not a mapping")
    node[leaf] = value


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply key=value overrides with dotted keys.

    Args:
        data: Raw config mapping.
        overrides: Items like "device.cpu_available=0.5"; values
            follow YAML scalar rules.

    Returns:
        A new mapping with the overrides applied.
    """
    data = copy.deepcopy(data)
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(item, "override must look like key=value")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as error:
            raise ConfigError(key, f"cannot parse {raw!r}") from error
        set_field(data, key, value)
    return data


def read_config_dict(config_path: str) -> dict:
    """Raw mapping of a config file.

    A run manifest is accepted too: its `config` mapping is returned.

    Args:
        config_path: YAML config or JSON manifest.

    Returns:
        Config mapping.
    """
    with open(config_path) as config_file:
        try:
            data = yaml.safe_load(config_file)
        except yaml.YAMLError as error:
            raise ConfigError("config", f"cannot parse {config_path}: {error}") from error
    if isinstance(data, dict) and "config" in data and "config_hash" in data:
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigError("config", f"{config_path} does not hold a mapping")
    return data


def load_config(
    config_path: str, overrides: list[str] | None = None, seed: int | None = None
) -> SimConfig:
    """Read, override and validate a configuration file.

    Args:
        config_path: YAML config or JSON manifest.
        overrides: Dotted key=value overrides.
        seed: Replaces the seed when given.

    Returns:
        Validated configuration.
    """
    data = apply_overrides(read_config_dict(config_path), overrides or [])
    if seed is not None:
        data["seed"] = seed
    return config_from_dict(data)


def _one_of(value: float, allowed: tuple) -> bool:
    return any(abs(value - choice) < 1e-9 for choice in allowed)


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ConfigError(field, message)


def validate_config(cfg: SimConfig) -> None:
    """Check ranges and enumerated values.

    Args:
        cfg: Configuration to check.

    Returns:
        None, raises ConfigError naming the first invalid field.
    """
    _require(cfg.seed >= 0, "seed", "must be non-negative")
    _require(cfg.duration > 0, "duration", "must be positive")
    _require(cfg.num_experts >= 1, "num_experts", "must be positive")
    _require(cfg.request_rate > 0, "request_rate", "must be positive")
    _require(0 <= cfg.link_fluctuation < 1, "link_fluctuation", "must lie in [0, 1)")
    if not cfg.allow_override:
        _require(
            cfg.num_experts in ALLOWED_NUM_EXPERTS,
            "num_experts",
            f"must be one of {ALLOWED_NUM_EXPERTS}",
        )
        _require(
            _one_of(cfg.request_rate, ALLOWED_REQUEST_RATES),
            "request_rate",
            f"must be one of {ALLOWED_REQUEST_RATES}",
        )
        _require(
            _one_of(cfg.link_fluctuation, ALLOWED_FLUCTUATIONS),
            "link_fluctuation",
            f"must be one of {ALLOWED_FLUCTUATIONS}",
        )
    _require(1 <= cfg.num_groups <= cfg.num_experts, "num_groups", "must lie in [1, num_experts]")
    _require(1 <= cfg.top_groups <= cfg.num_groups, "top_groups", "must lie in [1, num_groups]")
    _require(cfg.link_mbps_mean > 0, "link_mbps_mean", "must be positive")
    _require(cfg.fluctuation_interval > 0, "fluctuation_interval", "must be positive")
    _require(cfg.device.bandwidth > 0, "device.bandwidth", "must be positive")
    _require(cfg.cloud_flops_rate > 0, "cloud_flops_rate", "must be positive")
    _require(cfg.cloud_lanes >= 1, "cloud_lanes", "must be positive")
    for name in ("tokens_per_request", "batch_size", "feature_dim", "expert_hidden_dim"):
        _require(getattr(cfg, name) >= 1, name, "must be positive")
    _require(
        1 <= cfg.codec_rank <= min(cfg.tokens_per_request, cfg.feature_dim),
        "codec_rank",
        "must lie in [1, min(tokens_per_request, feature_dim)]",
    )
    low, high = cfg.expert_cost_spread
    _require(0 < low <= high, "expert_cost_spread", "must satisfy 0 < low <= high")
    _require(cfg.storage_mb_per_s > 0, "storage_mb_per_s", "must be positive")
    _require(cfg.eps_complexity >= 0, "eps_complexity", "must be non-negative")
    _require(0 < cfg.local_cap_fraction <= 1, "local_cap_fraction", "must lie in (0, 1]")
    _require(cfg.epoch > 0, "epoch", "must be positive")
    _require(0 <= cfg.warmup_fraction < 1, "warmup_fraction", "must lie in [0, 1)")
    _require(
        cfg.drain_timeout is None or cfg.drain_timeout >= 0,
        "drain_timeout",
        "must be non-negative",
    )
    _require(0 <= cfg.scheduler.alpha <= 1, "scheduler.alpha", "must lie in [0, 1]")
    _require(cfg.scheduler.eps_priority > 0, "scheduler.eps_priority", "must be positive")
    _require(cfg.scheduler.t_end >= 0, "scheduler.t_end", "must be non-negative")
    if cfg.mode is not Mode.CLOUD_ONLY:
        _require(
            cfg.device.nominal_flops_rate * cfg.device.cpu_available * cfg.device.power_budget > 0,
            "device",
            "end device has no compute in a mode that uses it",
        )


def config_hash(cfg: SimConfig) -> str:
    """SHA-256 of the canonical JSON dump of a config."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()

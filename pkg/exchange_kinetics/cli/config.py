"""
Experiment configuration for the command line.

Values are layered, lowest precedence first: DEFAULTS, the named preset, the config
file, then command-line flags. Config files hold one `key = value` per line, with keys
equal to the long flags without dashes and `#` starting a comment.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.exceptions import ConfigError, IntegralityError
from exchange_kinetics.mean_field.integrator import SCHEMES, IntegratorConfig
from exchange_kinetics.monte_carlo.monte_carlo import RunConfig
from exchange_kinetics.monte_carlo.sampler import CLOCKS

MODES = ("abm", "meanfield", "equilibrium", "linearize", "gini-sweep", "compare")
AGENT_MODES = ("abm", "compare")

PRESETS: dict[str, dict[str, Any]] = {
    "fig2": {"mode": "abm", "n-agents": 10_000, "mu": 10.0, "nu": 0.4, "events": 10_000_000},
    "fig5": {"mode": "meanfield", "mu": 10.0, "nu": 0.4, "t-end": 5000.0},
    "fig6": {"mode": "gini-sweep", "mu": 10.0, "nus": (0.0, 0.25, 0.5, 1.0, 5.0), "t-end": 5000.0},
}

# descriptive names for the reproduction presets
PRESET_ALIASES = {"bank-abm": "fig2", "bank-meanfield": "fig5", "gini-nu-sweep": "fig6"}
PRESET_NAMES = (*PRESETS, *PRESET_ALIASES)


def _as_float(value: Any) -> float:
    return float(value)


def _as_int(value: Any) -> int:
    if isinstance(value, str):
        value = value.strip()
        try:
            return int(value)
        except ValueError:
            number = float(value)
    else:
        number = value
    if number != int(number):
        raise ValueError(f"{value!r} is not an integer")
    return int(number)


def _as_optional_float(value: Any) -> float | None:
    if value is None or (isinstance(value, str) and value.strip().lower() in ("", "auto", "none")):
        return None
    return float(value)


def _as_optional_str(value: Any) -> str | None:
    if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none")):
        return None
    return str(value).strip()


def _as_str(value: Any) -> str:
    return str(value).strip()


def _as_floats(value: Any) -> tuple[float, ...]:
    if isinstance(value, str):
        return tuple(float(v) for v in value.split(",") if v.strip())
    return tuple(float(v) for v in value)


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"{value!r} is not a boolean")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Flat, validated experiment description; see KEYS for the config-file spelling.
    dt: float or None
        Mean-field time step; None uses 0.01 min(1, 1 / lambda).
    record_stride: float or None
        Events between ABM trajectory rows, or time between mean-field rows.
    snapshots: tuple of float
        Times of PMF snapshots; ABM runs convert them to event counts t lambda N.
    nus: tuple of float
        Values of nu swept by the gini-sweep mode.
    """

    mode: str = "equilibrium"
    mu: float = 10.0
    nu: float = 0.4
    n_agents: int = 1000
    lam: float = 1.0
    events: int = 0
    seed: int = 0
    replicas: int = 1
    dt: float | None = None
    scheme: str = "RK4"
    t_end: float = 100.0
    tail_threshold: float = 1e-14
    out: str = "results"
    preset: str | None = None
    time_mode: str = "event-count"
    record_stride: float | None = None
    snapshots: tuple[float, ...] = ()
    nus: tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 5.0)
    verbose: bool = False

    def __post_init__(self) -> None:
        checks: list[tuple[str, bool, str]] = [
            ("mode", self.mode in MODES, f"must be one of {', '.join(MODES)}"),
            ("mu", self.mu > 0, "must satisfy mu > 0"),
            ("nu", self.nu >= 0, "must satisfy nu >= 0"),
            ("n-agents", self.n_agents >= 1, "must be a positive integer"),
            ("lambda", self.lam > 0, "must satisfy lambda > 0"),
            ("events", self.events >= 0, "must be a non-negative integer"),
            ("seed", 0 <= self.seed < 2**64, "must lie in [0, 2**64)"),
            ("replicas", self.replicas >= 1, "must be at least 1"),
            ("dt", self.dt is None or self.dt > 0, "must satisfy dt > 0"),
            ("scheme", self.scheme in SCHEMES, f"must be one of {', '.join(SCHEMES)}"),
            ("t-end", self.t_end >= 0, "must satisfy t_end >= 0"),
            ("tail-threshold", 0 < self.tail_threshold <= 1e-8, "must lie in (0, 1e-8]"),
            ("out", bool(self.out), "must name an output directory"),
            ("preset", self.preset is None or self.preset in PRESET_NAMES, f"must be one of {', '.join(PRESET_NAMES)}"),
            ("time-mode", self.time_mode in CLOCKS, f"must be one of {', '.join(sorted(CLOCKS))}"),
            ("record-stride", self.record_stride is None or self.record_stride > 0, "must be positive"),
            (
                "snapshots",
                all(s >= 0 for s in self.snapshots) and list(self.snapshots) == sorted(self.snapshots),
                "must be non-negative and ascending",
            ),
            ("nus", len(self.nus) > 0 and all(v >= 0 for v in self.nus), "must be non-empty with nu >= 0"),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigError(key, message)
        if self.mode in AGENT_MODES:
            self._check_agent_mode()

    def _check_agent_mode(self) -> None:
        try:
            self.params.check_integrality()
        except IntegralityError as e:
            raise ConfigError("n-agents", f"{e}; choose n-agents so that N*mu and N*mu*nu are integers") from e
        if self.mu != int(self.mu):
            raise ConfigError("mu", "agents start with mu dollars each, so mu must be an integer")
        if self.n_agents < 2 and (self.events > 0 or self.mode == "compare"):
            raise ConfigError("n-agents", "at least two agents are needed to exchange")

    @property
    def params(self) -> ModelParams:
        return ModelParams(n_agents=self.n_agents, mu=self.mu, nu=self.nu, lam=self.lam)

    @property
    def output_dir(self) -> Path:
        return Path(self.out)

    def events_at(self, t: float) -> int:
        """Event count matching mean-field time t, t = events / (lambda N)."""
        return int(round(t * self.lam * self.n_agents))

    def run_config(self) -> RunConfig:
        stride = None if self.record_stride is None else max(1, int(round(self.record_stride)))
        return RunConfig(
            params=self.params,
            max_events=self.events,
            seed=self.seed,
            snapshot_schedule=tuple(self.events_at(t) for t in self.snapshots),
            time_mode=self.time_mode,
            record_stride=stride,
        )

    def integrator_config(self, t_end: float | None = None, snapshot_times: Sequence[float] | None = None) -> IntegratorConfig:
        return IntegratorConfig(
            dt=self.dt if self.dt is not None else IntegratorConfig.default_dt(self.lam),
            scheme=self.scheme,
            tail_threshold=self.tail_threshold,
            t_end=self.t_end if t_end is None else t_end,
            record_stride=self.record_stride if self.record_stride is not None else 1.0,
            snapshot_times=tuple(self.snapshots if snapshot_times is None else snapshot_times),
        )


# config key -> (field name, converter)
KEYS: dict[str, tuple[str, Callable[[Any], Any]]] = {
    "mode": ("mode", _as_str),
    "mu": ("mu", _as_float),
    "nu": ("nu", _as_float),
    "n-agents": ("n_agents", _as_int),
    "lambda": ("lam", _as_float),
    "events": ("events", _as_int),
    "seed": ("seed", _as_int),
    "replicas": ("replicas", _as_int),
    "dt": ("dt", _as_optional_float),
    "scheme": ("scheme", _as_str),
    "t-end": ("t_end", _as_float),
    "tail-threshold": ("tail_threshold", _as_float),
    "out": ("out", _as_str),
    "preset": ("preset", _as_optional_str),
    "time-mode": ("time_mode", _as_str),
    "record-stride": ("record_stride", _as_optional_float),
    "snapshots": ("snapshots", _as_floats),
    "nus": ("nus", _as_floats),
    "verbose": ("verbose", _as_bool),
}

DEFAULTS: dict[str, Any] = {
    key: getattr(ExperimentConfig, name) for key, (name, _) in KEYS.items()
}


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    kwargs = {}
    for key, raw in values.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        name, convert = KEYS[key]
        try:
            kwargs[name] = convert(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(key, f"cannot parse {raw!r} ({e})") from e
    return ExperimentConfig(**kwargs)


def load_config_file(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from e
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(key, f"unknown key in {path}:{lineno}")
        values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exchange-kinetics",
        description="Money exchange with a bank: agent simulation, mean-field dynamics and equilibrium analysis.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--config", help="key = value file; flags override its values")
    for key in KEYS:
        if key == "verbose":
            parser.add_argument("--verbose", "-v", action="store_const", const="true", help="debug logging")
            continue
        parser.add_argument(f"--{key}", dest=key, metavar=key.upper().replace("-", "_"))
    return parser


def parse_config(argv: Sequence[str] | None = None) -> ExperimentConfig:
    """Builds the configuration from defaults, preset, config file and flags."""
    flags = vars(build_parser().parse_args(argv))
    config_path = flags.pop("config", None)
    file_values = load_config_file(config_path) if config_path is not None else {}

    preset = _as_optional_str(flags.get("preset", file_values.get("preset")))
    merged: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESET_NAMES:
            raise ConfigError("preset", f"must be one of {', '.join(PRESET_NAMES)}")
        merged.update(PRESETS[PRESET_ALIASES.get(preset, preset)])
    merged.update(file_values)
    merged.update(flags)
    return build_config(merged)


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    return str(value)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Config-file text that parses back to `cfg`."""
    lines = []
    for key, (name, _) in KEYS.items():
        value = getattr(cfg, name)
        if value is None:
            continue
        lines.append(f"{key} = {_format(value)}")
    return "\n".join(lines) + "\n"


def config_echo(cfg: ExperimentConfig) -> dict[str, Any]:
    return {key: getattr(cfg, name) for key, (name, _) in KEYS.items()}

"""Experiment configuration: flat ``key = value`` text, ``#`` starts a comment.

Unknown keys, duplicate keys and malformed values are rejected with the
offending line number. Lists are comma-separated. Every key has a
default, so an empty file is a valid configuration.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .core import InputError, Scheme, SolverSettings, SystemConfig, db_to_linear


class ConfigError(InputError):
    pass


class Experiment(str, enum.Enum):
    RATE_REGION = "RateRegion"
    SU_SWEEP = "SuSweep"
    OUTAGE = "Outage"
    RHO_CURVE = "RhoCurve"
    ALPHA_CURVE = "AlphaCurve"
    FEASIBILITY = "Feasibility"


SWEEP_VARIABLES = ("p_s0_db", "rho", "alpha", "r_p")

DEFAULT_SCHEMES = {
    Experiment.RATE_REGION: (Scheme.IDEAL, Scheme.POWER_SPLIT, Scheme.TIME_SPLIT,
                             Scheme.BASELINE_NO_ENERGY),
    Experiment.SU_SWEEP: (Scheme.POWER_SPLIT, Scheme.TIME_SPLIT, Scheme.BASELINE_NO_ENERGY),
    Experiment.OUTAGE: (Scheme.NO_COOPERATION, Scheme.POWER_SPLIT, Scheme.TIME_SPLIT,
                        Scheme.BASELINE_NO_ENERGY),
    Experiment.RHO_CURVE: (Scheme.POWER_SPLIT, Scheme.POWER_SPLIT_ZF),
    Experiment.ALPHA_CURVE: (Scheme.TIME_SPLIT, Scheme.TIME_SPLIT_ZF),
    Experiment.FEASIBILITY: (Scheme.IDEAL, Scheme.POWER_SPLIT, Scheme.TIME_SPLIT,
                             Scheme.BASELINE_NO_ENERGY),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment = Experiment.SU_SWEEP
    schemes: tuple[Scheme, ...] | None = None
    trials: int = 1000
    seed: int = 0
    st_to_all_m: float = 1.0
    pt_to_pu_m: float = 2.0
    exponent: float = 3.5
    n_antennas: int = 4
    p_p_db: float = 20.0
    p_max_db: float = 30.0
    p_s0_db: float = 10.0
    n0: float = 1.0
    nc: float = 1.0
    sweep_variable: str = "p_s0_db"
    sweep_start: float = 0.0
    sweep_stop: float = 20.0
    sweep_points: int = 5
    region_points: int = 20
    r_p: float = 3.0
    r_s: float = 4.0
    eta_list: tuple[float, ...] | None = None
    preset: str = ""
    grid_coarse: int = 32
    refine_rounds: int = 14
    output_path: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.sweep_points < 2 or self.region_points < 2:
            raise ConfigError("sweep_points and region_points must be at least 2")
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep_variable must be one of {', '.join(SWEEP_VARIABLES)}")
        if self.eta_list is not None:
            if not self.eta_list:
                raise ConfigError("eta_list must not be empty")
            for e in self.eta_list:
                if not 0.0 <= e <= 1.0:
                    raise ConfigError(f"eta {e} outside [0, 1]")
        for name in ("st_to_all_m", "pt_to_pu_m", "exponent", "n0"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.nc < 0 or self.r_p < 0 or self.r_s < 0:
            raise ConfigError("nc, r_p and r_s must be non-negative")
        if self.n_antennas < 1:
            raise ConfigError("n_antennas must be at least 1")
        if self.p_max_db < self.p_p_db:
            raise ConfigError("p_max_db must be at least p_p_db")
        try:
            self.settings()
        except InputError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def etas(self) -> tuple[float, ...]:
        return self.eta_list if self.eta_list is not None else (0.5,)

    @property
    def scheme_list(self) -> tuple[Scheme, ...]:
        return self.schemes if self.schemes else DEFAULT_SCHEMES[self.experiment]

    def settings(self) -> SolverSettings:
        return SolverSettings(grid_coarse=self.grid_coarse, refine_rounds=self.refine_rounds)

    def system(self, eta: float, p_s0_db: float | None = None) -> SystemConfig:
        ps0 = self.p_s0_db if p_s0_db is None else p_s0_db
        return SystemConfig(P_p=db_to_linear(self.p_p_db), P_s0=db_to_linear(ps0), eta=eta,
                            N0=self.n0, NC=self.nc, r_p=self.r_p,
                            P_max=db_to_linear(self.p_max_db), N=self.n_antennas)

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(name: str, text: str) -> Any:
    if name == "experiment":
        for e in Experiment:
            if e.value.lower() == text.lower():
                return e
        raise ValueError(f"expected one of {', '.join(e.value for e in Experiment)}")
    if name == "schemes":
        return tuple(Scheme.parse(t) for t in text.split(",") if t.strip()) or None
    if name == "eta_list":
        return tuple(float(t) for t in text.split(",") if t.strip()) or None
    kind = _FIELDS[name].type
    if kind == "int":
        return int(text, 0)
    if kind == "float":
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v
    return text


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    values: dict[str, Any] = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        try:
            values[key] = _parse_value(key, val)
        except (ValueError, InputError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"config {p} is not valid UTF-8") from None
    return parse_config_text(text, str(p))


def _render(v: Any) -> str:
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, tuple):
        return ", ".join(_render(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = []
    for name in _FIELDS:
        v = getattr(cfg, name)
        if v is None:
            continue
        lines.append(f"{name} = {_render(v)}")
    return "\n".join(lines) + "\n"

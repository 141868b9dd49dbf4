"""Run configuration: a YAML document validated by pydantic.

Example (flux qubit with noise)::

    schema_version: 1
    model:
      kind: flux
      flux: {epsilon: -2.0e-4}
    noise: {C: 1.0e-10, n: 100, nu_min: 2500.0, nu_max: 3500.0, seeds: [1, 2, 3]}
    tau: {start: 0.002, stop: 0.05, num: 10}
    output: {format: csv}

Complete examples for every model live in ``configs/``.
"""

from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator, model_validator

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TongParams(_Strict):
    theta: float = 0.001
    omega: float = 10.0
    omega0: float = -10.0


class FluxParams(_Strict):
    E_J: PositiveFloat = 2 * np.pi * 2.0e5
    t1_ratio: PositiveFloat = 1e-3
    r1_ratio: PositiveFloat = 4.8
    r2_ratio: float = 1.0
    w_ratio: PositiveFloat = 2.4
    epsilon: float = -2e-4


class CustomTable(_Strict):
    """Two-level drift ``a(s) sigma_x + b(s) sigma_z`` tabulated on ``s``."""

    s: List[float]
    a: List[float]
    b: List[float]

    @model_validator(mode="after")
    def _shape(self):
        if not (len(self.s) == len(self.a) == len(self.b)):
            raise ValueError("s, a and b must have equal length")
        if len(self.s) < 4:
            raise ValueError("need at least 4 table rows")
        s = np.asarray(self.s)
        if s[0] != 0.0 or s[-1] != 1.0 or np.any(np.diff(s) <= 0):
            raise ValueError("s must increase strictly from 0 to 1")
        return self


class ModelSpec(_Strict):
    kind: Literal["tong", "flux", "custom"]
    tong: TongParams = TongParams()
    flux: FluxParams = FluxParams()
    custom: Optional[CustomTable] = None

    @model_validator(mode="after")
    def _custom_table(self):
        if self.kind == "custom" and self.custom is None:
            raise ValueError("model.custom table is required for kind 'custom'")
        return self


class NoiseSpec(_Strict):
    C: float = Field(ge=0.0)
    n: int = Field(ge=1)
    nu_min: PositiveFloat
    nu_max: PositiveFloat
    seeds: List[int] = [0]
    window: Optional[PositiveFloat] = None
    samples: int = Field(default=1_000_000, ge=100_000)
    frequency_unit: Literal["MHz", "GHz"] = "MHz"

    @property
    def scale(self) -> float:
        return 1e3 if self.frequency_unit == "GHz" else 1.0

    @property
    def nu_min_mhz(self) -> float:
        return self.nu_min * self.scale

    @property
    def nu_max_mhz(self) -> float:
        return self.nu_max * self.scale

    @model_validator(mode="after")
    def _band(self):
        if self.nu_max <= self.nu_min:
            raise ValueError("nu_max must exceed nu_min")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        return self


class AmplitudeSpec(_Strict):
    """Injected noise suprema, bypassing calibration."""

    sup_dN: float = Field(ge=0.0)
    sup_d2N: float = Field(ge=0.0)
    sup_N: Optional[float] = Field(default=None, ge=0.0)


class OverlapSpec(_Strict):
    delta0: float = Field(ge=0.0, le=1.0)
    delta1: float = Field(ge=0.0, le=1.0)


class TauRange(_Strict):
    start: PositiveFloat
    stop: PositiveFloat
    num: int = Field(ge=1)
    spacing: Literal["linear", "log"] = "linear"

    def values(self) -> List[float]:
        fn = np.geomspace if self.spacing == "log" else np.linspace
        return [float(x) for x in fn(self.start, self.stop, self.num)]


class IntegratorSpec(_Strict):
    rel_tol: PositiveFloat = 1e-9
    abs_tol: PositiveFloat = 1e-12
    max_step: Optional[PositiveFloat] = None
    initial_step: Optional[PositiveFloat] = None


class GridSpec(_Strict):
    points: int = Field(default=1001, ge=101)


class OutputSpec(_Strict):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"


class RunConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    model: ModelSpec
    noise: Optional[NoiseSpec] = None
    amplitudes: Optional[AmplitudeSpec] = None
    overlaps: Optional[OverlapSpec] = None
    tau: Union[List[PositiveFloat], TauRange] = [1.0]
    grid: GridSpec = GridSpec()
    integrator: IntegratorSpec = IntegratorSpec()
    output: OutputSpec = OutputSpec()

    @field_validator("tau")
    @classmethod
    def _nonempty(cls, v):
        if isinstance(v, list) and not v:
            raise ValueError("tau list must not be empty")
        return v

    @model_validator(mode="after")
    def _noise_model(self):
        if self.noise is not None and self.model.kind != "flux":
            raise ValueError("noise is only supported for the flux model")
        if (self.amplitudes or self.overlaps) and self.model.kind != "flux":
            raise ValueError("amplitudes/overlaps injection applies to the flux model only")
        return self

    @property
    def tau_values(self) -> List[float]:
        return [float(x) for x in self.tau] if isinstance(self.tau, list) else self.tau.values()


class ConfigError(ValueError):
    """Unreadable or schema-invalid configuration."""


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_config(data) -> RunConfig:
    try:
        return RunConfig.model_validate(data if data is not None else {})
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None


def load_config(path) -> RunConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as err:
        raise ConfigError(f"cannot read {path}: {err}") from None
    return parse_config(data)


def dump_config(config: RunConfig) -> str:
    """YAML text that :func:`load_config` parses back to an equal config."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True)


def parse_tau(text: str) -> Union[List[float], TauRange]:
    """``"1,5,10"`` or ``"start:stop:num"`` or ``"log:start:stop:num"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            spacing = "linear"
            if parts[0] in ("log", "linear"):
                spacing = parts.pop(0)
            if len(parts) != 3:
                raise ValueError
            return TauRange(start=float(parts[0]), stop=float(parts[1]), num=int(parts[2]), spacing=spacing)
        values = [float(x) for x in text.split(",") if x.strip()]
    except (ValueError, ValidationError):
        raise ConfigError(f"tau: cannot parse {text!r}") from None
    if not values:
        raise ConfigError("tau: list must not be empty")
    if min(values) <= 0:
        raise ConfigError("tau: values must be positive")
    return values

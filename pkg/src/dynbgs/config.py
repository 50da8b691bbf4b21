"""Pipeline configuration: a flat set of tunables with defaults.

Config files are plain ``key = value`` lines; ``#`` starts a comment.
Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping

from .classifier import ThresholdParams
from .lbsp import LbspParams
from .postprocess import PostParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    n_samples: int = 50
    m_dyn_samples: int = 30
    t_r: float = 0.3
    r0_color: float = 30.0
    r0_lbsp: float = 3.0
    min_matches: int = 2
    blink_threshold: float = 0.025
    dyn_color_threshold: float = 30.0
    warmup_frames: int = 100
    dist_gate: float = 0.45
    dist_gate_above: bool = True
    feed_gate: float = 0.4
    alpha_short: float = 0.04
    alpha_long: float = 0.01
    v_decr: float = 0.1
    v_floor: float = 0.1
    d_eps: float = 0.001
    t_min: float = 2.0
    t_max: float = 256.0
    post_enabled: bool = True
    open_radius: int = 1
    close_radius: int = 1
    median_size: int = 9
    recheck_enabled: bool = True
    neighbor_diffusion: bool = True
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.n_samples >= self.min_matches, "n_samples must be >= min_matches"),
            (self.m_dyn_samples >= 1, "m_dyn_samples must be >= 1"),
            (0.0 < self.alpha_short <= 1.0, "alpha_short must lie in (0, 1]"),
            (0.0 < self.alpha_long <= 1.0, "alpha_long must lie in (0, 1]"),
            (0.0 <= self.blink_threshold <= 1.0, "blink_threshold must lie in [0, 1]"),
            (self.dyn_color_threshold >= 0, "dyn_color_threshold must be >= 0"),
            (self.warmup_frames >= 0, "warmup_frames must be >= 0"),
            (self.v_decr >= 0, "v_decr must be >= 0"),
            (self.v_floor > 0, "v_floor must be > 0"),
            (self.d_eps > 0, "d_eps must be > 0"),
            (1.0 <= self.t_min <= self.t_max, "need 1 <= t_min <= t_max"),
            (0 <= self.seed < 2 ** 64, "seed must fit in 64 bits"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        try:
            self.lbsp_params()
            self.threshold_params()
            self.post_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def lbsp_params(self) -> LbspParams:
        return LbspParams(t_r=self.t_r)

    def threshold_params(self) -> ThresholdParams:
        return ThresholdParams(self.r0_color, self.r0_lbsp, self.min_matches)

    def post_params(self) -> PostParams:
        return PostParams(self.open_radius, self.close_radius, self.median_size, self.post_enabled)

    def with_overrides(self, values: Mapping[str, object]) -> "PipelineConfig":
        types = {f.name: f.type for f in fields(self)}
        parsed = {}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            parsed[key] = _coerce(key, raw, types[key])
        try:
            return replace(self, **parsed)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_text(self) -> str:
        return "".join(f"{k} = {_render(v)}\n" for k, v in asdict(self).items())


def _render(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _coerce(key: str, raw, type_name):
    type_name = getattr(type_name, "__name__", type_name)
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if type_name == "bool":
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if type_name == "int":
            return int(text, 0)
        if type_name == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r} (expected {type_name})") from None
    return text


def parse_assignments(lines: Iterable[str], source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config(path=None, overrides: Iterable[str] = ()) -> PipelineConfig:
    """Defaults, then the config file, then K=V overrides (which win)."""
    values = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        values.update(parse_assignments(text.splitlines(), str(path)))
    values.update(parse_assignments(overrides, "--set"))
    return PipelineConfig().with_overrides(values)

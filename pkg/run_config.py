# File: run_config.py
"""
Run configuration for the command-line interface.

A run is described by a flat YAML mapping: the scenario name, physical
parameters, sweep grids, detection phases, emitter geometry and a few
scenario switches. `parse_config` validates the text and builds an immutable
RunConfig; `render_config` writes one back so that
parse_config(render_config(cfg)) == cfg.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import yaml

from analytic import AnalyticError, Excitation
from coupling import CouplingError, Geometry
from model import DetectionGeometry, NamedState, ParameterError, SystemParams

logger = logging.getLogger(__name__)

PARAM_KEYS = ("gamma0", "alpha", "omega12", "gamma12", "gamma_star", "delta", "laser_detuning", "rabi")
GEOMETRY_KEYS = ("separation_over_lambda", "dipole1", "dipole2", "axis")
GRID_KEYS = ("detuning", "rabi", "gamma_star", "time", "tau", "omega", "separation")
OTHER_KEYS = ("scenario", "phi", "initial_state", "excitation", "independent_reference", "output")
KNOWN_KEYS = frozenset(PARAM_KEYS + GEOMETRY_KEYS + GRID_KEYS + OTHER_KEYS)

DEFAULT_SEPARATION = 0.0357
PHASE_TOKENS = ("perpendicular", "parallel")

# scenario -> (required grids, optional grids)
SCENARIO_GRIDS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "spectrum": (("detuning",), ("gamma_star", "rabi")),
    "saturation": (("rabi",), ("gamma_star",)),
    "g2map": (("rabi", "gamma_star"), ()),
    "decay": (("time",), ("gamma_star",)),
    "g1spec": (("time", "omega"), ()),
    "g2time": (("time",), ("tau", "gamma_star")),
    "thresholds": ((), ()),
    "coupling": ((), ("separation",)),
}

Phase = Union[float, str]


# --- Custom Exceptions ---
class ConfigError(ValueError):
    """Invalid run configuration; the message names the field and, when known, the line."""

    def __init__(self, message: str, field_name: Optional[str] = None, line: Optional[int] = None):
        self.field_name = field_name
        self.line = line
        location = ""
        if field_name is not None:
            location = f"'{field_name}'"
            if line is not None:
                location += f" (line {line})"
            location += ": "
        super().__init__(f"{location}{message}")


@dataclass(frozen=True)
class AxisSpec:
    """
    One sweep axis: either start/stop/count with a linear or log scale, or an
    explicit list of values.
    """
    start: Optional[float] = None
    stop: Optional[float] = None
    count: Optional[int] = None
    scale: str = "linear"
    explicit: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.explicit is not None:
            values = tuple(float(v) for v in self.explicit)
            if not values:
                raise ValueError("explicit grid must hold at least one value")
            if not all(math.isfinite(v) for v in values):
                raise ValueError("grid values must be finite")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError("grid values must be strictly increasing")
            object.__setattr__(self, "explicit", values)
            return
        if self.start is None or self.stop is None or self.count is None:
            raise ValueError("grid needs start, stop and count")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"grid scale must be 'linear' or 'log', got '{self.scale}'")
        if self.count < 2:
            raise ValueError(f"grid count must be at least 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"grid start ({self.start}) must be below stop ({self.stop})")
        if self.scale == "log" and self.start <= 0:
            raise ValueError(f"log grid needs a positive start, got {self.start}")

    @classmethod
    def linear(cls, start: float, stop: float, count: int) -> "AxisSpec":
        return cls(float(start), float(stop), int(count))

    @classmethod
    def log(cls, start: float, stop: float, count: int) -> "AxisSpec":
        return cls(float(start), float(stop), int(count), "log")

    @classmethod
    def of(cls, *values: float) -> "AxisSpec":
        return cls(explicit=tuple(values))

    def values(self) -> np.ndarray:
        if self.explicit is not None:
            return np.array(self.explicit, dtype=float)
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def to_yaml(self) -> Dict[str, Any]:
        if self.explicit is not None:
            return {"values": list(self.explicit)}
        return {"start": self.start, "stop": self.stop, "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    params: SystemParams = field(default_factory=SystemParams)
    grids: Dict[str, AxisSpec] = field(default_factory=dict)
    phis: Tuple[Phase, ...] = (0.0,)
    geometry: Geometry = field(default_factory=lambda: Geometry(DEFAULT_SEPARATION))
    initial_state: NamedState = NamedState.E
    excitation: Excitation = Excitation.TWO_PHOTON
    independent_reference: bool = False
    output: Optional[str] = None

    def grid(self, name: str) -> np.ndarray:
        return self.grids[name].values()

    def has_grid(self, name: str) -> bool:
        return name in self.grids

    def detection_geometries(self) -> Tuple[DetectionGeometry, ...]:
        """Resolves the phase tokens against the emitter separation."""
        resolved = []
        for phase in self.phis:
            if phase == "perpendicular":
                resolved.append(DetectionGeometry.perpendicular())
            elif phase == "parallel":
                resolved.append(DetectionGeometry.parallel(self.geometry.separation_over_lambda))
            else:
                resolved.append(DetectionGeometry(phase))
        return tuple(resolved)


# --- Parsing helpers ---
def _number(value: Any, name: str, line: Optional[int]) -> float:
    # PyYAML reads exponent forms without a dot (1e-3) as strings
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", name, line)
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str):
        try:
            number = float(value.strip())
        except ValueError as e:
            raise ConfigError(f"expected a number, got '{value}'", name, line) from e
    else:
        raise ConfigError(f"expected a number, got {value!r}", name, line)
    if not math.isfinite(number):
        raise ConfigError(f"expected a finite number, got {value!r}", name, line)
    return number


def _count(value: Any, name: str, line: Optional[int]) -> int:
    number = _number(value, name, line)
    if number != int(number):
        raise ConfigError(f"grid count must be an integer, got {value!r}", name, line)
    return int(number)


def _is_grid(key: str, value: Any) -> bool:
    """rabi and gamma_star are parameters when scalar (or a rabi pair) and grids otherwise."""
    if key not in ("rabi", "gamma_star"):
        return key in GRID_KEYS
    if isinstance(value, dict):
        return True
    if isinstance(value, list):
        return not (key == "rabi" and len(value) == 2)
    return False


def _parse_grid(value: Any, name: str, line: Optional[int]) -> AxisSpec:
    try:
        if isinstance(value, dict):
            unknown = set(value) - {"start", "stop", "count", "scale", "values"}
            if unknown:
                raise ConfigError(f"unknown grid field(s) {sorted(unknown)}", name, line)
            if "values" in value:
                if set(value) != {"values"} or not isinstance(value["values"], list):
                    raise ConfigError("an explicit grid is written {values: [...]}", name, line)
                return AxisSpec(explicit=tuple(_number(v, name, line) for v in value["values"]))
            missing = [k for k in ("start", "stop", "count") if k not in value]
            if missing:
                raise ConfigError(f"grid is missing {', '.join(missing)}", name, line)
            return AxisSpec(_number(value["start"], name, line), _number(value["stop"], name, line),
                            _count(value["count"], name, line), str(value.get("scale", "linear")))

        if isinstance(value, list) and len(value) in (3, 4):
            start, stop = _number(value[0], name, line), _number(value[1], name, line)
            scale = "linear"
            count_token = value[2]
            if isinstance(count_token, str) and len(count_token.split()) == 2:
                count_token, scale = count_token.split()
            if len(value) == 4:
                scale = str(value[3])
            return AxisSpec(start, stop, _count(count_token, name, line), scale)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), name, line) from e
    raise ConfigError("grid must be [start, stop, count], [start, stop, count, log] or a mapping", name, line)


def _parse_phase(value: Any, line: Optional[int]) -> Phase:
    if isinstance(value, str) and value.strip().lower() in PHASE_TOKENS:
        return value.strip().lower()
    return _number(value, "phi", line)


def _parse_vector(value: Any, name: str, line: Optional[int]) -> Tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError("expected a 3-vector [x, y, z]", name, line)
    return tuple(_number(v, name, line) for v in value)


def _parse_bool(value: Any, name: str, line: Optional[int]) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", name, line)
    return value


def _key_lines(text: str) -> Dict[str, int]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value}


def parse_config(text: str) -> RunConfig:
    """
    Parses and validates a YAML run configuration.

    Args:
        text: The YAML document.

    Returns:
        RunConfig with every default filled in.

    Raises:
        ConfigError: For syntax errors, unknown keys, malformed numbers or
            grids, missing scenario or grids, and invalid physical parameters.
    """
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {e}", line=mark.line + 1 if mark else None) from e
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError("configuration must be a mapping of top-level keys")
    lines = _key_lines(text)

    for key in document:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key '{key}'", str(key), lines.get(key))

    if "scenario" not in document:
        raise ConfigError("missing scenario", "scenario")
    scenario = str(document["scenario"])
    if scenario not in SCENARIO_GRIDS:
        raise ConfigError(f"unknown scenario '{scenario}', expected one of {', '.join(SCENARIO_GRIDS)}",
                          "scenario", lines.get("scenario"))

    param_values: Dict[str, Any] = {}
    grids: Dict[str, AxisSpec] = {}
    for key, value in document.items():
        line = lines.get(key)
        if _is_grid(key, value):
            grids[key] = _parse_grid(value, key, line)
        elif key == "rabi":
            if isinstance(value, list):
                param_values["rabi"] = tuple(_number(v, key, line) for v in value)
            else:
                param_values["rabi"] = _number(value, key, line)
        elif key in PARAM_KEYS:
            param_values[key] = _number(value, key, line)

    required, optional = SCENARIO_GRIDS[scenario]
    for name in required:
        if name not in grids:
            raise ConfigError(f"scenario '{scenario}' requires the '{name}' grid", name)
    for name in grids:
        if name not in required + optional:
            raise ConfigError(f"grid '{name}' is not used by scenario '{scenario}'", name, lines.get(name))
    if scenario == "spectrum" and "gamma_star" in grids and "rabi" in grids:
        raise ConfigError("spectrum sweeps either gamma_star or rabi, not both", "rabi", lines.get("rabi"))

    try:
        params = SystemParams(**param_values)
    except ParameterError as e:
        raise ConfigError(str(e), "params") from e

    geometry_values = {"separation_over_lambda": DEFAULT_SEPARATION}
    for key in GEOMETRY_KEYS:
        if key in document:
            line = lines.get(key)
            if key == "separation_over_lambda":
                geometry_values[key] = _number(document[key], key, line)
            else:
                geometry_values[key] = _parse_vector(document[key], key, line)
    try:
        geometry = Geometry(**geometry_values)
    except CouplingError as e:
        raise ConfigError(str(e), "geometry") from e

    raw_phi = document.get("phi", 0.0)
    phis = tuple(_parse_phase(v, lines.get("phi")) for v in (raw_phi if isinstance(raw_phi, list) else [raw_phi]))
    if not phis:
        raise ConfigError("at least one detection phase is needed", "phi", lines.get("phi"))

    try:
        initial_state = NamedState.parse(document.get("initial_state", "E"))
        excitation = Excitation.parse(document.get("excitation", "two_photon"))
    except (ParameterError, AnalyticError) as e:
        key = "initial_state" if isinstance(e, ParameterError) else "excitation"
        raise ConfigError(str(e), key, lines.get(key)) from e

    independent = _parse_bool(document.get("independent_reference", False), "independent_reference",
                              lines.get("independent_reference"))
    output = document.get("output")
    if output is not None and (not isinstance(output, str) or not output.strip()):
        raise ConfigError("output must be a non-empty file name", "output", lines.get("output"))

    config = RunConfig(scenario, params, grids, phis, geometry, initial_state, excitation, independent, output)
    logger.debug("Parsed %s configuration with grids %s", scenario, sorted(grids))
    return config


def load_config(path: str) -> RunConfig:
    """Reads and parses a configuration file. OSError propagates to the caller."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def render_config(cfg: RunConfig) -> str:
    """Writes a configuration back to YAML; keys come out in a fixed order."""
    document: Dict[str, Any] = {"scenario": cfg.scenario}
    p = cfg.params
    for key in PARAM_KEYS:
        if key in cfg.grids:
            continue
        if key == "rabi":
            document["rabi"] = p.rabi[0] if p.equal_drive else list(p.rabi)
        else:
            document[key] = getattr(p, key)
    document["separation_over_lambda"] = cfg.geometry.separation_over_lambda
    for key in ("dipole1", "dipole2", "axis"):
        document[key] = list(getattr(cfg.geometry, key))
    document["phi"] = cfg.phis[0] if len(cfg.phis) == 1 else list(cfg.phis)
    for name in GRID_KEYS:
        if name in cfg.grids:
            document[name] = cfg.grids[name].to_yaml()
    document["initial_state"] = cfg.initial_state.value
    document["excitation"] = cfg.excitation.value
    document["independent_reference"] = cfg.independent_reference
    if cfg.output is not None:
        document["output"] = cfg.output
    return yaml.safe_dump(document, sort_keys=False, default_flow_style=None)

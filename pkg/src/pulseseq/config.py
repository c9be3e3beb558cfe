"""Scenario configuration: YAML parsing, validation and defaults.

A scenario binds a system, a control objective, an initial state, a pulse
shape and timing to one or more simulation modes.  Validation collects
every error (with its config path) instead of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

DEFAULT_TAU0 = 30.0
DEFAULT_SLOT = 200.0
DEFAULT_RWA_STEPS = 1000
DEFAULT_LABFRAME_STEPS = 60

VALID_OBJECTIVES = ("transfer", "invert", "superpose", "maximize", "custom")
VALID_MODES = ("piecewise", "rwa", "labframe")


class ConfigError(ValueError):
    """Raised with the full list of validation errors."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


@dataclass
class ScenarioConfig:
    system_kind: str = "morse"
    levels: int = 4
    anharmonicity: float = 0.1
    omega0: float = 1.0
    p12: float = 1.0
    energies: list[float] | None = None
    dipoles: list[float] | None = None

    objective: str = "transfer"
    amplitudes: list[float] | None = None
    phases: list[float] | None = None
    unitary_file: str | None = None
    pulse_phases: list[float] | str | None = None

    initial: str = "ground"
    anti_thermal: bool = False
    weights: list[float] | None = None

    shape_kind: str = "square"
    tau0: float = DEFAULT_TAU0
    q: float | None = None

    slot: float | None = None
    total_time: float | None = None

    modes: list[str] = field(default_factory=lambda: ["rwa"])
    rwa_steps: int = DEFAULT_RWA_STEPS
    labframe_steps: int = DEFAULT_LABFRAME_STEPS

    schedule_path: str = "schedule.txt"
    trace_path: str = "trace.csv"
    figures: bool = False

    def to_dict(self) -> dict:
        return {
            "system": (
                {"kind": "morse", "levels": self.levels, "anharmonicity": self.anharmonicity,
                 "omega0": self.omega0, "p12": self.p12}
                if self.system_kind == "morse"
                else {"kind": "explicit", "energies": self.energies, "dipoles": self.dipoles}
            ),
            "objective": {
                "kind": self.objective,
                **({"amplitudes": self.amplitudes} if self.amplitudes is not None else {}),
                **({"phases": self.phases} if self.phases is not None else {}),
                **({"unitary_file": self.unitary_file} if self.unitary_file else {}),
                **({"pulse_phases": self.pulse_phases} if self.pulse_phases is not None else {}),
            },
            "initial": {
                "kind": self.initial,
                **({"anti_thermal": True} if self.anti_thermal else {}),
                **({"weights": self.weights} if self.weights is not None else {}),
            },
            "shape": (
                {"kind": "square", "tau0": self.tau0}
                if self.shape_kind == "square"
                else {"kind": "gaussian", **({"q": self.q} if self.q is not None else {})}
            ),
            "timing": (
                {"total": self.total_time} if self.total_time is not None else {"slot": self.slot}
            ),
            "simulation": {
                "modes": list(self.modes),
                "rwa_steps": self.rwa_steps,
                "labframe_steps": self.labframe_steps,
            },
            "outputs": {
                "schedule": self.schedule_path,
                "trace": self.trace_path,
                "figures": self.figures,
            },
        }

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _require_positive(errors, value, path, integer=False):
    kind = (int,) if integer else (int, float)
    if not isinstance(value, kind) or isinstance(value, bool) or value <= 0:
        errors.append(f"{path}: must be a positive {'integer' if integer else 'number'}, got {value!r}")
        return False
    return True


def parse_config(data: dict) -> ScenarioConfig:
    """Normalize a raw config mapping, collecting all validation errors."""
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])
    errors: list[str] = []
    cfg = ScenarioConfig()

    known = {"system", "objective", "initial", "shape", "timing", "simulation", "outputs"}
    for key in data:
        if key not in known:
            errors.append(f"{key}: unknown section")

    system = data.get("system", {}) or {}
    cfg.system_kind = system.get("kind", "morse")
    if cfg.system_kind == "morse":
        cfg.levels = system.get("levels", 4)
        cfg.anharmonicity = system.get("anharmonicity", 0.1)
        cfg.omega0 = system.get("omega0", 1.0)
        cfg.p12 = system.get("p12", 1.0)
        _require_positive(errors, cfg.levels, "system.levels", integer=True)
        _require_positive(errors, cfg.omega0, "system.omega0")
        _require_positive(errors, cfg.p12, "system.p12")
        if not isinstance(cfg.anharmonicity, (int, float)) or cfg.anharmonicity < 0:
            errors.append(f"system.anharmonicity: must be a non-negative number")
    elif cfg.system_kind == "explicit":
        cfg.energies = system.get("energies")
        cfg.dipoles = system.get("dipoles")
        if not isinstance(cfg.energies, list) or len(cfg.energies or []) < 2:
            errors.append("system.energies: need a list of at least two energies")
        if not isinstance(cfg.dipoles, list):
            errors.append("system.dipoles: need a list of adjacent dipole moments")
        elif cfg.energies and len(cfg.dipoles) != len(cfg.energies) - 1:
            errors.append("system.dipoles: need one fewer entry than system.energies")
    else:
        errors.append(f"system.kind: expected morse or explicit, got {cfg.system_kind!r}")

    objective = data.get("objective", {}) or {}
    cfg.objective = objective.get("kind", "transfer")
    if cfg.objective not in VALID_OBJECTIVES:
        errors.append(f"objective.kind: expected one of {VALID_OBJECTIVES}, got {cfg.objective!r}")
    if cfg.objective == "superpose":
        cfg.amplitudes = objective.get("amplitudes")
        cfg.phases = objective.get("phases")
        if not isinstance(cfg.amplitudes, list):
            errors.append("objective.amplitudes: superpose needs an amplitude list")
        else:
            total = sum(a * a for a in cfg.amplitudes)
            if abs(total - 1.0) > 1e-8:
                errors.append(f"objective.amplitudes: squares must sum to 1, got {total:g}")
    if cfg.objective == "custom":
        cfg.unitary_file = objective.get("unitary_file")
        if not cfg.unitary_file:
            errors.append("objective.unitary_file: custom objective needs a matrix file")
    cfg.pulse_phases = objective.get("pulse_phases")
    if cfg.pulse_phases is not None and cfg.pulse_phases != "random" and not isinstance(
        cfg.pulse_phases, list
    ):
        errors.append("objective.pulse_phases: expected a list of phases or 'random'")

    initial = data.get("initial", {}) or {}
    cfg.initial = initial.get("kind", "ground")
    cfg.anti_thermal = bool(initial.get("anti_thermal", False))
    if cfg.initial == "weights":
        cfg.weights = initial.get("weights")
        if not isinstance(cfg.weights, list) or abs(sum(cfg.weights or [0]) - 1.0) > 1e-8:
            errors.append("initial.weights: need a probability list summing to 1")
    elif cfg.initial not in ("ground", "boltzmann"):
        errors.append(f"initial.kind: expected ground, boltzmann or weights, got {cfg.initial!r}")

    shape = data.get("shape", {}) or {}
    cfg.shape_kind = shape.get("kind", "square")
    if cfg.shape_kind == "square":
        cfg.tau0 = shape.get("tau0", DEFAULT_TAU0)
        _require_positive(errors, cfg.tau0, "shape.tau0")
    elif cfg.shape_kind == "gaussian":
        cfg.q = shape.get("q")
        if cfg.q is not None:
            _require_positive(errors, cfg.q, "shape.q")
    else:
        errors.append(f"shape.kind: expected square or gaussian, got {cfg.shape_kind!r}")

    timing = data.get("timing", {}) or {}
    if "total" in timing and "slot" in timing:
        errors.append("timing: give either total or slot, not both")
    elif "total" in timing:
        cfg.total_time = timing["total"]
        _require_positive(errors, cfg.total_time, "timing.total")
    else:
        cfg.slot = timing.get("slot", DEFAULT_SLOT)
        _require_positive(errors, cfg.slot, "timing.slot")

    simulation = data.get("simulation", {}) or {}
    cfg.modes = simulation.get("modes", ["rwa"])
    if not isinstance(cfg.modes, list) or not cfg.modes:
        errors.append("simulation.modes: need a non-empty list")
    else:
        for m in cfg.modes:
            if m not in VALID_MODES:
                errors.append(f"simulation.modes: expected subset of {VALID_MODES}, got {m!r}")
    cfg.rwa_steps = simulation.get("rwa_steps", DEFAULT_RWA_STEPS)
    cfg.labframe_steps = simulation.get("labframe_steps", DEFAULT_LABFRAME_STEPS)
    _require_positive(errors, cfg.rwa_steps, "simulation.rwa_steps", integer=True)
    _require_positive(errors, cfg.labframe_steps, "simulation.labframe_steps", integer=True)

    outputs = data.get("outputs", {}) or {}
    cfg.schedule_path = outputs.get("schedule", "schedule.txt")
    cfg.trace_path = outputs.get("trace", "trace.csv")
    cfg.figures = bool(outputs.get("figures", False))

    if errors:
        raise ConfigError(errors)
    return cfg


def validate_config(path) -> ScenarioConfig:
    """Load and normalize a YAML scenario file."""
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError([f"YAML syntax error: {exc}"]) from exc
    return parse_config(data or {})


def load_unitary(path) -> np.ndarray:
    """Read a unitary as whitespace-separated complex literals, one row per line."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([complex(tok) for tok in line.split()])
    return np.array(rows, dtype=complex)

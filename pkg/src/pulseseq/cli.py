"""Scenario runner: config -> decomposition -> schedule -> simulation -> artifacts.

Exit codes: 0 success, 1 configuration error, 2 model or numeric error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, load_unitary, validate_config
from .decompose import (
    decompose,
    target_inversion,
    target_observable_max,
    target_population_transfer,
    target_superposition,
)
from .pulses import PulseShape, detuning_guard, serialize_schedule, synthesize
from .report import render_scenario
from .simulate import (
    piecewise_trace,
    propagate_labframe,
    propagate_rwa,
    superposition_target_state,
    trace_metrics,
    write_trace_csv,
)
from .system import (
    EnsembleState,
    ModelError,
    SystemModel,
    boltzmann_ensemble,
    kinematical_bounds,
    morse_system,
    transition_dipole_observable,
    energy_observable,
)


def _build_system(cfg: ScenarioConfig) -> SystemModel:
    if cfg.system_kind == "morse":
        return morse_system(cfg.levels, cfg.anharmonicity, cfg.omega0, cfg.p12)
    return SystemModel(energies=np.array(cfg.energies), dipoles=np.array(cfg.dipoles))


def _build_state(cfg: ScenarioConfig, system: SystemModel) -> EnsembleState:
    if cfg.initial == "ground":
        return EnsembleState.ground(system.n)
    if cfg.initial == "boltzmann":
        return boltzmann_ensemble(system, anti_thermal=cfg.anti_thermal)
    return EnsembleState.from_weights(np.array(cfg.weights))


def _pulse_phases(cfg: ScenarioConfig, count: int, seed: int | None):
    if cfg.pulse_phases is None:
        return None
    if cfg.pulse_phases == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(-np.pi, np.pi, size=count).tolist()
    return cfg.pulse_phases


def _build_objective(cfg: ScenarioConfig, system: SystemModel, state: EnsembleState, seed):
    """Return (decomposition, observable or None, target-state callable or None)."""
    if cfg.objective == "transfer":
        d = target_population_transfer(
            system, _pulse_phases(cfg, system.n - 1, seed)
        )
        return d, None, None
    if cfg.objective == "invert":
        count = system.n * (system.n - 1) // 2
        return target_inversion(system, _pulse_phases(cfg, count, seed)), None, None
    if cfg.objective == "superpose":
        r = np.array(cfg.amplitudes, dtype=float)
        theta = np.array(cfg.phases, dtype=float) if cfg.phases else np.zeros(system.n)
        _, d = target_superposition(r, theta, 1.0, system)
        return d, None, superposition_target_state(r, theta, system)
    if cfg.objective == "maximize":
        obs = transition_dipole_observable(system)
        u1 = target_observable_max(obs, state)
        return decompose(u1, mode="mod_phase"), obs, None
    u = load_unitary(cfg.unitary_file)
    if u.shape != (system.n, system.n):
        raise ModelError(f"custom unitary shape {u.shape} does not match system size {system.n}")
    return decompose(u, mode="mod_phase"), None, None


def _mode_path(base: Path, mode: str) -> Path:
    return base.with_name(f"{base.stem}_{mode}{base.suffix or '.csv'}")


def _summary(cfg: ScenarioConfig, trace, system, state) -> str:
    parts = [f"{cfg.objective} [{trace.mode}]"]
    parts.append(f"final_p{system.n}={trace.populations[-1, -1]:.9g}")
    parts.append(f"final_energy={trace.energy[-1]:.9g}")
    lo, hi = kinematical_bounds(energy_observable(system), state)
    parts.append(f"energy_bounds=[{lo:.9g},{hi:.9g}]")
    if trace.observable_avg is not None:
        obs_bound = kinematical_bounds(transition_dipole_observable(system), state)[1]
        parts.append(f"final_observable={trace.observable_avg[-1]:.9g}")
        parts.append(f"kinematical_max={obs_bound:.9g}")
    if trace.target_overlap is not None:
        parts.append(f"final_overlap={trace.target_overlap[-1]:.9g}")
    return " ".join(parts)


def run_scenario(
    cfg: ScenarioConfig,
    out_dir: Path,
    modes: list[str] | None = None,
    seed: int | None = None,
) -> int:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    system = _build_system(cfg)
    state = _build_state(cfg, system)
    d, observable, target_state = _build_objective(cfg, system, state, seed)

    shape = (
        PulseShape.square(cfg.tau0)
        if cfg.shape_kind == "square"
        else PulseShape.gaussian(cfg.q)
    )
    total_time = cfg.total_time if cfg.total_time is not None else cfg.slot * max(d.count, 1)
    schedule = synthesize(d, system, shape, total_time)

    for entry in detuning_guard(schedule, system):
        if entry.flagged:
            p = schedule.pulses[entry.index]
            print(
                f"warning: pulse {entry.index + 1} (transition {p.transition}) "
                f"detuning margin {entry.margin:.2f} < 10; off-resonant leakage likely",
                file=sys.stderr,
            )

    (out_dir / cfg.schedule_path).write_text(serialize_schedule(schedule, system))

    for mode in modes or cfg.modes:
        if mode == "piecewise":
            trace = piecewise_trace(d, system, state, schedule.total_time)
        elif mode == "rwa":
            trace = propagate_rwa(schedule, system, state, cfg.rwa_steps)
        else:
            trace = propagate_labframe(schedule, system, state, cfg.labframe_steps)
        trace_metrics(trace, system, observable=observable, target_state=target_state)
        csv_path = _mode_path(out_dir / cfg.trace_path, mode)
        write_trace_csv(trace, csv_path)
        if cfg.figures:
            render_scenario(
                trace,
                schedule,
                system,
                csv_path.with_suffix(".png"),
                title=f"{cfg.objective} ({mode})",
            )
        print(_summary(cfg, trace, system, state))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pulseseq",
        description="Compile unitary targets into pulse schedules and verify them by simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario config end to end")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--mode", action="append", choices=["piecewise", "rwa", "labframe"],
                       help="override the config's simulation modes (repeatable)")
    run_p.add_argument("--out-dir", type=Path, default=Path("."))
    run_p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized pulse phases")

    val_p = sub.add_parser("validate", help="validate a scenario config and print it normalized")
    val_p.add_argument("config", type=Path)

    args = parser.parse_args(argv)
    try:
        cfg = validate_config(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(cfg.dump(), end="")
        return 0
    try:
        return run_scenario(cfg, args.out_dir, modes=args.mode, seed=args.seed)
    except (ModelError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Figure rendering for scenario runs: envelopes, populations, energy.

Figures mirror the trace CSV contents: top panel shows the per-pulse
field envelopes, middle panel the level populations, bottom panel the
energy with its kinematical bound lines, plus an extra panel when an
observable or target-overlap series is present.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pulses import PulseSchedule, envelope
from .simulate import SimulationTrace
from .system import SystemModel


def render_scenario(
    trace: SimulationTrace,
    schedule: PulseSchedule,
    system: SystemModel,
    path,
    title: str | None = None,
) -> None:
    """Render one scenario run to an image file."""
    n_extra = int(trace.observable_avg is not None) + int(trace.target_overlap is not None)
    n_panels = 3 + n_extra
    fig, axes = plt.subplots(n_panels, 1, figsize=(7.0, 2.2 * n_panels), sharex=True)

    ax = axes[0]
    for p in schedule.pulses:
        ts = np.linspace(p.start, p.end, 200)
        env = np.array([2.0 * envelope(p, t) for t in ts])
        ax.plot(ts, 100.0 * env, lw=1.2)
        ax.annotate(
            f"$f_{{{p.transition}}}$",
            ((p.start + p.end) / 2.0, 100.0 * 2.0 * p.half_amplitude),
            textcoords="offset points",
            xytext=(0, 4),
            ha="center",
            fontsize=9,
        )
    ax.set_ylabel(r"field env. [$10^{-2}$]")
    if title:
        ax.set_title(title)

    ax = axes[1]
    for lvl in range(trace.populations.shape[1]):
        ax.plot(trace.times, trace.populations[:, lvl], lw=1.2, label=f"$|{lvl + 1}\\rangle$")
    ax.set_ylabel("populations")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="center left", fontsize=8, ncol=2)

    ax = axes[2]
    ax.plot(trace.times, trace.energy, "k-", lw=1.2)
    if trace.energy_bounds is not None:
        for bound in trace.energy_bounds:
            ax.axhline(bound, color="0.6", ls="--", lw=0.8)
    ax.set_ylabel("energy")

    idx = 3
    if trace.observable_avg is not None:
        ax = axes[idx]
        idx += 1
        ax.plot(trace.times, trace.observable_avg, lw=1.2)
        ax.set_ylabel(r"$\langle \tilde{A}(t) \rangle$")
    if trace.target_overlap is not None:
        ax = axes[idx]
        ax.plot(trace.times, trace.target_overlap, lw=1.2)
        ax.set_ylabel("target overlap")
        ax.set_ylim(-0.05, 1.05)

    axes[-1].set_xlabel("time")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Activation unit: p-neuron output ANDed with the sync clock, plus override.

Per high-rate step the AFE features drive the p-neuron; its output is masked
by the synchronous clock so samples only ever fall on the regular ADC grid.
A deterministic amplitude override, latched for a configurable hold window,
forces acquisition whenever the signal is unambiguously large.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .afe import AfeConfig, drive_voltages, extract_features
from .pbit import (
    PNeuronConfig,
    activation_probability,
    iid_decisions,
    lfsr_from_seed,
    telegraph_run,
)
from .traces import Trace


@dataclass(frozen=True)
class ActivationConfig:
    sync_rate_hz: float = 2000.0
    hold_steps: int | None = None  # None: one sync period
    pneuron: PNeuronConfig = field(default_factory=PNeuronConfig)
    afe: AfeConfig = field(default_factory=AfeConfig)

    def __post_init__(self):
        if self.sync_rate_hz <= 0:
            raise ValueError(f"sync_rate_hz must be positive, got {self.sync_rate_hz}")
        if self.hold_steps is not None and self.hold_steps < 0:
            raise ValueError(f"hold_steps must be >= 0, got {self.hold_steps}")

    @property
    def amp_threshold_v(self) -> float:
        return self.afe.amp_threshold_v

    def steps_per_tick(self, rate_hz: float) -> int:
        """High-rate steps per sync tick; the grid must divide exactly."""
        ratio = rate_hz / self.sync_rate_hz
        spt = int(round(ratio))
        if spt < 1 or abs(ratio - spt) > 1e-9 * ratio:
            raise ValueError(
                f"high-rate grid ({rate_hz} Hz) is not an integer multiple of "
                f"sync_rate_hz ({self.sync_rate_hz} Hz)"
            )
        return spt


@dataclass(frozen=True, eq=False)
class ActivationTrace:
    """Per-step activation outputs on the high-rate grid.

    gate is nonzero only at sync ticks: gate[i] = (pneuron_out[i] OR
    det_override[i]) AND (i in sync_ticks).
    """

    gate: np.ndarray
    sync_ticks: np.ndarray
    pneuron_out: np.ndarray
    det_override: np.ndarray
    rate_hz: float
    t0_s: float
    steps_per_tick: int

    def __len__(self) -> int:
        return self.gate.size

    @property
    def gated_ticks(self) -> np.ndarray:
        """Indices (into sync_ticks) of ticks that fired."""
        return np.flatnonzero(self.gate[self.sync_ticks])


def run_activation(x_high: Trace, cfg: ActivationConfig) -> ActivationTrace:
    """Sweep the activation unit over a high-rate trace.

    The digital source draws one fresh Bernoulli decision per sync tick; the
    telegraph source evolves on every high-rate step and is read at ticks.
    Deterministic per cfg.pneuron.seed.
    """
    spt = cfg.steps_per_tick(x_high.rate_hz)
    n = len(x_high)
    feats = extract_features(x_high, cfg.afe)
    v_in = drive_voltages(feats, cfg.afe)
    p = activation_probability(v_in, cfg.pneuron)
    ticks = np.arange(0, n, spt, dtype=np.int64)

    pneuron_out = np.zeros(n, dtype=np.uint8)
    if cfg.pneuron.source == "digital_iid":
        lfsr = lfsr_from_seed(cfg.pneuron.seed)
        decisions, _ = iid_decisions(p[ticks], lfsr)
        pneuron_out[ticks] = decisions
    else:
        rng = np.random.default_rng(cfg.pneuron.seed)
        pneuron_out[:] = telegraph_run(p, 1.0 / x_high.rate_hz, cfg.pneuron, rng)

    hold = spt if cfg.hold_steps is None else cfg.hold_steps
    trigger = feats.amplitude >= cfg.afe.amp_threshold_v
    steps = np.arange(n, dtype=np.int64)
    last_trigger = np.maximum.accumulate(np.where(trigger, steps, np.int64(-(n + hold + 1))))
    det_override = (steps - last_trigger <= hold).astype(np.uint8)

    gate = np.zeros(n, dtype=np.uint8)
    gate[ticks] = pneuron_out[ticks] | det_override[ticks]
    return ActivationTrace(
        gate=gate,
        sync_ticks=ticks,
        pneuron_out=pneuron_out,
        det_override=det_override,
        rate_hz=x_high.rate_hz,
        t0_s=x_high.t0_s,
        steps_per_tick=spt,
    )


def average_rate(a: ActivationTrace, window_ticks: int) -> np.ndarray:
    """Fraction of gated ticks per non-overlapping window of sync ticks.

    A trailing partial window is dropped.
    """
    if window_ticks < 1:
        raise ValueError(f"window_ticks must be >= 1, got {window_ticks}")
    if len(a) == 0 or a.sync_ticks.size == 0:
        raise ValueError("empty activation trace")
    g = a.gate[a.sync_ticks]
    n_win = g.size // window_ticks
    if n_win == 0:
        return np.zeros(0, dtype=np.float64)
    return g[: n_win * window_ticks].reshape(n_win, window_ticks).mean(axis=1)


def detection_latency(a: ActivationTrace, onset_step: int) -> float:
    """Seconds from onset_step to the first gated sync tick at or after it."""
    if not 0 <= onset_step < len(a):
        raise ValueError(f"onset_step {onset_step} out of range [0, {len(a)})")
    gated = a.sync_ticks[a.gate[a.sync_ticks] > 0]
    after = gated[gated >= onset_step]
    if after.size == 0:
        raise ValueError("no activation after onset")
    return float(after[0] - onset_step) / a.rate_hz

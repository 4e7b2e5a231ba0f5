"""Gated acquisition, linear-interpolation reconstruction, NMSE and savings.

The P-ADC samples the high-rate signal at gated sync ticks; the R-ADC at
every sync tick. Reconstruction interpolates linearly back onto the regular
ADC grid, holding the nearest sample value beyond the first/last point.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .activation import ActivationTrace
from .traces import Trace


@dataclass(frozen=True, eq=False)
class SampleStream:
    """Non-uniform (timestamp, value) pairs on the sync grid."""

    times_s: np.ndarray
    values: np.ndarray
    source: str  # "p_adc" | "r_adc"
    rate_hz: float  # sync grid rate the timestamps live on
    t0_s: float = 0.0

    def __post_init__(self):
        if self.times_s.shape != self.values.shape:
            raise ValueError("times and values must have identical length")
        if self.times_s.size > 1 and np.any(np.diff(self.times_s) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        if self.source not in ("p_adc", "r_adc"):
            raise ValueError(f"source must be 'p_adc' or 'r_adc', got {self.source!r}")

    def __len__(self) -> int:
        return self.times_s.size

    @property
    def grid_indices(self) -> np.ndarray:
        """Positions on the sync grid; every timestamp must sit on it."""
        idx = (self.times_s - self.t0_s) * self.rate_hz
        k = np.round(idx)
        if np.any(np.abs(idx - k) > 1e-6):
            raise ValueError("timestamps do not lie on the sync grid")
        return k.astype(np.int64)


def sample_gated(x_high: Trace, a: ActivationTrace) -> SampleStream:
    """P-ADC: capture the signal at every gated sync tick."""
    if len(x_high) != len(a) or x_high.rate_hz != a.rate_hz:
        raise ValueError("activation trace was not derived from this grid")
    sync_rate = a.rate_hz / a.steps_per_tick
    gated_steps = a.sync_ticks[a.gate[a.sync_ticks] > 0]
    tick_k = gated_steps // a.steps_per_tick
    return SampleStream(
        times_s=x_high.t0_s + tick_k / sync_rate,
        values=x_high.samples[gated_steps].copy(),
        source="p_adc",
        rate_hz=sync_rate,
        t0_s=x_high.t0_s,
    )


def sample_regular(x_high: Trace, a: ActivationTrace) -> SampleStream:
    """R-ADC: capture the signal at every sync tick."""
    if len(x_high) != len(a) or x_high.rate_hz != a.rate_hz:
        raise ValueError("activation trace was not derived from this grid")
    sync_rate = a.rate_hz / a.steps_per_tick
    tick_k = a.sync_ticks // a.steps_per_tick
    return SampleStream(
        times_s=x_high.t0_s + tick_k / sync_rate,
        values=x_high.samples[a.sync_ticks].copy(),
        source="r_adc",
        rate_hz=sync_rate,
        t0_s=x_high.t0_s,
    )


def quantize_stream(s: SampleStream, n_bits: int = 24, full_scale_v: float = 1.0) -> SampleStream:
    """Optional uniform mid-tread quantizer over [-full_scale, +full_scale]."""
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")
    if full_scale_v <= 0:
        raise ValueError(f"full_scale_v must be positive, got {full_scale_v}")
    lsb = 2.0 * full_scale_v / (2**n_bits)
    q = np.clip(np.round(s.values / lsb) * lsb, -full_scale_v, full_scale_v)
    return SampleStream(s.times_s.copy(), q, s.source, s.rate_hz, s.t0_s)


def reconstruct(s: SampleStream, rate_hz: float, n: int, t0_s: float = 0.0) -> Trace:
    """Linear interpolation onto a regular grid, constant beyond the ends.

    Interpolation runs on grid indices rather than raw times so retained
    samples are reproduced exactly.
    """
    if len(s) < 2:
        raise ValueError(f"need at least 2 samples to reconstruct, got {len(s)}")
    if abs(s.rate_hz - rate_hz) > 1e-9 * rate_hz:
        raise ValueError(
            f"stream grid ({s.rate_hz} Hz) does not match target grid ({rate_hz} Hz)"
        )
    idx = s.grid_indices
    grid = np.arange(n, dtype=np.float64)
    out = np.interp(grid, idx.astype(np.float64), s.values)
    return Trace(out, rate_hz, t0_s)


def nmse_time(orig: Trace, recon: Trace) -> float:
    """Energy-normalized mean squared error: sum(e^2) / sum(orig^2)."""
    if len(orig) != len(recon) or orig.rate_hz != recon.rate_hz:
        raise ValueError("traces must share length and rate")
    denom = float(np.sum(orig.samples**2))
    if denom == 0.0:
        raise ValueError("all-zero original: NMSE normalization undefined")
    err = orig.samples - recon.samples
    return float(np.sum(err**2) / denom)


def nmse_freq(orig: Trace, recon: Trace, band_hz: tuple[float, float]) -> float:
    """NMSE between DFT magnitude spectra restricted to a frequency band.

    Full-length rectangular-window DFT; bins with low <= f <= high enter the
    same energy normalization as `nmse_time`.
    """
    if len(orig) != len(recon) or orig.rate_hz != recon.rate_hz:
        raise ValueError("traces must share length and rate")
    low, high = band_hz
    nyquist = orig.rate_hz / 2
    if not (0 <= low < high <= nyquist):
        raise ValueError(f"band {band_hz} is empty or exceeds Nyquist ({nyquist} Hz)")
    freqs = np.fft.rfftfreq(len(orig), d=1.0 / orig.rate_hz)
    sel = (freqs >= low) & (freqs <= high)
    if not np.any(sel):
        raise ValueError(f"band {band_hz} contains no DFT bins")
    mag_o = np.abs(np.fft.rfft(orig.samples))[sel]
    mag_r = np.abs(np.fft.rfft(recon.samples))[sel]
    denom = float(np.sum(mag_o**2))
    if denom == 0.0:
        raise ValueError("original has no in-band energy")
    return float(np.sum((mag_o - mag_r) ** 2) / denom)


def savings(p: SampleStream, r: SampleStream) -> tuple[float, float]:
    """(savings_pct, active_time_pct) of the P-ADC relative to the R-ADC.

    One sync period of ADC active time is attributed per sample, so
    active_time_pct is the complement of savings_pct; the two sum to 100
    exactly.
    """
    if len(r) == 0:
        raise ValueError("reference stream is empty")
    sav = 100.0 * (1.0 - len(p) / len(r))
    return sav, 100.0 - sav


@dataclass(frozen=True)
class EventEval:
    """Per-event metrics; `error` is set (and metrics None) on failure."""

    index: int
    nmse_time: float | None = None
    nmse_freq: float | None = None
    n_samples_p: int | None = None
    n_samples_r: int | None = None
    savings_pct: float | None = None
    active_time_pct: float | None = None
    event_window_savings_pct: float | None = None
    detection_latency_s: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    """Aggregate survey metrics (means over events; medians alongside)."""

    nmse_time: float
    nmse_freq: float
    n_samples_p: int
    n_samples_r: int
    savings_pct: float
    active_time_pct: float
    nmse_time_median: float
    nmse_freq_median: float
    n_events: int
    n_failed: int
    per_event: tuple[EventEval, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        agg = {
            "nmse_time": self.nmse_time,
            "nmse_freq": self.nmse_freq,
            "n_samples_p": self.n_samples_p,
            "n_samples_r": self.n_samples_r,
            "savings_pct": self.savings_pct,
            "active_time_pct": self.active_time_pct,
            "nmse_time_median": self.nmse_time_median,
            "nmse_freq_median": self.nmse_freq_median,
            "n_events": self.n_events,
            "n_failed": self.n_failed,
        }
        return {"aggregate": agg, "per_event": [asdict(e) for e in self.per_event]}

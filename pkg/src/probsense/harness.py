"""Survey experiment runner: P-ADC vs R-ADC pipelines, sweeps, and reports.

Events are processed independently with derived seeds (base_seed +
event_index), so a survey is reproducible event by event and report files are
byte-identical across runs of the same configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .acquisition import (
    EvalReport,
    EventEval,
    nmse_freq,
    nmse_time,
    quantize_stream,
    reconstruct,
    sample_gated,
    sample_regular,
    savings,
)
from .activation import ActivationConfig, detection_latency, run_activation
from .pbit import (
    P_CLAMP,
    activation_probability,
    lfsr_from_seed,
    lfsr_word_uniforms,
    telegraph_tick_states,
)
from .traces import SurveyDataset, Trace, load_trace, synth_event, upsample, write_trace

# Decouples the p-neuron seed stream from the synthesis noise seed stream.
NEURON_SEED_OFFSET = 499979

DEFAULT_BASE_SEED = 12345

# Survey-tuned override hold: 10 ms on the default 100 kHz grid, long enough
# to ride out the decaying tail of an event after its last threshold crossing.
DEFAULT_SURVEY_HOLD_STEPS = 1000


@dataclass(frozen=True)
class SynthSurveySpec:
    """Parameters of the default synthetic active-source survey."""

    duration_s: float = 1.0
    rate_hz: float = 2000.0
    wavelet_f0_hz: float = 50.0
    amplitude: float = 1.0
    snr_db: float = 26.0
    onset_min_s: float = 0.3
    onset_max_s: float = 0.7

    def noise_rms_for(self, signal_energy: float, n: int) -> float:
        """Noise RMS giving the configured energy SNR over an n-sample trace."""
        return float(np.sqrt(signal_energy / (10.0 ** (self.snr_db / 10.0) * n)))


def _default_survey_activation() -> ActivationConfig:
    return ActivationConfig(hold_steps=DEFAULT_SURVEY_HOLD_STEPS)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Path | None = None  # directory of event CSVs; None -> synthetic survey
    dataset_rate_hz: float | None = None  # sidecar rate for value-only CSVs
    synth: SynthSurveySpec = field(default_factory=SynthSurveySpec)
    n_events: int = 50
    activation: ActivationConfig = field(default_factory=_default_survey_activation)
    upsample_factor: int = 50
    band_hz: tuple[float, float] = (0.0, 200.0)
    base_seed: int = DEFAULT_BASE_SEED
    output_dir: Path | None = None
    quantizer_bits: int | None = None  # None: ideal (unquantized) ADC

    def __post_init__(self):
        if self.n_events < 1:
            raise ValueError(f"n_events must be >= 1, got {self.n_events}")
        if self.upsample_factor < 1:
            raise ValueError(f"upsample_factor must be >= 1, got {self.upsample_factor}")


def _survey_onsets(spec: SynthSurveySpec, n_events: int, base_seed: int) -> np.ndarray:
    rng = np.random.default_rng((base_seed, 1))
    return spec.onset_min_s + (spec.onset_max_s - spec.onset_min_s) * rng.random(n_events)


def _synth_one(spec: SynthSurveySpec, onset_s: float, seed: int) -> Trace:
    """One survey event at the configured energy SNR."""
    clean = synth_event(
        spec.duration_s, spec.rate_hz, spec.wavelet_f0_hz, onset_s,
        spec.amplitude, 0.0, seed=0,
    )
    sigma = spec.noise_rms_for(float(np.sum(clean.samples**2)), len(clean))
    return synth_event(
        spec.duration_s, spec.rate_hz, spec.wavelet_f0_hz, onset_s,
        spec.amplitude, sigma, seed=seed,
    )


def synth_survey(
    spec: SynthSurveySpec, n_events: int, base_seed: int
) -> tuple[SurveyDataset, tuple[float, ...]]:
    """Generate the synthetic survey; returns the dataset and per-event onsets."""
    onsets = _survey_onsets(spec, n_events, base_seed)
    events = tuple(
        _synth_one(spec, float(onset), base_seed + i) for i, onset in enumerate(onsets)
    )
    snapped = tuple(round(float(o) * spec.rate_hz) / spec.rate_hz for o in onsets)
    return SurveyDataset(events, label="synthetic"), snapped


def load_survey(directory: Path | str) -> SurveyDataset:
    """Load a survey from a directory of CSV event files (sorted by name)."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.csv"))
    if not paths:
        raise FileNotFoundError(f"no event CSV files in {directory}")
    return SurveyDataset(tuple(load_trace(p) for p in paths), label=directory.name)


def write_survey(ds: SurveyDataset, directory: Path | str) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, ev in enumerate(ds.events):
        p = directory / f"event_{i:03d}.csv"
        write_trace(ev, p)
        paths.append(p)
    return paths


def run_event(
    trace: Trace,
    cfg: ExperimentConfig,
    index: int,
    onset_s: float | None = None,
    wavelet_f0_hz: float | None = None,
):
    """Run one event through upsample -> activation -> P-ADC -> reconstruction.

    Returns (EventEval, p_stream, r_stream, recon).
    """
    x_high = upsample(trace, cfg.upsample_factor)
    act_cfg = replace(
        cfg.activation,
        pneuron=replace(cfg.activation.pneuron, seed=cfg.base_seed + NEURON_SEED_OFFSET + index),
    )
    act = run_activation(x_high, act_cfg)
    p_stream = sample_gated(x_high, act)
    r_stream = sample_regular(x_high, act)
    if cfg.quantizer_bits is not None:
        fs = float(np.max(np.abs(trace.samples))) or 1.0
        p_stream = quantize_stream(p_stream, cfg.quantizer_bits, fs)
        r_stream = quantize_stream(r_stream, cfg.quantizer_bits, fs)
    recon = reconstruct(p_stream, trace.rate_hz, len(trace), trace.t0_s)
    sav, active = savings(p_stream, r_stream)

    window_sav = None
    latency = None
    if onset_s is not None and wavelet_f0_hz is not None:
        half_width = 2.0 / wavelet_f0_hz
        lo, hi = onset_s - half_width, onset_s + half_width
        in_win_p = np.sum((p_stream.times_s >= lo) & (p_stream.times_s <= hi))
        in_win_r = np.sum((r_stream.times_s >= lo) & (r_stream.times_s <= hi))
        if in_win_r > 0:
            window_sav = float(100.0 * (1.0 - in_win_p / in_win_r))
        # latency measured from where the wavelet emerges (half-period early)
        t_emerge = onset_s - 0.5 / wavelet_f0_hz
        onset_step = max(0, int(round((t_emerge - trace.t0_s) * x_high.rate_hz)))
        try:
            latency = detection_latency(act, onset_step)
        except ValueError:
            latency = None

    ev = EventEval(
        index=index,
        nmse_time=nmse_time(trace, recon),
        nmse_freq=nmse_freq(trace, recon, cfg.band_hz),
        n_samples_p=len(p_stream),
        n_samples_r=len(r_stream),
        savings_pct=sav,
        active_time_pct=active,
        event_window_savings_pct=window_sav,
        detection_latency_s=latency,
    )
    return ev, p_stream, r_stream, recon


def run_survey(cfg: ExperimentConfig) -> EvalReport:
    """Evaluate the first n_events of the survey; per-event failures
    (including load/synthesis errors) are recorded without aborting the
    remaining events."""
    if cfg.dataset is not None:
        paths = sorted(Path(cfg.dataset).glob("*.csv"))
        if not paths:
            raise FileNotFoundError(f"no event CSV files in {cfg.dataset}")
        n = min(cfg.n_events, len(paths))
        onsets: tuple[float | None, ...] = (None,) * n
        f0 = None

        def get_event(i: int) -> Trace:
            return load_trace(paths[i], rate_hz=cfg.dataset_rate_hz)
    else:
        n = cfg.n_events
        raw = _survey_onsets(cfg.synth, n, cfg.base_seed)
        onsets = tuple(round(float(o) * cfg.synth.rate_hz) / cfg.synth.rate_hz for o in raw)
        f0 = cfg.synth.wavelet_f0_hz

        def get_event(i: int) -> Trace:
            return _synth_one(cfg.synth, float(raw[i]), cfg.base_seed + i)

    out_dir = Path(cfg.output_dir) if cfg.output_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    results: list[EventEval] = []
    ref_rate: float | None = None
    for i in range(n):
        try:
            trace = get_event(i)
            if ref_rate is None:
                ref_rate = trace.rate_hz
            elif abs(trace.rate_hz - ref_rate) > 1e-6 * ref_rate:
                raise ValueError(
                    f"event rate {trace.rate_hz:.6g} Hz disagrees with survey rate "
                    f"{ref_rate:.6g} Hz"
                )
            ev, p_stream, r_stream, recon = run_event(trace, cfg, i, onsets[i], f0)
            results.append(ev)
            if out_dir is not None:
                _write_stream_csv(out_dir / f"samples_event_{i:03d}.csv", p_stream)
                write_trace(recon, out_dir / f"recon_event_{i:03d}.csv")
                _write_rate_csv(out_dir / f"rate_event_{i:03d}.csv", p_stream, len(r_stream))
        except Exception as exc:  # noqa: BLE001 - contained per event by contract
            results.append(EventEval(index=i, error=f"{type(exc).__name__}: {exc}"))

    ok = [e for e in results if e.error is None]
    if not ok:
        raise RuntimeError("every event failed: " + "; ".join(e.error or "" for e in results))
    tot_p = sum(e.n_samples_p for e in ok)
    tot_r = sum(e.n_samples_r for e in ok)
    sav = 100.0 * (1.0 - tot_p / tot_r)
    report = EvalReport(
        nmse_time=float(np.mean([e.nmse_time for e in ok])),
        nmse_freq=float(np.mean([e.nmse_freq for e in ok])),
        n_samples_p=int(tot_p),
        n_samples_r=int(tot_r),
        savings_pct=sav,
        active_time_pct=100.0 - sav,
        nmse_time_median=float(np.median([e.nmse_time for e in ok])),
        nmse_freq_median=float(np.median([e.nmse_freq for e in ok])),
        n_events=n,
        n_failed=len(results) - len(ok),
        per_event=tuple(results),
    )
    if out_dir is not None:
        write_report(report, cfg, out_dir / "report.json")
    return report


def _config_echo(cfg: ExperimentConfig) -> dict:
    pn = cfg.activation.pneuron
    fe = cfg.activation.afe
    return {
        "dataset": str(cfg.dataset) if cfg.dataset is not None else None,
        "n_events": cfg.n_events,
        "base_seed": cfg.base_seed,
        "upsample_factor": cfg.upsample_factor,
        "band_hz": list(cfg.band_hz),
        "sync_rate_hz": cfg.activation.sync_rate_hz,
        "hold_steps": cfg.activation.hold_steps,
        "quantizer_bits": cfg.quantizer_bits,
        "pneuron": {
            "beta": pn.beta, "v_ref_v": pn.v_ref_v, "source": pn.source, "tau_s": pn.tau_s,
        },
        "afe": {
            "smoothing_steps": fe.smoothing_steps, "delay_steps": fe.delay_steps,
            "slope_gain": fe.slope_gain, "amp_threshold_v": fe.amp_threshold_v,
        },
        "synth": None if cfg.dataset is not None else {
            "duration_s": cfg.synth.duration_s, "rate_hz": cfg.synth.rate_hz,
            "wavelet_f0_hz": cfg.synth.wavelet_f0_hz, "amplitude": cfg.synth.amplitude,
            "snr_db": cfg.synth.snr_db, "onset_min_s": cfg.synth.onset_min_s,
            "onset_max_s": cfg.synth.onset_max_s,
        },
    }


def write_report(report: EvalReport, cfg: ExperimentConfig, path: Path | str) -> None:
    doc = {"config": _config_echo(cfg)} | report.to_dict()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_stream_csv(path: Path, stream) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("time_s,value\n")
        for t, v in zip(stream.times_s.tolist(), stream.values.tolist()):
            fh.write(f"{t!r},{v!r}\n")


RATE_TRACE_WINDOW_TICKS = 100


def _write_rate_csv(path: Path, p_stream, n_ticks: int) -> None:
    """Windowed average sampling rate of the gated stream, plot-ready."""
    w = RATE_TRACE_WINDOW_TICKS
    n_win = n_ticks // w
    counts, _ = np.histogram(p_stream.grid_indices, bins=np.arange(0, n_win * w + 1, w))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("window_start_s,avg_rate\n")
        for k, c in enumerate(counts.tolist()):
            t = p_stream.t0_s + k * w / p_stream.rate_hz
            fh.write(f"{t!r},{c / w!r}\n")


# --------------------------------------------------------------------------
# Characterization sweeps
# --------------------------------------------------------------------------

def sweep_vin(
    cfg: ExperimentConfig, v_grid, ticks_per_point: int = 10_000
) -> np.ndarray:
    """Measured sampling rate vs constant p-neuron input voltage.

    The drive is pinned to each grid value (zero signal, AFE bypassed) and
    the gated fraction over ticks_per_point sync ticks is recorded. Returns
    rows of (v_in, measured_rate, model_probability).
    """
    if ticks_per_point < 1000:
        raise ValueError(f"ticks_per_point must be >= 1000, got {ticks_per_point}")
    v_grid = np.asarray(v_grid, dtype=np.float64)
    if v_grid.size == 0 or not np.all(np.isfinite(v_grid)):
        raise ValueError("v_grid must be non-empty and finite")
    pn = cfg.activation.pneuron
    rows = np.empty((v_grid.size, 3))
    for i, v in enumerate(v_grid):
        p_model = activation_probability(float(v), pn)
        seed = cfg.base_seed + i
        if pn.source == "digital_iid":
            u, _ = lfsr_word_uniforms(lfsr_from_seed(seed), ticks_per_point)
            measured = float(np.mean(u < p_model))
        else:
            spt = cfg.upsample_factor
            dt = 1.0 / (cfg.activation.sync_rate_hz * spt)
            p_run = min(max(p_model, P_CLAMP), 1.0 - P_CLAMP)
            states = telegraph_tick_states(
                p_run, dt, pn, spt, ticks_per_point, np.random.default_rng(seed)
            )
            measured = float(states.mean())
        rows[i] = (v, measured, p_model)
    return rows


def _triangle_wave(n: int, rate_hz: float, slope: float, peak: float) -> np.ndarray:
    """Bounded waveform whose slope magnitude is `slope` everywhere."""
    if slope == 0.0:
        return np.zeros(n)
    t = np.arange(n) / rate_hz
    period = 4.0 * peak / slope
    u = (t / period + 0.75) % 1.0
    return peak * (4.0 * np.abs(u - 0.5) - 1.0)


def sweep_slope(
    cfg: ExperimentConfig, slope_grid, ticks_per_point: int = 10_000
) -> np.ndarray:
    """Measured sampling rate vs signal slope through the full AFE chain.

    Each grid point feeds a triangle wave (constant slope magnitude) through
    feature extraction and the p-neuron; the amplitude override is disabled
    so the probabilistic path is isolated. Returns rows of
    (slope_v_per_s, measured_rate, model_probability).
    """
    if ticks_per_point < 1000:
        raise ValueError(f"ticks_per_point must be >= 1000, got {ticks_per_point}")
    slope_grid = np.asarray(slope_grid, dtype=np.float64)
    if slope_grid.size == 0 or np.any(slope_grid < 0) or not np.all(np.isfinite(slope_grid)):
        raise ValueError("slope_grid must be non-empty, finite and non-negative")
    rate_high = cfg.activation.sync_rate_hz * cfg.upsample_factor
    n = ticks_per_point * cfg.upsample_factor
    afe_cfg = replace(cfg.activation.afe, amp_threshold_v=1e9)
    rows = np.empty((slope_grid.size, 3))
    for i, s in enumerate(slope_grid):
        x = Trace(_triangle_wave(n, rate_high, float(s), peak=0.25), rate_high)
        act_cfg = replace(
            cfg.activation,
            afe=afe_cfg,
            pneuron=replace(cfg.activation.pneuron, seed=cfg.base_seed + i),
        )
        act = run_activation(x, act_cfg)
        measured = float(np.mean(act.gate[act.sync_ticks]))
        model = activation_probability(afe_cfg.slope_gain * float(s), cfg.activation.pneuron)
        rows[i] = (s, measured, model)
    return rows


def write_sweep_csv(rows: np.ndarray, path: Path | str, x_name: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{x_name},measured_rate,model_probability\n")
        for x, m, p in rows.tolist():
            fh.write(f"{x!r},{m!r},{p!r}\n")

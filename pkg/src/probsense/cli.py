"""Command-line experiment runner.

Subcommands: `run` (survey evaluation), `sweep-vin`, `sweep-slope`, and
`synth` (emit a synthetic dataset). A flat key = value config file can seed
any option; CLI flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .activation import ActivationConfig
from .afe import AfeConfig
from .harness import (
    DEFAULT_SURVEY_HOLD_STEPS,
    ExperimentConfig,
    SynthSurveySpec,
    run_survey,
    sweep_slope,
    sweep_vin,
    synth_survey,
    write_survey,
    write_sweep_csv,
)
from .pbit import PNeuronConfig

SOURCE_ALIASES = {"digital": "digital_iid", "smtj": "smtj_telegraph"}


def parse_config_file(path: Path | str) -> dict:
    """Parse a flat `key = value` config file (# comments, quoted strings)."""
    opts: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if val.startswith(("'", '"')) and val.endswith(val[0]) and len(val) >= 2:
            opts[key] = val[1:-1]
        elif val.lower() in ("true", "false"):
            opts[key] = val.lower() == "true"
        else:
            try:
                opts[key] = int(val)
            except ValueError:
                try:
                    opts[key] = float(val)
                except ValueError:
                    opts[key] = val
    return opts


def _parse_band(text: str) -> tuple[float, float]:
    try:
        lo, _, hi = text.partition(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must be 'low:high', got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--dataset", type=Path, help="directory of event CSVs (default: synthetic)")
    p.add_argument("--rate-hz", type=float, help="sample rate for value-only dataset CSVs")
    p.add_argument("--n-events", type=int, help="number of events to evaluate (default 50)")
    p.add_argument("--seed", type=int, help="base seed; event i uses seed + i")
    p.add_argument("--tau-us", type=float, help="sMTJ retention time in microseconds")
    p.add_argument("--vref", type=float, help="p-neuron reference voltage (sets the minimum rate)")
    p.add_argument("--beta", type=float, help="activation steepness (1/V)")
    p.add_argument("--source", choices=sorted(SOURCE_ALIASES), help="entropy source")
    p.add_argument("--sync-hz", type=float, help="sync clock frequency (default 2000)")
    p.add_argument("--upsample", type=int, help="high-rate grid factor (default 50)")
    p.add_argument("--band", type=_parse_band, help="frequency band for NMSE, 'low:high' Hz")
    p.add_argument("--slope-gain", type=float, help="volts of drive per (V/s) of slope")
    p.add_argument("--amp-threshold", type=float, help="deterministic override threshold (V)")
    p.add_argument("--hold-steps", type=int, help="override hold window in high-rate steps")
    p.add_argument("--snr-db", type=float, help="synthetic event energy SNR (default 26)")
    p.add_argument("--out", type=Path, help="output directory")


def _merge(args: argparse.Namespace) -> dict:
    """File options first, then any CLI flag that was actually given."""
    opts: dict[str, object] = {}
    if args.config is not None:
        opts.update(parse_config_file(args.config))
    for key, val in vars(args).items():
        if key in ("config", "command", "func") or val is None:
            continue
        opts[key] = val
    return opts


def build_experiment(opts: dict) -> ExperimentConfig:
    pneuron = PNeuronConfig(
        beta=float(opts.get("beta", PNeuronConfig.beta)),
        v_ref_v=float(opts.get("vref", PNeuronConfig.v_ref_v)),
        source=SOURCE_ALIASES.get(str(opts.get("source", "smtj")), str(opts.get("source", ""))),
        tau_s=float(opts["tau_us"]) * 1e-6 if "tau_us" in opts else PNeuronConfig.tau_s,
    )
    afe = AfeConfig(
        slope_gain=float(opts.get("slope_gain", AfeConfig.slope_gain)),
        amp_threshold_v=float(opts.get("amp_threshold", AfeConfig.amp_threshold_v)),
    )
    activation = ActivationConfig(
        sync_rate_hz=float(opts.get("sync_hz", 2000.0)),
        hold_steps=int(opts.get("hold_steps", DEFAULT_SURVEY_HOLD_STEPS)),
        pneuron=pneuron,
        afe=afe,
    )
    synth = SynthSurveySpec(snr_db=float(opts.get("snr_db", SynthSurveySpec.snr_db)))
    band = opts.get("band", (0.0, 200.0))
    if isinstance(band, str):
        band = _parse_band(band)
    return ExperimentConfig(
        dataset=Path(opts["dataset"]) if "dataset" in opts else None,
        dataset_rate_hz=float(opts["rate_hz"]) if "rate_hz" in opts else None,
        synth=synth,
        n_events=int(opts.get("n_events", 50)),
        activation=activation,
        upsample_factor=int(opts.get("upsample", 50)),
        band_hz=band,
        base_seed=int(opts.get("seed", ExperimentConfig.base_seed)),
        output_dir=Path(opts["out"]) if "out" in opts else None,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = build_experiment(_merge(args))
    try:
        report = run_survey(cfg)
    except (FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"events evaluated : {report.n_events} ({report.n_failed} failed)")
    print(f"nmse time        : {report.nmse_time * 100:.4f} % (median {report.nmse_time_median * 100:.4f} %)")
    print(f"nmse freq        : {report.nmse_freq * 100:.4f} % (median {report.nmse_freq_median * 100:.4f} %)")
    print(f"samples P-ADC    : {report.n_samples_p} of {report.n_samples_r} R-ADC")
    print(f"savings          : {report.savings_pct:.2f} % (active {report.active_time_pct:.2f} %)")
    if cfg.output_dir is not None:
        print(f"report           : {Path(cfg.output_dir) / 'report.json'}")
    for ev in report.per_event:
        if ev.error is not None:
            print(f"event {ev.index:03d} FAILED: {ev.error}", file=sys.stderr)
    return 1 if report.n_failed else 0


def _cmd_sweep_vin(args: argparse.Namespace) -> int:
    cfg = build_experiment(_merge(args))
    grid = np.linspace(args.vmin, args.vmax, args.points)
    rows = sweep_vin(cfg, grid, args.ticks)
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep_vin.csv"
    write_sweep_csv(rows, path, "v_in_v")
    print(f"wrote {path} ({len(rows)} points, max |measured - model| = "
          f"{np.max(np.abs(rows[:, 1] - rows[:, 2])):.4f})")
    return 0


def _cmd_sweep_slope(args: argparse.Namespace) -> int:
    cfg = build_experiment(_merge(args))
    grid = np.linspace(args.smin, args.smax, args.points)
    rows = sweep_slope(cfg, grid, args.ticks)
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep_slope.csv"
    write_sweep_csv(rows, path, "slope_v_per_s")
    print(f"wrote {path} ({len(rows)} points)")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    opts = _merge(args)
    cfg = build_experiment(opts)
    out = cfg.output_dir or Path("survey_data")
    ds, _ = synth_survey(cfg.synth, cfg.n_events, cfg.base_seed)
    paths = write_survey(ds, out)
    print(f"wrote {len(paths)} event files to {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="probsense",
        description="Probabilistic event-driven sampling simulator and evaluation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate a survey with the P-ADC vs the R-ADC")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_vin = sub.add_parser("sweep-vin", help="measured sampling rate vs p-neuron input voltage")
    _add_common(p_vin)
    p_vin.add_argument("--vmin", type=float, default=-0.1)
    p_vin.add_argument("--vmax", type=float, default=0.8)
    p_vin.add_argument("--points", type=int, default=19)
    p_vin.add_argument("--ticks", type=int, default=10_000)
    p_vin.set_defaults(func=_cmd_sweep_vin)

    p_slope = sub.add_parser("sweep-slope", help="measured sampling rate vs signal slope")
    _add_common(p_slope)
    p_slope.add_argument("--smin", type=float, default=0.0)
    p_slope.add_argument("--smax", type=float, default=500.0)
    p_slope.add_argument("--points", type=int, default=11)
    p_slope.add_argument("--ticks", type=int, default=10_000)
    p_slope.set_defaults(func=_cmd_sweep_slope)

    p_synth = sub.add_parser("synth", help="emit a synthetic survey as CSV event files")
    _add_common(p_synth)
    p_synth.set_defaults(func=_cmd_synth)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

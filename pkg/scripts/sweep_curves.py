#!/usr/bin/env python3
"""Characterization sweeps: sampling rate vs V_IN and vs signal slope.

Produces plot-ready CSVs in results/sweeps/ for both entropy sources.
"""

from pathlib import Path

import numpy as np

from probsense.activation import ActivationConfig
from probsense.harness import ExperimentConfig, sweep_slope, sweep_vin, write_sweep_csv
from probsense.pbit import PNeuronConfig

out = Path("results/sweeps")
out.mkdir(parents=True, exist_ok=True)

v_grid = np.linspace(-0.1, 0.8, 19)
for source in ("digital_iid", "smtj_telegraph"):
    cfg = ExperimentConfig(activation=ActivationConfig(pneuron=PNeuronConfig(source=source)))
    rows = sweep_vin(cfg, v_grid, ticks_per_point=10_000)
    path = out / f"sweep_vin_{source}.csv"
    write_sweep_csv(rows, path, "v_in_v")
    err = np.max(np.abs(rows[:, 1] - rows[:, 2]))
    print(f"{path}  max |measured - model| = {err:.4f}")

cfg = ExperimentConfig()
slope_rows = sweep_slope(cfg, np.linspace(0.0, 500.0, 11), ticks_per_point=10_000)
path = out / "sweep_slope.csv"
write_sweep_csv(slope_rows, path, "slope_v_per_s")
print(f"{path}  rate at 0 V/s = {slope_rows[0, 1]:.3f}, at 500 V/s = {slope_rows[-1, 1]:.3f}")

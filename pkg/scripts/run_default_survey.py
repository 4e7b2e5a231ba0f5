#!/usr/bin/env python3
"""Run the default 50-event synthetic survey and print per-event metrics.

Writes report.json plus per-event sample/reconstruction CSVs to
results/survey/. Equivalent CLI: `probsense run --out results/survey`.
"""

import time
from pathlib import Path

from probsense.harness import ExperimentConfig, run_survey

out = Path("results/survey")
t0 = time.monotonic()
report = run_survey(ExperimentConfig(output_dir=out))
elapsed = time.monotonic() - t0

print(f"{'event':>5} {'nmse_t %':>9} {'nmse_f %':>9} {'samples':>8} {'savings %':>9} {'win sav %':>9}")
for ev in report.per_event:
    if ev.error is not None:
        print(f"{ev.index:>5} FAILED: {ev.error}")
        continue
    print(
        f"{ev.index:>5} {ev.nmse_time * 100:>9.3f} {ev.nmse_freq * 100:>9.3f} "
        f"{ev.n_samples_p:>8} {ev.savings_pct:>9.2f} "
        f"{ev.event_window_savings_pct:>9.2f}"
    )
print("-" * 53)
print(
    f"aggregate: nmse_t {report.nmse_time * 100:.3f} % | nmse_f {report.nmse_freq * 100:.3f} % | "
    f"savings {report.savings_pct:.2f} % | {elapsed:.2f} s"
)
print(f"outputs in {out}/")

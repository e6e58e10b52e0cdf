"""Perturb the 20% most active training series at 20 dB and compare how much
the final training loss rises under active-to-dormant and random order.

Usage: python3 demos/noise_robustness.py [n_seeds]
"""

import sys
from pathlib import Path

import numpy as np

from spikecl.config import load_config
from spikecl.harness import noise_robustness

ROOT = Path(__file__).resolve().parent.parent

config = load_config(ROOT / "configs" / "noisy_cbf.cfg", ["data.noise_fraction=0.2", "data.noise_snr_db=20"])
n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 10
out = noise_robustness(config, seeds=range(n_seeds))
for seed in range(n_seeds):
    print(f"seed {seed}: loss increase A2D {out['A2D'][seed]:+.4f}  Random {out['Random'][seed]:+.4f}")
wins = int(np.sum(out["A2D"] <= out["Random"]))
print(f"A2D rises no more than Random on {wins}/{n_seeds} seeds")

"""Train the regional-encoded RSNN on the cylinder/bell/funnel stand-in.

Usage: python3 demos/cbf_classification.py [output_dir]
"""

import sys
from pathlib import Path

from spikecl.config import load_config
from spikecl.harness import run_experiment

ROOT = Path(__file__).resolve().parent.parent

config = load_config(ROOT / "configs" / "cbf.cfg")
out = Path(sys.argv[1]) if len(sys.argv) > 1 else config.output_dir
report = run_experiment(config, output_dir=out)
run = report.runs[0]
print(f"test AUC {report.auc:.3f}  CI [{run.auc_ci[0]:.3f}, {run.auc_ci[1]:.3f}]")
print(f"stopped after {run.end_epoch} epochs in {run.seconds:.0f} s")
print(f"AFP {run.afp:.4f}  sparsity {run.sparsity:.3f}")
print("loss per epoch:", " ".join(f"{v:.3f}" for v in run.loss_curve))
print(f"artifacts in {out}")

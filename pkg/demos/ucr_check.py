"""Opt-in check on real UCR files (not shipped): trains on *_TRAIN.tsv,
scores *_TEST.tsv and reports AUC against the 0.95 desk-scale bar.

Usage: python3 demos/ucr_check.py /path/to/UCRArchive Coffee GunPoint
"""

import sys
from pathlib import Path

from spikecl.config import load_config
from spikecl.harness import run_experiment

ROOT = Path(__file__).resolve().parent.parent

if len(sys.argv) < 3:
    sys.exit(__doc__)
archive = Path(sys.argv[1])
failed = False
for name in sys.argv[2:]:
    train, test = archive / name / f"{name}_TRAIN.tsv", archive / name / f"{name}_TEST.tsv"
    config = load_config(
        ROOT / "configs" / "cbf.cfg",
        ["data.source=ucr", f"data.path={train}", f"data.test_path={test}", f"experiment.output_dir=results/{name}"],
    )
    report = run_experiment(config, output_dir=config.output_dir)
    ok = report.auc >= 0.95
    failed |= not ok
    print(f"{name}: test AUC {report.auc:.3f} ({'PASS' if ok else 'FAIL'})")
sys.exit(1 if failed else 0)

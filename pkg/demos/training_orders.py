"""Compare active-to-dormant, random and dormant-to-active orders on the
noisy CbfLike benchmark (label noise), with the dense recurrent baseline alongside.

Usage: python3 demos/training_orders.py [n_seeds]
"""

import sys
from pathlib import Path

from spikecl.config import load_config
from spikecl.harness import compare_orders

ROOT = Path(__file__).resolve().parent.parent

config = load_config(ROOT / "configs" / "noisy_cbf.cfg")
n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 7
cmp = compare_orders(config, ["A2D", "Random", "D2A"], seeds=range(n_seeds), baseline_modes=["E2H", "H2E"])

for mode, rep in cmp.reports.items():
    print(f"RSNN  {mode:<7} AUC {rep.auc:.3f} +- {rep.auc_std:.3f}  AFP {rep.firing.afp:.4f}  sparsity {rep.firing.sparsity_ratio:.3f}")
for mode, rep in cmp.baseline.items():
    print(f"dense {mode:<7} AUC {rep.auc:.3f} +- {rep.auc_std:.3f}")
print(f"sign test A2D > Random: p = {cmp.sign_test('A2D', 'Random'):.3f}")
print(f"sign test A2D > D2A:    p = {cmp.sign_test('A2D', 'D2A'):.3f}")

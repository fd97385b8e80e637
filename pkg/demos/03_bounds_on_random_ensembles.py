"""
Bounds on random ensembles
==========================

Draw many small random ensembles and see how the disagreement-based bound
compares with the C-bound on the competent ones.
"""
# %%
import numpy as np

from eirlab import PredictionMatrix, verify_bounds
from eirlab.bounds import bound_comparison

rng = np.random.default_rng(0)


def random_ensemble(M=7, m=200, K=3):
    labels = rng.integers(0, K, m)
    acc = rng.uniform(0.5, 0.95, M)
    right = rng.random((M, m)) < acc[:, None]
    preds = np.where(right, labels, (labels + rng.integers(1, K, (M, m))) % K)
    return PredictionMatrix(preds, labels, K)


ensembles = [random_ensemble() for _ in range(200)]
records = [verify_bounds(pm) for pm in ensembles]
competent = [pm for pm, rec in zip(ensembles, records) if rec.verdict.competent]
print(f"{len(competent)} of {len(ensembles)} ensembles are competent")
print("any applicable bound violated:", any(not rec.passed for rec in records))

# %%
rows = bound_comparison(competent)
wins = {k: sum(r.tighter == k for r in rows) for k in ("ours", "c_bound", "tie")}
print("tighter bound counts:", wins)

# %%
rec = records[0]
print(f"mv_error={rec.report.mv_error:.3f}")
for c in rec.checks:
    print(f"  {c.name:16s} {c.bound!s:>22} {c.status}")

"""
Three voters on four examples
=============================

A hand-sized ensemble where every member makes one mistake but the
majority vote makes none.
"""
# %%
import numpy as np

from eirlab import PredictionMatrix, diagnostics, error_profile, competence_check

preds = np.array([
    [0, 0, 1, 0],
    [0, 1, 1, 1],
    [1, 0, 1, 1],
])
labels = np.array([0, 0, 1, 1])
pm = PredictionMatrix(preds, labels, num_classes=2)

# %%
# Each member is wrong on exactly one example, and never on the same one.
print("member errors:", pm.classifier_errors())
print("error mass per example:", error_profile(pm).w)

# %%
r = diagnostics(pm)
print(f"average member error {r.avg_error:.3f}")
print(f"majority-vote error  {r.mv_error:.3f}")
print(f"disagreement         {r.disagreement:.3f}")
print(f"EIR {r.eir:.3f}   DER {r.der:.3f}")

# %%
# No example has half or more of the weight on a wrong label, so the
# ensemble is competent and the vote cannot be worse than the average member.
v = competence_check(error_profile(pm))
for t, lhs, rhs in v.rows():
    print(f"t={t:.3f}  P(W in [t,1/2))={lhs:.2f}  P(W in [1/2,1-t])={rhs:.2f}")
print("competent:", v.competent)

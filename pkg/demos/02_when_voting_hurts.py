"""
When the vote is twice as bad
=============================

A perfect classifier paired with a slightly heavier faulty one. The faulty
member wins every vote.
"""
# %%
from eirlab import PathologySpec, make_pathology, diagnostics
from eirlab.pathology import pathology_audit

for eps in (0.2, 0.05, 0.01, 1e-4):
    r = diagnostics(make_pathology(PathologySpec("example1", eps, m=10)))
    print(f"eps={eps:<7} avg={r.avg_error:.4f} mv={r.mv_error:.1f} ratio={r.mv_error / r.avg_error:.4f}")

# %%
# Even a positive average margin does not save the vote when the errors
# concentrate on a few examples.
spec = PathologySpec("example2", epsilon=0.05, m=10, delta=0.1)
audit = pathology_audit(spec)
for key in ("avg_error", "mv_error", "margin_mean"):
    print(f"{key:12s} expected {audit['expected'][key]:.4f} measured {audit['measured'][key]:.4f}")
print("competent:", audit["competent"], " worst violation:", audit["max_violation"], "at t =", audit["violation_t"])

"""
Capacity sweeps with bagged ensembles
=====================================

Random-feature logistic regressions and CART trees, each bagged, trained
over a capacity grid on noisy Gaussian blobs. Writes two SVG charts.
"""
# %%
from pathlib import Path

from eirlab.lab import Cart, RandomFeatures, capacity_sweep, make_blobs
from eirlab.svg import line_chart

ds = make_blobs(n=400, d=10, K=2, label_noise=0.1, seed=0)
out = Path("demo_output")
out.mkdir(exist_ok=True)


def show(res, name):
    for r in res.rows:
        mark = "*" if r.interpolating else " "
        print(f"{mark} {r.capacity:5d}  avg={r.avg_error:.3f}  mv={r.mv_error:.3f}  eir={r.eir:.3f}  der={r.der:.3f}")
    print("interpolation threshold:", res.interpolation_threshold)
    svg = line_chart(
        [r.capacity for r in res.rows],
        {"EIR": [r.eir for r in res.rows], "DER": [r.der for r in res.rows]},
        title=name, xlabel="capacity", log_x=True,
        vline=res.interpolation_threshold, vline_label="interpolation threshold",
    )
    (out / f"{name}.svg").write_text(svg)


# %%
# Random features: capacity is the number of features per member.
show(capacity_sweep(ds, RandomFeatures(), [10, 25, 50, 100, 200, 400, 800, 1600], M=15, seed=0), "random_features")

# %%
# Trees stop growing once every leaf is pure, so past the threshold the
# forest no longer changes.
show(capacity_sweep(ds, Cart(), [2, 4, 8, 16, 32, 64, 128, 256], M=20, seed=0), "forest")

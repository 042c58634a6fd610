"""Estimate the scaling function of a walk handed over as a plain series.

A multifractal random walk with H = 0.65 is written to a one-column CSV
(as observed data would arrive), read back, and zeta_H(q) is estimated.
"""
import os
import tempfile

import numpy as np

from mfratio import MixedGrid, ScalingModel, ingest_series, sample_mrw, zeta_curve, zeta_h

model = ScalingModel.lognormal(0.05)
H = 0.65
path = sample_mrw(model, H, MixedGrid(14, 0, 1, 1), oversample=2, rng=5)

levels = np.concatenate([[0.0], np.cumsum(path.values[0])])
tmp = os.path.join(tempfile.mkdtemp(), "walk.csv")
with open(tmp, "w") as fh:
    fh.write("x\n")
    fh.writelines(f"{v:.17g}\n" for v in levels)

obs = ingest_series(tmp, format="levels")
print("ingested", obs.values.shape, obs.kind)

q = np.array([0.5, 1.0, 1.5, 2.0])
rep = zeta_curve(obs, q, level_range=(6, 14), method="ratio", n_boot=100)
for qq, est, se in zip(q, rep.zeta, rep.std_error):
    print(f"q={qq:3g}  estimate {est:.4f} +/- {se:.4f}   zeta_H {float(zeta_h(model, H, qq)):.4f}")

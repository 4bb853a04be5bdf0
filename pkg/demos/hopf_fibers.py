"""
Hopf fibers are linked great circles
====================================

Trace two fibers of the Hopf map, check they are planar circles, then compute
their linking number two ways.
"""

import numpy as np
from scipy.spatial.transform import Rotation

from hopfroots import HOPF, TraceConfig, Y0, build_class_map, find_root_components, hopf_report, linking_number
from hopfroots.roots import planarity_residual

cfg = TraceConfig()
y1, y2 = Rotation.random(2, random_state=4).apply(Y0)

a = find_root_components(HOPF, y1, cfg)[0]
b = find_root_components(HOPF, y2, cfg)[0]
print(f"fiber lengths {a.length:.6f}, {b.length:.6f} (2 pi = {2 * np.pi:.6f})")
print(f"planarity residuals {planarity_residual(a):.1e}, {planarity_residual(b):.1e}")

for method in ("gauss", "crossing"):
    lk = linking_number(a, b, method)
    print(f"{method:9s} linking number {lk.value:+d}  raw {lk.raw:+.6f}")

# the Hopf invariant of h o a_n recovers n
for n in (-2, 1, 3):
    rep = hopf_report(build_class_map("S2", "S3", n), cfg=cfg)
    print(f"H(h o a_{n:+d}) = {rep.value:+d}  methods agree: {rep.methods_agree}")

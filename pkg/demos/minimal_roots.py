"""
Minimal root sets of the class representatives
==============================================

Each nonzero class n of maps S^3 -> S^2 has a representative whose root set
over y0 is a single great circle; the null class has no roots at all.
"""

from hopfroots import TraceConfig, minimal_root_demo

cfg = TraceConfig()

for domain, target, n in [("S3", "S2", 1), ("S3", "S2", 3), ("RP3", "S2", 2), ("S3", "S2", 0), ("RP3", "RP2", 0)]:
    check = minimal_root_demo(domain, target, n, cfg)
    rep = check.report
    print(f"{domain}->{target} n={n:+d}: components={rep.component_count} passed={check.passed}")
    for c in rep.components:
        print(f"    length={c.length:.5f} planarity={c.planarity:.1e} analytic={c.analytic} match={c.match:.1e}")

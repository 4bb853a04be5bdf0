"""
Root sets into RP^2 and CSV export
==================================

Over RP^2 a point [y] has two lifts ±y, so the root set splits into two
families. The traced curves are then written as stereographic CSV.
"""

import sys
import tempfile
from pathlib import Path

from hopfroots import TraceConfig, Y0, build_class_map, export_curves, rp2_root_decompose

cfg = TraceConfig()
f = build_class_map("RP2", "S3", 1)
plus, minus = rp2_root_decompose(f, Y0, cfg)
print("over +y0:", [round(c.length, 5) for c in plus.curves])
print("over -y0:", [round(c.length, 5) for c in minus.curves])

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "rp2_n1.csv"
path = export_curves(plus.curves + minus.curves, out)
print("wrote", path)
print(path.read_text().splitlines()[0])
print(path.with_suffix(".meta.json").read_text() if path.with_suffix(".meta.json").exists() else "")

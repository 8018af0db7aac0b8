"""Coarse large-gamma phase diagram of the tension cross-section.

Writes tension_ren.svg and tension_ren.csv into the current directory.

    python3 demos/phase_diagram.py [resolution]
"""
import collections
import sys

from ternok import phasediag

res = int(sys.argv[1]) if len(sys.argv) > 1 else 12
grid = phasediag.sweep("tension", "ren", res)

with open("tension_ren.csv", "w", encoding="utf-8") as fh:
    fh.write(phasediag.emit_csv(grid))
with open("tension_ren.svg", "w", encoding="utf-8") as fh:
    fh.write(phasediag.emit_svg(grid, "tension", title=f"tension section, ren, r={res}"))

counts = collections.Counter(c.winner_pattern for c in grid)
for pat, k in counts.most_common():
    print(f"{pat:14s} {k:4d} cells")
print("centre:", phasediag.nearest_cell(grid, (1 / 3, 1 / 3, 1 / 3)).winner_pattern)

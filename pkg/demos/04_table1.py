"""
Optimised FSA-RD against optimised slotted ALOHA
================================================

Reproduces the comparison table.  FSA-RD cells come from the exhaustive
(M, gamma) search of the closed form and take seconds.  ALOHA cells
simulate every transmission probability on the grid; the default here
is a coarse grid with shorter runs so the script finishes in well under a
minute.  Pass ``--full`` for 10^6-slot runs on the 0.005 grid.
"""

import sys

from fsard_aoi import SimConfig, reproduce_table1
from fsard_aoi.sweep import grid_values

if "--full" in sys.argv:
    sim, taus = SimConfig(1_000_000), grid_values(0.005, 1.0, 0.005)
else:
    sim, taus = SimConfig(200_000), grid_values(0.01, 0.3, 0.01)

cells = reproduce_table1(sim, tau_grid=taus)

print(f"{'table':<6}{'scheme':<15}{'N':>4}{'rho':>7}{'value':>10}{'ref':>9}{'dev':>8}  best")
for c in cells:
    params = ", ".join(str(p) for p in c.best_params)
    print(f"{c.table:<6}{c.scheme:<15}{c.num_users:>4}{c.arrival_prob:>7}"
          f"{c.value:10.2f}{c.reference:9.2f}{c.rel_dev:+8.3%}  ({params})")

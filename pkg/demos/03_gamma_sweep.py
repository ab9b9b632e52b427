"""
AAoI against the reservation probability
========================================

Data behind the AAoI-versus-gamma curves for N=30, V=4.  For each
arrival rate the frame size is the one that minimises AAoI over the
full (M, gamma) grid.  Light traffic wants gamma as large as possible;
heavier traffic has an interior optimum.
"""

import numpy as np

from fsard_aoi import GridSpec, sweep_fsard

for rho in (0.005, 0.02, 0.05, 0.08):
    result = sweep_fsard(GridSpec(num_users=30, arrival_prob=rho, mini_slots=4))
    m_best, gamma_best = result.best.params
    gammas, values = result.curve(m_best)
    print(f"rho={rho}: best M={m_best}, gamma={gamma_best}, AAoI={result.best.aaoi:.2f}")
    # coarse view of the curve at the best frame size
    for g in (0.05, 0.2, 0.4, 0.6, 0.8, 1.0):
        i = int(np.argmin(np.abs(gammas - g)))
        print(f"    gamma={gammas[i]:<6} AAoI={values[i]:9.2f}")

# more mini-slots always help at the optimum
for rho in (0.01, 0.02, 0.04, 0.08):
    v4 = sweep_fsard(GridSpec(30, rho, 4)).best.aaoi
    v6 = sweep_fsard(GridSpec(30, rho, 6)).best.aaoi
    print(f"rho={rho}: V=4 {v4:.2f}  V=6 {v6:.2f}")

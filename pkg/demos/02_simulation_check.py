"""
Checking the closed form against simulation
===========================================

Runs the slot-level simulator for a few networks and compares the
measured time-average AoI, service time and renewal moments with the
closed form.  Also shows a short per-slot trace.
"""

from fsard_aoi import SimConfig, SystemConfig, average_aoi, simulate_fsard
from fsard_aoi.trace import trace_csv_text, trace_fsard

# 10 replications of 100k frames each, after 10k warmup frames
sim = SimConfig(horizon_frames=100_000, replications=10, seed=7)

configs = [
    SystemConfig(30, 5, 4, 0.02, 0.1),
    SystemConfig(2, 4, 1, 0.3, 0.6),
    SystemConfig(50, 6, 8, 0.05, 0.2),
]

print(f"{'config':<38}{'analytic':>10}{'simulated':>11}{'ci':>8}{'rel':>9}")
for cfg in configs:
    report = average_aoi(cfg)
    stats = simulate_fsard(cfg, sim)
    label = f"N={cfg.num_users} M={cfg.frame_size} V={cfg.mini_slots} rho={cfg.arrival_prob} g={cfg.reservation_prob}"
    rel = (stats.mean_aoi - report.aaoi) / report.aaoi
    print(f"{label:<38}{report.aaoi:10.3f}{stats.mean_aoi:11.3f}{stats.ci_halfwidth:8.3f}{rel:+9.4f}")
    print(f"{'':<4}E[S] {report.e_s:.3f} vs {stats.mean_service:.3f}   "
          f"E[Y] {report.e_y:.2f} vs {stats.mean_y:.2f}   E[X] {stats.mean_interdeparture:.2f}")

# a few frames of the per-slot trace for a tiny network
rows, _ = trace_fsard(SystemConfig(2, 3, 2, 0.3, 0.8), frames=4, seed=5)
print()
print(trace_csv_text(rows))

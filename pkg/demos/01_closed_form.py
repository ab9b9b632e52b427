"""
Average AoI of FSA-RD from the closed form
==========================================

Walks through the quantities behind the closed-form AAoI for one
network: frame arrival probability, reservation success, the in-frame
delivery slot distribution and the renewal moments.
"""

import numpy as np

from fsard_aoi import SystemConfig, average_aoi, singleton_pmf

# 30 users, 5-slot frames (1 reservation slot + 4 data slots), 4 mini-slots
cfg = SystemConfig(num_users=30, frame_size=5, mini_slots=4, arrival_prob=0.02, reservation_prob=0.3)
report = average_aoi(cfg)

# probability that a user has a fresh update at the start of a frame
print(f"p   = {report.p:.6f}")

# when k users reserve in V mini-slots, how many land alone?
for k in (1, 2, 4, 8):
    probs = singleton_pmf(k, cfg.mini_slots).probs
    print(f"  k={k}: P(N_s = j) = {np.round(probs, 4)}")

# a reserving user succeeds if alone in its mini-slot and granted a data slot
print(f"p_s = {report.p_s:.6f}")
for alpha, phi in zip(report.alphas, report.phi):
    print(f"  delivered in frame slot {alpha}: {phi:.6f}")

# service time S = offset l + in-frame slot alpha
print(f"E[l] = {report.e_l:.4f}  E[alpha] = {report.e_alpha:.4f}  E[S] = {report.e_s:.4f}")

# renewal interval Y between frame ends that contain deliveries
print(f"E[Y] = {report.e_y:.3f}  E[Y^2] = {report.e_y2:.1f}")

# the AAoI both ways: closed form and E[Y^2]/(2E[Y]) + E[S] - 1/2
composed = report.e_y2 / (2 * report.e_y) + report.e_s - 0.5
print(f"AAoI = {report.aaoi:.6f}  (composition {composed:.6f})")

# reservation probability trades contention against idling
for gamma in (0.05, 0.1, 0.3, 0.6, 1.0):
    print(f"  gamma={gamma:<5} AAoI={average_aoi(cfg.replace(reservation_prob=gamma)).aaoi:9.3f}")

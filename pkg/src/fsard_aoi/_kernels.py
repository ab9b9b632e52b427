"""Compiled inner loops for the protocol simulators.

Both kernels draw from a ``numpy.random.Generator`` handed in by the caller;
numba reproduces NumPy's draws bit for bit, so the pure-Python reference
in :mod:`fsard_aoi.trace` replays exactly the same sample path.

Arrivals are drawn as geometric gaps rather than one Bernoulli per slot.
The two are equal in law and the gaps need far fewer draws at small rho.

AoI is ``t - u`` at slot ``t`` where ``u`` is the generation slot of the
newest delivered update (``u = -1`` at start, so the initial AoI is 1).
Area is accumulated per constant-``u`` segment as an arithmetic series.
"""

import numpy as np
from numba import njit

NEVER = np.int64(1) << np.int64(62)

# indices into the float accumulator vector returned by the kernels
DELIVERIES, SUM_S, SUM_S2, N_X, SUM_X, SUM_X2, N_Y, SUM_Y, SUM_Y2 = range(9)
N_ACC = 9

# error codes
OK, STALE_DELIVERY = 0, 1


@njit(cache=True, nogil=True)
def _segment_area(a, b, u):
    # sum of (t - u) for t in [a, b)
    if b <= a:
        return 0.0
    return (b - a) * ((a - u) + (b - 1 - u)) / 2.0


@njit(cache=True, nogil=True)
def fsard_kernel(n, m, v, rho, gamma, warmup, horizon, rng):
    """Simulate ``warmup + horizon`` frames; measure the last ``horizon``.

    Returns ``(area, acc, error)`` with per-user AoI area over measured
    slots, the accumulator vector, and an error code.
    """
    t0 = warmup * m
    t_end = (warmup + horizon) * m
    next_arrival = np.empty(n, np.int64)
    last_arrival = np.full(n, -1, np.int64)
    candidate = np.full(n, -1, np.int64)
    reserving = np.zeros(n, np.bool_)
    u = np.full(n, -1, np.int64)
    seg_start = np.full(n, t0, np.int64)
    last_end = np.full(n, -1, np.int64)
    last_frame = np.full(n, -1, np.int64)
    area = np.zeros(n)
    acc = np.zeros(N_ACC)
    hits = np.zeros(v, np.int64)
    owner = np.zeros(v, np.int64)

    for i in range(n):
        next_arrival[i] = rng.geometric(rho) - 1

    for f in range(warmup + horizon):
        start = f * m
        measured = f >= warmup
        for i in range(n):
            while next_arrival[i] < start:
                last_arrival[i] = next_arrival[i]
                next_arrival[i] += rng.geometric(rho)
            if last_arrival[i] >= start - m:
                candidate[i] = last_arrival[i]
            else:
                candidate[i] = -1
            reserving[i] = candidate[i] >= 0 and rng.random() < gamma
        for i in range(n):
            if reserving[i]:
                ms = rng.integers(0, v)
                hits[ms] += 1
                owner[ms] = i

        granted = 0
        for ms in range(v):
            if hits[ms] == 1 and granted < m - 1:
                i = owner[ms]
                granted += 1
                end = start + granted + 1  # end of frame slot alpha = granted + 1
                gen = candidate[i]
                if gen <= u[i]:
                    return area, acc, STALE_DELIVERY
                if end > t0:
                    area[i] += _segment_area(seg_start[i], end, u[i])
                    seg_start[i] = end
                if measured:
                    s = end - gen
                    acc[DELIVERIES] += 1.0
                    acc[SUM_S] += s
                    acc[SUM_S2] += s * s
                    if last_end[i] >= 0:
                        x = end - last_end[i]
                        y = (f - last_frame[i]) * m
                        acc[N_X] += 1.0
                        acc[SUM_X] += x
                        acc[SUM_X2] += x * x
                        acc[N_Y] += 1.0
                        acc[SUM_Y] += y
                        acc[SUM_Y2] += y * y
                u[i] = gen
                last_end[i] = end
                last_frame[i] = f
            hits[ms] = 0

    for i in range(n):
        area[i] += _segment_area(seg_start[i], t_end, u[i])
    return area, acc, OK


@njit(cache=True, nogil=True)
def aloha_kernel(n, rho, tau, warmup, horizon, rng):
    """Slotted ALOHA with a one-packet buffer holding the newest update.

    A buffered user transmits with probability ``tau`` per slot, including
    the slot its update arrived in.  Transmission times are geometric
    countdowns, redrawn after every attempt; a packet stays buffered after
    a collision.  Frames are single slots, so ``Y`` equals ``X`` here.
    """
    t0 = warmup
    t_end = warmup + horizon
    next_arrival = np.empty(n, np.int64)
    next_tx = np.full(n, NEVER, np.int64)
    buffered = np.full(n, -1, np.int64)
    u = np.full(n, -1, np.int64)
    seg_start = np.full(n, t0, np.int64)
    last_end = np.full(n, -1, np.int64)
    area = np.zeros(n)
    acc = np.zeros(N_ACC)

    for i in range(n):
        next_arrival[i] = rng.geometric(rho) - 1

    for t in range(t_end):
        transmitters = 0
        sender = -1
        for i in range(n):
            if next_arrival[i] == t:
                if buffered[i] < 0:
                    next_tx[i] = t + rng.geometric(tau) - 1
                buffered[i] = t
                next_arrival[i] = t + rng.geometric(rho)
            if next_tx[i] == t:
                transmitters += 1
                sender = i
                next_tx[i] = t + rng.geometric(tau)
        if transmitters != 1:
            continue
        i = sender
        end = t + 1
        gen = buffered[i]
        if gen <= u[i]:
            return area, acc, STALE_DELIVERY
        if end > t0:
            area[i] += _segment_area(seg_start[i], end, u[i])
            seg_start[i] = end
        if t >= t0:
            s = end - gen
            acc[DELIVERIES] += 1.0
            acc[SUM_S] += s
            acc[SUM_S2] += s * s
            if last_end[i] >= 0:
                x = end - last_end[i]
                acc[N_X] += 1.0
                acc[SUM_X] += x
                acc[SUM_X2] += x * x
                acc[N_Y] += 1.0
                acc[SUM_Y] += x
                acc[SUM_Y2] += x * x
        u[i] = gen
        last_end[i] = end
        buffered[i] = -1
        next_tx[i] = NEVER

    for i in range(n):
        area[i] += _segment_area(seg_start[i], t_end, u[i])
    return area, acc, OK

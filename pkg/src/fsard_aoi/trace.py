"""Slot-by-slot reference simulator of FSA-RD with a per-slot event trace.

This is a plain-Python re-statement of the protocol, intended for short
diagnostic runs.  It consumes random numbers in the same order as the
compiled kernel, so for equal seeds both produce the same sample path.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import SystemConfig
from .simulation import SimStats, replication_rng, resolve_reservation_slot

TRACE_COLUMNS = ("slot", "user", "aoi", "event")
EVENTS = ("none", "arrival", "reserve_fail", "reserve_win", "delivered")
_EVENT_ORDER = {name: rank for rank, name in enumerate(EVENTS)}
MAX_TRACE_FRAMES = 100_000


@dataclass
class UserState:
    """What one user and the AP know about that user's updates."""

    next_arrival: int
    latest_arrival: int | None = None
    candidate: int | None = None
    delivered_generation: int = -1
    aoi: int = 1
    area: float = 0.0
    services: list = field(default_factory=list)
    interdepartures: list = field(default_factory=list)
    renewals: list = field(default_factory=list)
    last_delivery_end: int | None = None
    last_delivery_frame: int | None = None


def trace_fsard(cfg: SystemConfig, frames: int, seed: int, warmup: int = 0, record: bool = True):
    """Run ``warmup + frames`` frames and return ``(rows, stats)``.

    ``rows`` holds ``(slot, user, aoi, event)`` tuples for the measured
    frames, one per event and a ``none`` row for quiet slots.  ``stats``
    matches replication 0 of :func:`simulate_fsard` with the same seed.
    """
    if frames + warmup > MAX_TRACE_FRAMES:
        raise ValueError(f"trace runs are limited to {MAX_TRACE_FRAMES} frames")
    n, m, v = cfg.num_users, cfg.frame_size, cfg.mini_slots
    rho, gamma = cfg.arrival_prob, cfg.reservation_prob
    rng = replication_rng(seed, 0)
    users = [UserState(next_arrival=int(rng.geometric(rho)) - 1) for _ in range(n)]
    t0 = warmup * m
    t_end = (warmup + frames) * m
    events: dict[tuple[int, int], list[str]] = {}
    aoi_log = np.zeros((frames * m, n), dtype=np.int64) if record else None

    def drain(i: int, user: UserState, limit: int) -> None:
        while user.next_arrival < limit:
            user.latest_arrival = user.next_arrival
            if record and user.latest_arrival >= t0:
                events.setdefault((user.latest_arrival, i), []).append("arrival")
            user.next_arrival += int(rng.geometric(rho))

    for f in range(warmup + frames):
        start = f * m
        measured = f >= warmup

        contenders = []
        for i, user in enumerate(users):
            drain(i, user, start)
            fresh = user.latest_arrival is not None and user.latest_arrival >= start - m
            user.candidate = user.latest_arrival if fresh else None
            if user.candidate is not None and rng.random() < gamma:
                contenders.append(i)
        outcome = resolve_reservation_slot(contenders, v, rng, data_slots=m - 1)
        receiver = {start + alpha - 1: i for i, alpha in outcome.assigned.items()}
        if record and measured:
            for i in contenders:
                kind = "reserve_win" if i in outcome.assigned else "reserve_fail"
                events.setdefault((start, i), []).append(kind)

        for t in range(start, start + m):
            for i, user in enumerate(users):
                if t >= t0:
                    user.area += user.aoi
                    if record:
                        aoi_log[t - t0, i] = user.aoi
            for i, user in enumerate(users):
                if receiver.get(t) != i:
                    user.aoi += 1
                    continue
                gen = user.candidate
                new_aoi = t + 1 - gen
                if not 1 <= new_aoi <= user.aoi:
                    raise RuntimeError(f"sample-path law violated for user {i} at slot {t}")
                user.aoi = new_aoi
                user.delivered_generation = gen
                if measured:
                    if record:
                        events.setdefault((t, i), []).append("delivered")
                    user.services.append(new_aoi)
                    if user.last_delivery_end is not None:
                        user.interdepartures.append(t + 1 - user.last_delivery_end)
                        user.renewals.append((f - user.last_delivery_frame) * m)
                user.last_delivery_end = t + 1
                user.last_delivery_frame = f

    rows = []
    if record:
        # arrivals in the last frame are only drawn once the next frame starts
        for i, user in enumerate(users):
            drain(i, user, t_end)
        for t in range(t0, t_end):
            for i in range(n):
                for kind in sorted(events.get((t, i), ["none"]), key=_EVENT_ORDER.get):
                    rows.append((t, i, int(aoi_log[t - t0, i]), kind))
    return rows, _trace_stats(cfg, frames, warmup, users)


def _trace_stats(cfg, frames, warmup, users) -> SimStats:
    slots = frames * cfg.frame_size
    services = [s for u in users for s in u.services]
    xs = [x for u in users for x in u.interdepartures]
    ys = np.array([y for u in users for y in u.renewals], dtype=float)
    nan = float("nan")
    mean_aoi = sum(u.area for u in users) / (slots * len(users))
    return SimStats(
        mean_aoi=mean_aoi,
        per_user_aoi=tuple(u.area / slots for u in users),
        mean_service=float(np.mean(services)) if services else nan,
        mean_interdeparture=float(np.mean(xs)) if xs else nan,
        mean_y=float(ys.mean()) if len(ys) else nan,
        mean_y2=float((ys**2).mean()) if len(ys) else nan,
        ci_halfwidth=0.0,
        slots_measured=slots * len(users),
        deliveries=len(services),
        intervals=len(xs),
        replication_means=(mean_aoi,),
        key=("fsard", cfg.num_users, cfg.frame_size, cfg.mini_slots,
             cfg.arrival_prob, cfg.reservation_prob, frames, warmup),
    )


def write_trace_csv(rows, dest) -> None:
    """Write trace rows with a ``slot,user,aoi,event`` header to a path or text stream."""
    if isinstance(dest, (str, Path)):
        try:
            with open(dest, "w", newline="") as fh:
                write_trace_csv(rows, fh)
        except OSError as exc:
            raise OSError(f"cannot write trace to {dest}: {exc}") from exc
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    writer.writerows(rows)


def trace_csv_text(rows) -> str:
    buf = io.StringIO()
    write_trace_csv(rows, buf)
    return buf.getvalue()

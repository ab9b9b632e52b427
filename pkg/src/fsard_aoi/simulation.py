"""Monte Carlo simulation of FSA-RD and of a slotted ALOHA baseline.

Each replication gets its own ``numpy.random.Generator`` derived from
``SeedSequence(seed, spawn_key=(replication,))``, so a run is fully
determined by ``(seed, configuration)`` and replications can be executed in
any order or in parallel.
"""

from __future__ import annotations

import math
import statistics
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import _kernels
from .analytic import SystemConfig

DEFAULT_SEED = 20220501
DEFAULT_WARMUP_FRAMES = 10_000
Z_95 = 1.96
MAX_SLOT_INDEX = int(_kernels.NEVER) - 1


@dataclass(frozen=True)
class SimConfig:
    """Run length and seeding of a simulation.

    For slotted ALOHA a "frame" is a single slot.
    """

    horizon_frames: int
    warmup_frames: int = DEFAULT_WARMUP_FRAMES
    seed: int = DEFAULT_SEED
    replications: int = 1

    def __post_init__(self):
        if self.horizon_frames < 1:
            raise ValueError(f"horizon_frames must be >= 1, got {self.horizon_frames}")
        if self.warmup_frames < 0:
            raise ValueError(f"warmup_frames must be >= 0, got {self.warmup_frames}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SimStats:
    """Measured AoI statistics of one replication or of an aggregate.

    ``ci_halfwidth`` is the 95% half-width of ``mean_aoi`` across
    replications (0 for a single replication).  ``mean_y`` and ``mean_y2``
    are the measured moments of the frame-end renewal interval.
    """

    mean_aoi: float
    per_user_aoi: tuple[float, ...]
    mean_service: float
    mean_interdeparture: float
    mean_y: float
    mean_y2: float
    ci_halfwidth: float
    slots_measured: int
    deliveries: int
    intervals: int
    replication_means: tuple[float, ...]
    key: tuple = field(default=(), compare=True)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_user_aoi"] = list(self.per_user_aoi)
        out["replication_means"] = list(self.replication_means)
        out["key"] = list(self.key)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimStats":
        values = {f.name: data[f.name] for f in fields(cls)}
        for name in ("per_user_aoi", "replication_means"):
            values[name] = tuple(float(x) for x in values[name])
        values["key"] = tuple(values["key"])
        for name in ("slots_measured", "deliveries", "intervals"):
            values[name] = int(values[name])
        for name in ("mean_aoi", "mean_service", "mean_interdeparture", "mean_y", "mean_y2", "ci_halfwidth"):
            values[name] = float(values[name])
        return cls(**values)


@dataclass(frozen=True)
class FrameOutcome:
    """Result of one reservation slot.

    ``winners`` are the users granted a data slot, in mini-slot order, and
    ``assigned[u]`` is the frame slot index (2 .. M) of winner ``u``.
    """

    contenders: frozenset
    choices: dict
    winners: tuple
    assigned: dict


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


def resolve_reservation_slot(contenders: Iterable, v: int, rng, data_slots: int | None = None) -> FrameOutcome:
    """Place each contender in a uniform mini-slot and pick the singletons.

    Contenders draw in sorted order from ``rng.integers(0, v)``; any object
    with that method works, which lets tests force collisions.  With
    ``data_slots`` given, singletons beyond that many lose their grant.
    """
    if v < 1:
        raise ValueError(f"mini-slot count must be >= 1, got {v}")
    contenders = frozenset(contenders)
    choices = {user: int(rng.integers(0, v)) for user in sorted(contenders)}
    counts: dict[int, list] = {}
    for user, slot in choices.items():
        counts.setdefault(slot, []).append(user)
    winners = tuple(users[0] for slot, users in sorted(counts.items()) if len(users) == 1)
    if data_slots is not None:
        winners = winners[:data_slots]
    assigned = {user: index + 2 for index, user in enumerate(winners)}
    return FrameOutcome(contenders, choices, winners, assigned)


def _stats_from_kernel(area, acc, error, users, slots, key) -> SimStats:
    if error != _kernels.OK:
        raise RuntimeError(f"sample-path law violated (kernel error {error}) for {key}")
    deliveries = int(acc[_kernels.DELIVERIES])
    intervals = int(acc[_kernels.N_X])
    per_user = area / slots
    mean_aoi = math.fsum(area) / (slots * users)
    nan = float("nan")
    return SimStats(
        mean_aoi=mean_aoi,
        per_user_aoi=tuple(float(x) for x in per_user),
        mean_service=acc[_kernels.SUM_S] / deliveries if deliveries else nan,
        mean_interdeparture=acc[_kernels.SUM_X] / intervals if intervals else nan,
        mean_y=acc[_kernels.SUM_Y] / intervals if intervals else nan,
        mean_y2=acc[_kernels.SUM_Y2] / intervals if intervals else nan,
        ci_halfwidth=0.0,
        slots_measured=slots * users,
        deliveries=deliveries,
        intervals=intervals,
        replication_means=(mean_aoi,),
        key=key,
    )


def _run_replications(run_one, sim: SimConfig, threads: int) -> SimStats:
    indices = range(sim.replications)
    if threads > 1 and sim.replications > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(run_one, indices))
    else:
        runs = [run_one(r) for r in indices]
    return aggregate_replications(runs)


def _check_capacity(frames: int, frame_size: int) -> None:
    if frames * frame_size > MAX_SLOT_INDEX:
        raise OverflowError(f"{frames} frames of {frame_size} slots exceed the slot-index capacity")


def simulate_fsard(cfg: SystemConfig, sim: SimConfig, threads: int = 1) -> SimStats:
    """Slot-level simulation of FSA-RD; see the module docstring for seeding."""
    frames = sim.warmup_frames + sim.horizon_frames
    _check_capacity(frames, cfg.frame_size)
    key = ("fsard", cfg.num_users, cfg.frame_size, cfg.mini_slots,
           cfg.arrival_prob, cfg.reservation_prob, sim.horizon_frames, sim.warmup_frames)

    def run_one(r: int) -> SimStats:
        rng = replication_rng(sim.seed, r)
        area, acc, error = _kernels.fsard_kernel(
            cfg.num_users, cfg.frame_size, cfg.mini_slots, float(cfg.arrival_prob),
            float(cfg.reservation_prob), sim.warmup_frames, sim.horizon_frames, rng,
        )
        return _stats_from_kernel(area, acc, error, cfg.num_users,
                                  sim.horizon_frames * cfg.frame_size, key)

    return _run_replications(run_one, sim, threads)


def simulate_slotted_aloha(n: int, rho: float, tau: float, sim: SimConfig, threads: int = 1) -> SimStats:
    """Slotted ALOHA baseline; ``sim`` frames are single slots.

    Each slot: arrivals (newest replaces the buffer), every buffered user
    transmits with probability ``tau``, and a slot with exactly one
    transmitter delivers.  Collided packets stay buffered.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    for name, value in (("rho", rho), ("tau", tau)):
        if not 0.0 < value <= 1.0:
            raise ValueError(f"{name} must lie in (0, 1], got {value}")
    _check_capacity(sim.warmup_frames + sim.horizon_frames, 1)
    key = ("aloha", n, rho, tau, sim.horizon_frames, sim.warmup_frames)

    def run_one(r: int) -> SimStats:
        rng = replication_rng(sim.seed, r)
        area, acc, error = _kernels.aloha_kernel(
            n, float(rho), float(tau), sim.warmup_frames, sim.horizon_frames, rng
        )
        return _stats_from_kernel(area, acc, error, n, sim.horizon_frames, key)

    return _run_replications(run_one, sim, threads)


def _weighted(values: Sequence[float], weights: Sequence[float]) -> float:
    total = math.fsum(weights)
    if total == 0:
        return float("nan")
    return math.fsum(v * w for v, w in zip(values, weights) if w) / total


def aggregate_replications(stats: Sequence[SimStats]) -> SimStats:
    """Pool per-replication statistics.

    AoI means are weighted by measured slots, renewal statistics by the
    number of deliveries or intervals they were averaged over.  The CI
    half-width is ``1.96 * stdev(replication means) / sqrt(R)``.
    """
    if not stats:
        raise ValueError("cannot aggregate an empty list of replications")
    keys = {s.key for s in stats}
    if len(keys) != 1:
        raise ValueError(f"replications come from different configurations: {sorted(map(str, keys))}")
    widths = {len(s.per_user_aoi) for s in stats}
    if len(widths) != 1:
        raise ValueError("replications have different user counts")

    slots = [s.slots_measured for s in stats]
    deliveries = [s.deliveries for s in stats]
    intervals = [s.intervals for s in stats]
    means = [m for s in stats for m in s.replication_means]
    ci = 0.0
    if len(means) > 1:
        ci = Z_95 * statistics.stdev(means) / math.sqrt(len(means))
    per_user = tuple(
        _weighted([s.per_user_aoi[i] for s in stats], slots) for i in range(widths.pop())
    )
    return SimStats(
        mean_aoi=_weighted([s.mean_aoi for s in stats], slots),
        per_user_aoi=per_user,
        mean_service=_weighted([s.mean_service for s in stats], deliveries),
        mean_interdeparture=_weighted([s.mean_interdeparture for s in stats], intervals),
        mean_y=_weighted([s.mean_y for s in stats], intervals),
        mean_y2=_weighted([s.mean_y2 for s in stats], intervals),
        ci_halfwidth=ci,
        slots_measured=sum(slots),
        deliveries=sum(deliveries),
        intervals=sum(intervals),
        replication_means=tuple(means),
        key=keys.pop(),
    )

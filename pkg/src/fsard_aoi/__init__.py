"""Average age of information of frame slotted ALOHA with reservation and data slots."""

from .analytic import (
    AnalyticReport,
    ConsistencyError,
    DegenerateConfigError,
    SystemConfig,
    aaoi_over_gamma,
    average_aoi,
    data_slot_success_pmf,
    frame_arrival_prob,
    renewal_moments,
    reservation_success_prob,
    service_moments,
    waiting_moments,
)
from .occupancy import PrecisionLossError, SingletonPmf, singleton_pmf, singleton_pmf_closed
from .simulation import (
    FrameOutcome,
    SimConfig,
    SimStats,
    aggregate_replications,
    resolve_reservation_slot,
    simulate_fsard,
    simulate_slotted_aloha,
)
from .sweep import GridSpec, SweepPoint, SweepResult, optimize_aloha, reproduce_table1, sweep_fsard

__all__ = [
    "AnalyticReport",
    "ConsistencyError",
    "DegenerateConfigError",
    "FrameOutcome",
    "GridSpec",
    "PrecisionLossError",
    "SimConfig",
    "SimStats",
    "SingletonPmf",
    "SweepPoint",
    "SweepResult",
    "SystemConfig",
    "aaoi_over_gamma",
    "aggregate_replications",
    "average_aoi",
    "data_slot_success_pmf",
    "frame_arrival_prob",
    "optimize_aloha",
    "renewal_moments",
    "reproduce_table1",
    "reservation_success_prob",
    "resolve_reservation_slot",
    "service_moments",
    "simulate_fsard",
    "simulate_slotted_aloha",
    "singleton_pmf",
    "singleton_pmf_closed",
    "sweep_fsard",
    "waiting_moments",
]

"""Closed-form average AoI of frame slotted ALOHA with reservation and data slots.

A frame has ``M`` slots: one reservation slot split into ``V`` mini-slots,
followed by ``M - 1`` data slots.  Each of ``N`` users generates an update
with probability ``rho`` per slot, keeps only the newest update of a frame,
and tries to reserve with probability ``gamma`` in the next frame.

All public functions are pure and operate on :class:`SystemConfig`.  The
sweep module uses :func:`aaoi_over_gamma`, which evaluates the same chain
for a whole vector of reservation probabilities in one pass.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from numbers import Integral, Real

import numpy as np

from .occupancy import singleton_table

# Relative agreement required between the two AAoI compositions.
CROSS_CHECK_RTOL = 1e-10


class DegenerateConfigError(ValueError):
    """No update can ever be delivered (or the success rate underflowed)."""


class ConsistencyError(ArithmeticError):
    """Two algebraically equivalent compositions of the AAoI disagree."""


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of a symmetric FSA-RD network."""

    num_users: int
    frame_size: int
    mini_slots: int
    arrival_prob: float
    reservation_prob: float

    def __post_init__(self):
        for name, low in (("num_users", 1), ("frame_size", 2), ("mini_slots", 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Integral):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < low:
                raise ValueError(f"{name} must be >= {low}, got {value}")
        for name in ("arrival_prob", "reservation_prob"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Real):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")

    def replace(self, **changes) -> "SystemConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return SystemConfig(**values)


@dataclass(frozen=True)
class AnalyticReport:
    """Every quantity in the closed-form chain for one configuration.

    ``phi[i]`` is the probability of delivery in frame slot ``alpha = i + 2``
    (data slot ``i + 1``); see :attr:`alphas`.
    """

    p: float
    p_s: float
    phi: tuple[float, ...]
    e_l: float
    e_alpha: float
    e_s: float
    e_w: float
    e_w2: float
    e_k: float
    e_k2: float
    e_y: float
    e_y2: float
    aaoi: float

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(2, len(self.phi) + 2)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["phi"] = list(self.phi)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "AnalyticReport":
        values = {f.name: data[f.name] for f in fields(cls)}
        values["phi"] = tuple(float(x) for x in values["phi"])
        return cls(**{k: v if k == "phi" else float(v) for k, v in values.items()})


def _empty_frame_prob(rho: float, m: int) -> float:
    """(1 - rho)^m, exact at rho = 1."""
    if rho == 1.0:
        return 0.0
    return math.exp(m * math.log1p(-rho))


def frame_arrival_prob(rho: float, m: int) -> float:
    """Probability that at least one update arrives during an ``m``-slot frame."""
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if m < 1:
        raise ValueError(f"frame size must be >= 1, got {m}")
    if rho == 1.0:
        return 1.0
    return -math.expm1(m * math.log1p(-rho))


def waiting_moments(p: float, m: int) -> tuple[float, float]:
    """First two moments of the wait for a frame that has an update.

    The wait is ``m`` times a geometric number of empty frames, so
    ``E[W] = (1-p) m / p`` and ``E[W^2] = (p^2 - 3p + 2) m^2 / p^2``.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    e_w = (1.0 - p) * m / p
    e_w2 = (p * p - 3.0 * p + 2.0) * m * m / (p * p)
    return e_w, e_w2


def _binomial_rows(n_max: int, q):
    """Yield Binomial(n, q) PMFs for n = 0 .. n_max via Pascal's recurrence.

    ``q`` may be a scalar or a 1-D array; rows then have shape ``(len(q), n+1)``.
    Each step mixes the previous row with weights (1-q, q), so nothing
    overflows or cancels for large ``n``.
    """
    q = np.asarray(q, dtype=float)
    row = np.ones(q.shape + (1,))
    qc = q[..., None]
    yield row
    for n in range(1, n_max + 1):
        nxt = np.zeros(q.shape + (n + 1,))
        nxt[..., :-1] += row * (1.0 - qc)
        nxt[..., 1:] += row * qc
        row = nxt
        yield row


def _reserver_weights(n: int, p: float, gammas: np.ndarray) -> np.ndarray:
    """Pr(N_r = n2) for the other n-1 users, one row per gamma.

    Sums over the number of other users holding an update (Binomial(n-1, p))
    and, within those, the number that reserve (Binomial(n1, gamma)).
    """
    others = n - 1
    holders = list(_binomial_rows(others, p))[others]
    weights = np.zeros((len(gammas), others + 1))
    for n1, row in enumerate(_binomial_rows(others, gammas)):
        weights[:, : n1 + 1] += holders[n1] * row
    return weights


def _contention_terms(n: int, m: int, v: int):
    """Per-n2 success factors for p_s and for each phi_alpha.

    Returns ``(success, per_slot)`` where ``success[n2]`` is
    ``sum_n3 Pr(N_s=n3 | n2+1 contenders) * min(n3, m-1) / (n2+1)`` and
    ``per_slot[n2, a]`` is ``Pr(N_s >= a+1 | n2+1 contenders) / (n2+1)``
    for data slot ``a + 1``.
    """
    table = singleton_table(n, v)[1:]  # rows for 1 .. n contenders
    contenders = np.arange(1, n + 1, dtype=float)
    n3 = np.arange(v + 1)
    success = table @ np.minimum(n3, m - 1) / contenders
    tail = np.cumsum(table[:, ::-1], axis=1)[:, ::-1]  # Pr(N_s >= j)
    per_slot = np.zeros((n, m - 1))
    usable = min(v, m - 1)
    per_slot[:, :usable] = tail[:, 1 : usable + 1] / contenders[:, None]
    return success, per_slot


def _success_and_phi(n: int, m: int, v: int, p: float, gammas: np.ndarray):
    weights = _reserver_weights(n, p, gammas)
    success, per_slot = _contention_terms(n, m, v)
    return weights @ success, weights @ per_slot


def reservation_success_prob(cfg: SystemConfig) -> float:
    """Probability that a reserving user with an update gets it delivered."""
    p = frame_arrival_prob(cfg.arrival_prob, cfg.frame_size)
    p_s, _ = _success_and_phi(
        cfg.num_users, cfg.frame_size, cfg.mini_slots, p, np.array([cfg.reservation_prob])
    )
    return float(p_s[0])


def data_slot_success_pmf(cfg: SystemConfig) -> np.ndarray:
    """Delivery probability per frame slot ``alpha = 2 .. M`` (index ``alpha - 2``)."""
    p = frame_arrival_prob(cfg.arrival_prob, cfg.frame_size)
    _, phi = _success_and_phi(
        cfg.num_users, cfg.frame_size, cfg.mini_slots, p, np.array([cfg.reservation_prob])
    )
    return phi[0]


def _mean_offset(rho: float, m: int, p: float) -> float:
    # slots between the kept update's generation and the start of its frame
    return 1.0 / rho - m * _empty_frame_prob(rho, m) / p


def service_moments(cfg: SystemConfig) -> tuple[float, float, float]:
    """``(E[l], E[alpha], E[S])`` for delivered updates, with ``S = l + alpha``."""
    m, rho = cfg.frame_size, cfg.arrival_prob
    p = frame_arrival_prob(rho, m)
    phi = data_slot_success_pmf(cfg)
    p_s = float(phi.sum())
    if not p_s > 0.0:
        raise DegenerateConfigError(f"reservation success probability is {p_s} for {cfg}")
    e_l = _mean_offset(rho, m, p)
    e_alpha = float(phi @ np.arange(2, m + 1)) / p_s
    return e_l, e_alpha, e_l + e_alpha


def _renewal_from(m: int, p: float, q: float):
    e_w, e_w2 = waiting_moments(p, m)
    fail = 1.0 - q
    e_k = (m + fail * e_w) / q
    e_k2 = (m * m + fail * (e_w2 + 2.0 * e_k * e_w + 2.0 * m * (e_k + e_w))) / q
    e_y = e_w + e_k
    e_y2 = e_w2 + e_k2 + 2.0 * e_w * e_k
    return e_w, e_w2, e_k, e_k2, e_y, e_y2


def renewal_moments(cfg: SystemConfig) -> tuple[float, float, float, float]:
    """``(E[K], E[K^2], E[Y], E[Y^2])`` from the one-step recursion on K.

    K restarts (``K = M + W' + K'``) whenever the frame's attempt fails,
    which happens with probability ``1 - gamma * p_s``.
    """
    m = cfg.frame_size
    p = frame_arrival_prob(cfg.arrival_prob, m)
    q = cfg.reservation_prob * reservation_success_prob(cfg)
    if not q > 0.0:
        raise DegenerateConfigError(f"per-attempt success probability is {q} for {cfg}")
    _, _, e_k, e_k2, e_y, e_y2 = _renewal_from(m, p, q)
    return e_k, e_k2, e_y, e_y2


def _closed_form_aaoi(rho, m, p, gamma, p_s, e_alpha):
    return (
        m / (gamma * p_s * p)
        - m * _empty_frame_prob(rho, m) / p
        + 1.0 / rho
        - (m + 1) / 2.0
        + e_alpha
    )


def average_aoi(cfg: SystemConfig) -> AnalyticReport:
    """Full closed-form report for one configuration.

    The AAoI is evaluated from the final closed expression and checked
    against ``E[Y^2] / (2 E[Y]) + E[S] - 1/2`` built from the moment chain;
    a mismatch beyond :data:`CROSS_CHECK_RTOL` raises :class:`ConsistencyError`.
    """
    n, m, v = cfg.num_users, cfg.frame_size, cfg.mini_slots
    rho, gamma = cfg.arrival_prob, cfg.reservation_prob
    p = frame_arrival_prob(rho, m)
    p_s_arr, phi_arr = _success_and_phi(n, m, v, p, np.array([gamma]))
    p_s, phi = float(p_s_arr[0]), phi_arr[0]
    q = gamma * p_s
    if not q > 0.0:
        raise DegenerateConfigError(f"per-attempt success probability is {q} for {cfg}")

    e_l = _mean_offset(rho, m, p)
    e_alpha = float(phi @ np.arange(2, m + 1)) / p_s
    e_s = e_l + e_alpha
    e_w, e_w2, e_k, e_k2, e_y, e_y2 = _renewal_from(m, p, q)

    if not math.isfinite(e_y2):
        raise DegenerateConfigError(f"second interdeparture moment overflows (q = {q!r}) for {cfg}")
    aaoi = _closed_form_aaoi(rho, m, p, gamma, p_s, e_alpha)
    composed = e_y2 / (2.0 * e_y) + e_s - 0.5
    if not math.isclose(aaoi, composed, rel_tol=CROSS_CHECK_RTOL, abs_tol=0.0):
        raise ConsistencyError(f"closed form {aaoi!r} != composition {composed!r} for {cfg}")

    return AnalyticReport(
        p=p,
        p_s=p_s,
        phi=tuple(float(x) for x in phi),
        e_l=e_l,
        e_alpha=e_alpha,
        e_s=e_s,
        e_w=e_w,
        e_w2=e_w2,
        e_k=e_k,
        e_k2=e_k2,
        e_y=e_y,
        e_y2=e_y2,
        aaoi=aaoi,
    )


def aaoi_over_gamma(
    num_users: int, frame_size: int, mini_slots: int, arrival_prob: float, gammas
) -> np.ndarray:
    """Closed-form AAoI for each reservation probability in ``gammas``.

    Validation is the same as :class:`SystemConfig`.  Entries whose success
    probability underflows to zero come back as ``nan``.
    """
    gammas = np.asarray(gammas, dtype=float)
    for g in gammas:
        SystemConfig(num_users, frame_size, mini_slots, arrival_prob, float(g))
    m, rho = frame_size, arrival_prob
    p = frame_arrival_prob(rho, m)
    p_s, phi = _success_and_phi(num_users, m, mini_slots, p, gammas)
    with np.errstate(divide="ignore", invalid="ignore"):
        e_alpha = phi @ np.arange(2, m + 1) / p_s
        out = _closed_form_aaoi(rho, m, p, gammas, p_s, e_alpha)
    out[~(gammas * p_s > 0.0)] = np.nan
    return out

"""Singleton counts when k balls are thrown uniformly into v cells.

In a reservation slot with ``v`` mini-slots and ``k`` contenders, a mini-slot
chosen by exactly one contender is a successful reservation.  The number of
such singleton cells is the quantity computed here.

Two routes are provided:

* :func:`singleton_pmf` runs a per-ball dynamic program over the state
  (singleton cells, collided cells).  Every update is a convex combination,
  so there is no cancellation and it stays accurate for large ``k``.
* :func:`singleton_pmf_closed` evaluates the classical alternating sum.  It
  suffers from cancellation and is kept only as a small-instance oracle.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Largest tolerated rounding-error bound of the alternating sum, per entry.
CLOSED_FORM_MAX_ERROR = 1e-10


class PrecisionLossError(ArithmeticError):
    """The alternating-sum evaluation cancelled too many digits to be trusted."""


@dataclass(frozen=True)
class SingletonPmf:
    """Distribution of the number of singleton cells.

    ``probs[j]`` is the probability that exactly ``j`` cells hold one ball,
    for ``j = 0 .. min(cells, contenders)``.
    """

    contenders: int
    cells: int
    probs: np.ndarray

    def __getitem__(self, j: int) -> float:
        if 0 <= j < len(self.probs):
            return float(self.probs[j])
        return 0.0

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)


def _check_domain(k: int, v: int) -> None:
    if k < 0:
        raise ValueError(f"contender count must be >= 0, got {k}")
    if v < 1:
        raise ValueError(f"cell count must be >= 1, got {v}")


@lru_cache(maxsize=256)
def singleton_table(k_max: int, v: int) -> np.ndarray:
    """Singleton-count PMFs for every ball count ``0 .. k_max`` at once.

    Returns a read-only array of shape ``(k_max + 1, v + 1)`` whose row ``k``
    is the PMF for ``k`` balls.  One DP pass produces all rows because the
    state after ``k`` balls is the starting point for ``k + 1``.
    """
    _check_domain(k_max, v)
    s_idx, d_idx = np.meshgrid(np.arange(v + 1), np.arange(v + 1), indexing="ij")
    feasible = s_idx + d_idx <= v
    p_empty = np.where(feasible, (v - s_idx - d_idx) / v, 0.0)
    p_single = s_idx / v
    p_multi = d_idx / v

    state = np.zeros((v + 1, v + 1))  # state[s, d]
    state[0, 0] = 1.0
    table = np.zeros((k_max + 1, v + 1))
    table[0, 0] = 1.0
    for k in range(1, k_max + 1):
        nxt = state * p_multi
        nxt[1:, :] += (state * p_empty)[:-1, :]
        nxt[:-1, 1:] += (state * p_single)[1:, :-1]
        state = nxt
        table[k] = state.sum(axis=1)
    table.setflags(write=False)
    return table


def singleton_pmf(k: int, v: int) -> SingletonPmf:
    """Exact PMF of the singleton count for ``k`` contenders over ``v`` mini-slots."""
    _check_domain(k, v)
    row = singleton_table(k, v)[k, : min(k, v) + 1].copy()
    row.setflags(write=False)
    return SingletonPmf(k, v, row)


def singleton_pmf_closed(k: int, v: int) -> SingletonPmf:
    """Alternating-sum closed form of the singleton-count PMF.

    Each entry is a signed sum of factorial-scaled terms.  A rounding bound
    of ``4 * eps * sum(|terms|)`` is tracked per entry; if it exceeds
    :data:`CLOSED_FORM_MAX_ERROR` a :class:`PrecisionLossError` is raised
    rather than returning a silently wrong value.
    """
    if k < 1:
        raise ValueError(f"contender count must be >= 1, got {k}")
    _check_domain(k, v)
    top = min(k, v)
    eps = sys.float_info.epsilon
    fact = math.factorial
    probs = np.zeros(top + 1)
    try:
        for j in range(top + 1):
            prefix = (-1) ** j * fact(v) * fact(k) / (float(v) ** k * fact(j))
            terms = [
                (-1) ** m * float((v - m) ** (k - m)) / (fact(m - j) * fact(v - m) * fact(k - m))
                for m in range(j, top + 1)
            ]
            value = prefix * math.fsum(terms)
            bound = 4 * eps * abs(prefix) * math.fsum(abs(t) for t in terms) * len(terms)
            if bound > CLOSED_FORM_MAX_ERROR:
                raise PrecisionLossError(
                    f"closed form for k={k}, v={v} cancels too much at j={j} "
                    f"(error bound {bound:.3g} > {CLOSED_FORM_MAX_ERROR:g})"
                )
            probs[j] = value
    except OverflowError as exc:
        raise PrecisionLossError(f"closed form overflows for k={k}, v={v}") from exc
    probs.setflags(write=False)
    return SingletonPmf(k, v, probs)

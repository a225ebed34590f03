"""Connectivity profiles and the instrumented objective evaluation.

Each UE gets a flag pair (d_macro, d_small); at least one flag must be set,
and the small flag always points at the UE's associated SBS. Base stations
split bandwidth evenly across the UEs they serve, so a station serving n UEs
gives each of them bw/n at that UE's spectral efficiency.

RateCalcCounter is the complexity currency: one tick per application of the
per-UE rate formula. Solvers charge their own accounting to it; comparing
counter values across solvers is the point of the exercise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import ChannelTable

__all__ = [
    "DIGIT_BOTH",
    "DIGIT_MACRO_ONLY",
    "DIGIT_SMALL_ONLY",
    "RateCalcCounter",
    "Allocation",
    "EvalReport",
    "share_rate",
    "rate_macro_ue",
    "rate_small_ue",
    "serving_sets",
    "evaluate",
]

# Profile codes in canonical enumeration order. Brute force counts base-3
# combinations with UE 0 as the least significant digit, so ties resolve
# toward (1,1) first, then (1,0), then (0,1).
DIGIT_BOTH = 0         # (d_macro, d_small) = (1, 1)
DIGIT_MACRO_ONLY = 1   # (1, 0)
DIGIT_SMALL_ONLY = 2   # (0, 1)


class RateCalcCounter:
    """Monotone tally of per-UE rate evaluations."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def tick(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError("counter can only move forward")
        self.count += n

    def __repr__(self) -> str:
        return f"RateCalcCounter(count={self.count})"


@dataclass
class Allocation:
    """Per-UE serving flags. d_small refers to the UE's associated SBS."""

    d_macro: np.ndarray
    d_small: np.ndarray

    def __post_init__(self):
        self.d_macro = np.ascontiguousarray(self.d_macro, dtype=np.uint8)
        self.d_small = np.ascontiguousarray(self.d_small, dtype=np.uint8)
        if self.d_macro.shape != self.d_small.shape or self.d_macro.ndim != 1:
            raise ValueError("d_macro and d_small must be 1-d arrays of equal length")
        if np.any(self.d_macro > 1) or np.any(self.d_small > 1):
            raise ValueError("serving flags must be 0 or 1")

    @property
    def num_ue(self) -> int:
        return int(self.d_macro.shape[0])

    def validate(self) -> None:
        uncovered = np.flatnonzero((self.d_macro | self.d_small) == 0)
        if uncovered.size:
            raise ValueError(f"UEs without any serving tier: {uncovered.tolist()}")

    def to_digits(self) -> np.ndarray:
        self.validate()
        digits = np.empty(self.num_ue, dtype=np.uint8)
        both = (self.d_macro == 1) & (self.d_small == 1)
        digits[both] = DIGIT_BOTH
        digits[(self.d_macro == 1) & (self.d_small == 0)] = DIGIT_MACRO_ONLY
        digits[(self.d_macro == 0) & (self.d_small == 1)] = DIGIT_SMALL_ONLY
        return digits

    @classmethod
    def from_digits(cls, digits) -> "Allocation":
        digits = np.asarray(digits, dtype=np.uint8)
        if np.any(digits > 2):
            raise ValueError("profile digits must be 0, 1 or 2")
        return cls(d_macro=(digits != DIGIT_SMALL_ONLY).astype(np.uint8),
                   d_small=(digits != DIGIT_MACRO_ONLY).astype(np.uint8))

    @classmethod
    def all_both(cls, num_ue: int) -> "Allocation":
        return cls(np.ones(num_ue, np.uint8), np.ones(num_ue, np.uint8))

    @classmethod
    def all_macro_only(cls, num_ue: int) -> "Allocation":
        return cls(np.ones(num_ue, np.uint8), np.zeros(num_ue, np.uint8))

    @classmethod
    def all_small_only(cls, num_ue: int) -> "Allocation":
        return cls(np.zeros(num_ue, np.uint8), np.ones(num_ue, np.uint8))


@dataclass
class EvalReport:
    """Outcome of evaluating one allocation."""

    sum_rate: float                 # bits/s over both tiers
    rate_macro: np.ndarray          # macro-tier rate per UE, 0 where unserved
    rate_small: np.ndarray          # small-tier rate per UE, 0 where unserved
    rate_calc_count: int            # counter reading attached to this report


def share_rate(bw_hz: float, n_served: int, log_term: float) -> float:
    """Equal-split Shannon rate: (bw / n) * log2(1 + x), log term precomputed."""
    if n_served < 1:
        raise ValueError("a serving station must serve at least one UE")
    return bw_hz / n_served * log_term


def rate_macro_ue(k: int, n_served: int, table: ChannelTable, counter: RateCalcCounter) -> float:
    """Macro-tier rate of UE k when the MBS serves n_served UEs. One tick."""
    counter.tick()
    return share_rate(table.params.bw_macro_hz, n_served, table.log_macro[k])


def rate_small_ue(k: int, n_served: int, table: ChannelTable, counter: RateCalcCounter) -> float:
    """Small-tier rate of UE k at its associated SBS serving n_served UEs."""
    counter.tick()
    return share_rate(table.params.bw_small_hz, n_served, table.log_small[k])


def serving_sets(alloc: Allocation, table: ChannelTable):
    """Split an allocation into the MBS served set and per-SBS served sets."""
    if alloc.num_ue != table.num_ue:
        raise ValueError("allocation size does not match table")
    macro_ues = np.flatnonzero(alloc.d_macro == 1)
    small_mask = alloc.d_small == 1
    sbs_ues = [np.flatnonzero(small_mask & (table.assoc_sbs == i)) for i in range(table.num_sbs)]
    return macro_ues, sbs_ues


def evaluate(alloc: Allocation, table: ChannelTable, counter: RateCalcCounter | None = None) -> EvalReport:
    """Total sum-rate of an allocation, ticking the counter once per served
    (UE, tier) pair when a counter is supplied.

    The accumulation order (UE 0..K-1, macro term then small term) matches
    the enumeration kernels, so an allocation evaluated here equals the same
    allocation scored inside brute force bit for bit.
    """
    if alloc.num_ue != table.num_ue:
        raise ValueError("allocation size does not match table")
    alloc.validate()
    cnt = counter if counter is not None else RateCalcCounter()

    n_macro = int(alloc.d_macro.sum())
    served_small = alloc.d_small == 1
    n_small = np.bincount(table.assoc_sbs[served_small], minlength=table.num_sbs)

    k_ues = table.num_ue
    rate_m = np.zeros(k_ues)
    rate_s = np.zeros(k_ues)
    total = 0.0
    for k in range(k_ues):
        rm = rate_macro_ue(k, n_macro, table, cnt) if alloc.d_macro[k] else 0.0
        rs = rate_small_ue(k, int(n_small[table.assoc_sbs[k]]), table, cnt) if alloc.d_small[k] else 0.0
        rate_m[k] = rm
        rate_s[k] = rs
        total += rm
        total += rs
    return EvalReport(sum_rate=total, rate_macro=rate_m, rate_small=rate_s, rate_calc_count=cnt.count)

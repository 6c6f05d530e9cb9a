"""Slot-level simulation of one batch of stations running a backoff policy.

All ``n`` stations start in window 0.  In every window each unfinished
station picks one slot uniformly at random; a slot with one transmitter is a
success, a slot with two or more is a collision and everyone in it keeps
contending.  The trial ends with the window holding the last success.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from .policies import BackoffPolicy
from .rng import uniform_slots

DEFAULT_SAFETY_CAP = 2**32


class SafetyCapExceeded(RuntimeError):
    """The trial would run past the configured total of CW slots."""


class UnsupportedQuery(RuntimeError):
    pass


@dataclass(frozen=True)
class WindowRecord:
    size: int
    empty_slots: int
    success_slots: int
    collision_slots: int
    colliding_station_total: int

    @property
    def stations(self) -> int:
        return self.success_slots + self.colliding_station_total


@dataclass
class TrialTrace:
    n: int
    windows: list[WindowRecord]
    cw_slots_total: int
    collision_slots_total: int
    # 1-based global CW-slot numbers, sorted
    success_slot_indices: np.ndarray
    half_done_slot: int
    alo_instances: int
    policy: Optional[BackoffPolicy] = None
    seed: Optional[int] = None
    station_collisions: Optional[np.ndarray] = field(default=None, repr=False)

    def dump(self, out: Optional[TextIO] = None) -> str:
        """Tab-separated per-window dump; returns the text when ``out`` is None."""
        buf = out if out is not None else io.StringIO()
        for i, rec in enumerate(self.windows):
            buf.write(
                f"{i}\t{rec.size}\t{rec.empty_slots}\t{rec.success_slots}\t"
                f"{rec.collision_slots}\t{rec.colliding_station_total}\n"
            )
        return buf.getvalue() if out is None else ""


def resolve_window(seed: int, window: int, stations: np.ndarray, size: int):
    """Let ``stations`` each pick a slot of window ``window``.

    Returns the window record, each station's slot, and a mask of stations
    that were alone in their slot.
    """
    slots = uniform_slots(seed, window, stations, size)
    counts = np.bincount(slots, minlength=size)
    won = counts[slots] == 1
    n_success = int(np.count_nonzero(won))
    n_coll = int(np.count_nonzero(counts >= 2))
    rec = WindowRecord(
        size=size,
        empty_slots=size - n_success - n_coll,
        success_slots=n_success,
        collision_slots=n_coll,
        colliding_station_total=int(stations.size - n_success),
    )
    return rec, slots, won


def run_trial(
    policy: BackoffPolicy,
    n: int,
    seed: int,
    *,
    log_stations: bool = False,
    truncate_tail: bool = False,
    safety_cap: int = DEFAULT_SAFETY_CAP,
) -> TrialTrace:
    """Simulate one batch and return its trace.

    With ``truncate_tail`` the CW-slot total stops at the final success slot
    instead of the end of its window.  ``log_stations`` keeps a per-station
    collision count for :func:`count_max_station_collisions`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    remaining = np.arange(n, dtype=np.int64)
    station_collisions = np.zeros(n, dtype=np.int64) if log_stations else None
    windows: list[WindowRecord] = []
    success_chunks: list[np.ndarray] = []
    offset = 0
    collisions = 0
    last_success = 0

    for j, size in enumerate(policy.windows()):
        if offset + size > safety_cap:
            raise SafetyCapExceeded(
                f"{policy.describe()} n={n} seed={seed}: {offset + size} CW slots "
                f"exceeds cap {safety_cap} with {remaining.size} stations left"
            )
        rec, slots, won = resolve_window(seed, j, remaining, size)
        windows.append(rec)
        collisions += rec.collision_slots
        if rec.success_slots:
            pos = np.sort(slots[won])
            success_chunks.append(pos + (offset + 1))
            last_success = offset + int(pos[-1]) + 1
        if station_collisions is not None and rec.colliding_station_total:
            station_collisions[remaining[~won]] += 1
        offset += size
        remaining = remaining[~won]
        if not remaining.size:
            break

    successes = np.concatenate(success_chunks)
    return TrialTrace(
        n=n,
        windows=windows,
        cw_slots_total=last_success if truncate_tail else offset,
        collision_slots_total=collisions,
        success_slot_indices=successes,
        half_done_slot=int(successes[math.ceil(n / 2) - 1]),
        alo_instances=n + collisions,
        policy=policy,
        seed=seed,
        station_collisions=station_collisions,
    )


def count_max_station_collisions(trace: TrialTrace) -> int:
    """Largest number of collision slots any single station took part in."""
    if trace.station_collisions is None:
        raise UnsupportedQuery("trace was recorded without per-station logging (log_stations=True)")
    return int(trace.station_collisions.max())

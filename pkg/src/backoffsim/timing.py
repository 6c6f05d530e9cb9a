"""Microsecond execution-time estimate for a trace on 802.11g-like timing.

Every CW slot costs one slot time.  Every collision slot costs one
transmission delay, a preamble and an ACK timeout, whatever the number of
colliding stations, since their frames overlap on the air.  Every success
costs a transmission delay, a preamble and the ACK turnaround.  DIFS and
propagation delay are not charged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction


@dataclass(frozen=True)
class TimingParams:
    slot_us: int = 9
    sifs_us: int = 16
    difs_us: int = 34
    ack_timeout_us: int = 75
    preamble_us: int = 20
    data_rate_mbps: float = 54
    payload_bytes: int = 64
    overhead_bytes: int = 64
    ack_turnaround_us: int = 34

    def __post_init__(self):
        for name in ("slot_us", "sifs_us", "difs_us", "ack_timeout_us", "preamble_us",
                     "payload_bytes", "overhead_bytes", "ack_turnaround_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.data_rate_mbps > 0:
            raise ValueError("data_rate_mbps must be positive")
        if self.sifs_us >= self.difs_us:
            raise ValueError("SIFS must be shorter than DIFS")

    def with_payload(self, payload_bytes: int) -> "TimingParams":
        return replace(self, payload_bytes=payload_bytes)

    @property
    def tx_delay_us(self) -> int:
        return tx_delay(self)

    @property
    def collision_cost_us(self) -> int:
        return self.tx_delay_us + self.preamble_us + self.ack_timeout_us

    @property
    def success_cost_us(self) -> int:
        return self.tx_delay_us + self.preamble_us + self.ack_turnaround_us


PROFILES = {
    "80211g-default": TimingParams(),
    # legacy-compatible 802.11g: long slot, short SIFS, DIFS = SIFS + 2 slots
    "80211g-compat": TimingParams(slot_us=20, sifs_us=10, difs_us=50),
}


def profile(name: str) -> TimingParams:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown timing profile {name!r}; known: {', '.join(PROFILES)}") from None


def tx_delay(params: TimingParams) -> int:
    """Whole microseconds to clock the packet onto the channel (ceiling)."""
    bits = 8 * (params.payload_bytes + params.overhead_bytes)
    # Fraction keeps e.g. 54 Mbps * 8k us exact
    return math.ceil(Fraction(bits) / Fraction(str(params.data_rate_mbps)))


def execution_time(cw_slots: int, collision_slots: int, successes: int,
                   params: TimingParams = TimingParams()) -> int:
    if min(cw_slots, collision_slots, successes) < 0:
        raise ValueError("counts must be non-negative")
    return (cw_slots * params.slot_us
            + collision_slots * params.collision_cost_us
            + successes * params.success_cost_us)


def execution_time_of_trace(trace, params: TimingParams = TimingParams()) -> int:
    return execution_time(trace.cw_slots_total, trace.collision_slots_total, trace.n, params)

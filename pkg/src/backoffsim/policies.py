"""Windowed backoff policies as deterministic window-size schedules.

A :class:`BackoffPolicy` names an algorithm and its parameters.  A
:class:`WindowSchedule` is an immutable cursor over the infinite sequence of
window sizes that policy produces; :func:`next_window` returns the next size
and the advanced cursor.

Kinds:

``beb``, ``lb``, ``llb``
    Monotone growth ``w <- ceil((1 + f(w)) * w)`` with ``f`` equal to ``1``,
    ``1/lg w`` and ``1/lglg w``.
``stb``
    Sawtooth: run ``r`` starts at ``w0 * 2**r`` and halves down to the floor.
``tstb``
    Truncated sawtooth: each run is cut after ``ceil(lg(c * lg L))`` windows
    and never drops below ``max(floor(L / (c * lg L)), floor)``.
``llb_star``, ``lb_star``
    Each size ``w`` is used ``ceil(lglg(w) / 2)`` (resp. ``ceil(lg(w) / 2)``)
    times, then doubled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterator, Optional


class PolicyError(ValueError):
    """Invalid policy parameters or descriptor."""


class CorruptScheduleError(RuntimeError):
    """A schedule cursor is in a state the public interface cannot produce."""


class Kind(str, enum.Enum):
    BEB = "beb"
    LB = "lb"
    LLB = "llb"
    STB = "stb"
    TSTB = "tstb"
    LLB_STAR = "llb_star"
    LB_STAR = "lb_star"


MONOTONE = frozenset({Kind.BEB, Kind.LB, Kind.LLB})
SAWTOOTH = frozenset({Kind.STB, Kind.TSTB})
STARRED = frozenset({Kind.LLB_STAR, Kind.LB_STAR})

_ALIASES = {"llb*": Kind.LLB_STAR, "lb*": Kind.LB_STAR}


def lg(x: float) -> float:
    return math.log2(x)


def grow(kind: Kind, w: int) -> int:
    """One monotone growth step, ``ceil((1 + f(w)) * w)``.

    Computed as ``w + ceil(w * f(w))`` so the integer part never passes
    through a float product.
    """
    if kind is Kind.BEB:
        return 2 * w
    if kind is Kind.LB:
        return w + math.ceil(w / lg(w))
    if kind is Kind.LLB:
        return w + math.ceil(w / lg(lg(w)))
    raise CorruptScheduleError(f"{kind} is not a monotone kind")


def star_repeats(kind: Kind, w: int) -> int:
    if kind is Kind.LLB_STAR:
        r = math.ceil(0.5 * lg(lg(w)))
    elif kind is Kind.LB_STAR:
        r = math.ceil(0.5 * lg(w))
    else:
        raise CorruptScheduleError(f"{kind} is not a starred kind")
    return max(r, 1)


@dataclass(frozen=True)
class BackoffPolicy:
    kind: Kind
    initial_window: int = 4
    max_window: Optional[int] = None
    truncation_c: float = 1.0
    # smallest window of a sawtooth run; 4 per the run definition, 1 for the
    # variant used in the collision analysis
    floor: int = 4

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.initial_window) != self.initial_window or self.initial_window < 4:
            raise PolicyError(f"initial_window must be an integer >= 4, got {self.initial_window}")
        if self.max_window is not None and self.max_window < self.initial_window:
            raise PolicyError("max_window must be >= initial_window")
        if not self.truncation_c > 0:
            raise PolicyError("truncation_c must be > 0")
        if self.floor < 1:
            raise PolicyError("floor must be >= 1")

    @classmethod
    def parse(cls, descriptor: str) -> "BackoffPolicy":
        """Build a policy from ``"kind:key=value,..."``.

        Keys: ``w0``, ``cap``, ``c``, ``floor``.  Example: ``"tstb:w0=4,c=1.0"``.
        """
        head, _, rest = descriptor.strip().partition(":")
        name = head.strip().lower()
        try:
            kind = _ALIASES.get(name) or Kind(name)
        except ValueError:
            raise PolicyError(f"unknown backoff kind {head!r}") from None
        kwargs = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise PolicyError(f"expected key=value, got {item!r}")
            key = key.strip().lower()
            try:
                if key == "w0":
                    kwargs["initial_window"] = int(value)
                elif key == "cap":
                    kwargs["max_window"] = int(value)
                elif key == "c":
                    kwargs["truncation_c"] = float(value)
                elif key == "floor":
                    kwargs["floor"] = int(value)
                else:
                    raise PolicyError(f"unknown policy key {key!r}")
            except ValueError as exc:
                if isinstance(exc, PolicyError):
                    raise
                raise PolicyError(f"bad value for {key}: {value!r}") from None
        return cls(kind, **kwargs)

    @property
    def name(self) -> str:
        return self.kind.value

    def describe(self) -> str:
        parts = [f"w0={self.initial_window}"]
        if self.max_window is not None:
            parts.append(f"cap={self.max_window}")
        if self.kind is Kind.TSTB:
            parts.append(f"c={self.truncation_c:g}")
        if self.kind in SAWTOOTH and self.floor != 4:
            parts.append(f"floor={self.floor}")
        return f"{self.kind.value}:" + ",".join(parts)

    def schedule(self) -> "WindowSchedule":
        return WindowSchedule(self, current=self.initial_window)

    def windows(self) -> Iterator[int]:
        """Infinite iterator over window sizes."""
        sched = self.schedule()
        while True:
            size, sched = next_window(sched)
            yield size


def stb_run_length(lead: int, floor: int = 4) -> int:
    """Windows in a sawtooth run starting at ``lead`` and halving to ``floor``."""
    k = 1
    while lead >> k >= floor:
        k += 1
    return k


def tstb_run(lead: int, c: float, floor: int = 4) -> tuple[int, int]:
    """(window count, lower clamp) for a truncated sawtooth run."""
    lgl = lg(lead)
    arg = c * lgl
    count = math.ceil(lg(arg)) if arg > 0 else 1
    count = min(max(count, 1), stb_run_length(lead, floor))
    # never above the lead; tiny c degenerates to one window per run (BEB)
    low = min(max(math.floor(lead / arg), floor), lead)
    return count, low


@dataclass(frozen=True)
class WindowSchedule:
    """Immutable cursor into a policy's window sequence.

    ``current`` is the uncapped size of the window about to be emitted for
    monotone and starred kinds; for sawtooth kinds it is the run's leading
    size.  ``step`` is the position inside a run or the repeat counter.
    """

    policy: BackoffPolicy
    current: int
    step: int = 0
    index: int = 0

    def __iter__(self):
        sched = self
        while True:
            size, sched = next_window(sched)
            yield size


def next_window(schedule: WindowSchedule) -> tuple[int, WindowSchedule]:
    p = schedule.policy
    kind = p.kind
    w = schedule.current
    if w < 1 or schedule.step < 0:
        raise CorruptScheduleError(f"invalid cursor {schedule!r}")

    if kind in MONOTONE:
        if schedule.step != 0:
            raise CorruptScheduleError(f"invalid cursor {schedule!r}")
        size = w
        nxt = replace(schedule, current=grow(kind, w), index=schedule.index + 1)
    elif kind in STARRED:
        reps = star_repeats(kind, w)
        if schedule.step >= reps:
            raise CorruptScheduleError(f"invalid cursor {schedule!r}")
        size = w
        if schedule.step + 1 < reps:
            nxt = replace(schedule, step=schedule.step + 1, index=schedule.index + 1)
        else:
            nxt = replace(schedule, current=2 * w, step=0, index=schedule.index + 1)
    elif kind is Kind.STB:
        count = stb_run_length(w, p.floor)
        if schedule.step >= count:
            raise CorruptScheduleError(f"invalid cursor {schedule!r}")
        size = w >> schedule.step
        if schedule.step + 1 < count:
            nxt = replace(schedule, step=schedule.step + 1, index=schedule.index + 1)
        else:
            nxt = replace(schedule, current=2 * w, step=0, index=schedule.index + 1)
    elif kind is Kind.TSTB:
        count, low = tstb_run(w, p.truncation_c, p.floor)
        if schedule.step >= count:
            raise CorruptScheduleError(f"invalid cursor {schedule!r}")
        size = max(w >> schedule.step, low)
        if schedule.step + 1 < count:
            nxt = replace(schedule, step=schedule.step + 1, index=schedule.index + 1)
        else:
            nxt = replace(schedule, current=2 * w, step=0, index=schedule.index + 1)
    else:  # pragma: no cover
        raise CorruptScheduleError(f"unknown kind {kind!r}")

    if p.max_window is not None:
        size = min(size, p.max_window)
    return size, nxt


def first_windows(policy: BackoffPolicy, count: int) -> list[int]:
    out = []
    for size in policy.windows():
        if len(out) == count:
            break
        out.append(size)
    return out

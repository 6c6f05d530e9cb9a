"""Abstract makespan under the unit-cost and collision-delay models.

``makespan = W + C * D`` where ``W`` is CW slots, ``C`` is collision slots
and ``D >= 1`` is charged once per collision slot.  The classic model is
``D = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

LOG2_OF_N = "log2n"


class CostModelError(ValueError):
    pass


@dataclass(frozen=True)
class CostModel:
    kind: str = "classic"
    # float constant, or LOG2_OF_N for D = lg(batch size)
    d_spec: Union[float, str] = 1.0

    def __post_init__(self):
        if self.kind not in ("classic", "extended"):
            raise CostModelError(f"unknown cost model kind {self.kind!r}")
        if self.kind == "classic":
            object.__setattr__(self, "d_spec", 1.0)
        elif self.d_spec != LOG2_OF_N:
            d = float(self.d_spec)
            if not d >= 1:
                raise CostModelError(f"collision delay must be >= 1, got {d}")
            object.__setattr__(self, "d_spec", d)

    @classmethod
    def classic(cls) -> "CostModel":
        return cls("classic")

    @classmethod
    def extended(cls, d: Union[float, str]) -> "CostModel":
        return cls("extended", d)

    @classmethod
    def parse(cls, text: str) -> "CostModel":
        """Accepts ``"classic"``, a number like ``"5.0"``, or ``"log2n"``."""
        t = text.strip().lower()
        if t in ("classic", ""):
            return cls.classic()
        if t.startswith("extended:"):
            t = t.split(":", 1)[1].strip()
        if t in (LOG2_OF_N, "log2_of_n", "lg"):
            return cls.extended(LOG2_OF_N)
        try:
            return cls.extended(float(t))
        except ValueError:
            raise CostModelError(f"cannot parse collision delay {text!r}") from None

    def delay(self, n: int) -> float:
        if self.d_spec == LOG2_OF_N:
            return max(math.log2(n), 1.0)
        return float(self.d_spec)

    def describe(self) -> str:
        if self.kind == "classic":
            return "classic"
        return LOG2_OF_N if self.d_spec == LOG2_OF_N else f"{self.d_spec:g}"


def makespan_of(cw_slots: int, collision_slots: int, n: int, model: CostModel) -> float:
    return cw_slots + collision_slots * model.delay(n)


def makespan(trace, model: CostModel) -> float:
    return makespan_of(trace.cw_slots_total, trace.collision_slots_total, trace.n, model)

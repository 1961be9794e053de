"""Three-valued (plus empirical) verdicts and the tail-trend heuristics.

Finite truncations cannot decide limits.  Conditions that are universally
quantified over a finite window are decided exactly (``Holds``/``Fails``);
limit statements only ever get ``HoldsEmpirically``, ``Fails`` or
``Inconclusive``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import RunConfig, resolve


class Status(str, enum.Enum):
    HOLDS = "Holds"
    HOLDS_EMPIRICALLY = "HoldsEmpirically"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    @property
    def ok(self) -> bool:
        return self in (Status.HOLDS, Status.HOLDS_EMPIRICALLY)


# Fails < Inconclusive < HoldsEmpirically < Holds
_RANK = {Status.FAILS: 0, Status.INCONCLUSIVE: 1,
         Status.HOLDS_EMPIRICALLY: 2, Status.HOLDS: 3}


def weakest(statuses) -> Status:
    """Conjunction of verdict statuses."""
    statuses = list(statuses)
    if not statuses:
        return Status.HOLDS
    return min(statuses, key=_RANK.__getitem__)


@dataclass(frozen=True)
class Verdict:
    condition: str
    status: Status
    witness: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.FAILS and not self.witness:
            raise ValueError(f"{self.condition}: a failing verdict needs a witness")

    @property
    def ok(self) -> bool:
        return self.status.ok

    def to_dict(self) -> dict:
        return {"condition": self.condition, "status": self.status.value,
                "witness": _plain(self.witness), "diagnostics": _plain(self.diagnostics)}


def _plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays and nested containers to JSON-ready values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Verdict):
        return obj.to_dict()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (int, complex)):
        return obj if isinstance(obj, int) else [obj.real, obj.imag]
    return str(obj)


# ---------------------------------------------------------------------------
# tail heuristics

@dataclass(frozen=True)
class TailTrend:
    """Shape summary of the last quarters of a sampled sequence."""

    n: int
    width: int
    slope: float
    last: float
    rise_last: float
    rise_prev: float
    tail_max: float
    pretail_max: float
    monotone_up: bool
    strictly_down: bool

    def to_dict(self) -> dict:
        return {k: _plain(v) for k, v in self.__dict__.items()}


def tail_trend(values, config: RunConfig | None = None) -> TailTrend:
    """Summarize the tail of ``values`` (ordered samples, equally spaced).

    The tail is the last ``ceil(n * tail_fraction)`` samples; ``rise_last`` is
    the increment across the tail and ``rise_prev`` the increment across the
    quarter before it.
    """
    cfg = resolve(config)
    v = np.asarray(values, dtype=float)
    n = v.size
    width = max(2, math.ceil(n * cfg.tail_fraction))
    if n < 2 * width + 1:
        raise ValueError(f"need at least {2 * width + 1} samples for a tail trend, got {n}")
    if not np.all(np.isfinite(v[-(2 * width + 1):])):
        raise ValueError("tail contains non-finite values")
    tail = v[-width:]
    x = np.arange(width, dtype=float)
    slope = float(np.polyfit(x, tail, 1)[0])
    steps = np.diff(v[-(width + 1):])
    ties = np.abs(steps) <= cfg.tol
    strictly_down = bool(np.all(steps <= cfg.tol) and not np.any(ties[1:] & ties[:-1]))
    return TailTrend(
        n=n, width=width, slope=slope, last=float(v[-1]),
        rise_last=float(v[-1] - v[-1 - width]),
        rise_prev=float(v[-1 - width] - v[-1 - 2 * width]),
        tail_max=float(tail.max()), pretail_max=float(v[:-width].max()),
        monotone_up=bool(np.all(steps >= -cfg.tol)),
        strictly_down=strictly_down,
    )


def bounded_above(values, config: RunConfig | None = None) -> tuple[Status, TailTrend]:
    """Evidence that a sampled sequence stays bounded above.

    Fails when the tail rises monotonically without decelerating (a rise
    pattern no faster than logarithmic divergence); holds when the tail sets
    no record beyond ``delta`` and neither its rise nor its fitted trend over
    the tail reaches ``delta``.
    """
    cfg = resolve(config)
    tr = tail_trend(values, cfg)
    if tr.monotone_up and tr.rise_last > cfg.tol and tr.rise_prev < cfg.decel * tr.rise_last:
        return Status.FAILS, tr
    if (tr.tail_max <= tr.pretail_max + cfg.delta and tr.rise_last < cfg.delta
            and tr.slope * (tr.width - 1) < cfg.delta):
        return Status.HOLDS_EMPIRICALLY, tr
    return Status.INCONCLUSIVE, tr


def tends_to_minus_infinity(values, config: RunConfig | None = None) -> tuple[Status, TailTrend]:
    """Evidence that a sampled sequence decreases to minus infinity.

    Holds when the tail decreases strictly and either drops by at least
    ``delta`` or does not decelerate; fails when the tail stops decreasing or
    visibly levels off.
    """
    cfg = resolve(config)
    tr = tail_trend(values, cfg)
    drop_last, drop_prev = -tr.rise_last, -tr.rise_prev
    if tr.strictly_down and (drop_last >= cfg.delta or drop_prev < cfg.decel * drop_last):
        return Status.HOLDS_EMPIRICALLY, tr
    if drop_last <= cfg.tol or (drop_prev >= cfg.decel * drop_last and drop_last < cfg.delta):
        return Status.FAILS, tr
    return Status.INCONCLUSIVE, tr

"""Inclusion relations between weight sequences on truncations.

``M ≼ N`` iff ``(M_k/N_k)**(1/k)`` is bounded, ``M ⊲ N`` iff it tends to 0 and
``M ≈ N`` iff ``≼`` holds both ways.  All three are asymptotic, so the verdicts
are tail heuristics on the gap sequence ``g_k = (log M_k - log N_k)/k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig, resolve
from .seqcore import WeightSequence
from .verdict import Status, TailTrend, Verdict, bounded_above, tends_to_minus_infinity, weakest

RELATIONS = ("preceq", "lhd", "approx")
MIN_WINDOW = 8


@dataclass(frozen=True)
class RelationVerdict:
    relation: str
    verdict: Verdict
    gap: np.ndarray  # gap[k] for k = 0..K, nan at 0
    tail_slope: float

    @property
    def status(self) -> Status:
        return self.verdict.status

    @property
    def ok(self) -> bool:
        return self.verdict.ok

    def to_dict(self) -> dict:
        return {"relation": self.relation, "verdict": self.verdict.to_dict(),
                "tail_slope": self.tail_slope, "gap_last": float(self.gap[-1]),
                "window": int(self.gap.size - 1)}


def as_log_array(x) -> np.ndarray:
    """Log-values of a sequence given as a WeightSequence or as log-values."""
    if isinstance(x, WeightSequence):
        return x.logM
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional sequence of log-values")
    return arr


def gap_sequence(M, N) -> np.ndarray:
    a, b = as_log_array(M), as_log_array(N)
    K = min(a.size, b.size) - 1
    if K < MIN_WINDOW:
        raise ValueError(f"common window K={K} is shorter than {MIN_WINDOW}")
    k = np.arange(K + 1, dtype=float)
    g = np.full(K + 1, np.nan)
    g[1:] = (a[1:K + 1] - b[1:K + 1]) / k[1:]
    return g


def _preceq(g, cfg) -> tuple[Verdict, TailTrend]:
    status, tr = bounded_above(g[1:], cfg)
    diag = {"trend": tr, "sup_gap": float(np.max(g[1:]))}
    if status is Status.FAILS:
        w = {"k": g.size - 1, "lhs": tr.last, "rhs": tr.pretail_max,
             "meaning": "gap keeps rising without deceleration (opposite trend)"}
        return Verdict("preceq", status, w, diag), tr
    return Verdict("preceq", status, None, diag), tr


def _lhd(g, cfg) -> tuple[Verdict, TailTrend]:
    status, tr = tends_to_minus_infinity(g[1:], cfg)
    diag = {"trend": tr}
    if status is Status.FAILS:
        K = g.size - 1
        w = {"k": K, "lhs": tr.last, "rhs": float(g[K - tr.width]) - cfg.delta,
             "meaning": "gap levels off or rises instead of tending to -inf"}
        return Verdict("lhd", status, w, diag), tr
    return Verdict("lhd", status, None, diag), tr


def compare(M, N, relation: str, config: RunConfig | None = None) -> RelationVerdict:
    """Evidence for ``M relation N`` on the common window."""
    cfg = resolve(config)
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    g = gap_sequence(M, N)
    if relation == "preceq":
        v, tr = _preceq(g, cfg)
    elif relation == "lhd":
        v, tr = _lhd(g, cfg)
    else:
        fwd, tr = _preceq(g, cfg)
        back, _ = _preceq(-g, cfg)
        status = weakest([fwd.status, back.status])
        witness = None
        if status is Status.FAILS:
            witness = dict((fwd if fwd.status is Status.FAILS else back).witness)
            witness["direction"] = "M<=N" if fwd.status is Status.FAILS else "N<=M"
        v = Verdict("approx", status, witness,
                    {"forward": fwd.status.value, "backward": back.status.value, "trend": tr})
    v.diagnostics["thresholds"] = {"tail_fraction": cfg.tail_fraction, "delta": cfg.delta,
                                   "decel": cfg.decel, "tol": cfg.tol}
    g.setflags(write=False)
    return RelationVerdict(relation, v, g, tr.slope)

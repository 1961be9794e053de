"""Weight functions, their Young conjugate and the associated weight matrix.

Everything is expressed through ``phi(s) = omega(exp(s))`` on ``s >= 0``.
The conjugate ``phi*(y) = sup_{s>=0} (s y - phi(s))`` is computed by one
monotone sweep over an s-grid (the maximizer is nondecreasing in ``y``),
followed by a local bounded refinement for the parametric families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .config import RunConfig, resolve
from .matrices import WeightMatrix
from .seqcore import WeightSequence
from .verdict import Status, Verdict, bounded_above, tail_trend

FAMILIES = ("power", "log-power", "table")
MIN_GRID = 64


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """``omega`` given parametrically or by samples.

    ``power``: ``t**a`` with ``0 < a <= 1``; ``log-power``: ``max(0, log t)**beta``
    with ``beta > 1``; ``table``: samples ``(t, omega(t))`` with ``t > 0``,
    interpolated linearly in ``log t``.  ``t_max`` caps all numerical work.
    """

    family: str
    params: dict
    t_max: float = 1e30

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight-function family {self.family!r}")
        if not self.t_max > 1:
            raise ValueError("t_max must exceed 1")
        p = dict(self.params)
        if self.family == "power":
            a = float(p["a"])
            if not 0 < a <= 1:
                raise ValueError(f"power exponent must satisfy 0 < a <= 1, got {a}")
        elif self.family == "log-power":
            b = float(p["beta"])
            if not b > 1:
                raise ValueError(f"log-power exponent must satisfy beta > 1, got {b}")
        else:
            t = np.asarray(p["t"], dtype=float)
            w = np.asarray(p["omega"], dtype=float)
            if t.shape != w.shape or t.ndim != 1 or t.size < 2:
                raise ValueError("table needs matching one-dimensional t and omega samples")
            if np.any(t <= 0) or np.any(np.diff(t) <= 0):
                raise ValueError("table t samples must be positive and strictly increasing")
            if np.any(w < 0) or np.any(np.diff(w) < 0):
                raise ValueError("table omega samples must be nonnegative and nondecreasing")
            p = {"t": t, "omega": w}
        object.__setattr__(self, "params", p)

    @classmethod
    def power(cls, a: float, t_max: float = 1e30) -> "WeightFunction":
        return cls("power", {"a": a}, t_max)

    @classmethod
    def log_power(cls, beta: float, t_max: float = 1e30) -> "WeightFunction":
        return cls("log-power", {"beta": beta}, t_max)

    @classmethod
    def table(cls, t, omega, t_max: float | None = None) -> "WeightFunction":
        t = np.asarray(t, dtype=float)
        return cls("table", {"t": t, "omega": omega}, float(t[-1]) if t_max is None else t_max)

    @property
    def s_max(self) -> float:
        if self.family == "table":
            return float(min(math.log(self.t_max), math.log(self.params["t"][-1])))
        return math.log(self.t_max)

    @property
    def parametric(self) -> bool:
        return self.family != "table"

    def phi(self, s):
        """``omega(exp(s))``, evaluated without forming ``exp(s)`` where possible."""
        s = np.asarray(s, dtype=float)
        if self.family == "power":
            return np.exp(self.params["a"] * s)
        if self.family == "log-power":
            return np.maximum(s, 0.0) ** self.params["beta"]
        logt = np.log(self.params["t"])
        return np.interp(s, logt, self.params["omega"])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            s = np.log(t)
        out = np.where(t > 0, self.phi(np.where(t > 0, s, 0.0)), 0.0)
        if self.family == "power":
            out = np.where(t > 0, out, 0.0)
        return out

    def to_dict(self) -> dict:
        params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        return {"family": self.family, "params": params, "t_max": self.t_max}


# ---------------------------------------------------------------------------
# axioms

def _grid(w: WeightFunction, points: int) -> np.ndarray:
    if w.family == "table":
        return np.asarray(w.params["t"], dtype=float)
    return np.exp(np.linspace(0.0, w.s_max, points))


def check_omega(w: WeightFunction, points: int = 512, concave_from: float = 0.0,
                config: RunConfig | None = None, literal_beta: bool = False) -> dict[str, Verdict]:
    """Axiom and hypothesis evidence on a sampled grid up to ``t_max``.

    Returns verdicts for ``alpha`` (``omega(2t) = O(omega(t))``), ``beta``
    (``log t = o(omega(t))``; with ``literal_beta`` the literal
    ``omega(t) = o(log t)`` instead), ``gamma`` (convexity of ``phi``),
    ``concave`` (concavity of ``omega`` on ``t >= concave_from``) and
    ``o(t)`` (``omega(t)/t -> 0``).
    """
    cfg = resolve(config)
    t = _grid(w, points)
    if t.size < MIN_GRID:
        raise ValueError(f"grid too coarse: {t.size} < {MIN_GRID} points")
    om = w(t)
    out: dict[str, Verdict] = {}

    # (alpha) on points where omega(t) > 0 and 2t stays inside the grid
    sel = (om > 0) & (2 * t <= t[-1])
    ratio = w(2 * t[sel]) / om[sel]
    st, tr = bounded_above(ratio, cfg)
    diag = {"sup_ratio": float(ratio.max()), "tail_sup_ratio": float(ratio[-tr.width:].max()), "trend": tr}
    out["alpha"] = _limit_verdict("alpha", st, tr, diag, "omega(2t)/omega(t) keeps growing")

    # (beta)
    sel = t > math.e
    q = om[sel] / np.log(t[sel])
    if literal_beta:
        st, tr = _tends_to_zero(q, cfg)
        out["beta"] = _limit_verdict("beta (literal: omega = o(log t))", st, tr, {"trend": tr},
                                     "omega(t)/log t does not decay")
    else:
        st, tr = _tends_to_infinity(q, cfg)
        out["beta"] = _limit_verdict("beta (log t = o(omega))", st, tr, {"trend": tr},
                                     "omega(t)/log t does not grow")

    # (gamma): convexity of phi on the log-grid (second divided differences)
    s = np.log(t)
    out["gamma"] = _convexity("gamma: phi convex", s, w.phi(s), +1, cfg.tol)

    # concavity of omega
    sel = t >= concave_from
    out["concave"] = _convexity("omega concave", t[sel], om[sel], -1, cfg.tol,
                                extra={"from": concave_from})

    # omega(t) = o(t)
    st, tr = _tends_to_zero(om / t, cfg)
    out["o(t)"] = _limit_verdict("omega(t) = o(t)", st, tr, {"trend": tr, "last_ratio": float(om[-1] / t[-1])},
                                 "omega(t)/t does not decay")
    return out


def _limit_verdict(name, st, tr, diag, meaning):
    if st is Status.FAILS:
        return Verdict(name, st, {"k": tr.n - 1, "lhs": tr.last, "rhs": tr.pretail_max,
                                  "meaning": meaning}, diag)
    return Verdict(name, st, None, diag)


def _tends_to_infinity(values, cfg):
    """Divergence evidence: a monotone rise that does not decelerate."""
    v = np.asarray(values, dtype=float)
    tr = tail_trend(v, cfg)
    if tr.monotone_up and tr.rise_last > cfg.tol and tr.rise_prev < cfg.decel * tr.rise_last:
        return Status.HOLDS_EMPIRICALLY, tr
    st, _ = bounded_above(v, cfg)
    if st is Status.HOLDS_EMPIRICALLY:
        return Status.FAILS, tr
    return Status.INCONCLUSIVE, tr


def _tends_to_zero(values, cfg):
    v = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        lv = np.log(v)
    if np.all(v[-3:] == 0):
        return Status.HOLDS_EMPIRICALLY, tail_trend(np.zeros_like(v), cfg)
    tr = tail_trend(lv, cfg)
    if tr.strictly_down and -tr.rise_last >= cfg.delta:
        return Status.HOLDS_EMPIRICALLY, tr
    if -tr.rise_last <= cfg.tol:
        return Status.FAILS, tr
    return Status.INCONCLUSIVE, tr


def _convexity(name, x, y, sign, tol, extra=None):
    """sign=+1: convex, sign=-1: concave; exact on the samples."""
    if x.size < 3:
        return Verdict(name, Status.INCONCLUSIVE, None, {"reason": "fewer than 3 samples"})
    d1 = np.diff(y) / np.diff(x)
    d2 = sign * np.diff(d1)
    scale = np.maximum(1.0, np.abs(d1[:-1]) + np.abs(d1[1:]))
    bad = np.flatnonzero(d2 < -tol * scale)
    diag = dict(extra or {})
    if bad.size:
        i = int(bad[0])
        return Verdict(name, Status.FAILS, {"k": i + 1, "x": float(x[i + 1]),
                                            "lhs": float(d1[i]), "rhs": float(d1[i + 1])}, diag)
    return Verdict(name, Status.HOLDS, None, diag)


# ---------------------------------------------------------------------------
# conjugate

@dataclass(frozen=True)
class ConjugateTable:
    y: np.ndarray
    value: np.ndarray
    argmax: np.ndarray
    interior: np.ndarray

    def to_dict(self) -> dict:
        return {"y": self.y.tolist(), "phi_star": self.value.tolist(),
                "argmax_s": self.argmax.tolist(), "interior": self.interior.tolist()}


def s_grid(w: WeightFunction, points: int = 4096) -> np.ndarray:
    """Geometric grid on ``[0, s_max]`` (plus the origin) or the table nodes."""
    if w.family == "table":
        return np.log(np.asarray(w.params["t"], dtype=float))
    s_max = w.s_max
    g = np.geomspace(s_max * 1e-6, s_max, points - 1)
    return np.concatenate(([0.0], g))


def conjugate_at(w: WeightFunction, y, points: int = 4096) -> ConjugateTable:
    """``phi*(y)`` at sorted nonnegative ``y`` values."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or np.any(y < 0) or np.any(np.diff(y) < 0):
        raise ValueError("y must be a nondecreasing array of nonnegative values")
    s = s_grid(w, points)
    if s[0] < 0:  # table with t < 1: restrict to s >= 0
        keep = s >= 0
        s = np.concatenate(([0.0], s[keep])) if s[keep][0] > 0 else s[keep]
    phi = w.phi(s)
    n = s.size
    idx = np.empty(y.size, dtype=int)
    i = 0
    for m, yy in enumerate(y):
        # concave objective in s: advance while it does not decrease
        while i + 1 < n and s[i + 1] * yy - phi[i + 1] >= s[i] * yy - phi[i]:
            i += 1
        idx[m] = i
    value = s[idx] * y - phi[idx]
    argmax = s[idx].copy()
    if w.parametric:
        for m, yy in enumerate(y):
            j = idx[m]
            lo, hi = s[max(j - 1, 0)], s[min(j + 1, n - 1)]
            if hi > lo:
                res = minimize_scalar(lambda x: float(w.phi(x)) - x * yy, bounds=(lo, hi),
                                      method="bounded", options={"xatol": 1e-13})
                cand = -float(res.fun)
                if cand > value[m]:
                    value[m], argmax[m] = cand, float(res.x)
    # the right end of the grid is a truncation; the left end s = 0 is the true boundary
    interior = idx < n - 1
    return ConjugateTable(y, value, argmax, interior)


def conjugate(w: WeightFunction, y_max: float, points: int = 1024, s_points: int = 4096) -> ConjugateTable:
    """Conjugate table on ``points`` equally spaced ``y`` in ``[0, y_max]``."""
    if not y_max > 0:
        raise ValueError("y_max must be positive")
    return conjugate_at(w, np.linspace(0.0, y_max, points), s_points)


def biconjugate(table: ConjugateTable, s) -> np.ndarray:
    """``sup_y (s y - phi*(y))`` over the table, at the given ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    ok = table.interior
    y, v = table.y[ok], table.value[ok]
    return np.max(s[:, None] * y[None, :] - v[None, :], axis=1)


def associated_matrix(w: WeightFunction, lambdas=None, K: int = 128,
                      config: RunConfig | None = None, s_points: int = 4096) -> WeightMatrix:
    """Weight matrix ``log W^lam_k = (phi*(lam k) - phi*(0)) / lam``."""
    cfg = resolve(config)
    lambdas = sorted(float(x) for x in (cfg.lambdas if lambdas is None else lambdas))
    if not lambdas or lambdas[0] <= 0:
        raise ValueError("lambdas must be positive")
    k = np.arange(K + 1, dtype=float)
    entries = []
    for lam in lambdas:
        tab = conjugate_at(w, lam * k, s_points)
        if not np.all(tab.interior):
            bad = int(np.flatnonzero(~tab.interior)[0])
            raise ValueError(f"conjugate maximizer escapes the s-grid at y={tab.y[bad]:g} "
                             f"(lambda={lam:g}, k={bad}); increase t_max")
        logW = (tab.value - tab.value[0]) / lam
        entries.append((lam, WeightSequence(f"W^{lam:g}", logW)))
    return WeightMatrix(tuple(entries))

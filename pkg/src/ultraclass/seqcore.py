"""Weight sequences stored in log-space, their derived views and condition checks.

A sequence ``M = (M_k)_{k=0..K}`` is kept as ``logM[k] = log M_k``; powers such
as ``q**(k**2)`` overflow double precision near ``k = 30`` otherwise.  The
derived views are index-aligned arrays of length ``K + 1`` with ``nan`` where
the view is undefined (``k = 0`` for mu, Lambda and Theta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .config import RunConfig, resolve
from .verdict import Status, Verdict, bounded_above

__all__ = [
    "WeightSequence", "DerivedViews", "CONDITIONS", "build_family", "parse_family",
    "from_values", "derived", "check_condition", "check_lemma_chain", "stirling_chain",
    "log_factorial",
]

MIN_K = 8


def log_factorial(k) -> np.ndarray:
    return gammaln(np.asarray(k, dtype=float) + 1.0)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Truncated sequence ``M_0..M_K`` with ``M_0 = 1 <= M_1``.

    Log-convexity and the other structural conditions are *checked*
    (:func:`check_condition`), not enforced, so that the outputs of the
    regularizing transforms can be represented as well.
    """

    name: str
    logM: np.ndarray

    def __post_init__(self):
        arr = np.array(self.logM, dtype=float)
        if arr.ndim != 1:
            raise ValueError("logM must be one-dimensional")
        if arr.size - 1 < MIN_K:
            raise ValueError(f"truncation order K={arr.size - 1} is below the minimum {MIN_K}")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"logM[{bad}] is not finite")
        if abs(arr[0]) > 1e-12:
            raise ValueError(f"logM[0] must be 0 (M_0 = 1), got {arr[0]!r}")
        if arr[1] < -1e-12:
            raise ValueError(f"logM[1] must be >= 0 (M_1 >= 1), got {arr[1]!r}")
        arr[0] = 0.0
        arr.setflags(write=False)
        object.__setattr__(self, "logM", arr)

    @property
    def K(self) -> int:
        return self.logM.size - 1

    def truncate(self, K: int) -> "WeightSequence":
        if K > self.K:
            raise ValueError(f"cannot extend a window of K={self.K} to K={K}")
        return WeightSequence(self.name, self.logM[: K + 1])

    @cached_property
    def views(self) -> "DerivedViews":
        return derived(self)

    def __repr__(self) -> str:
        return f"WeightSequence({self.name!r}, K={self.K})"


def from_values(name: str, values) -> WeightSequence:
    """Build from plain (positive) values ``M_k``."""
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0):
        raise ValueError("sequence values must be positive")
    return WeightSequence(name, np.log(vals))


# ---------------------------------------------------------------------------
# named families

def build_family(family: str, K: int = 128, **params) -> WeightSequence:
    """Named weight sequences.

    ``gevrey(s)``: ``(k!)**s``; ``bridge(s, sigma)``: ``(k!)**s log(k+e)**(sigma k)``;
    ``lqr(q, r)``: ``q**(k**r)``; ``qgevrey(q)``: ``q**(k**2)``.
    """
    if K < MIN_K:
        raise ValueError(f"K must be >= {MIN_K}, got {K}")
    k = np.arange(K + 1, dtype=float)
    if family == "gevrey":
        s = float(params["s"])
        _require(s >= 1, "s >= 1", s)
        logM = s * log_factorial(k)
        name = f"gevrey:{s:g}"
    elif family == "bridge":
        s, sigma = float(params["s"]), float(params["sigma"])
        _require(s >= 1, "s >= 1", s)
        _require(sigma > 0, "sigma > 0", sigma)
        logM = s * log_factorial(k) + sigma * k * np.log(np.log(k + math.e))
        name = f"bridge:{s:g}:{sigma:g}"
    elif family in ("lqr", "qgevrey"):
        q = float(params["q"])
        r = 2.0 if family == "qgevrey" else float(params["r"])
        _require(q > 1, "q > 1", q)
        _require(r > 1, "r > 1", r)
        logM = k ** r * math.log(q)
        name = f"qgevrey:{q:g}" if family == "qgevrey" else f"lqr:{q:g}:{r:g}"
    else:
        raise ValueError(f"unknown family {family!r}")
    logM[0] = 0.0
    return WeightSequence(name, logM)


def _require(ok: bool, bound: str, value: float) -> None:
    if not ok:
        raise ValueError(f"parameter out of range: need {bound}, got {value!r}")


_FAMILY_PARAMS = {"gevrey": ("s",), "bridge": ("s", "sigma"), "lqr": ("q", "r"), "qgevrey": ("q",)}


def parse_family(text: str, K: int = 128) -> WeightSequence:
    """Parse the ``name:params`` mini-language, e.g. ``gevrey:2`` or ``lqr:2:1.5``."""
    name, *args = text.strip().split(":")
    if name not in _FAMILY_PARAMS:
        raise ValueError(f"unknown family {name!r}")
    keys = _FAMILY_PARAMS[name]
    if len(args) != len(keys):
        raise ValueError(f"family {name!r} takes {len(keys)} parameter(s): {':'.join(keys)}")
    return build_family(name, K, **{k: float(a) for k, a in zip(keys, args)})


# ---------------------------------------------------------------------------
# derived sequences

@dataclass(frozen=True)
class DerivedViews:
    logm: np.ndarray
    logmu: np.ndarray
    logLambda: np.ndarray
    logTheta: np.ndarray

    @property
    def logroot(self) -> np.ndarray:
        """``log m_k**(1/k)`` (nan at ``k = 0``)."""
        k = np.arange(self.logm.size, dtype=float)
        out = np.full_like(self.logm, np.nan)
        out[1:] = self.logm[1:] / k[1:]
        return out


def derived(M: WeightSequence) -> DerivedViews:
    logM = M.logM
    k = np.arange(logM.size, dtype=float)
    logm = logM - log_factorial(k)
    logmu = np.full_like(logM, np.nan)
    logmu[1:] = np.diff(logM)
    logLambda = np.full_like(logM, np.nan)
    logLambda[1:] = logM[1:] / k[1:]
    logTheta = np.full_like(logM, np.nan)
    logTheta[1:] = np.log(k[1:]) + logm[1:] / k[1:]
    for arr in (logm, logmu, logLambda, logTheta):
        arr.setflags(write=False)
    return DerivedViews(logm, logmu, logLambda, logTheta)


# ---------------------------------------------------------------------------
# condition checks

CONDITIONS = (
    "weak-log-convex", "strong-log-convex", "M0", "M1", "M2prime", "M2",
    "strongConcl", "non-quasianalytic", "almost-increasing", "derivation-closed-in-m",
)


def _first_violation(lhs, rhs, tol, offset=0):
    """First index where ``lhs <= rhs`` fails by more than ``tol``."""
    bad = np.flatnonzero(lhs > rhs + tol)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return {"k": i + offset, "lhs": float(lhs[i]), "rhs": float(rhs[i])}


def _pointwise(name, lhs, rhs, tol, offset, **diag):
    w = _first_violation(lhs, rhs, tol, offset)
    if w is None:
        return Verdict(name, Status.HOLDS, None, diag)
    return Verdict(name, Status.FAILS, w, diag)


def _log_convex(name, logs, tol):
    # logs[k]^2 <= logs[k-1] logs[k+1], k = 1..K-1
    return _pointwise(name, 2 * logs[1:-1], logs[:-2] + logs[2:], tol, 1)


def _superadditive(name, logs, tol):
    """``x_j + x_k <= x_{j+k}`` for all ``j + k <= K``."""
    K = logs.size - 1
    j, k = np.triu_indices(K + 1)
    keep = j + k <= K
    j, k = j[keep], k[keep]
    lhs = logs[j] + logs[k]
    rhs = logs[j + k]
    bad = np.flatnonzero(lhs > rhs + tol)
    if bad.size == 0:
        return Verdict(name, Status.HOLDS)
    i = bad[np.argmin(j[bad] + k[bad])]
    return Verdict(name, Status.FAILS, {"j": int(j[i]), "k": int(k[i]),
                                        "lhs": float(lhs[i]), "rhs": float(rhs[i])})


def _constant_bearing(name, req, cfg, witness_extra=None):
    """Shared logic for ``X_{k+1} <= gamma**(k+1) Y_k``-type conditions.

    ``req[k]`` is the per-index requirement on ``log gamma``.  The minimal
    empirical constant over the window is always reported; the verdict is the
    boundedness evidence for the requirement sequence.
    """
    status, trend = bounded_above(req, cfg)
    k_star = int(np.argmax(req))
    diag = {"gamma_hat": float(math.exp(req.max())), "log_gamma_hat": float(req.max()),
            "argmax_k": k_star, "trend": trend}
    if status is Status.FAILS:
        w = {"k": int(req.size - 1), "lhs": float(req[-1]), "rhs": float(trend.pretail_max),
             "meaning": "per-index requirement on log(gamma) keeps growing; rhs is the "
                        "largest requirement before the tail"}
        if witness_extra:
            w.update(witness_extra)
        return Verdict(name, Status.FAILS, w, diag)
    return Verdict(name, status, None, diag)


def check_condition(M: WeightSequence, cond: str, config: RunConfig | None = None,
                    C: float | None = None) -> Verdict:
    """Decide (or gather evidence for) one structural condition on the window.

    ``C`` is only used by ``almost-increasing``: when given, the condition
    fails if the empirical constant exceeds it.
    """
    cfg = resolve(config)
    tol = cfg.tol
    v = M.views
    logM, logm = M.logM, v.logm
    K = M.K
    k = np.arange(K + 1, dtype=float)

    if cond == "weak-log-convex":
        return _log_convex(cond, logM, tol)
    if cond == "strong-log-convex":
        return _log_convex(cond, logm, tol)
    if cond == "M1":
        root = v.logroot[1:]
        return _pointwise(cond, root[:-1], root[1:], tol, 1,
                          note="nondecreasing reading of 'increasing'")
    if cond == "strongConcl":
        return _superadditive(cond, logm, tol)
    if cond == "almost-increasing":
        root = v.logroot[1:]
        prefix = np.maximum.accumulate(root)
        excess = prefix - root
        i = int(np.argmax(excess))
        c_hat = float(math.exp(excess[i]))
        diag = {"C_hat": c_hat, "log_C_hat": float(excess[i]), "argmax_k": i + 1,
                "argmax_j": int(np.argmax(root[: i + 1])) + 1}
        if C is not None and excess[i] > math.log(C) + tol:
            return Verdict(cond, Status.FAILS,
                           {"k": i + 1, "lhs": float(excess[i]), "rhs": math.log(C),
                            "meaning": "log of max_{j<=k} root_j/root_k versus log C"}, diag)
        return Verdict(cond, Status.HOLDS, None, diag)
    if cond == "M2prime":
        return _constant_bearing(cond, np.diff(logM) / (k[:-1] + 1), cfg)
    if cond == "derivation-closed-in-m":
        return _constant_bearing(cond, np.diff(logm) / (k[:-1] + 1), cfg)
    if cond == "M2":
        req, jstar = _m2_requirement(logM)
        return _constant_bearing(cond, req, cfg, {"j": int(jstar[-1]), "k_pair": int(K - jstar[-1])})
    if cond == "M0":
        r = v.logroot[1:]
        log_theta = math.log(cfg.theta)
        status, trend = bounded_above(r, cfg)
        diag = {"last": float(r[-1]), "log_theta": log_theta, "trend": trend}
        if trend.monotone_up and r[-1] > log_theta:
            return Verdict(cond, Status.HOLDS_EMPIRICALLY, None, diag)
        if r[-1] <= log_theta and status is Status.HOLDS_EMPIRICALLY:
            return Verdict(cond, Status.FAILS, {"k": K, "lhs": float(r[-1]), "rhs": log_theta,
                                                "meaning": "log m_K/K versus log theta; tail bounded"}, diag)
        return Verdict(cond, Status.INCONCLUSIVE, None, diag)
    if cond == "non-quasianalytic":
        terms = np.exp(-np.diff(logM))  # M_{k-1}/M_k, k = 1..K
        partial = np.cumsum(terms)
        status, trend = bounded_above(partial, cfg)
        diag = {"partial_sum": float(partial[-1]), "last_term": float(terms[-1]), "trend": trend}
        if status is Status.FAILS:
            return Verdict(cond, Status.FAILS, {"k": K, "lhs": float(partial[-1]),
                                                "rhs": float(partial[-1 - trend.width]),
                                                "meaning": "partial sums keep growing without deceleration"},
                           diag)
        return Verdict(cond, status, None, diag)
    raise ValueError(f"unknown condition tag {cond!r}; expected one of {CONDITIONS}")


def _m2_requirement(logM):
    """``max_{j+k=n} (logM[n] - logM[j] - logM[k]) / (n+1)`` and its argmax ``j``."""
    K = logM.size - 1
    n = np.arange(K + 1)
    j = np.arange(K + 1)
    J, N = np.meshgrid(j, n)
    valid = J <= N
    excess = np.where(valid, logM[N] - logM[J] - logM[np.where(valid, N - J, 0)], -np.inf)
    jstar = np.argmax(excess, axis=1)
    return excess[n, jstar] / (n + 1), jstar


# ---------------------------------------------------------------------------
# lemma chain

def check_lemma_chain(M: WeightSequence, config: RunConfig | None = None) -> dict[str, Verdict]:
    """Items (a)-(d) for weight sequences and the conditional items (e)-(g).

    (a) ``M_j M_k <= M_{j+k}``; (b) ``Lambda`` increasing; (c) ``mu`` increasing;
    (d) ``Lambda_k <= mu_k``; (e) ``Theta_k + 1 <= Theta_{k+1}`` if (M1) holds;
    (f) ``mu_k + 1 <= mu_{k+1}`` if strongly log-convex; (g) ``k! <= M_k`` if (M1) holds.
    """
    cfg = resolve(config)
    tol = cfg.tol
    v = M.views
    K = M.K
    k = np.arange(K + 1, dtype=float)
    out = {
        "a": _superadditive("a: M_j M_k <= M_{j+k}", M.logM, tol),
        "b": _pointwise("b: Lambda increasing", v.logLambda[1:-1], v.logLambda[2:], tol, 1),
        "c": _pointwise("c: mu increasing", v.logmu[1:-1], v.logmu[2:], tol, 1),
        "d": _pointwise("d: Lambda_k <= mu_k", v.logLambda[1:], v.logmu[1:], tol, 1),
    }
    m1 = check_condition(M, "M1", cfg)
    slc = check_condition(M, "strong-log-convex", cfg)
    if m1.status is Status.HOLDS:
        out["e"] = _pointwise("e: Theta_k + 1 <= Theta_{k+1}",
                              np.logaddexp(v.logTheta[1:-1], 0.0), v.logTheta[2:], tol, 1)
        out["g"] = _pointwise("g: k! <= M_k", log_factorial(k), M.logM, tol, 0)
    else:
        for key, name in (("e", "e: Theta_k + 1 <= Theta_{k+1}"), ("g", "g: k! <= M_k")):
            out[key] = Verdict(name, Status.INCONCLUSIVE, None, {"precondition": "M1 does not hold"})
    if slc.status is Status.HOLDS:
        out["f"] = _pointwise("f: mu_k + 1 <= mu_{k+1}",
                              np.logaddexp(v.logmu[1:-1], 0.0), v.logmu[2:], tol, 1)
    else:
        out["f"] = Verdict("f: mu_k + 1 <= mu_{k+1}", Status.INCONCLUSIVE, None,
                           {"precondition": "strong log-convexity does not hold"})
    return out


def stirling_chain(kmax: int, config: RunConfig | None = None) -> Verdict:
    """``1/e <= k/(e (k!)^(1/k)) <= (2 pi k)^(-1/(2k)) <= 1`` for ``1 <= k <= kmax``."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    tol = resolve(config).tol
    k = np.arange(1, kmax + 1, dtype=float)
    lower = np.full_like(k, -1.0)
    middle = np.log(k) - 1.0 - log_factorial(k) / k
    upper = -np.log(2 * np.pi * k) / (2 * k)
    for lhs, rhs, label in ((lower, middle, "1/e <= middle"),
                            (middle, upper, "middle <= (2 pi k)^(-1/2k)"),
                            (upper, np.zeros_like(k), "(2 pi k)^(-1/2k) <= 1")):
        w = _first_violation(lhs, rhs, tol, 1)
        if w is not None:
            w["inequality"] = label
            return Verdict("stirling-chain", Status.FAILS, w, {"kmax": kmax})
    return Verdict("stirling-chain", Status.HOLDS, None,
                   {"kmax": kmax, "min_gap_middle_upper": float(np.min(upper - middle))})

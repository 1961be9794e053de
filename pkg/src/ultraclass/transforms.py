"""Constructive sequence transforms.

* :func:`concave_envelope` - least concave majorant of ``(k, a_k)`` samples.
* :func:`komatsu_lift` - given ``L ⊲ M``, an interpolating ``L <= N ⊲ M`` whose
  roots ``n_k**(1/k)`` are nondecreasing.
* :func:`regularize_almost_increasing` - replaces an almost increasing root
  sequence by a genuinely nondecreasing one via suffix minima.
* :func:`dominating_sequence` - the max of ``k!``, coefficient sup-norms and
  iterate norms used to reduce Beurling statements to Roumieu ones.
* :func:`equalize_orders` - powers that bring a system to a common order.

Outputs are not required to be log-convex; each carries an ``axioms``
sub-report instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, resolve
from .relations import as_log_array, compare
from .seqcore import WeightSequence, check_condition, log_factorial
from .verdict import Status, Verdict


class PreconditionError(ValueError):
    """A transform's hypothesis is not evidenced; ``report`` holds the diagnostics."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# concave envelope

@dataclass(frozen=True)
class EnvelopePoints:
    k: np.ndarray
    a: np.ndarray
    hull: np.ndarray
    vertices: np.ndarray  # indices into k of the hull vertices


def concave_envelope(k, a) -> EnvelopePoints:
    """Least concave majorant of the points ``(k_i, a_i)``, sampled at ``k_i``.

    Equivalent to ``inf_t [max_j (a_j - k_j t) + k t]`` at every ``k`` inside
    the sample range.  Monotone-chain upper hull, linear time after the
    (already sorted) input.
    """
    k = np.asarray(k, dtype=float)
    a = np.asarray(a, dtype=float)
    if k.shape != a.shape or k.ndim != 1:
        raise ValueError("k and a must be one-dimensional and of equal length")
    if k.size < 2:
        raise ValueError("need at least two points")
    if np.any(np.diff(k) <= 0):
        raise ValueError("indices must be strictly increasing")
    hull: list[int] = []
    for i in range(k.size):
        while len(hull) >= 2:
            o, p = hull[-2], hull[-1]
            # drop p when it lies on or below the chord o -> i
            cross = (k[p] - k[o]) * (a[i] - a[o]) - (a[p] - a[o]) * (k[i] - k[o])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    verts = np.array(hull)
    values = np.interp(k, k[verts], a[verts])
    # the hull passes through its vertices exactly
    values[verts] = a[verts]
    return EnvelopePoints(k, a, np.maximum(values, a), verts)


def _axioms(N: WeightSequence, cfg) -> dict[str, Verdict]:
    return {c: check_condition(N, c, cfg) for c in ("weak-log-convex", "M1", "M0")}


# ---------------------------------------------------------------------------
# Komatsu lift

@dataclass(frozen=True)
class LiftResult:
    N: WeightSequence
    log_ell_tilde: np.ndarray
    log_c: np.ndarray
    report: dict = field(default_factory=dict)


def komatsu_lift(L, M: WeightSequence, config: RunConfig | None = None) -> LiftResult:
    """Interpolate ``L <= N ⊲ M`` for a positive sequence ``L ⊲ M``.

    ``L`` is given by its log-values (or as a WeightSequence).  With
    ``a_k = log(l_k/m_k)`` and its concave envelope ``â``, set
    ``l̃_k = m_k exp(â_k)``, ``l̄_k = l̃_k/l̃_0``, ``c_k = (m_k/l̄_k)**(1/k)`` and

        n_k**(1/k) = max(m_k**(1/(2k)), max_{1<=j<=k} m_j**(1/j)/c_j),  N_k = k! n_k.

    Raises
    ------
    PreconditionError
        If ``L ⊲ M`` is not evidenced or ``M`` fails (M1)/(M0).
    """
    cfg = resolve(config)
    logL = as_log_array(L)
    K = min(logL.size, M.logM.size) - 1
    logL = logL[: K + 1]
    M = M.truncate(K)

    rel = compare(logL, M, "lhd", cfg)
    if rel.status is not Status.HOLDS_EMPIRICALLY:
        raise PreconditionError("L ⊲ M is not evidenced on the window", rel.to_dict())
    m1 = check_condition(M, "M1", cfg)
    m0 = check_condition(M, "M0", cfg)
    if m1.status is not Status.HOLDS or m0.status is Status.FAILS:
        raise PreconditionError("M must satisfy (M1) and must not fail (M0)",
                                {"M1": m1.to_dict(), "M0": m0.to_dict()})

    k = np.arange(K + 1, dtype=float)
    logm = M.views.logm
    env = concave_envelope(k, logL - M.logM)  # log(l_k/m_k) = log(L_k/M_k)
    log_ell_tilde = logm + env.hull
    log_ell_bar = log_ell_tilde - log_ell_tilde[0]
    log_c = np.full(K + 1, np.nan)
    log_c[1:] = (logm[1:] - log_ell_bar[1:]) / k[1:]

    half_root = logm[1:] / (2 * k[1:])
    lifted = np.maximum.accumulate(logm[1:] / k[1:] - log_c[1:])  # = log_ell_bar_j / j
    log_root_n = np.maximum(half_root, lifted)
    logN = np.empty(K + 1)
    logN[0] = 0.0
    logN[1:] = log_factorial(k[1:]) + k[1:] * log_root_n
    N = WeightSequence(f"komatsu({M.name})", logN)

    excess = logL - logN
    worst = int(np.argmax(excess))
    report = {
        "ell_tilde_0": float(math.exp(log_ell_tilde[0])),
        "L_le_N": Verdict("L <= N", Status.HOLDS if excess[worst] <= cfg.tol else Status.FAILS,
                          None if excess[worst] <= cfg.tol else
                          {"k": worst, "lhs": float(logL[worst]), "rhs": float(logN[worst])},
                          {"max_log_excess": float(excess[worst])}),
        "root_nondecreasing": check_condition(N, "M1", cfg),
        "N_lhd_M": compare(N, M, "lhd", cfg),
        "c_nondecreasing": _nondecreasing("c nondecreasing", log_c[1:], cfg.tol),
        "axioms": _axioms(N, cfg),
    }
    return LiftResult(N, log_ell_tilde, log_c, report)


def _nondecreasing(name, x, tol) -> Verdict:
    bad = np.flatnonzero(x[:-1] > x[1:] + tol)
    if bad.size:
        i = int(bad[0])
        return Verdict(name, Status.FAILS, {"k": i + 1, "lhs": float(x[i]), "rhs": float(x[i + 1])})
    return Verdict(name, Status.HOLDS)


# ---------------------------------------------------------------------------
# almost-increasing regularization

@dataclass(frozen=True)
class RegularizeResult:
    M_tilde: WeightSequence
    log_nu: np.ndarray
    report: dict = field(default_factory=dict)


def regularize_almost_increasing(M: WeightSequence, C: float,
                                 config: RunConfig | None = None) -> RegularizeResult:
    """``nu_k = C * min_{k<=l<=K} m_l**(1/l)`` and ``M̃_k = k! nu_k**k``.

    ``C`` must dominate the almost-increasing constant of ``M`` on the window.
    The last index only sees itself in the suffix minimum and is flagged as
    boundary-affected.
    """
    cfg = resolve(config)
    if not C > 0:
        raise ValueError("C must be positive")
    pre = check_condition(M, "almost-increasing", cfg, C=C)
    if pre.status is Status.FAILS:
        raise PreconditionError("M is not almost increasing with the given constant", pre.to_dict())

    K = M.K
    k = np.arange(K + 1, dtype=float)
    root = M.views.logroot
    log_nu = np.full(K + 1, np.nan)
    log_nu[1:] = math.log(C) + np.minimum.accumulate(root[1:][::-1])[::-1]
    logMt = np.empty(K + 1)
    logMt[0] = 0.0
    logMt[1:] = log_factorial(k[1:]) + k[1:] * log_nu[1:]
    Mt = WeightSequence(f"regularized({M.name})", logMt)

    ratio = log_nu[1:] - root[1:]
    c_hat = pre.diagnostics["log_C_hat"]
    within = bool(np.all(ratio >= -cfg.tol) and np.all(ratio <= math.log(C) + cfg.tol))
    report = {
        "precondition": pre,
        "nu_nondecreasing": _nondecreasing("nu nondecreasing", log_nu[1:], cfg.tol),
        "root_bounds": Verdict(
            "root_k <= nu_k <= C root_k", Status.HOLDS if within else Status.FAILS,
            None if within else {"k": int(np.argmax(np.abs(ratio))) + 1,
                                 "lhs": float(ratio.min()), "rhs": math.log(C)},
            {"max_log_ratio": float(ratio.max()), "min_log_ratio": float(ratio.min()),
             "log_C": math.log(C), "log_C_hat": c_hat}),
        "approx": compare(M, Mt, "approx", cfg),
        "boundary_index": K,
        "axioms": _axioms(Mt, cfg),
    }
    return RegularizeResult(Mt, log_nu, report)


# ---------------------------------------------------------------------------
# dominating sequence

def dominating_sequence(coeff_sup_norms, iterate_norms, d: int, K: int) -> np.ndarray:
    """Log-values of ``L_k = max{k!, sup|D^a coeff| (|a| <= k), ||P^tau u|| (|tau| <= k/d)}``.

    Parameters
    ----------
    coeff_sup_norms : sequence indexed by ``|alpha|`` of the largest coefficient
        derivative sup-norm at that order (may be empty).
    iterate_norms : sequence indexed by word length ``nu`` of the largest
        iterate norm at that length (may be empty).
    d : common order of the system.
    K : truncation order of the output.
    """
    if d < 1 or K < 0:
        raise ValueError("need d >= 1 and K >= 0")
    k = np.arange(K + 1)
    out = log_factorial(k).astype(float)

    def prefix_log_max(values, length):
        vals = np.asarray(values, dtype=float)
        if vals.size and np.any(vals < 0):
            raise ValueError("norm tables must be nonnegative")
        with np.errstate(divide="ignore"):
            logs = np.log(vals) if vals.size else np.empty(0)
        pm = np.full(length, -np.inf)
        n = min(length, logs.size)
        pm[:n] = np.maximum.accumulate(logs[:n]) if n else pm[:n]
        if 0 < n < length:
            pm[n:] = pm[n - 1]
        return pm

    coeff = prefix_log_max(coeff_sup_norms, K + 1)
    out = np.maximum(out, coeff)
    it = prefix_log_max(iterate_norms, len(iterate_norms))
    if it.size:
        nu_max = np.minimum(k // d, it.size - 1)
        out = np.maximum(out, it[nu_max])
    return out


def equalize_orders(orders, max_order: int = 10 ** 6) -> tuple[list[int], int]:
    """Exponents ``d'_j = prod_{i != j} d_i`` and the common order ``d = prod d_i``."""
    orders = [int(x) for x in orders]
    if not orders or any(x < 1 for x in orders):
        raise ValueError("need at least one order, each >= 1")
    d = math.prod(orders)
    if d > max_order:
        raise OverflowError(f"common order {d} exceeds the desk-scale limit {max_order}")
    return [d // x for x in orders], d

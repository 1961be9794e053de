"""Seeded random sequences used by the acceptance battery and the tests."""
from __future__ import annotations

import numpy as np

from .seqcore import WeightSequence, log_factorial


def random_log_convex(rng: np.random.Generator, K: int = 128, name: str = "random") -> WeightSequence:
    """Log-convex ``M`` with ``M_0 = 1 <= M_1``: nondecreasing ``log mu`` integrated."""
    start = rng.uniform(0.0, 2.0)
    steps = rng.exponential(rng.uniform(0.01, 0.2), size=K - 1)
    steps[rng.random(K - 1) < 0.2] = 0.0  # plateaus exercise the tie handling
    logmu = start + np.concatenate(([0.0], np.cumsum(steps)))
    return WeightSequence(name, np.concatenate(([0.0], np.cumsum(logmu))))


def random_root_increasing(rng: np.random.Generator, K: int = 128, name: str = "M") -> WeightSequence:
    """``M`` with ``m_k**(1/k)`` nondecreasing and tending to infinity."""
    k = np.arange(1, K + 1, dtype=float)
    a = rng.uniform(0.5, 2.0)
    root = a * np.log1p(k) + np.cumsum(rng.exponential(0.01, size=K))
    logM = np.concatenate(([0.0], log_factorial(k) + k * root))
    return WeightSequence(name, logM)


def random_lhd_pair(rng: np.random.Generator, K: int = 128):
    """``(log L, M)`` with ``L ⊲ M`` on the tail and an irregular head.

    ``log L_k - log M_k = -k (b log(k+1) + u_k)`` with ``u`` nondecreasing, plus
    bounded noise on the first half of the window so that the concave
    envelope has work to do.  ``L_0 = 1``.
    """
    M = random_root_increasing(rng, K)
    k = np.arange(K + 1, dtype=float)
    b = rng.uniform(0.3, 1.5)
    u = np.cumsum(rng.exponential(0.005, size=K + 1))
    gap = -(b * np.log(k + 1) + u)
    noise = np.where(k < K // 2, rng.uniform(-1.0, 1.0, size=K + 1), 0.0)
    logL = M.logM + k * gap + noise
    logL[0] = 0.0
    return logL, M


def random_dipping(rng: np.random.Generator, K: int = 128, max_log_c: float = 0.4,
                   name: str = "dipping") -> WeightSequence:
    """Almost increasing but not increasing roots: an increasing trend with dips."""
    k = np.arange(1, K + 1, dtype=float)
    trend = rng.uniform(0.2, 1.0) * np.log1p(k) + 0.05
    dips = -rng.uniform(0.0, max_log_c, size=K) * (rng.random(K) < 0.3)
    dips[K // 3] = -max_log_c  # at least one genuine dip
    root = trend + dips
    return WeightSequence(name, np.concatenate(([0.0], log_factorial(k) + k * root)))

"""
Comparing sequences and the constructive transforms
===================================================

The relations are tail heuristics on the gap ``(log M_k - log N_k)/k``.
The transforms build new sequences: the Komatsu lift interpolates between
``L`` and ``M`` and the regularization smooths an almost increasing root.
"""
import math

import numpy as np

from ultraclass import build_family, check_condition, compare, komatsu_lift, regularize_almost_increasing
from ultraclass.samples import random_dipping, random_lhd_pair

K = 128
g1, g15, g2 = (build_family("gevrey", K, s=s) for s in (1, 1.5, 2))

###############################################################################
# Gevrey classes are strictly nested.
for a, b in ((g15, g2), (g2, g15)):
    rv = compare(a, b, "lhd")
    print(f"{a.name} ⊲ {b.name}: {rv.status.value}  (last gap {rv.gap[-1]:.3f})")

###############################################################################
# Komatsu lift for L = k! below M = (k!)^2.  The lift lands exactly on
# k! * sqrt(k!) at the start of the window.
res = komatsu_lift(g1, g2)
print("N_k, k = 0..5:", np.round(np.exp(res.N.logM[:6]), 4))
print("L <= N:", res.report["L_le_N"].status.value,
      "| N ⊲ M:", res.report["N_lhd_M"].status.value)

###############################################################################
# The same lift on a seeded random pair with an irregular head.
logL, M = random_lhd_pair(np.random.default_rng(7))
res = komatsu_lift(logL, M)
print("random pair: n_k^(1/k) nondecreasing:", res.report["root_nondecreasing"].status.value)

###############################################################################
# Regularization of an almost increasing sequence whose roots dip.
M = random_dipping(np.random.default_rng(0))
C_hat = check_condition(M, "almost-increasing").diagnostics["C_hat"]
reg = regularize_almost_increasing(M, C_hat)
print(f"C_hat = {C_hat:.4f}; regularized roots nondecreasing:",
      reg.report["nu_nondecreasing"].status.value,
      "| M ≈ M~:", reg.report["approx"].status.value)
print("largest log ratio nu/root:", round(reg.report["root_bounds"].diagnostics["max_log_ratio"], 4),
      "<= log C_hat =", round(math.log(C_hat), 4))

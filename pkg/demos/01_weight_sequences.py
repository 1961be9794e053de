"""
Weight sequences and their structural conditions
=================================================

A weight sequence is stored by its log-values on a window ``k = 0..K``.
This script builds the named families, looks at the derived views and runs
the condition checker and the lemma chain.
"""
import numpy as np

from ultraclass import build_family, check_condition, check_lemma_chain, stirling_chain

###############################################################################
# Build a few families on a window of K = 128.  Values stay in log space, so
# even ``2**(k**2)`` is harmless.
K = 128
gevrey2 = build_family("gevrey", K, s=2)
qgevrey = build_family("qgevrey", K, q=2)
bridge = build_family("bridge", K, s=1, sigma=1)

print("log M_k of gevrey(2), first terms:", np.round(gevrey2.logM[:6], 4))

###############################################################################
# Derived views: m_k = M_k/k!, mu_k = M_k/M_{k-1}, Lambda_k = M_k**(1/k) and
# Theta_k = k m_k**(1/k).  For gevrey(2), mu_k = k**2 exactly.
v = gevrey2.views
print("mu_k for k = 1..5:", np.round(np.exp(v.logmu[1:6]), 6))
print("Theta_3 =", round(float(np.exp(v.logTheta[3])), 4))

###############################################################################
# Conditions that quantify over the window are decided exactly; limits only
# ever get empirical evidence.
for name, M in (("gevrey(2)", gevrey2), ("qgevrey(2)", qgevrey)):
    for cond in ("M1", "M2prime", "M2"):
        verdict = check_condition(M, cond)
        print(f"{name:11s} {cond:8s} -> {verdict.status.value}")

# quasianalyticity of the boundary case s = 1, sigma = 1
print("bridge(1,1) non-quasianalytic:", check_condition(bridge, "non-quasianalytic").status.value)

###############################################################################
# The lemma chain: items (a)-(d) hold for every weight sequence, (e)-(g) need
# their preconditions.
for key, verdict in check_lemma_chain(gevrey2).items():
    print(key, verdict.condition, "->", verdict.status.value)

print("Stirling chain up to k = 10^5:", stirling_chain(100_000).status.value)

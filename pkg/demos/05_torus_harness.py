"""
Iterates of an elliptic operator on the torus
=============================================

On the torus with constant coefficients every norm is a Fourier sum, so
the iterate estimates can be measured exactly.  A field with coefficients
``exp(-|xi|**(1/2))`` is Gevrey of order 2; the classifier should find it.
"""
from ultraclass import build_family
from ultraclass.spectral import (apriori_constant, check_ellipticity, classify, derivative_norms,
                                 iterate_norms, make_field, named_system)

u = make_field("gevrey-profile", dim=1, cutoff=4096, s=2)
P = named_system("laplace", 1)

###############################################################################
# Norms of Delta^k u for k <= 12 and of D^a u for a <= 24.
it = iterate_norms(P, u, 12)
der = derivative_norms(u, 24)
print("cutoff-limited rows:", sum(r.cutoff_limited for r in it.rows + der.rows))

###############################################################################
# Fit log T_n = s log n! + n log h + c and compare against candidates.
cands = [build_family("gevrey", 128, s=s) for s in (1.5, 2, 2.5)]
for name, table, d in (("iterates", it, 2), ("derivatives", der, 1)):
    rep = classify(table, cands, d=d)
    print(f"{name}: s_hat = {rep['fit']['s_hat']:.4f}")
    for c in rep["candidates"]:
        print(f"   {c['candidate']:10s} Roumieu {c['roumieu'].status.value:17s} "
              f"Beurling {c['beurling'].status.value}")

###############################################################################
# Ellipticity and the a-priori constant.  A single derivative in 2D is not
# elliptic: its symbol vanishes along the second axis.
for name, dim in (("laplace", 1), ("gradient", 2), ("d1", 2)):
    v = check_ellipticity(named_system(name, dim))
    print(f"{name} (dim {dim}) elliptic: {v.status.value}")
print("C for the 1D Laplacian:", apriori_constant(P).C)

"""
Ingredients of the iterate theorem
==================================

The constants in the proof are computed explicitly: the regular estimate
on a sequence, the radius schedule rho, the admissible constant A, and the
main iterate inequality on seeded fields.
"""
import math

from ultraclass import build_family
from ultraclass.spectral import (find_admissible_A, mainprop_trace, make_field, named_system,
                                 regular_estimate_check, rho_schedule)

M = build_family("gevrey", 128, s=2)

print("regular estimate up to a = 64:", regular_estimate_check(M, 64).status.value)

sch = rho_schedule(1.0, 0.25, M, 16)
print(f"rho = {sch.rho:.6g}, min slack {sch.min_slack:.4f} >= {sch.bound:.4f}")

###############################################################################
# With C = H = d = n = 1 the bracket condition reduces to A^2 - 4A + 2 = 0.
A = find_admissible_A(1, 1, 1, 1)
print(f"A = {A:.9f}  (2 + sqrt 2 = {2 + math.sqrt(2):.9f})")

###############################################################################
# The main inequality on band-limited random fields in 1D.
P = named_system("laplace", 1)
for seed in range(3):
    u = make_field("band-limited-random", dim=1, cutoff=64, seed=seed, band=16)
    v = mainprop_trace(P, u, M, rho=1.0, kmax=4)
    print(f"seed {seed}: {v.status.value}, largest log excess {v.diagnostics['max_log_excess']:.3f}")

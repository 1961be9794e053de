"""
Weight functions and their conjugates
=====================================

A weight function ``omega`` is checked on a sampled grid; its Young
conjugate ``phi*`` gives the associated weight matrix.
"""
import math

import numpy as np

from ultraclass import WeightFunction, check_omega, compare, build_family
from ultraclass.omega import associated_matrix, conjugate

###############################################################################
# Axioms for three weight functions.  ``t`` itself is not o(t), and the
# log-power weight is only concave beyond ``t = e``.
cases = [(WeightFunction.power(0.5), 0.0), (WeightFunction.power(1.0), 0.0),
         (WeightFunction.log_power(2), math.e)]
for w, start in cases:
    rep = check_omega(w, concave_from=start)
    print(w.family, w.params, {k: v.status.value for k, v in rep.items()})

###############################################################################
# For omega(t) = t**a the conjugate of phi(s) = exp(a s) is known in closed
# form: (y/a)(log(y/a) - 1) once y >= a, and -1 below.
a = 0.5
tab = conjugate(WeightFunction.power(a), 100.0, points=6)
y = tab.y[1:]
exact = (y / a) * (np.log(y / a) - 1)
for y, val, ex in zip(y, tab.value[1:], exact):
    print(f"y = {y:6.1f}: phi* = {val:.9f}   closed form {ex:.9f}")

###############################################################################
# The associated matrix of t^(1/2): its lambda = 1 entry behaves like
# gevrey(2).
W = associated_matrix(WeightFunction.power(0.5), lambdas=[0.5, 1, 2])
rv = compare(W.sequences[1], build_family("gevrey", W.K, s=2), "approx")
print("W^1 ≈ gevrey(2):", rv.status.value)

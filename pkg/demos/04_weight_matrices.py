"""
Weight matrices
===============

A weight matrix is a totally ordered family of sequences.  Derivation
closedness is checked with a best partner per entry, in the Roumieu (R)
or Beurling (B) quantifier order.
"""
from ultraclass import WeightFunction, WeightMatrix, build_family, check_matrix, matrix_compare
from ultraclass.omega import associated_matrix

K = 128
W = associated_matrix(WeightFunction.power(0.5), K=K)

for mode in ("R", "B"):
    rep = check_matrix(W, mode)
    print(f"{mode}-semiregular:", rep[f"{mode}-semiregular"].status.value)
    for p in rep["deriv_closed"]:
        print(f"   entry {p['entry']:5g} -> partner {p['partner']:5g}, q_hat = {p['q_hat']:.4f}")

###############################################################################
# (M1) per entry: the smallest lambda has m_1 < 1, so weak regularity needs
# the larger entries only.
rep = check_matrix(W, "R")
print({lam: v.status.value for lam, v in rep["root_increasing"].items()})

###############################################################################
# Matrix relations: every gevrey class in A sits strictly below q-Gevrey.
A = WeightMatrix.of(build_family("gevrey", K, s=1.5), build_family("gevrey", K, s=2))
B = WeightMatrix.of(build_family("qgevrey", K, q=2))
print("A ⊲ B (all pairs):", matrix_compare(A, B, "lhd-mixed")["verdict"].status.value)
print("B ⊲ B:", matrix_compare(B, B, "lhd-mixed")["verdict"].status.value)

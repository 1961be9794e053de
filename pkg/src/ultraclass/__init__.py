"""Ultradifferentiable classes on finite windows.

Weight sequences (:mod:`seqcore`), their inclusion relations
(:mod:`relations`) and constructive transforms (:mod:`transforms`); weight
functions and their conjugates (:mod:`omega`); weight matrices
(:mod:`matrices`); and a Fourier harness on the torus for iterate estimates
of elliptic systems (:mod:`spectral`).
"""
from .config import RunConfig
from .matrices import WeightMatrix, check_matrix, matrix_compare
from .omega import WeightFunction, associated_matrix, check_omega, conjugate
from .relations import compare
from .seqcore import (CONDITIONS, WeightSequence, build_family, check_condition, check_lemma_chain,
                      derived, parse_family, stirling_chain)
from .transforms import (PreconditionError, concave_envelope, dominating_sequence, equalize_orders,
                         komatsu_lift, regularize_almost_increasing)
from .verdict import Status, Verdict

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "WeightMatrix", "check_matrix", "matrix_compare", "WeightFunction",
    "associated_matrix", "check_omega", "conjugate", "compare", "CONDITIONS", "WeightSequence",
    "build_family", "check_condition", "check_lemma_chain", "derived", "parse_family",
    "stirling_chain", "PreconditionError", "concave_envelope", "dominating_sequence",
    "equalize_orders", "komatsu_lift", "regularize_almost_increasing", "Status", "Verdict",
]

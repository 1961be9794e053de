"""Invariants checked on generated inputs."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ultraclass.matrices import WeightMatrix, check_matrix, total_order
from ultraclass.omega import WeightFunction, associated_matrix, biconjugate, conjugate
from ultraclass.relations import compare
from ultraclass.seqcore import WeightSequence, check_condition, check_lemma_chain, log_factorial
from ultraclass.spectral import SpectralField, apply, derivative, find_admissible_A, laplace
from ultraclass.transforms import concave_envelope, equalize_orders
from ultraclass.verdict import Status

FAST = settings(max_examples=40, deadline=None)
K = 40



@st.composite
def log_convex(draw, K=K):
    """``log mu`` nondecreasing from a start >= 0, integrated."""
    start = draw(st.floats(0.0, 2.0))
    steps = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=K - 1, max_size=K - 1)))
    logmu = start + np.concatenate(([0.0], np.cumsum(steps)))
    return WeightSequence("h", np.concatenate(([0.0], np.cumsum(logmu))))


@st.composite
def root_increasing(draw, K=K):
    """``log m_k / k`` nondecreasing and >= 0."""
    steps = np.array(draw(st.lists(st.floats(0.0, 0.5), min_size=K, max_size=K)))
    k = np.arange(1, K + 1, dtype=float)
    root = np.cumsum(steps)
    return WeightSequence("r", np.concatenate(([0.0], log_factorial(k) + k * root)))


@st.composite
def strongly_log_convex(draw, K=K):
    steps = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=K - 1, max_size=K - 1)))
    k = np.arange(1, K + 1, dtype=float)
    logmu_small = np.concatenate(([0.0], np.cumsum(steps)))  # log(m_k/m_{k-1}) nondecreasing, >= 0
    logm = np.concatenate(([0.0], np.cumsum(logmu_small)))
    return WeightSequence("s", np.concatenate(([0.0], log_factorial(k) + logm[1:])))


@FAST
@given(log_convex())
def test_lemma_items_a_to_d_hold_for_log_convex(M):
    rep = check_lemma_chain(M)
    for key in "abcd":
        assert rep[key].status is Status.HOLDS, (key, rep[key].witness)


@FAST
@given(root_increasing())
def test_m1_implies_superadditive_m(M):
    assert check_condition(M, "M1").status is Status.HOLDS
    assert check_condition(M, "strongConcl").status is Status.HOLDS
    rep = check_lemma_chain(M)
    assert rep["g"].status is Status.HOLDS


@FAST
@given(strongly_log_convex())
def test_strong_log_convexity_implies_m1(M):
    assert check_condition(M, "strong-log-convex").status is Status.HOLDS
    assert check_condition(M, "M1").status is Status.HOLDS


@FAST
@given(log_convex())
def test_reconstruction_from_log_mu(M):
    rebuilt = np.concatenate(([0.0], np.cumsum(M.views.logmu[1:])))
    np.testing.assert_allclose(rebuilt, M.logM, atol=1e-9 * max(1.0, np.abs(M.logM).max()))


@FAST
@given(log_convex(), st.integers(8, K - 1))
def test_retruncation_invariance(M, Kp):
    for cond in ("weak-log-convex", "M1", "strongConcl"):
        if check_condition(M, cond).status is Status.HOLDS:
            assert check_condition(M.truncate(Kp), cond).status is Status.HOLDS
    N = WeightSequence("n", M.logM + np.arange(K + 1) * 0.3)
    a = compare(M.truncate(Kp), N, "preceq")
    b = compare(M.truncate(Kp), N.truncate(Kp), "preceq")
    assert a.status is b.status


@FAST
@given(log_convex())
def test_reflexivity(M):
    assert compare(M, M, "approx").status is Status.HOLDS_EMPIRICALLY
    assert compare(M, M, "preceq").status is Status.HOLDS_EMPIRICALLY


@FAST
@given(log_convex(), log_convex())
def test_lhd_implies_preceq_and_is_antisymmetric(M, N):
    if compare(M, N, "lhd").status is Status.HOLDS_EMPIRICALLY:
        assert compare(M, N, "preceq").status is not Status.FAILS
        assert compare(N, M, "lhd").status is not Status.HOLDS_EMPIRICALLY


@FAST
@given(log_convex(), log_convex(), st.floats(-3.0, 3.0), st.sampled_from(["preceq", "lhd", "approx"]))
def test_common_scaling_leaves_relations_unchanged(M, N, c, rel):
    k = np.arange(K + 1)
    a = compare(M, N, rel).status
    b = compare(M.logM + c * k, N.logM + c * k, rel).status
    assert a is b


@FAST
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=60))
def test_envelope_concave_majorizing_idempotent(values):
    a = np.array(values)
    k = np.arange(a.size, dtype=float)
    env = concave_envelope(k, a).hull
    scale = 1e-9 * max(1.0, np.abs(a).max())
    assert np.all(env >= a - scale)
    assert np.all(np.diff(env, 2) <= scale)
    np.testing.assert_allclose(concave_envelope(k, env).hull, env, atol=scale)


@FAST
@given(st.lists(st.integers(1, 9), min_size=1, max_size=4))
def test_equalize_orders(orders):
    dprime, d = equalize_orders(orders)
    assert all(a * b == d for a, b in zip(dprime, orders))


@st.composite
def fields(draw, dim=1, cutoff=6):
    n = (2 * cutoff + 1) ** dim
    re = draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n))
    im = draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n))
    c = (np.array(re) + 1j * np.array(im)).reshape((2 * cutoff + 1,) * dim)
    return SpectralField(dim, cutoff, c)


@FAST
@given(fields())
def test_parseval_exact(u):
    c = np.fft.ifftshift(u.coeffs)
    x = np.fft.ifft(c) * c.size
    assert math.isclose(math.sqrt(np.mean(np.abs(x) ** 2)), u.norm(), rel_tol=1e-10, abs_tol=1e-12)


@FAST
@given(fields(dim=2, cutoff=4))
def test_composition_matches_iterated_application(u):
    P, Q = laplace(2), derivative(2, 2)
    lhs = apply(P.compose(Q), u).norm()
    rhs = apply(P, apply(Q, u)).norm()
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 1.0))
def test_conjugate_convex_monotone_and_fenchel(a):
    w = WeightFunction.power(a)
    tab = conjugate(w, 40.0, points=200, s_points=2048)
    v = tab.value
    assert np.all(np.diff(v) >= -1e-9)
    assert np.all(np.diff(v, 2) >= -1e-7 * np.maximum(1.0, np.abs(v[1:-1])))
    s = np.array([0.5, 1.0, 2.0])
    assert np.all(biconjugate(tab, s) <= w.phi(s) + 1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 0.9))
def test_associated_matrix_monotone_in_lambda(a):
    W = associated_matrix(WeightFunction.power(a), lambdas=[0.5, 1.0, 2.0], K=32)
    assert total_order(W).status is Status.HOLDS
    seqs = W.sequences
    for lo, hi in zip(seqs, seqs[1:]):
        assert np.all(lo.logM <= hi.logM + 1e-9 * np.maximum(1.0, np.abs(hi.logM)))


@FAST
@given(log_convex())
def test_singleton_matrix_matches_sequence_checks(M):
    rep = check_matrix(WeightMatrix.of(M), "R")
    assert rep["deriv_closed"][0]["verdict"].status is check_condition(M, "M2prime").status
    assert rep["root_increasing"][0.0].status is check_condition(M, "M1").status
    assert rep["analytic_inclusion"][0.0].status is check_condition(M, "M0").status


@FAST
@given(st.floats(0.0, 10.0), st.floats(0.1, 10.0), st.integers(1, 4), st.integers(1, 3))
def test_doubling_H_never_decreases_A(C, H, d, n):
    assert find_admissible_A(C, 2 * H, d, n) >= find_admissible_A(C, H, d, n) - 1e-9

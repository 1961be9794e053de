import math

import numpy as np
import pytest

from ultraclass.seqcore import (CONDITIONS, WeightSequence, build_family, check_condition,
                                check_lemma_chain, derived, from_values, parse_family, stirling_chain)
from ultraclass.verdict import Status


def test_gevrey1_is_factorial():
    M = build_family("gevrey", 8, s=1)
    expected = [math.log(math.factorial(k)) for k in range(9)]
    np.testing.assert_allclose(M.logM, expected, atol=1e-12)
    assert M.logM[0] == 0.0


def test_qgevrey2_values():
    M = build_family("qgevrey", 8, q=2)
    np.testing.assert_allclose(np.exp(M.logM[:5]), [1, 2, 16, 512, 65536], rtol=1e-12)


def test_bridge_closed_formula():
    # (k!)^s log(k+e)^(sigma k) at k=2: 2 * log(2+e)^2 = 4.81396...
    M = build_family("bridge", 8, s=1, sigma=1)
    assert math.exp(M.logM[2]) == pytest.approx(2 * math.log(2 + math.e) ** 2, rel=1e-12)
    assert math.exp(M.logM[2]) == pytest.approx(4.813961, abs=1e-6)


@pytest.mark.parametrize("family,params,bound", [
    ("gevrey", {"s": 0.5}, "s >= 1"),
    ("bridge", {"s": 1, "sigma": 0}, "sigma > 0"),
    ("lqr", {"q": 1, "r": 2}, "q > 1"),
    ("lqr", {"q": 2, "r": 1}, "r > 1"),
])
def test_parameter_errors_name_the_bound(family, params, bound):
    with pytest.raises(ValueError, match=bound):
        build_family(family, 16, **params)


def test_short_window_rejected():
    with pytest.raises(ValueError):
        build_family("gevrey", 4, s=1)


def test_invalid_sequences_rejected():
    with pytest.raises(ValueError):
        WeightSequence("x", np.r_[0.1, np.zeros(9)])
    with pytest.raises(ValueError):
        WeightSequence("x", np.r_[0.0, -1.0, np.zeros(8)])
    with pytest.raises(ValueError):
        WeightSequence("x", np.r_[0.0, np.inf, np.zeros(8)])


def test_parse_family_mini_language():
    assert parse_family("lqr:2:1.5", 16).name == "lqr:2:1.5"
    assert parse_family("bridge:1:1", 16).name == "bridge:1:1"
    with pytest.raises(ValueError):
        parse_family("gevrey", 16)
    with pytest.raises(ValueError):
        parse_family("nope:1", 16)


def test_derived_views():
    v = derived(build_family("gevrey", 16, s=1))
    np.testing.assert_allclose(v.logmu[1:], np.log(np.arange(1, 17)), atol=1e-12)
    v2 = derived(build_family("gevrey", 16, s=2))
    assert math.exp(v2.logTheta[3]) == pytest.approx(3 * 6 ** (1 / 3), rel=1e-12)
    assert math.exp(v2.logTheta[3]) == pytest.approx(5.4513, abs=1e-4)
    vq = derived(build_family("qgevrey", 16, q=2))
    k = np.arange(1, 17)
    np.testing.assert_allclose(vq.logmu[1:], (2 * k - 1) * math.log(2), atol=1e-9)
    assert np.isnan(v.logmu[0]) and np.isnan(v.logTheta[0])


def test_views_reconstruct_logM():
    M = build_family("bridge", 64, s=1.5, sigma=2)
    v = M.views
    np.testing.assert_allclose(np.r_[0.0, np.cumsum(v.logmu[1:])], M.logM, atol=1e-9)
    k = np.arange(1, 65)
    np.testing.assert_allclose(v.logLambda[1:] * k, M.logM[1:], atol=1e-9)


def test_m0_fails_for_gevrey1(cfg):
    v = check_condition(build_family("gevrey", 128, s=1), "M0", cfg)
    assert v.status is Status.FAILS
    assert v.witness["lhs"] == pytest.approx(0.0, abs=1e-12)


def test_qgevrey_m2prime_constant(cfg):
    v = check_condition(build_family("qgevrey", 128, q=2), "M2prime", cfg)
    assert v.status is Status.HOLDS_EMPIRICALLY
    K = 128
    k = np.arange(K)
    oracle = math.exp(np.max((2 * k + 1) * math.log(2) / (k + 1)))
    assert v.diagnostics["gamma_hat"] == pytest.approx(oracle, rel=1e-9)
    assert v.diagnostics["gamma_hat"] <= 4 + 1e-6


def test_qgevrey_m2_fails_with_witness(cfg):
    v = check_condition(build_family("qgevrey", 128, q=2), "M2", cfg)
    assert v.status is Status.FAILS
    assert v.witness["k"] == 128 and v.witness["j"] + v.witness["k_pair"] == 128


def test_non_quasianalytic(cfg):
    K = 128
    v = check_condition(build_family("gevrey", K, s=2), "non-quasianalytic", cfg)
    assert v.status is Status.HOLDS_EMPIRICALLY
    assert v.diagnostics["partial_sum"] == pytest.approx(sum(1 / k ** 2 for k in range(1, K + 1)), rel=1e-12)
    assert check_condition(build_family("bridge", K, s=1, sigma=1), "non-quasianalytic", cfg).status is Status.FAILS


def test_pointwise_conditions_on_gevrey(cfg):
    M = build_family("gevrey", 128, s=2)
    for cond in ("weak-log-convex", "strong-log-convex", "M1", "strongConcl", "almost-increasing"):
        assert check_condition(M, cond, cfg).status is Status.HOLDS


def test_limit_conditions_never_hold_exactly(cfg):
    for fam in (build_family("gevrey", 64, s=2), build_family("qgevrey", 64, q=2)):
        for cond in ("M0", "non-quasianalytic", "M2prime", "M2", "derivation-closed-in-m"):
            assert check_condition(fam, cond, cfg).status is not Status.HOLDS


def test_fails_carry_two_sides(cfg):
    M = WeightSequence("bumpy", np.r_[0.0, 1.0, 1.2, 3.0, np.cumsum(np.arange(4, 10, dtype=float)) + 3.0])
    v = check_condition(M, "weak-log-convex", cfg)
    assert v.status is Status.FAILS
    assert {"k", "lhs", "rhs"} <= set(v.witness)


def test_unknown_condition():
    with pytest.raises(ValueError, match="unknown condition"):
        check_condition(build_family("gevrey", 16, s=1), "M3")


def test_almost_increasing_constant():
    # roots 1, 2, 1.5 (dip), then increasing: C_hat = 2/1.5
    roots = np.r_[1.0, 2.0, 1.5, np.linspace(2.5, 5, 7)]
    k = np.arange(1, 11)
    logM = np.r_[0.0, np.cumsum(np.log(k)) + k * np.log(roots)]
    v = check_condition(WeightSequence("dip", logM), "almost-increasing")
    assert v.diagnostics["C_hat"] == pytest.approx(2 / 1.5, rel=1e-12)
    assert check_condition(WeightSequence("dip", logM), "almost-increasing", C=1.2).status is Status.FAILS


def test_lemma_chain_gevrey():
    rep = check_lemma_chain(build_family("gevrey", 128, s=2))
    assert all(rep[k].status is Status.HOLDS for k in "abcdefg")
    rep1 = check_lemma_chain(build_family("gevrey", 128, s=1))
    assert all(rep1[k].status is Status.HOLDS for k in "abcde")


def test_lemma_chain_lambda_dip():
    # log-convex is not required here: Lambda_k = M_k^(1/k) dips at k = 3
    logM = np.r_[0.0, 0.0, 0.1, 0.3 - 0.25, 0.8, 1.5, 2.4, 3.5, 4.8]
    rep = check_lemma_chain(WeightSequence("dip", logM))
    assert rep["b"].status is Status.FAILS
    lam = logM[1:] / np.arange(1, 9)
    first = int(np.flatnonzero(lam[:-1] > lam[1:] + 1e-9)[0]) + 1
    assert rep["b"].witness["k"] == first


def test_lemma_chain_conditional_items():
    rep = check_lemma_chain(build_family("lqr", 128, q=2, r=1.5))
    assert rep["e"].status is Status.INCONCLUSIVE
    assert "precondition" in rep["e"].diagnostics


def test_stirling_chain():
    assert stirling_chain(1).status is Status.HOLDS
    assert stirling_chain(100_000).status is Status.HOLDS
    k = 4
    middle = k / (math.e * math.factorial(k) ** (1 / k))
    third = (2 * math.pi * k) ** (-1 / (2 * k))
    assert middle == pytest.approx(0.6649, abs=1e-4)
    assert third == pytest.approx(0.668298, abs=1e-6)
    assert 1 / math.e <= middle <= third <= 1


def test_from_values_roundtrip():
    M = from_values("f", [math.factorial(k) for k in range(10)])
    np.testing.assert_allclose(M.logM, build_family("gevrey", 9, s=1).logM, atol=1e-12)


def test_conditions_tuple_complete():
    assert len(CONDITIONS) == 10

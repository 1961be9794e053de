import numpy as np
import pytest

from ultraclass.matrices import (WeightMatrix, best_partner, check_matrix, deriv_closed_pair,
                                 iterated_partner, matrix_compare, total_order)
from ultraclass.omega import WeightFunction, associated_matrix
from ultraclass.seqcore import build_family, check_condition
from ultraclass.verdict import Status

K = 128


def g(s):
    return build_family("gevrey", K, s=s)


def test_matrix_construction():
    W = WeightMatrix.of(g(1), g(2), lambdas=[1, 2])
    assert W.K == K and W.lambdas == [1.0, 2.0] and len(W) == 2
    with pytest.raises(ValueError, match="mixed"):
        WeightMatrix.of(g(1), build_family("gevrey", 64, s=2))
    with pytest.raises(ValueError):
        WeightMatrix(())


def test_total_order_crossing(cfg):
    assert total_order(WeightMatrix.of(g(1), g(2)), cfg).status is Status.HOLDS
    k = np.arange(K + 1)
    from ultraclass.seqcore import WeightSequence
    crossing = WeightSequence("x", g(2).logM + np.where(k < 64, 0.5, -0.5) * (k > 0))
    v = total_order(WeightMatrix.of(g(2), crossing), cfg)
    assert v.status is Status.FAILS and "k_other" in v.witness


def test_deriv_closed_pair_is_m2prime(cfg):
    M = build_family("qgevrey", K, q=2)
    a = deriv_closed_pair(M, M, 1, cfg)
    b = check_condition(M, "M2prime", cfg)
    assert a.status is b.status
    assert a.diagnostics["gamma_hat"] == pytest.approx(b.diagnostics["gamma_hat"], rel=1e-12)
    with pytest.raises(ValueError):
        deriv_closed_pair(M, M, 0, cfg)


def test_partners_for_power_half(cfg):
    W = associated_matrix(WeightFunction.power(0.5), K=K, config=cfg)
    for mode in ("R", "B"):
        rep = check_matrix(W, mode, cfg)
        assert rep[f"{mode}-semiregular"].ok
        # small lambda gives m_1 < 1, so (M1) fails at the first step only there
        m1 = rep["root_increasing"]
        assert m1[0.25].status is Status.FAILS and m1[0.25].witness["k"] == 1
        assert all(m1[lam].status is Status.HOLDS for lam in (0.5, 1.0, 2.0, 4.0))
    p = best_partner(W, 0, "R", config=cfg)
    assert p["verdict"].ok
    chain = iterated_partner(W, 0, "R", 2, cfg)
    assert len(chain["chain"]) == 3 and chain["verdict"].ok


def test_singleton_matrix_agrees_with_sequence(cfg):
    M = build_family("qgevrey", K, q=2)
    rep = check_matrix(WeightMatrix.of(M), "R", cfg)
    assert rep["deriv_closed"][0]["verdict"].status is check_condition(M, "M2prime", cfg).status
    lam = WeightMatrix.of(M).lambdas[0]
    assert rep["root_increasing"][lam].status is check_condition(M, "M1", cfg).status
    with pytest.raises(ValueError):
        check_matrix(WeightMatrix.of(M), "X", cfg)


def test_lhd_mixed(cfg):
    A = WeightMatrix.of(g(1.5), g(2))
    B = WeightMatrix.of(build_family("qgevrey", K, q=2))
    assert matrix_compare(A, B, "lhd-mixed", cfg)["verdict"].status is Status.HOLDS_EMPIRICALLY
    self_cmp = matrix_compare(B, B, "lhd-mixed", cfg)["verdict"]
    assert self_cmp.status is Status.FAILS and self_cmp.witness is not None


def test_roumieu_and_beurling(cfg):
    A = WeightMatrix.of(g(1), g(2))
    B = WeightMatrix.of(g(1.5), g(3))
    r = matrix_compare(A, B, "roumieu-preceq", cfg)
    assert r["verdict"].status is Status.HOLDS_EMPIRICALLY and len(r["certificate"]) == 2
    b = matrix_compare(A, B, "beurling-preceq", cfg)
    assert b["verdict"].status is Status.HOLDS_EMPIRICALLY
    fail = matrix_compare(WeightMatrix.of(g(3)), WeightMatrix.of(g(2)), "roumieu-preceq", cfg)
    assert fail["verdict"].status is Status.FAILS
    with pytest.raises(ValueError):
        matrix_compare(A, B, "approx", cfg)

import math

import numpy as np
import pytest

from ultraclass.omega import (WeightFunction, associated_matrix, biconjugate, check_omega, conjugate,
                              conjugate_at)
from ultraclass.relations import compare
from ultraclass.seqcore import build_family
from ultraclass.verdict import Status


def power_conjugate(y, a):
    """Closed form of sup_{s>=0} (s y - exp(a s))."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = (y / a) * (np.log(y / a) - 1.0)
    return np.where(y >= a, inner, -1.0)


def test_weight_function_values():
    w = WeightFunction.power(0.5)
    np.testing.assert_allclose(w([0.0, 1.0, 4.0, 100.0]), [0.0, 1.0, 2.0, 10.0])
    lp = WeightFunction.log_power(2)
    np.testing.assert_allclose(lp([0.5, 1.0, math.e ** 3]), [0.0, 0.0, 9.0])
    tab = WeightFunction.table([1.0, math.e, math.e ** 2], [0.0, 1.0, 4.0])
    assert float(tab(math.e ** 1.5)) == pytest.approx(2.5)


@pytest.mark.parametrize("family,params", [("power", {"a": 1.5}), ("power", {"a": 0}),
                                           ("log-power", {"beta": 1}), ("nope", {})])
def test_weight_function_rejects(family, params):
    with pytest.raises(ValueError):
        WeightFunction(family, params)


def test_check_omega_power_half(cfg):
    rep = check_omega(WeightFunction.power(0.5), config=cfg)
    assert all(v.ok for v in rep.values())
    assert rep["gamma"].status is Status.HOLDS and rep["concave"].status is Status.HOLDS


def test_check_omega_power_one_not_little_o(cfg):
    rep = check_omega(WeightFunction.power(1.0), config=cfg)
    assert rep["o(t)"].status is Status.FAILS
    assert rep["alpha"].ok and rep["beta"].ok


def test_check_omega_log_power(cfg):
    w = WeightFunction.log_power(2)
    rep = check_omega(w, concave_from=math.e, config=cfg)
    assert all(v.ok for v in rep.values())
    literal = check_omega(w, concave_from=math.e, config=cfg, literal_beta=True)
    assert literal["beta"].status is Status.FAILS


def test_check_omega_coarse_grid():
    with pytest.raises(ValueError, match="coarse"):
        check_omega(WeightFunction.power(0.5), points=10)


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
def test_conjugate_matches_closed_form(a):
    tab = conjugate(WeightFunction.power(a), 50.0, points=200)
    exact = power_conjugate(tab.y, a)
    np.testing.assert_allclose(tab.value, exact, rtol=1e-9, atol=1e-9)
    assert tab.value[0] == -1.0


def test_conjugate_rejects_bad_y():
    with pytest.raises(ValueError):
        conjugate_at(WeightFunction.power(0.5), [1.0, 0.5])
    with pytest.raises(ValueError):
        conjugate(WeightFunction.power(0.5), 0.0)


def test_biconjugate_recovers_phi():
    w = WeightFunction.power(0.5)
    tab = conjugate(w, 200.0, points=4000)
    s = np.array([1.0, 2.0, 4.0, 6.0])
    np.testing.assert_allclose(biconjugate(tab, s), w.phi(s), rtol=1e-3)


def test_associated_matrix_closed_form(cfg):
    a = 0.5
    W = associated_matrix(WeightFunction.power(a), K=64, config=cfg)
    k = np.arange(65)
    for lam, M in W.entries:
        oracle = (power_conjugate(lam * k, a) + 1.0) / lam
        scale = np.maximum(1.0, np.abs(oracle))
        assert np.max(np.abs(M.logM - oracle) / scale) < 1e-6


def test_associated_matrix_gevrey_equivalence(cfg):
    K = 128
    W = associated_matrix(WeightFunction.power(0.5), lambdas=[1.0], K=K, config=cfg)
    assert compare(W.sequences[0], build_family("gevrey", K, s=2), "approx", cfg).status is Status.HOLDS_EMPIRICALLY
    W1 = associated_matrix(WeightFunction.power(1.0), lambdas=[1.0], K=K, config=cfg)
    assert compare(W1.sequences[0], build_family("gevrey", K, s=1), "approx", cfg).status is Status.HOLDS_EMPIRICALLY


def test_associated_matrix_escapes_grid():
    with pytest.raises(ValueError, match="t_max"):
        associated_matrix(WeightFunction.power(0.5, t_max=1e3), lambdas=[4.0], K=128)

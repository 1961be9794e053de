import numpy as np
import pytest

from ultraclass.relations import compare, gap_sequence
from ultraclass.seqcore import build_family
from ultraclass.verdict import Status

K = 128


def fam(name, **p):
    return build_family(name, K, **p)


def test_gevrey_chain_lhd(cfg):
    g15, g2 = fam("gevrey", s=1.5), fam("gevrey", s=2)
    assert compare(g15, g2, "lhd", cfg).status is Status.HOLDS_EMPIRICALLY
    assert compare(g15, g2, "preceq", cfg).status is Status.HOLDS_EMPIRICALLY
    back = compare(g2, g15, "preceq", cfg)
    assert back.status is Status.FAILS
    assert back.verdict.witness is not None


def test_gap_is_exact():
    g = gap_sequence(fam("gevrey", s=1), fam("gevrey", s=2))
    k = np.arange(1, K + 1)
    lf = np.cumsum(np.log(k))
    np.testing.assert_allclose(g[1:], -lf / k, atol=1e-12)
    assert np.isnan(g[0])


def test_approx_under_constant_scaling(cfg):
    M = fam("gevrey", s=2)
    k = np.arange(K + 1)
    scaled = M.logM + k * np.log(3.0)
    assert compare(M, scaled, "approx", cfg).status is Status.HOLDS_EMPIRICALLY
    assert compare(M, scaled, "lhd", cfg).status is Status.FAILS


def test_self_relations(cfg):
    M = fam("qgevrey", q=2)
    assert compare(M, M, "approx", cfg).status is Status.HOLDS_EMPIRICALLY
    assert compare(M, M, "lhd", cfg).status is Status.FAILS


def test_qgevrey_dominates_every_gevrey(cfg):
    q = fam("qgevrey", q=2)
    for s in (1, 2, 5):
        assert compare(fam("gevrey", s=s), q, "lhd", cfg).status is Status.HOLDS_EMPIRICALLY


def test_log_array_inputs_and_errors(cfg):
    M = fam("gevrey", s=1)
    assert compare(M.logM, fam("gevrey", s=2).logM, "lhd", cfg).ok
    with pytest.raises(ValueError):
        compare(M, M, "sim", cfg)
    with pytest.raises(ValueError):
        compare(M.logM[:5], M.logM[:5], "preceq", cfg)


def test_short_window_gives_common_prefix(cfg):
    a, b = build_family("gevrey", 64, s=1), fam("gevrey", s=2)
    assert compare(a, b, "lhd", cfg).gap.size == 65

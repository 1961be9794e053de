import math

import mpmath
import numpy as np
import pytest

from ultraclass.matrices import WeightMatrix
from ultraclass.seqcore import build_family
from ultraclass.spectral import (Operator, OperatorSystem, apply, apriori_constant, bracket, check_ellipticity,
                                 classify, derivative, derivative_norms, find_admissible_A, fit_gevrey_index,
                                 iterate_norms, laplace, mainprop_trace, make_field, named_system,
                                 regular_estimate_check, rho_schedule, weighted_interpolation_check)
from ultraclass.transforms import PreconditionError
from ultraclass.verdict import Status


def test_parseval_against_fft():
    u = make_field("band-limited-random", dim=1, cutoff=16, seed=3, band=10)
    # physical samples on 2N+1 equispaced points; unit-measure L2 norm = RMS
    c = np.fft.ifftshift(u.coeffs)
    x = np.fft.ifft(c) * c.size
    assert math.sqrt(np.mean(np.abs(x) ** 2)) == pytest.approx(u.norm(), rel=1e-12)
    assert u.norm() == pytest.approx(1.0, rel=1e-12)


def test_derivative_matches_fft_differentiation():
    u = make_field("band-limited-random", dim=1, cutoff=16, seed=5, band=8)
    du = apply(derivative(1, 1), u)
    n = 33
    xs = 2 * np.pi * np.arange(n) / n
    xi = np.arange(-16, 17)
    # -i d/dx of sum c e^{i xi x} by finite spectral sums evaluated pointwise
    vals = (u.coeffs[None, :] * xi[None, :] * np.exp(1j * xs[:, None] * xi[None, :])).sum(axis=1)
    assert math.sqrt(np.mean(np.abs(vals) ** 2)) == pytest.approx(du.norm(), rel=1e-12)


def test_laplace_norm_gevrey1_profile_mpmath():
    u = make_field("gevrey-profile", dim=1, cutoff=4096, s=1)
    mpmath.mp.dps = 30
    oracle = mpmath.sqrt(2 * mpmath.nsum(lambda k: k ** 4 * mpmath.e ** (-2 * k), [1, mpmath.inf]))
    assert apply(laplace(1), u).norm() == pytest.approx(float(oracle), rel=1e-14)
    assert float(oracle) == pytest.approx(1.22797699072843597938618700894, rel=1e-20)


def test_single_mode_derivative_norms():
    u = make_field("single-mode", dim=2, cutoff=8, xi0=(3, -2))
    tab = derivative_norms(u, 4)
    for r in tab.rows:
        a1, a2 = r.key
        assert math.exp(r.log_norm) == pytest.approx(3 ** a1 * 2 ** a2, rel=1e-12)


def test_iterate_words_and_labels():
    u = make_field("single-mode", dim=2, cutoff=8, xi0=(1, 2))
    tab = iterate_norms(named_system("gradient", 2), u, 3)
    assert len(tab.rows) == 1 + 2 + 4 + 8
    row = next(r for r in tab.rows if r.label == "tau=1.2.2")
    assert math.exp(row.log_norm) == pytest.approx(4.0, rel=1e-12)
    assert tab.to_csv().splitlines()[0] == "word_or_alpha,log_norm,cutoff_flag"


def test_word_budget():
    u = make_field("single-mode", dim=2, cutoff=8, xi0=(1, 2))
    with pytest.raises(ValueError, match="budget"):
        iterate_norms(named_system("gradient", 2), u, 12)


def test_composition_is_symbol_product():
    P = laplace(2)
    Q = derivative(1, 2)
    u = make_field("band-limited-random", dim=2, cutoff=10, seed=1, band=6)
    assert apply(P.compose(Q), u).norm() == pytest.approx(apply(P, apply(Q, u)).norm(), rel=1e-12)


def test_operator_validation():
    with pytest.raises(ValueError):
        Operator((((1, 0), 0.0),))
    with pytest.raises(ValueError):
        Operator((((1,), 1.0), ((1, 0), 1.0)))
    with pytest.raises(ValueError):
        OperatorSystem((laplace(1), laplace(2)))
    with pytest.raises(ValueError):
        OperatorSystem((laplace(1), derivative(1, 1))).common_order


def test_ellipticity():
    assert check_ellipticity(named_system("laplace", 2)).ok
    v = check_ellipticity(named_system("d1", 2))
    assert v.status is Status.FAILS
    assert v.witness["direction"] == pytest.approx([0.0, 1.0]) or v.witness["direction"] == pytest.approx([0.0, -1.0])
    g = check_ellipticity(named_system("gradient", 2))
    assert g.diagnostics["min_joint_magnitude"] == pytest.approx(1 / math.sqrt(2), rel=1e-6)


def test_apriori_constants():
    # (1+xi^2)^2 / (xi^4 + 1) peaks at xi = 1 with value 2
    lap = apriori_constant(named_system("laplace", 1))
    assert lap.C == pytest.approx(math.sqrt(2), rel=1e-12)
    assert abs(lap.xi[0]) == 1
    assert apriori_constant(named_system("gradient", 2)).C == pytest.approx(1.0, rel=1e-12)
    ident = apriori_constant(named_system("identity", 1))
    assert ident.C == 1.0 and ident.clamped
    with pytest.raises(PreconditionError):
        apriori_constant(named_system("d1", 2))


def test_weighted_interpolation():
    u = make_field("band-limited-random", dim=2, cutoff=12, seed=2, band=8)
    assert weighted_interpolation_check(named_system("laplace", 2), u, 0.5).status is Status.HOLDS
    with pytest.raises(ValueError):
        weighted_interpolation_check(named_system("laplace", 2), u, 1.5)


def test_find_admissible_A_closed_form():
    # C=H=d=n=1: 1/A + 1/(A-1) + 1/A = 1, i.e. A^2 - 4A + 2 = 0
    A = find_admissible_A(1, 1, 1, 1)
    assert A == pytest.approx(2 + math.sqrt(2), abs=1e-9)
    assert bracket(A, 1, 1, 1, 1) <= 1
    assert find_admissible_A(0, 3, 2, 2) == 3.0
    with pytest.raises(ValueError):
        find_admissible_A(1, 0, 1, 1)


def test_regular_estimate():
    assert regular_estimate_check(build_family("gevrey", 128, s=2), 64).status is Status.HOLDS
    with pytest.raises(PreconditionError):
        regular_estimate_check(build_family("lqr", 128, q=2, r=1.5), 16)
    with pytest.raises(ValueError):
        regular_estimate_check(build_family("gevrey", 16, s=2), 32)


def test_rho_schedule_oracle():
    M = build_family("gevrey", 128, s=2)
    R, Rp, dk = 1.0, 0.25, 16
    sch = rho_schedule(R, Rp, M, dk)
    Lam = math.factorial(dk) ** (2 / dk)
    assert sch.rho == pytest.approx((R - Rp) / (math.e * Lam), rel=1e-12)
    theta = [a * math.factorial(a) ** (1 / a) for a in range(1, dk + 1)]
    assert sch.min_slack == pytest.approx(R - max(theta) * sch.rho, rel=1e-12)
    assert sch.verdict.status is Status.HOLDS
    with pytest.raises(ValueError):
        rho_schedule(0.5, 0.6, M, 4)


def test_mainprop_gevrey_profile():
    u = make_field("gevrey-profile", dim=1, cutoff=4096, s=2)
    v = mainprop_trace(named_system("laplace", 1), u, build_family("gevrey", 128, s=2), 0.01, 6)
    assert v.status is Status.HOLDS
    assert v.diagnostics["A"] == pytest.approx(find_admissible_A(math.sqrt(2), 1.0, 2, 1), rel=1e-12)


def test_mainprop_preconditions():
    u = make_field("band-limited-random", dim=2, cutoff=16, seed=0, band=4)
    with pytest.raises(PreconditionError):
        mainprop_trace(named_system("d1", 2), u, build_family("gevrey", 128, s=2), 0.5, 2)
    with pytest.raises(PreconditionError):
        mainprop_trace(named_system("laplace", 2), u, build_family("lqr", 128, q=2, r=1.5), 0.5, 2)


def test_fit_recovers_gevrey_index():
    n = np.arange(1, 30)
    logT = 1.7 * np.array([math.lgamma(k + 1) for k in n]) + 0.3 * n - 2.0
    fit = fit_gevrey_index(n, logT)
    assert fit["s_hat"] == pytest.approx(1.7, abs=1e-9)
    assert fit["log_h"] == pytest.approx(0.3, abs=1e-9)


def test_classify_gevrey2_profile(cfg):
    u = make_field("gevrey-profile", dim=1, cutoff=4096, s=2)
    table = derivative_norms(u, 48, cfg)
    cands = [build_family("gevrey", 128, s=s) for s in (1.5, 2, 2.5)]
    rep = classify(table, cands, d=1, config=cfg)
    assert rep["fit"]["s_hat"] == pytest.approx(2.0, abs=0.1)
    by = {c["candidate"]: c for c in rep["candidates"]}
    assert by["gevrey:2"]["roumieu"].status is Status.HOLDS_EMPIRICALLY
    assert by["gevrey:2"]["beurling"].status is Status.FAILS
    assert by["gevrey:1.5"]["roumieu"].status is Status.FAILS
    assert by["gevrey:2.5"]["beurling"].status is Status.HOLDS_EMPIRICALLY
    mat = classify(table, [WeightMatrix.of(*cands[:2])], d=1, config=cfg)["candidates"][0]
    assert mat["roumieu"] == "HoldsEmpirically" and mat["beurling"] == "Fails"


def test_classify_needs_rows(cfg):
    u = make_field("gevrey-profile", dim=1, cutoff=4096, s=2)
    with pytest.raises(ValueError, match="insufficient"):
        classify(derivative_norms(u, 3, cfg), [], config=cfg)


def test_cutoff_flag():
    u = make_field("gevrey-profile", dim=1, cutoff=64, s=3)
    tab = derivative_norms(u, 40)
    assert tab.rows[-1].cutoff_limited and not tab.rows[0].cutoff_limited
    assert len(tab.usable()) < len(tab.rows)


@pytest.mark.parametrize("kind,kw", [("nope", {}), ("gevrey-profile", {"s": 0.5}),
                                     ("band-limited-random", {"seed": 1}),
                                     ("single-mode", {"xi0": (100,)})])
def test_make_field_errors(kind, kw):
    with pytest.raises(ValueError):
        make_field(kind, dim=1, cutoff=64, **kw)

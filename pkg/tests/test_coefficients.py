import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zetafourier.basis import basis_e
from zetafourier.coefficients import (FunctionSpec, Kind, Method, SumConvention, Weight, build_table,
                                      check_method, coeff_bar, coeff_direct, coeff_hat, coeff_hat_with_tail,
                                      coeff_tilde_negative, coeff_xi, direct_coefficients, reset_calibration,
                                      s_sum, theta_log_integral, tilde_lead, tilde_lead_printed,
                                      tilde_negative_coefficient, tilde_series, whittaker_partial_sum,
                                      xi_residue_sum)
from zetafourier.errors import (CalibrationRequired, ConventionUnvalidated, IndexRangeError, TailTooLarge)
from zetafourier.specialfn import theta_big, theta_d_operator, xi_derivatives, zeta

SIGMA = 0.75


# ------------------------------------------------------------ direct ----


def test_direct_constant_and_basis():
    one = FunctionSpec.custom(lambda y: np.ones_like(y, dtype=complex), "one")
    res = direct_coefficients(one, range(-3, 4))
    assert abs(res.values[0] - 1) < 1e-10
    assert all(abs(res.values[n]) < 1e-10 for n in (-3, -2, -1, 1, 2, 3))
    e1 = FunctionSpec.custom(lambda y: basis_e(1, y), "e1")
    assert abs(coeff_direct(e1, 1) - 1) < 1e-10


def test_direct_inv_zeta_constant_term():
    a0 = coeff_direct(FunctionSpec.inv_zeta(SIGMA), 0)
    assert abs(a0 - 1 / complex(mp.zeta(1.25))) < 1e-9
    assert abs(a0 - 0.2176) < 1e-4


def test_direct_against_scipy_oracle():
    # 1/zeta(sigma + i x) against e_2, integrated by scipy in the circle variable on a truncated range
    spec = FunctionSpec.inv_zeta(SIGMA)

    def integrand(p, part):
        y = 0.5 * math.tan(p / 2)
        v = 1.0 / complex(zeta(SIGMA + 1j * y)) * np.exp(2j * p)
        return getattr(v, part) / (2 * math.pi)

    edge = 2 * math.atan(2 * 40.0)
    re = quad(integrand, -edge, edge, args=("real",), limit=400)[0]
    im = quad(integrand, -edge, edge, args=("imag",), limit=400)[0]
    # beyond |y| = 40 the function is close to its mean 1; integrate that against e^{2ip} over the caps
    cap = math.sin(2 * (math.pi - edge)) / (2 * math.pi)
    ref = complex(re + cap, im)
    assert abs(coeff_direct(spec, 2) - ref) < 2e-4


def test_direct_index_range():
    with pytest.raises(IndexRangeError):
        direct_coefficients(FunctionSpec.inv_zeta(SIGMA), [65])


def test_one_sided_inv_zeta():
    res = direct_coefficients(FunctionSpec.inv_zeta(SIGMA), range(-6, 0))
    assert max(abs(v) for v in res.values.values()) < 1e-7


def test_conjugation_symmetry():
    a = direct_coefficients(FunctionSpec.inv_zeta(SIGMA), range(-5, 6)).values
    b = direct_coefficients(FunctionSpec.inv_zeta_conj(SIGMA), range(-5, 6)).values
    for n in range(-5, 6):
        assert abs(b[n] - np.conj(a[-n])) < 1e-10


def test_xi_weighted_symmetry_and_constant():
    a = direct_coefficients(FunctionSpec.xi_weighted(), range(-6, 7)).values
    for n in range(1, 7):
        assert abs(a[n] - a[-n]) < 1e-8
    assert max(abs(v.imag) for v in a.values()) < 1e-8
    assert abs(a[0] - theta_big(1.0)) < 1e-8


def test_spec_keys_are_stable():
    assert FunctionSpec.inv_zeta(0.75).key() == FunctionSpec.inv_zeta(0.75).key()
    assert FunctionSpec.inv_zeta(0.75).key() != FunctionSpec.inv_zeta(0.8).key()
    assert FunctionSpec.zeta_cos_v(0.9, 1).key() != FunctionSpec.zeta_cos_v(0.9, 1, Weight.DOUBLE_ANGLE).key()


# -------------------------------------------------------- conventions ----


def test_unvalidated_convention_raises(saved_calibration):
    reset_calibration()
    with pytest.raises(ConventionUnvalidated):
        coeff_bar(SIGMA, 2)
    with pytest.raises(ConventionUnvalidated):
        tilde_negative_coefficient(0.9, -1)
    with pytest.raises(CalibrationRequired):
        coeff_xi(1, Method.THETA_INTEGRAL)
    with pytest.raises(CalibrationRequired):
        build_table(FunctionSpec.inv_zeta(SIGMA), 0, 2, Method.RESIDUE)


def test_calibration_outcomes(calibrated):
    assert all(rec.agreed for rec in calibrated.values())
    assert calibrated["bar"].convention.label() == SumConvention("inclusive", "leibniz", 1, 1).label()
    assert calibrated["xi"].convention.form == "corrected"
    # the literal readings of the printed formulas are rejected
    assert min(v for k, v in calibrated["xi"].errors.items() if "printed" in k) > 1e-3
    assert calibrated["bar"].errors[SumConvention("strict", "printed", 1, 1).label()] > 1e-3


def test_bar_examples(calibrated):
    assert abs(coeff_bar(SIGMA, 0) - 1 / complex(mp.zeta(1.25))) < 1e-12
    assert coeff_bar(SIGMA, -3) == 0
    direct = direct_coefficients(FunctionSpec.inv_zeta(SIGMA), range(1, 7)).values
    for n in range(1, 7):
        assert abs(coeff_bar(SIGMA, n) - direct[n]) < 1e-7


def test_bar_other_sigma(calibrated):
    direct = direct_coefficients(FunctionSpec.inv_zeta(0.85), range(0, 5)).values
    for n in range(0, 5):
        assert abs(coeff_bar(0.85, n) - direct[n]) < 1e-7


def test_bar_rejects_sigma():
    with pytest.raises(ValueError):
        coeff_bar(0.5, 1, SumConvention())


def test_hat_examples(calibrated, zeros):
    assert abs(coeff_hat(SIGMA, 0, zeros) - 1 / complex(mp.zeta(1.25))) < 1e-12
    conv = calibrated["hat"].convention
    assert abs(coeff_hat(SIGMA, -1, zeros) - conv.zero_sign * s_sum(-1, SIGMA, zeros).value) < 1e-15
    direct = direct_coefficients(FunctionSpec.inv_zeta_conj(SIGMA), range(-4, 5))
    for n in range(-4, 5):
        value, tail = coeff_hat_with_tail(SIGMA, n, zeros)
        assert abs(value - direct.values[n]) <= tail + direct.errors[n]


def test_hat_tail_shrinks_with_more_zeros(calibrated, zeros):
    tails = [s_sum(2, SIGMA, zeros.truncated(k)).tail_bound for k in (20, 50, 100)]
    assert tails[0] > tails[1] > tails[2]
    with pytest.raises(TailTooLarge):
        coeff_hat(SIGMA, 2, zeros, tol=1e-6)


def test_trivial_zero_terms_decay(zeros):
    triv = np.abs(s_sum(1, SIGMA, zeros).trivial_terms)
    assert np.all(np.diff(triv[2:]) < 0)


# -------------------------------------------------------- Whittaker ----


def test_tilde_lead_values():
    assert abs(tilde_lead(1.0, 1) - 1 / (2 * math.gamma(2.5) * math.gamma(0.5))) < 1e-14
    assert tilde_lead_printed(2.0, 1) == pytest.approx(6.0)
    assert tilde_lead_printed(2.0, 2) == 0


def test_whittaker_partial_bounds_decrease():
    bounds = [whittaker_partial_sum(0.9, 1.0, 1, k)[1] for k in (64, 128, 256)]
    assert bounds[0] > bounds[1] > bounds[2]


@pytest.mark.slow
def test_whittaker_series_matches_quadrature():
    direct = direct_coefficients(FunctionSpec.zeta_cos_v(0.9, 1.0, Weight.HALF_ANGLE), range(1, 3)).values
    for n in (1, 2):
        r = tilde_series(0.9, 1.0, n)
        assert abs(r.value - direct[n]) < 1e-7


def test_whittaker_method_rejects_negative_indices():
    spec = FunctionSpec.zeta_cos_v(0.9, 1.0)
    with pytest.raises(ValueError):
        check_method(spec, Method.WHITTAKER_SERIES, -2, -1)
    with pytest.raises(ValueError):
        check_method(FunctionSpec.zeta_cos_v(0.9, 1.0, Weight.DOUBLE_ANGLE), Method.WHITTAKER_SERIES, 1, 2)
    with pytest.raises(ValueError):
        check_method(FunctionSpec.zeta_cos_v(0.9, 2.0), Method.RESIDUE, -3, -1)
    with pytest.raises(ValueError):
        check_method(FunctionSpec.xi_weighted(), Method.THETA_INTEGRAL, -13, 0)


# ----------------------------------------------------- negative side ----


def test_negative_closed_form_examples():
    assert coeff_tilde_negative(0.75, -1) == pytest.approx(80 / 27, rel=1e-14)
    vals = [abs(coeff_tilde_negative(s, -2)) for s in (0.6, 0.55, 0.51, 0.501)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        coeff_tilde_negative(0.75, 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.51, 0.99), st.integers(-8, -1))
def test_negative_closed_form_is_geometric(sigma, n):
    r = (1.5 - sigma) / (sigma - 0.5)
    assert coeff_tilde_negative(sigma, n - 1) == pytest.approx(coeff_tilde_negative(sigma, n) / r, rel=1e-12)


def test_negative_side_matches_quadrature(calibrated):
    conv = calibrated["tilde-negative"].convention
    spec = FunctionSpec.zeta_cos_v(0.9, 1.0, conv.weight)
    direct = direct_coefficients(spec, range(-4, 0)).values
    for n in range(-4, 0):
        assert abs(tilde_negative_coefficient(0.9, n) - direct[n]) < 1e-7


# ---------------------------------------------------------------- Xi ----


def test_theta_log_integral_against_trapezoid():
    t = np.linspace(0.0, 6.0, 600_001)
    y = np.exp(-t)
    vals = -t * theta_d_operator(y, 1) * y
    trap = float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(t)))
    assert abs(theta_log_integral(1) - (-trap)) < 1e-8


def test_xi_residue_sums():
    assert abs(xi_residue_sum(1, 1) + 0.5) < 1e-12
    d = xi_derivatives(1.0, 2)
    assert abs(xi_residue_sum(2, 1) - (2 * d[0] + d[1]).real) < 1e-10


def test_xi_theta_route(calibrated):
    direct = direct_coefficients(FunctionSpec.xi_weighted(), range(-4, 5)).values
    for n in (1, 2, 3, 4, -1, -2, -3, -4):
        assert abs(coeff_xi(n, Method.THETA_INTEGRAL) - direct[n]) < 1e-6
    assert abs(coeff_xi(0, Method.THETA_INTEGRAL) - theta_big(1.0)) < 1e-14


# ------------------------------------------------------------ tables ----


def test_table_indexing_and_hash():
    t = build_table(FunctionSpec.inv_zeta(SIGMA), -2, 2)
    assert t.covers(-1, 2) and not t.covers(-3, 0)
    with pytest.raises(IndexRangeError):
        t[3]
    assert t.hash == build_table(FunctionSpec.inv_zeta(SIGMA), -2, 2).hash
    assert t.meta["method"] == "quadrature"


def test_residue_table(calibrated):
    t = build_table(FunctionSpec.inv_zeta(SIGMA), 0, 3, Method.RESIDUE)
    assert "convention" in t.meta
    q = build_table(FunctionSpec.inv_zeta(SIGMA), 0, 3)
    for n in range(4):
        assert abs(t[n] - q[n]) < 1e-7

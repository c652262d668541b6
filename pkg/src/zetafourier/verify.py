"""Verification suites: each returns a list of :class:`Check` records."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import fejer_mean, fejer_mean_cesaro, parseval_check
from .basis import DEFAULT_QUADRATURE, QuadratureSpec, gram_matrix
from .coefficients import (FunctionSpec, Method, Weight, build_table, calibrate_bar, calibrate_hat,
                           calibrate_tilde_negative, calibrate_xi, coeff_bar, coeff_hat_with_tail,
                           direct_coefficients, tilde_negative_coefficient, tilde_series,
                           xi_theta_coefficient)
from .specialfn import theta_big, xi_derivatives, zeta
from .zeros import ZeroTable, bundled_zeros

SUITES = ("orthonormality", "theorem11", "theorem12", "theorem31", "parseval", "fejer")


def _num(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass(frozen=True)
class Check:
    name: str
    lhs: object
    rhs: object
    tol: float
    passed: bool
    info: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "lhs": _num(self.lhs), "rhs": _num(self.rhs),
               "tol": self.tol, "pass": bool(self.passed)}
        if self.info:
            out["informational"] = True
        if self.note:
            out["note"] = self.note
        return out


def close(name: str, lhs, rhs, tol: float, note: str = "") -> Check:
    return Check(name, complex(lhs), complex(rhs), tol, abs(complex(lhs) - complex(rhs)) <= tol, note=note)


def bounded(name: str, value: float, limit: float, note: str = "") -> Check:
    """Passes when ``value <= limit``; tol records the limit."""
    return Check(name, float(value), float(limit), float(limit), value <= limit, note=note)


def orthonormality(q: QuadratureSpec = DEFAULT_QUADRATURE, n: int = 20) -> list[Check]:
    out = []
    idx = list(range(-n, n + 1))
    for route in ("line", "periodic"):
        g = gram_matrix(idx, q, route)
        err = float(np.abs(g - np.eye(len(idx))).max())
        out.append(bounded(f"orthonormality.{route}.max_deviation", err, 1e-9))
    return out


def theorem11(zeros: ZeroTable, q: QuadratureSpec = DEFAULT_QUADRATURE, sigma: float = 0.75) -> list[Check]:
    out = []
    rec = calibrate_bar(sigma, q=q)
    out.append(Check("theorem11.bar.calibration", 0.0, 0.0, rec.tol, rec.agreed,
                     note=rec.convention.label() if rec.agreed else "no convention agreed"))
    direct = direct_coefficients(FunctionSpec.inv_zeta(sigma), range(-6, 7), q)
    if rec.agreed:
        for n in range(0, 7):
            out.append(close(f"theorem11.bar.n={n}", coeff_bar(sigma, n), direct.values[n], 1e-7))
    for n in range(-6, 0):
        out.append(bounded(f"theorem11.one_sided.n={n}", abs(direct.values[n]), 1e-7))
    rec = calibrate_hat(zeros, sigma, q=q)
    out.append(Check("theorem11.hat.calibration", 0.0, 0.0, rec.tol, rec.agreed,
                     note=rec.convention.label() if rec.agreed else "no convention agreed"))
    conj = direct_coefficients(FunctionSpec.inv_zeta_conj(sigma), range(-4, 5), q)
    for n in range(-4, 5):
        if not rec.agreed:
            break
        value, tail = coeff_hat_with_tail(sigma, n, zeros)
        tol = tail + conj.errors[n]
        out.append(close(f"theorem11.hat.n={n}", value, conj.values[n], tol))
        out.append(bounded(f"theorem11.hat.tail_bound.n={n}", tail, 1e-3,
                           note=f"{zeros.count} zeros"))
    return out


def theorem12(q: QuadratureSpec = DEFAULT_QUADRATURE, sigma: float = 0.9, v: float = 1.0,
              k_max: int = 256) -> list[Check]:
    out = []
    half = direct_coefficients(FunctionSpec.zeta_cos_v(sigma, v, Weight.HALF_ANGLE), range(1, 4), q)
    for n in range(1, 4):
        r = tilde_series(sigma, v, n, k_max)
        combined = r.error_estimate + half.errors[n]
        out.append(close(f"theorem12.series.n={n}", r.value, half.values[n], 1e-5,
                         note=f"combined error estimate {combined:.2e}, k_max={r.k_max}"))
        printed = tilde_series(sigma, v, n, k_max, form="printed").value
        out.append(Check(f"theorem12.series_printed_form.n={n}", complex(printed), half.values[n], 1e-5,
                         abs(printed - half.values[n]) <= 1e-5, info=True,
                         note="uncorrected first term and prefactor, no pole term"))
    rec = calibrate_tilde_negative(sigma, q=q)
    out.append(Check("theorem12.negative.calibration", 0.0, 0.0, rec.tol, rec.agreed,
                     note=rec.convention.label() if rec.agreed else "no convention agreed"))
    for w in Weight:
        best = min(err for label, err in rec.errors.items() if f"weight={w.value}," in label)
        out.append(Check(f"theorem12.negative.variant={w.value}.best_mismatch", best, 0.0, rec.tol,
                         best <= rec.tol, info=True))
    if rec.agreed:
        spec = FunctionSpec.zeta_cos_v(sigma, 1.0, rec.convention.weight)
        ref = direct_coefficients(spec, range(-4, 0), q).values
        for n in range(-4, 0):
            out.append(close(f"theorem12.negative.n={n}", tilde_negative_coefficient(sigma, n), ref[n], 1e-7))
    return out


def theorem31(q: QuadratureSpec = DEFAULT_QUADRATURE) -> list[Check]:
    out = []
    rec = calibrate_xi(q=q)
    out.append(Check("theorem31.calibration", 0.0, 0.0, rec.tol, rec.agreed,
                     note=rec.convention.label() if rec.agreed else "no convention agreed"))
    direct = direct_coefficients(FunctionSpec.xi_weighted(), range(-6, 7), q).values
    if rec.agreed:
        for n in (1, 2, 3, 4, -1, -2, -3, -4):
            out.append(close(f"theorem31.theta.n={n}", xi_theta_coefficient(n, rec.convention, q),
                             direct[n], 1e-6))
    for n in range(1, 7):
        out.append(close(f"theorem31.symmetry.n={n}", direct[n], direct[-n], 1e-8))
    for n in range(-6, 7):
        out.append(bounded(f"theorem31.real.n={n}", abs(direct[n].imag), 1e-8))
    theta1 = float(theta_big(1.0))
    out.append(close("theorem31.a0_equals_theta1", direct[0], theta1, 1e-8))
    out.append(Check("theorem31.a0_stated_zero", direct[0], 0.0, 1e-8, abs(direct[0]) <= 1e-8, info=True,
                     note="the zeroth coefficient equals Theta(1), not 0"))
    d0 = xi_derivatives(0.0, 6)
    d1 = xi_derivatives(1.0, 6)
    for k in range(7):
        out.append(close(f"theorem31.coffey.k={k}", d0[k], (-1) ** k * d1[k], 1e-8))
    return out


def parseval(q: QuadratureSpec = DEFAULT_QUADRATURE, N: int = 12, sigma: float = 0.75) -> list[Check]:
    out = []
    for name, spec in (("inv_zeta", FunctionSpec.inv_zeta(sigma)), ("xi_weighted", FunctionSpec.xi_weighted())):
        table = build_table(spec, -N, N, Method.QUADRATURE, q)
        rep = parseval_check(spec, table, N, q)
        limit = rep.tail_bound + 2e-9
        out.append(Check(f"parseval.{name}.N={N}", rep.lhs, rep.rhs_partial, limit, rep.verdict,
                         note=f"difference {rep.difference:.3e}, fitted tail bound {rep.tail_bound:.3e}"))
        out.append(Check(f"parseval.{name}.bessel", max(rep.history), rep.lhs, q.tol, rep.bessel))
    return out


def fejer(q: QuadratureSpec = DEFAULT_QUADRATURE, sigma: float = 0.75, x0: float = 1.0) -> list[Check]:
    out = []
    spec = FunctionSpec.inv_zeta(sigma)
    target = 1.0 / complex(zeta(sigma + 0.5j * math.tan(0.5 * x0)))
    errs = []
    for N in (8, 16, 32, 64):
        errs.append(abs(fejer_mean(spec, x0, N, q, check=False) - target))
    for (n0, e0), (n1, e1) in zip(zip((8, 16, 32), errs), zip((16, 32, 64), errs[1:])):
        out.append(bounded(f"fejer.decrease.N={n0}->{n1}", e1, 1.05 * e0))
    out.append(bounded("fejer.error.N=64", errs[-1], 1e-2))
    out.append(close("fejer.routes.N=16", fejer_mean(spec, x0, 16, q, check=False),
                     fejer_mean_cesaro(spec, x0, 16, q), 1e-7))
    return out


def run(suite: str, q: QuadratureSpec = DEFAULT_QUADRATURE, zeros: ZeroTable | None = None) -> list[Check]:
    """Run one suite or ``"all"``."""
    names = SUITES if suite == "all" else (suite,)
    checks: list[Check] = []
    for name in names:
        if name == "orthonormality":
            checks += orthonormality(q)
        elif name == "theorem11":
            checks += theorem11(zeros if zeros is not None else bundled_zeros(), q)
        elif name == "theorem12":
            checks += theorem12(q)
        elif name == "theorem31":
            checks += theorem31(q)
        elif name == "parseval":
            checks += parseval(q)
        elif name == "fejer":
            checks += fejer(q)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return checks

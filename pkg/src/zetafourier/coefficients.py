"""Fourier coefficients ``a_n = int f(y) conj(e_n(y)) dmu(y)`` by several routes.

Direct quadrature is the reference.  The closed forms (residue sums,
Whittaker series, Theta integrals) are checked against it, and every closed
form with an ambiguous summation bound or sign is resolved by
:func:`calibrate`, which records the convention that agrees with quadrature.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .basis import (DEFAULT_QUADRATURE, Grid, QuadratureSpec, line_grid,
                    periodic_grid)
from .errors import (CalibrationRequired, ConventionUnvalidated,
                     IndexRangeError, RouteDisagreement, SlowConvergence,
                     TailTooLarge, ToleranceError)
from .specialfn import (DEFAULT_PROFILE, current_profile, inv_zeta_taylor, rgamma, gamma,
                        theta_d_operator, whittaker_w, whittaker_w_asymptotic,
                        xi, xi_derivatives,
                        zeta, zeta_prime_trivial)
from .zeros import ZeroTable

GRID_N_MAX = 64
XI_CUTOFF = 300.0  # |Xi(y)| < 1e-150 beyond this height


class Kind(str, Enum):
    INV_ZETA = "inv-zeta"
    INV_ZETA_CONJ = "inv-zeta-conj"
    ZETA_COS_V = "zeta-cos-v"
    XI_WEIGHTED = "xi-weighted"
    CUSTOM = "custom"


class Weight(str, Enum):
    HALF_ANGLE = "half-angle"      # cos^v(arctan 2y) = (1 + 4y^2)^(-v/2)
    DOUBLE_ANGLE = "double-angle"  # cos^v(2 arctan 2y) = ((1 - 4y^2)/(1 + 4y^2))^v


class Method(str, Enum):
    QUADRATURE = "quadrature"
    RESIDUE = "residue"
    WHITTAKER_SERIES = "whittaker"
    THETA_INTEGRAL = "theta"


@dataclass(frozen=True)
class FunctionSpec:
    """The function being expanded.

    Use the constructors :meth:`inv_zeta`, :meth:`inv_zeta_conj`,
    :meth:`zeta_cos_v`, :meth:`xi_weighted` and :meth:`custom`.  For custom
    functions ``func`` maps an array of ``y`` to complex values and must be
    bounded; ``label`` names it in cache keys.
    """

    kind: Kind
    sigma: float | None = None
    v: complex = 0.0
    weight: Weight = Weight.HALF_ANGLE
    func: Callable | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind in (Kind.INV_ZETA, Kind.INV_ZETA_CONJ, Kind.ZETA_COS_V):
            if self.sigma is None or not 0.5 < self.sigma < 1.0:
                raise ValueError("sigma must lie strictly between 1/2 and 1")
        if self.kind is Kind.ZETA_COS_V:
            v = complex(self.v)
            if v.imag == 0 and v.real < 0 and v.real % 2 == 0:
                raise ValueError("v cannot be a negative even integer")
        if self.kind is Kind.CUSTOM and self.func is None:
            raise ValueError("custom specs need a callable")

    @classmethod
    def inv_zeta(cls, sigma: float) -> "FunctionSpec":
        return cls(Kind.INV_ZETA, float(sigma))

    @classmethod
    def inv_zeta_conj(cls, sigma: float) -> "FunctionSpec":
        return cls(Kind.INV_ZETA_CONJ, float(sigma))

    @classmethod
    def zeta_cos_v(cls, sigma: float, v: complex, weight: Weight = Weight.HALF_ANGLE) -> "FunctionSpec":
        return cls(Kind.ZETA_COS_V, float(sigma), complex(v), Weight(weight))

    @classmethod
    def xi_weighted(cls) -> "FunctionSpec":
        return cls(Kind.XI_WEIGHTED)

    @classmethod
    def custom(cls, func: Callable, label: str = "custom") -> "FunctionSpec":
        return cls(Kind.CUSTOM, func=func, label=label)

    def __hash__(self):
        return hash((self.kind, self.sigma, self.v, self.weight, id(self.func), self.label))

    def __eq__(self, other):
        return (isinstance(other, FunctionSpec) and self.key() == other.key()
                and self.func is other.func)

    def params(self) -> dict:
        out = {"kind": self.kind.value}
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.kind is Kind.ZETA_COS_V:
            out["v"] = [complex(self.v).real, complex(self.v).imag]
            out["weight"] = self.weight.value
        if self.kind is Kind.CUSTOM:
            out["label"] = self.label
        return out

    def key(self) -> str:
        return json.dumps(self.params(), sort_keys=True)

    # -- evaluation ------------------------------------------------------

    def _weight(self, y):
        y = np.asarray(y, dtype=float)
        v = complex(self.v)
        if self.weight is Weight.HALF_ANGLE:
            return np.exp(-0.5 * v * np.log1p(4.0 * y * y))
        c = ((1.0 - 4.0 * y * y) / (1.0 + 4.0 * y * y)).astype(complex)
        return np.power(c, v)

    def evaluate(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kind is Kind.INV_ZETA:
            return 1.0 / zeta(self.sigma + 1j * y)
        if self.kind is Kind.INV_ZETA_CONJ:
            return 1.0 / zeta(self.sigma - 1j * y)
        if self.kind is Kind.ZETA_COS_V:
            return zeta(self.sigma + 1j * y) * self._weight(y)
        if self.kind is Kind.XI_WEIGHTED:
            out = np.zeros(y.shape, dtype=complex)
            inside = np.abs(y) <= XI_CUTOFF
            yi = y[inside]
            out[inside] = (0.25 + yi * yi) * xi(0.5 + 1j * yi)
            return out
        return np.asarray(self.func(y), dtype=complex) * np.ones(y.shape)

    def asymptote(self, y) -> np.ndarray:
        """Stand-in for ``f`` far up the line: its local mean value.

        Dirichlet series average to their constant term, so ``1/zeta`` and
        ``zeta`` are replaced by 1.  Bounded custom functions are used as is.
        """
        y = np.asarray(y, dtype=float)
        if self.kind in (Kind.INV_ZETA, Kind.INV_ZETA_CONJ):
            return np.ones(y.shape, dtype=complex)
        if self.kind is Kind.ZETA_COS_V:
            return self._weight(y)
        if self.kind is Kind.XI_WEIGHTED:
            return np.zeros(y.shape, dtype=complex)
        return self.evaluate(y)

    def asymptote_sq(self, y) -> np.ndarray:
        """Mean value of ``|f|^2`` far up the line."""
        y = np.asarray(y, dtype=float)
        if self.kind in (Kind.INV_ZETA, Kind.INV_ZETA_CONJ):
            # sum of mu(m)^2 m^(-2 sigma) = zeta(2 sigma) / zeta(4 sigma)
            c = float(np.real(zeta(2 * self.sigma) / zeta(4 * self.sigma)))
            return np.full(y.shape, c)
        if self.kind is Kind.ZETA_COS_V:
            return float(np.real(zeta(2 * self.sigma))) * np.abs(self._weight(y)) ** 2
        return np.abs(self.asymptote(y)) ** 2

    @property
    def mean_modelled(self) -> bool:
        """True when the caps use a mean value instead of the function itself."""
        return self.kind in (Kind.INV_ZETA, Kind.INV_ZETA_CONJ, Kind.ZETA_COS_V)


# ------------------------------------------------------------ sampling ----


def grids(q: QuadratureSpec) -> tuple[Grid, Grid]:
    return line_grid(q, GRID_N_MAX), periodic_grid(q, GRID_N_MAX)


_sample_lock = threading.Lock()


@lru_cache(maxsize=32)
def _samples_cached(spec: FunctionSpec, q: QuadratureSpec, route: str, profile) -> np.ndarray:
    grid = grids(q)[0 if route == "line" else 1]
    out = np.empty(grid.y.size, dtype=complex)
    out[: grid.n_line] = spec.evaluate(grid.y_line)
    out[grid.n_line:] = spec.asymptote(grid.y_cap)
    out.setflags(write=False)
    return out


def samples(spec: FunctionSpec, q: QuadratureSpec, route: str) -> np.ndarray:
    """Values of ``spec`` on the line or periodic grid (cached, read-only)."""
    with _sample_lock:
        return _samples_cached(spec, q, route, current_profile())


def _moments(grid: Grid, vals: np.ndarray, ns) -> np.ndarray:
    ns = np.asarray(ns)
    phase = np.exp(2j * np.outer(np.arctan(2.0 * grid.y), ns))
    return (grid.w * vals) @ phase


def _fluctuation_estimate(spec: FunctionSpec, q: QuadratureSpec) -> float:
    """Size of ``int_{|y|>Y} (f - mean) dmu`` judged from the resolved range.

    Partial integrals of ``f - mean`` over ``Y' < |y| < y_max`` for
    ``Y' >= y_max/2`` oscillate with an amplitude that the neglected tail
    shares; their largest magnitude is reported.
    """
    if not spec.mean_modelled:
        return 0.0
    grid = grids(q)[0]
    y = grid.y_line
    vals = samples(spec, q, "line")[: grid.n_line]
    far = np.abs(y) >= 0.5 * q.y_max
    d = (vals[far] - spec.asymptote(y[far])) * grid.w[: grid.n_line][far]
    order = np.argsort(-np.abs(y[far]))
    # the tail of an oscillating mean-zero integrand shrinks like 1/Y'^2
    scale = (np.abs(y[far][order]) / q.y_max) ** 2
    return float(np.max(np.abs(np.cumsum(d[order])) * scale))


@dataclass(frozen=True)
class DirectResult:
    values: dict
    errors: dict


def direct_coefficients(spec: FunctionSpec, ns, q: QuadratureSpec = DEFAULT_QUADRATURE,
                        check_routes: bool = True) -> DirectResult:
    """Coefficients for every n in ``ns`` by the line route, checked by the periodic route."""
    ns = [int(n) for n in ns]
    if ns and max(abs(n) for n in ns) > GRID_N_MAX:
        raise IndexRangeError(f"direct quadrature is resolved for |n| <= {GRID_N_MAX}")
    gl, gp = grids(q)
    a = _moments(gl, samples(spec, q, "line"), ns)
    fl = _fluctuation_estimate(spec, q)
    values, errors = {}, {}
    if check_routes:
        b = _moments(gp, samples(spec, q, "periodic"), ns)
        for n, x, z in zip(ns, a, b):
            if abs(x - z) > 2 * q.tol:
                raise RouteDisagreement(
                    f"line and periodic quadrature differ by {abs(x - z):.3e} at n={n}", complex(x), complex(z))
    else:
        b = a
    for n, x, z in zip(ns, a, b):
        values[n] = complex(x)
        errors[n] = float(abs(x - z) + fl)
    return DirectResult(values, errors)


def coeff_direct(spec: FunctionSpec, n: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """a_n by quadrature on both routes; the line value is returned."""
    return direct_coefficients(spec, [n], q).values[int(n)]


# ------------------------------------------------ residue conventions ----


@dataclass(frozen=True)
class SumConvention:
    """How a binomial residue sum is read.

    ``upper``: ``"strict"`` sums k < n, ``"inclusive"`` sums k <= n.
    ``weight``: ``"printed"`` multiplies every term by (-1)^n,
    ``"leibniz"`` by (-1)^(n-k).  ``sign`` multiplies the whole residue part
    (and the constant term), ``zero_sign`` the sum over zeros.
    """

    upper: str = "inclusive"
    weight: str = "leibniz"
    sign: int = 1
    zero_sign: int = 1

    def __post_init__(self):
        if self.upper not in ("strict", "inclusive") or self.weight not in ("printed", "leibniz"):
            raise ValueError("upper is strict|inclusive, weight is printed|leibniz")
        if self.sign not in (1, -1) or self.zero_sign not in (1, -1):
            raise ValueError("signs must be +1 or -1")

    def label(self) -> str:
        return f"upper={self.upper},weight={self.weight},sign={self.sign:+d},zero_sign={self.zero_sign:+d}"


def binomial_residue(derivs, n: int, convention: SumConvention) -> complex:
    """(1/n!) sum_k C(n,k) (n-1)!/(k-1)! w_k h^(k)(0) for n >= 1.

    ``derivs[k]`` is h^(k)(0).  The k = 0 term vanishes since 1/(k-1)! = 0
    there.
    """
    if n < 1:
        raise ValueError("the binomial residue sum needs n >= 1")
    top = n if convention.upper == "inclusive" else n - 1
    total = 0j
    for k in range(1, top + 1):
        w = (-1) ** n if convention.weight == "printed" else (-1) ** (n - k)
        total += math.comb(n, k) * math.factorial(n - 1) / math.factorial(k - 1) * w * derivs[k]
    return convention.sign * total / math.factorial(n)


@dataclass(frozen=True)
class CalibrationRecord:
    family: str
    convention: object
    agreed: bool
    tol: float
    errors: dict  # candidate label -> max deviation from quadrature
    checked: dict  # n -> (closed form, quadrature)

    def to_dict(self) -> dict:
        conv = self.convention
        return {
            "family": self.family,
            "convention": conv.label() if conv is not None else None,
            "agreed": self.agreed,
            "tol": self.tol,
            "candidates": {k: float(v) for k, v in self.errors.items()},
        }


_CALIBRATION: dict[str, CalibrationRecord] = {}
_calibration_lock = threading.Lock()


def calibration_state() -> dict[str, CalibrationRecord]:
    with _calibration_lock:
        return dict(_CALIBRATION)


def set_calibration(record: CalibrationRecord) -> None:
    with _calibration_lock:
        _CALIBRATION[record.family] = record


def reset_calibration() -> None:
    with _calibration_lock:
        _CALIBRATION.clear()


def _calibrated(family: str):
    rec = _CALIBRATION.get(family)
    if rec is None:
        raise ConventionUnvalidated(f"no calibrated convention for the {family!r} family; run calibrate()")
    if not rec.agreed:
        raise ConventionUnvalidated(f"no candidate convention for {family!r} agreed with quadrature")
    return rec.convention


# ------------------------------------------------ reciprocal zeta: bar ----


def coeff_bar(sigma: float, n: int, convention: SumConvention | None = None) -> complex:
    """Residue form of the coefficients of ``1/zeta(sigma + i x)``.

    a_0 is 1/zeta(sigma + 1/2); for n >= 1 the binomial sum over the
    derivatives of ``1/zeta(sigma + 1/2 - s)`` at 0; zero for n < 0.
    """
    if not 0.5 < sigma < 1.0:
        raise ValueError("sigma must lie strictly between 1/2 and 1")
    conv = convention if convention is not None else _calibrated("bar")
    if n < 0:
        return 0j
    if n == 0:
        return conv.sign / complex(zeta(sigma + 0.5))
    return binomial_residue(inv_zeta_taylor(sigma + 0.5, n), n, conv)


# ------------------------------------------ conjugate reciprocal: hat ----


@dataclass(frozen=True)
class ZeroSum:
    value: complex
    tail_bound: float
    pair_terms: np.ndarray
    trivial_terms: np.ndarray


def s_sum(n: int, sigma: float, zeros: ZeroTable, k_trivial_max: int = 30) -> ZeroSum:
    """Partial sum of S(n, sigma) over the tabulated zeros and trivial zeros.

    Nontrivial zeros enter as conjugate pairs 1/2 +- i beta in ascending
    order.  The tail bound integrates the largest scaled term among the last
    ten pairs against the zero density log(t/2pi)/2pi.
    """
    b = np.asarray(zeros.betas, dtype=float)
    zp = np.asarray(zeros.zeta_prime, dtype=complex)

    def term(beta, deriv):
        u = sigma - 1j * beta
        w = 1.0 - sigma + 1j * beta
        return (u / w) ** n / (deriv * w * u)

    pairs = term(b, zp) + term(-b, np.conj(zp))
    ks = np.arange(1, k_trivial_max + 1)
    zpt = np.array([zeta_prime_trivial(int(k)) for k in ks])
    lo = 0.5 - sigma - 2.0 * ks
    hi = 0.5 + sigma + 2.0 * ks
    triv = (hi / lo) ** float(n) / (zpt * lo * hi)
    last = slice(max(0, b.size - 10), b.size)
    c = float(np.max(np.abs(pairs[last]) * b[last] ** 2))
    big = b[-1]
    tail = c * (1.0 + math.log(big / (2.0 * math.pi))) / (2.0 * math.pi * big)
    # trivial series: ratio bound of the last two terms
    r = abs(triv[-1] / triv[-2]) if k_trivial_max >= 2 else 1.0
    tail += abs(triv[-1]) * r / (1.0 - r) if r < 1 else math.inf
    return ZeroSum(complex(pairs.sum() + triv.sum()), float(tail), pairs, triv)


def coeff_hat_with_tail(sigma: float, n: int, zeros: ZeroTable, k_trivial_max: int = 30,
                        convention: SumConvention | None = None) -> tuple[complex, float]:
    """Residue form of the coefficients of ``1/zeta(sigma - i x)`` and its tail bound."""
    if not 0.5 < sigma < 1.0:
        raise ValueError("sigma must lie strictly between 1/2 and 1")
    if zeros.count < 10:
        raise ValueError("at least 10 zeros are required")
    conv = convention if convention is not None else _calibrated("hat")
    if n == 0:
        return 1.0 / complex(zeta(sigma + 0.5)), 0.0
    s = s_sum(n, sigma, zeros, k_trivial_max)
    part = conv.zero_sign * s.value
    if n >= 1:
        d = inv_zeta_taylor(sigma - 0.5, n)
        # derivatives of 1/zeta(sigma - 1/2 + s)
        h = [(-1) ** k * d[k] for k in range(n + 1)]
        part += binomial_residue(h, n, conv)
    return part, s.tail_bound


def coeff_hat(sigma: float, n: int, zeros: ZeroTable, k_trivial_max: int = 30,
              convention: SumConvention | None = None, tol: float | None = None) -> complex:
    """As :func:`coeff_hat_with_tail`; raises TailTooLarge when the bound exceeds ``tol``."""
    value, tail = coeff_hat_with_tail(sigma, n, zeros, k_trivial_max, convention)
    if tol is not None and tail > tol:
        raise TailTooLarge(f"zero-sum tail bound {tail:.3e} exceeds {tol:.1e} with {zeros.count} zeros")
    return value


# ------------------------------------------- zeta times cos^v: tilde ----

_W_SWITCH = 30.0


@lru_cache(maxsize=65536)
def _w_point_scaled(kappa: complex, mu: complex, z: float) -> complex:
    return whittaker_w(kappa, mu, z) * math.exp(0.5 * z)


def _w_scaled(kappa: complex, mu: complex, z: np.ndarray) -> np.ndarray:
    """W_{kappa,mu}(z) e^{z/2} on an array of positive ``z``."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=complex)
    big = z > _W_SWITCH
    if np.any(big):
        val, ok = whittaker_w_asymptotic(kappa, mu, z[big], scaled=True)
        val = np.atleast_1d(val)
        ok = np.atleast_1d(ok)
        for i in np.flatnonzero(~ok):
            val[i] = _w_point_scaled(kappa, mu, float(z[big][i]))
        out[big] = val
    for i in np.flatnonzero(~big):
        out[i] = _w_point_scaled(kappa, mu, float(z[i]))
    return out


def _tilde_summand(sigma: float, v: complex, n: int, x) -> np.ndarray:
    """x^-sigma (log x / 2)^(v/2) W_{n, -(v+1)/2}(log x) for real x > 1."""
    z = np.log(np.asarray(x, dtype=float))
    mu = -0.5 * (v + 1.0)
    return np.exp(-(sigma + 0.5) * z) * (0.5 * z) ** (0.5 * v) * _w_scaled(complex(n), mu, z)


def _tilde_integral(sigma: float, v: complex, n: int, x0: float, absolute: bool = False,
                    nodes: int = 16) -> complex:
    """int_{x0}^inf of the summand (or its modulus), taken in z = log x."""
    z0 = math.log(x0)
    rate = sigma - 0.5
    power = n + max(complex(v).real, 0.0) / 2.0 + 1.0

    def log_size(z):
        return -rate * z + power * math.log(z)

    peak = max(log_size(z0), log_size(max(z0, power / rate)))
    breaks = [z0]
    z = z0
    while z < 4000.0:
        z += 1.0 if z < _W_SWITCH else 4.0
        breaks.append(z)
        if z > power / rate and log_size(z) < peak - 45.0:
            break
    x, w = np.polynomial.legendre.leggauss(nodes)
    a = np.array(breaks[:-1])[:, None]
    b = np.array(breaks[1:])[:, None]
    zz = (0.5 * (a + b) + 0.5 * (b - a) * x).ravel()
    ww = (0.5 * (b - a) * w).ravel()
    mu = -0.5 * (v + 1.0)
    f = np.exp((0.5 - sigma) * zz) * (0.5 * zz) ** (0.5 * v) * _w_scaled(complex(n), mu, zz)
    if absolute:
        f = np.abs(f)
    return complex(np.dot(ww, f))


def tilde_lead(v: complex, n: int) -> complex:
    """Gamma(v+1) / (2^v Gamma(v/2+n+1) Gamma(v/2-n+1))."""
    v = complex(v)
    return complex(gamma(v + 1.0) / 2.0 ** v * rgamma(0.5 * v + n + 1.0) * rgamma(0.5 * v - n + 1.0))


def tilde_lead_printed(v: complex, n: int) -> complex:
    """2 Gamma(v+2) / (Gamma(v/2+n+1) Gamma(v/2-n+1)), the uncorrected first term."""
    v = complex(v)
    return complex(2.0 * gamma(v + 2.0) * rgamma(0.5 * v + n + 1.0) * rgamma(0.5 * v - n + 1.0))


def tilde_pole(sigma: float, v: complex, n: int) -> complex:
    """Contribution of the pole of zeta at s = 1 to the n-th coefficient."""
    u = 2.0 * (1.0 - sigma)
    return complex(-(1.0 - u * u) ** (-0.5 * complex(v)) * ((1.0 + u) / (1.0 - u)) ** n
                   / ((sigma - 0.5) * (1.5 - sigma)))


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    partial: complex     # sum over 2 <= k < k_max
    tail: complex        # Euler-Maclaurin estimate of the rest
    error_estimate: float
    k_max: int


def whittaker_partial_sum(sigma: float, v: complex, n: int, k_max: int) -> tuple[complex, float]:
    """Plain partial sum over 2 <= k <= k_max and the integral-comparison bound of the rest."""
    ks = np.arange(2, k_max + 1, dtype=float)
    partial = complex(np.sum(_tilde_summand(sigma, complex(v), n, ks)))
    bound = _tilde_integral(sigma, complex(v), n, float(k_max), absolute=True).real
    return partial, float(bound)


def _em_tail(sigma: float, v: complex, n: int, K: int) -> tuple[complex, float]:
    # sum_{k>=K} g(k) = int_K^inf g + g(K)/2 - g'(K)/12 + g'''(K)/720 - ...
    h = K / 8.0
    xs = K + h * np.arange(-2, 3)
    g = _tilde_summand(sigma, v, n, xs)
    d1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
    d3 = (-g[0] + 2 * g[1] - 2 * g[3] + g[4]) / (2 * h ** 3)
    integral = _tilde_integral(sigma, v, n, float(K))
    tail = integral + 0.5 * g[2] - d1 / 12.0 + d3 / 720.0
    # next correction B_6/6! g^(5) with g^(5) ~ g''' (sigma+3)(sigma+4)/K^2
    est = abs(d3) * (sigma + 3) * (sigma + 4) / (30240.0 * K * K) + abs(d3) * h * h / 720.0 * 0.1
    return complex(tail), float(est)


def tilde_series(sigma: float, v: complex, n: int, k_max: int = 256, tol: float = 1e-9,
                 k_limit: int = 8192, form: str = "corrected") -> SeriesResult:
    """Whittaker-series coefficient of ``zeta(sigma + ix) cos^v(arctan 2x)`` for n >= 1.

    ``form="corrected"`` uses the exact first term, the 2^(-v/2) series
    prefactor and the pole term of zeta; ``form="printed"`` reproduces the
    uncorrected expression (first term 2 Gamma(v+2)/..., prefactor
    pi / 2^(v/2+1), no pole term).  Terms 2 <= k < k_max are summed directly
    and the rest by Euler-Maclaurin; k_max doubles until the remainder
    estimate is below ``tol``.
    """
    if n < 1:
        raise ValueError("the Whittaker series applies to n >= 1 only")
    if form not in ("corrected", "printed"):
        raise ValueError("form is 'corrected' or 'printed'")
    v = complex(v)
    if v.real <= -1:
        raise ValueError("Re v > -1 is required")
    if not sigma > 0.5:
        raise ValueError("sigma > 1/2 is required")
    K = max(8, int(k_max))
    while True:
        ks = np.arange(2, K, dtype=float)
        partial = complex(np.sum(_tilde_summand(sigma, v, n, ks)))
        tail, est = _em_tail(sigma, v, n, K)
        if est <= tol or K >= k_limit:
            break
        K *= 2
    if est > tol:
        raise SlowConvergence(f"remainder estimate {est:.2e} above {tol:.1e} at k_max={K}")
    series = partial + tail
    if form == "corrected":
        value = tilde_lead(v, n) + series * 2.0 ** (-0.5 * v) * complex(rgamma(1.0 + 0.5 * v + n)) \
            + tilde_pole(sigma, v, n)
    else:
        value = tilde_lead_printed(v, n) + series * math.pi / 2.0 ** (0.5 * v + 1.0) \
            * complex(rgamma(1.0 + 0.5 * v + n))
    return SeriesResult(complex(value), partial, tail, est, K)


def coeff_tilde_series(sigma: float, v: complex, n: int, k_max: int = 256,
                       form: str = "corrected", tol: float = 1e-9) -> complex:
    return tilde_series(sigma, v, n, k_max, tol, form=form).value


def coeff_tilde_negative(sigma: float, n: int) -> float:
    """(2s^2 - 4s + 5/2) / (2 (s-1/2)^2 (3/2-s)^2) ((3/2-s)/(s-1/2))^n for n < 0."""
    if not 0.5 < sigma < 1.0:
        raise ValueError("sigma must lie strictly between 1/2 and 1")
    if n >= 0:
        raise ValueError("the closed form covers n < 0")
    s = sigma
    pre = (2 * s * s - 4 * s + 2.5) / (2 * (s - 0.5) ** 2 * (1.5 - s) ** 2)
    return pre * ((1.5 - s) / (s - 0.5)) ** n


@dataclass(frozen=True)
class NegativeConvention:
    """Reading of the n < 0 closed form: weight, overall sign, and where the
    constant ``zeta(sigma + 1/2)/2`` lands (``"e0"`` or ``"e-1"``)."""

    weight: Weight = Weight.DOUBLE_ANGLE
    sign: int = -1
    placement: str = "e-1"

    def label(self) -> str:
        return f"weight={self.weight.value},sign={self.sign:+d},constant_at={self.placement}"


def tilde_negative_coefficient(sigma: float, n: int, convention: NegativeConvention | None = None) -> complex:
    """Coefficient n < 0 of ``zeta(sigma + ix)`` times the calibrated weight (v = 1)."""
    conv = convention if convention is not None else _calibrated("tilde-negative")
    value = conv.sign * coeff_tilde_negative(sigma, n)
    if n == -1 and conv.placement == "e-1":
        value += 0.5 * complex(zeta(sigma + 0.5)).real
    return complex(value)


# ------------------------------------------------------ weighted Xi ----


def _log_panels(t_end: float, panels: int, nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, t_end, panels + 1)
    a = edges[:-1, None]
    b = edges[1:, None]
    return (0.5 * (a + b) + 0.5 * (b - a) * x).ravel(), (0.5 * (b - a) * w).ravel()


def _refined(integral: Callable[[int], tuple[float, float]], nodes: int, tol: float) -> float:
    """Integral at ``nodes`` and ``2 nodes`` per panel; ``integral`` returns (value, int |.|)."""
    coarse, _ = integral(nodes)
    fine, size = integral(2 * nodes)
    if abs(fine - coarse) > tol * max(1.0, size):
        raise ToleranceError(f"Theta integral moved by {abs(fine - coarse):.2e} under refinement")
    return fine


def theta_log_integral(n: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """-(1/n!) int_0^1 log^n(y) (y d/dy)^n Theta(y) dy, computed in t = -log y."""
    if not 1 <= n <= 12:
        raise ValueError("n must lie in 1..12")

    def integral(nodes):
        t, w = _log_panels(6.0, 48, nodes)
        y = np.exp(-t)
        vals = (-t) ** n * theta_d_operator(y, n) * y
        return float(np.dot(w, vals)), float(np.dot(w, np.abs(vals)))

    return -_refined(integral, q.nodes, 1e-13) / math.factorial(n)


def theta_upper_integral(n: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """(1/(n-1)!) int_1^inf log^(n-1)(y) (y d/dy)^n Theta(y) dy, computed in t = log y."""
    if not 1 <= n <= 12:
        raise ValueError("n must lie in 1..12")

    def integral(nodes):
        t, w = _log_panels(4.0, 32, nodes)
        y = np.exp(t)
        vals = t ** (n - 1) * theta_d_operator(y, n) * y
        return float(np.dot(w, vals)), float(np.dot(w, np.abs(vals)))

    return _refined(integral, q.nodes, 1e-13) / math.factorial(n - 1)


@lru_cache(maxsize=8)
def _xi_derivs_cached(at: int, profile) -> tuple:
    return tuple(complex(d).real for d in xi_derivatives(float(at), 12, profile))


def _xi_derivs(at: int) -> tuple:
    return _xi_derivs_cached(at, current_profile())


def xi_residue_sum(n: int, at: int) -> float:
    """((-1)^n/(n-1)!) sum_{k<n} C(n-1,k) n!/(k+1)! xi^(k)(at), at in {0, 1}."""
    if not 1 <= n <= 12 or at not in (0, 1):
        raise ValueError("need 1 <= n <= 12 and at in {0, 1}")
    d = _xi_derivs(at)
    total = sum(math.comb(n - 1, k) * math.factorial(n) / math.factorial(k + 1) * d[k] for k in range(n))
    return (-1) ** n * total / math.factorial(n - 1)


def xi_pole_residue(n: int) -> float:
    """Residue at s = 0 picked up by the coefficient of index -n (Leibniz signs)."""
    if not 1 <= n <= 12:
        raise ValueError("n must lie in 1..12")
    d = _xi_derivs(0)
    total = sum(math.comb(n - 1, k) * (-1) ** (n - 1 - k) * math.factorial(n) / math.factorial(k + 1) * d[k]
                for k in range(n))
    return total / math.factorial(n - 1)


@dataclass(frozen=True)
class XiConvention:
    """``form="printed"``: a_n = L_n + sign R_n(1), a_-n = L_n - sign R_n(0) with
    L_n the integral over (0, 1).  ``form="corrected"``: a_n = U_n + sign R_n(1),
    a_-n = U_n - sign P_n with U_n the integral over (1, inf) and P_n the
    residue at 0 in Leibniz form."""

    form: str = "corrected"
    sign: int = -1

    def label(self) -> str:
        return f"form={self.form},sign={self.sign:+d}"


def xi_theta_coefficient(n: int, convention: XiConvention, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    if n == 0:
        return float(theta_d_operator(1.0, 0))
    m = abs(n)
    if convention.form == "printed":
        base = theta_log_integral(m, q)
        res = xi_residue_sum(m, 1) if n > 0 else -xi_residue_sum(m, 0)
    else:
        base = theta_upper_integral(m, q)
        res = xi_residue_sum(m, 1) if n > 0 else -xi_pole_residue(m)
    return base + convention.sign * res


def coeff_xi(n: int, method: Method = Method.QUADRATURE, q: QuadratureSpec = DEFAULT_QUADRATURE,
             convention: XiConvention | None = None) -> complex:
    """Coefficient n of ``(1/4 + y^2) Xi(y)`` by quadrature or by the Theta route."""
    method = Method(method)
    if method is Method.QUADRATURE:
        return coeff_direct(FunctionSpec.xi_weighted(), n, q)
    if method is not Method.THETA_INTEGRAL:
        raise ValueError("coeff_xi supports the quadrature and theta methods")
    if abs(n) > 12:
        raise ValueError("the Theta route is budgeted for |n| <= 12")
    if convention is None:
        rec = _CALIBRATION.get("xi")
        if rec is None or not rec.agreed:
            raise CalibrationRequired("the Theta route's residue sign is set by calibrate('xi')")
        convention = rec.convention
    return complex(xi_theta_coefficient(n, convention, q))


# ---------------------------------------------------------- calibration ----


def _pick(family: str, candidates: list, evaluate: Callable, reference: dict, tol: float) -> CalibrationRecord:
    """First candidate whose worst deviation from ``reference`` is within ``tol``."""
    errors = {}
    chosen = None
    checked = {}
    for cand in candidates:
        vals = {n: evaluate(cand, n) for n in reference}
        err = max(abs(vals[n] - reference[n]) for n in reference)
        errors[cand.label()] = float(err)
        if chosen is None and err <= tol:
            chosen = cand
            checked = {n: (vals[n], reference[n]) for n in reference}
    return CalibrationRecord(family, chosen, chosen is not None, float(tol), errors, checked)


def _sum_candidates(zero_signs=(1,)) -> list[SumConvention]:
    # the literal reading of the printed statement is tried first
    return [SumConvention(u, w, s, z)
            for u in ("strict", "inclusive") for w in ("printed", "leibniz")
            for s in (1, -1) for z in zero_signs]


def calibrate_bar(sigma: float = 0.75, ns=range(0, 7), q: QuadratureSpec = DEFAULT_QUADRATURE,
                  tol: float = 1e-7) -> CalibrationRecord:
    ref = direct_coefficients(FunctionSpec.inv_zeta(sigma), ns, q).values
    rec = _pick("bar", _sum_candidates(), lambda c, n: coeff_bar(sigma, n, c), ref, tol)
    set_calibration(rec)
    return rec


def calibrate_hat(zeros: ZeroTable, sigma: float = 0.75, ns=(-4, -3, -2, -1, 1, 2, 3, 4),
                  q: QuadratureSpec = DEFAULT_QUADRATURE, k_trivial_max: int = 30) -> CalibrationRecord:
    """Tolerance is the largest zero-sum tail bound over ``ns`` plus the quadrature error."""
    direct = direct_coefficients(FunctionSpec.inv_zeta_conj(sigma), ns, q)
    tails = [s_sum(n, sigma, zeros, k_trivial_max).tail_bound for n in ns]
    tol = max(tails) + max(direct.errors.values())
    cache = {}

    def evaluate(c, n):
        key = (c, n)
        if key not in cache:
            cache[key] = coeff_hat_with_tail(sigma, n, zeros, k_trivial_max, c)[0]
        return cache[key]

    rec = _pick("hat", _sum_candidates((-1, 1)), evaluate, direct.values, tol)
    set_calibration(rec)
    return rec


def calibrate_tilde_negative(sigma: float = 0.9, ns=(-1, -2, -3, -4), q: QuadratureSpec = DEFAULT_QUADRATURE,
                             tol: float = 1e-7) -> CalibrationRecord:
    """Each weight variant is compared only with its own quadrature."""
    refs = {w: direct_coefficients(FunctionSpec.zeta_cos_v(sigma, 1.0, w), ns, q).values for w in Weight}
    errors, chosen, checked = {}, None, {}
    for w in Weight:
        for sign in (1, -1):
            for place in ("e0", "e-1"):
                c = NegativeConvention(w, sign, place)
                vals = {n: tilde_negative_coefficient(sigma, n, c) for n in ns}
                err = max(abs(vals[n] - refs[w][n]) for n in ns)
                errors[c.label()] = float(err)
                if chosen is None and err <= tol:
                    chosen = c
                    checked = {n: (vals[n], refs[w][n]) for n in ns}
    rec = CalibrationRecord("tilde-negative", chosen, chosen is not None, tol, errors, checked)
    set_calibration(rec)
    return rec


def calibrate_xi(ns=(1, 2, 3, 4, -1, -2, -3, -4), q: QuadratureSpec = DEFAULT_QUADRATURE,
                 tol: float = 1e-6) -> CalibrationRecord:
    ref = direct_coefficients(FunctionSpec.xi_weighted(), ns, q).values
    cands = [XiConvention(f, s) for f in ("printed", "corrected") for s in (1, -1)]
    rec = _pick("xi", cands, lambda c, n: complex(xi_theta_coefficient(n, c, q)), ref, tol)
    set_calibration(rec)
    return rec


def calibrate_all(zeros: ZeroTable, q: QuadratureSpec = DEFAULT_QUADRATURE) -> dict[str, CalibrationRecord]:
    """Run every calibration with the default settings."""
    return {
        "bar": calibrate_bar(q=q),
        "hat": calibrate_hat(zeros, q=q),
        "tilde-negative": calibrate_tilde_negative(q=q),
        "xi": calibrate_xi(q=q),
    }


# ---------------------------------------------------------------- tables ----


@dataclass(frozen=True)
class CoefficientTable:
    spec: FunctionSpec
    n_min: int
    n_max: int
    values: dict
    errors: dict
    method: Method
    meta: dict

    def __post_init__(self):
        missing = [n for n in range(self.n_min, self.n_max + 1) if n not in self.values]
        if missing:
            raise IndexRangeError(f"table lacks indices {missing[:5]}")

    def __getitem__(self, n: int) -> complex:
        if not self.n_min <= n <= self.n_max:
            raise IndexRangeError(f"index {n} outside {self.n_min}..{self.n_max}")
        return self.values[n]

    def covers(self, lo: int, hi: int) -> bool:
        return self.n_min <= lo and hi <= self.n_max

    @property
    def hash(self) -> str:
        return meta_hash(self.meta)


def meta_hash(meta: dict) -> str:
    blob = json.dumps(meta, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _family_for(spec: FunctionSpec, method: Method) -> str | None:
    if method is Method.RESIDUE:
        return {Kind.INV_ZETA: "bar", Kind.INV_ZETA_CONJ: "hat", Kind.ZETA_COS_V: "tilde-negative"}.get(spec.kind)
    if method is Method.THETA_INTEGRAL:
        return "xi"
    return None


def check_method(spec: FunctionSpec, method: Method, n_min: int, n_max: int) -> None:
    """Raise ValueError when ``method`` has no formula for ``spec`` over the range."""
    method = Method(method)
    if method is Method.QUADRATURE:
        return
    if method is Method.WHITTAKER_SERIES:
        if spec.kind is not Kind.ZETA_COS_V or spec.weight is not Weight.HALF_ANGLE:
            raise ValueError("the Whittaker series expands zeta times the half-angle weight")
        if n_min < 1:
            raise ValueError("the Whittaker series is valid for n >= 1 only")
        return
    if method is Method.RESIDUE:
        if spec.kind in (Kind.INV_ZETA, Kind.INV_ZETA_CONJ):
            return
        if spec.kind is Kind.ZETA_COS_V:
            if n_max >= 0:
                raise ValueError("the closed form for zeta times the weight covers n < 0 only")
            if complex(spec.v) != 1:
                raise ValueError("the closed form for n < 0 holds for v = 1")
            return
        raise ValueError(f"no residue formula for {spec.kind.value}")
    if spec.kind is not Kind.XI_WEIGHTED:
        raise ValueError("the Theta route applies to the weighted Xi function")
    if max(abs(n_min), abs(n_max)) > 12:
        raise ValueError("the Theta route is budgeted for |n| <= 12")


def build_table(spec: FunctionSpec, n_min: int, n_max: int, method: Method = Method.QUADRATURE,
                q: QuadratureSpec = DEFAULT_QUADRATURE, zeros: ZeroTable | None = None,
                k_max: int = 256, k_trivial_max: int = 30, workers: int = 4) -> CoefficientTable:
    """Coefficients n_min..n_max of ``spec`` by ``method``, with provenance metadata."""
    from concurrent.futures import ThreadPoolExecutor

    method = Method(method)
    if n_min > n_max:
        raise ValueError("empty index range")
    check_method(spec, method, n_min, n_max)
    ns = list(range(n_min, n_max + 1))
    meta = {"spec": spec.params(), "method": method.value, "n_min": n_min, "n_max": n_max}
    family = _family_for(spec, method)
    if family is not None:
        rec = _CALIBRATION.get(family)
        if rec is None or not rec.agreed:
            raise CalibrationRequired(f"calibrate the {family!r} family first")
        meta["convention"] = rec.convention.label()

    if method is Method.QUADRATURE:
        meta["quadrature"] = {"nodes": q.nodes, "y_max": q.y_max, "scheme": q.scheme, "tol": q.tol,
                              "panel": q.panel, "fine_panel": q.fine_panel}
        res = direct_coefficients(spec, ns, q)
        values, errors = res.values, res.errors
    else:
        def one(n):
            if method is Method.WHITTAKER_SERIES:
                r = tilde_series(spec.sigma, spec.v, n, k_max)
                return r.value, r.error_estimate
            if method is Method.THETA_INTEGRAL:
                return coeff_xi(n, method, q), 1e-12
            if spec.kind is Kind.INV_ZETA:
                return coeff_bar(spec.sigma, n), DEFAULT_PROFILE.series_tol
            if spec.kind is Kind.INV_ZETA_CONJ:
                if zeros is None:
                    raise ValueError("the residue form for 1/zeta(sigma - ix) needs a zero table")
                return coeff_hat_with_tail(spec.sigma, n, zeros, k_trivial_max)
            return tilde_negative_coefficient(spec.sigma, n), DEFAULT_PROFILE.series_tol

        if method is Method.WHITTAKER_SERIES:
            meta["k_max"] = k_max
        if zeros is not None and spec.kind is Kind.INV_ZETA_CONJ:
            meta["zeros"] = zeros.count
            meta["k_trivial_max"] = k_trivial_max
        if method is Method.WHITTAKER_SERIES:
            workers = 1  # mpmath keeps its working precision in global state
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(one, ns))
        values = {n: complex(v) for n, (v, _) in zip(ns, results)}
        errors = {n: float(e) for n, (_, e) in zip(ns, results)}
    return CoefficientTable(spec, n_min, n_max, values, errors, method, meta)

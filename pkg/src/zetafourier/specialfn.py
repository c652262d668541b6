"""Special functions used by the coefficient formulas.

Everything here works in complex double precision and accepts numpy arrays
where that is cheap (``log_gamma``, ``zeta``, ``xi``, ``theta_big``,
``theta_d_operator``).  The Whittaker function is scalar and sums its
confluent series in multiprecision, because the two-term M-combination
cancels catastrophically once ``z`` grows.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy.special import bernoulli, binom

from .errors import DegenerateParamError, PoleError, ToleranceError

__all__ = [
    "PrecisionProfile",
    "DEFAULT_PROFILE",
    "current_profile",
    "use_profile",
    "log_gamma",
    "gamma",
    "rgamma",
    "zeta",
    "taylor_coefficients",
    "zeta_taylor",
    "zeta_derivative",
    "inv_zeta_taylor",
    "xi",
    "xi_derivatives",
    "whittaker_w",
    "whittaker_w_asymptotic",
    "theta_big",
    "theta_d_operator",
    "zeta_prime_trivial",
]


@dataclass(frozen=True)
class PrecisionProfile:
    """Truncation and differentiation parameters for the special functions.

    ``em_terms`` is the minimum Euler-Maclaurin cutoff; it is raised
    automatically to ``|Im s|/pi + em_terms`` so the remainder stays small
    high on the critical strip.
    """

    em_terms: int = 50
    em_bernoulli: int = 25
    deriv_radius: float = 0.2
    deriv_nodes: int = 64
    series_tol: float = 1e-10

    def __post_init__(self):
        if self.em_terms < 1 or self.em_bernoulli < 1 or self.deriv_nodes < 4:
            raise ValueError("em_terms, em_bernoulli and deriv_nodes must be positive")
        if not 0.0 < self.deriv_radius <= 0.25:
            raise ValueError("deriv_radius must lie in (0, 1/4]")
        if self.series_tol <= 0:
            raise ValueError("series_tol must be positive")


DEFAULT_PROFILE = PrecisionProfile()

# xi is entire; a wide circle keeps high-order Taylor coefficients well conditioned.
_ACTIVE_PROFILE: contextvars.ContextVar[PrecisionProfile] = contextvars.ContextVar(
    "zetafourier_profile", default=DEFAULT_PROFILE)


def current_profile() -> PrecisionProfile:
    """Profile used when a function is called without one."""
    return _ACTIVE_PROFILE.get()


@contextlib.contextmanager
def use_profile(profile: PrecisionProfile):
    """Make ``profile`` the default within the block (context-local)."""
    token = _ACTIVE_PROFILE.set(profile)
    try:
        yield profile
    finally:
        _ACTIVE_PROFILE.reset(token)


XI_DERIV_RADIUS = 1.0
XI_DERIV_NODES = 64

_LANCZOS_G = 7.0
_LANCZOS_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_complex(x):
    arr = np.asarray(x, dtype=complex)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return complex(arr) if scalar else arr


def _is_nonpositive_integer(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _log_sin(w: np.ndarray) -> np.ndarray:
    """log(sin w) without overflow for large |Im w| (branch irrelevant)."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w.imag) < 20.0
    out[small] = np.log(np.sin(w[small]))
    up = (~small) & (w.imag > 0)
    wu = w[up]
    out[up] = -1j * wu + np.log1p(-np.exp(2j * wu)) + np.log(0.5j)
    dn = (~small) & (w.imag < 0)
    wd = w[dn]
    out[dn] = 1j * wd + np.log1p(-np.exp(-2j * wd)) + np.log(-0.5j)
    return out


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    z = z - 1.0
    x = np.full_like(z, _LANCZOS_P[0])
    for i in range(1, len(_LANCZOS_P)):
        x = x + _LANCZOS_P[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def log_gamma(z):
    """Logarithm of the complex Gamma function (Lanczos, g=7).

    For ``Re z >= 1/2`` the result is the principal branch.  Left of that the
    reflection formula is used, and only ``exp(log_gamma(z))`` is meaningful.

    Raises
    ------
    PoleError
        If any ``z`` is a nonpositive integer.
    """
    z, scalar = _as_complex(z)
    if np.any(_is_nonpositive_integer(z)):
        raise PoleError("log_gamma has poles at nonpositive integers")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_log_gamma(z[right])
    zl = z[~right]
    out[~right] = math.log(math.pi) - _log_sin(math.pi * zl) - _lanczos_log_gamma(1.0 - zl)
    return _ret(out, scalar)


def gamma(z):
    """Complex Gamma function."""
    return np.exp(log_gamma(z)) if np.ndim(z) else complex(np.exp(log_gamma(z)))


def rgamma(z):
    """Reciprocal Gamma, zero at the poles of Gamma."""
    z, scalar = _as_complex(z)
    out = np.zeros_like(z)
    ok = ~_is_nonpositive_integer(z)
    out[ok] = np.exp(-log_gamma(z[ok]))
    return _ret(out, scalar)


# ---------------------------------------------------------------- zeta ----


@lru_cache(maxsize=None)
def _em_coefficients(m: int) -> np.ndarray:
    """B_{2j}/(2j)! for j = 1..m."""
    b = bernoulli(2 * m)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, m + 1)])


def _zeta_em_fixed_n(s: np.ndarray, n: int, m: int) -> np.ndarray:
    logk = np.log(np.arange(1, n, dtype=float))
    total = np.zeros_like(s)
    # cap the temporary matrix at ~4M entries
    step = max(1, 4_000_000 // max(n, 1))
    for sig in np.unique(s.real):
        idx = np.flatnonzero(s.real == sig)
        amp = np.exp(-sig * logk)
        for i in range(0, idx.size, step):
            sel = idx[i:i + step]
            ph = np.outer(s.imag[sel], logk)
            total[sel] = np.cos(ph) @ amp - 1j * (np.sin(ph) @ amp)
    n_s = np.exp(-s * math.log(n))
    total += n * n_s / (s - 1.0) + 0.5 * n_s
    coef = _em_coefficients(m)
    q = s / n
    corr = coef[0] * q
    for j in range(1, m):
        q = q * (s + 2 * j - 1) * (s + 2 * j) / (n * n)
        corr = corr + coef[j] * q
    return total + n_s * corr


def _zeta_em(s: np.ndarray, profile: PrecisionProfile) -> np.ndarray:
    out = np.empty_like(s)
    cutoffs = profile.em_terms + np.ceil(np.abs(s.imag) / math.pi).astype(int)
    # bucket cutoffs so arrays of nearby heights share one vectorised pass
    cutoffs = ((cutoffs + 15) // 16) * 16
    for n in np.unique(cutoffs):
        sel = cutoffs == n
        out[sel] = _zeta_em_fixed_n(s[sel], int(n), profile.em_bernoulli)
    return out


def zeta(s, profile: PrecisionProfile | None = None):
    """Riemann zeta function for complex ``s``.

    Euler-Maclaurin summation for ``Re s >= -1/2``; the functional equation
    ``zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)`` otherwise.
    """
    profile = profile or current_profile()
    s, scalar = _as_complex(s)
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s=1")
    out = np.empty_like(s)
    # reflecting near 0 would evaluate zeta(1 - s) at the pole
    refl = s.real < -0.5
    out[~refl] = _zeta_em(s[~refl], profile)
    if np.any(refl):
        sr = s[refl]
        log_chi = (sr * math.log(2.0) + (sr - 1.0) * math.log(math.pi)
                   + _log_sin(0.5 * math.pi * sr) + log_gamma(1.0 - sr))
        out[refl] = np.exp(log_chi) * _zeta_em(1.0 - sr, profile)
    return _ret(out, scalar)


# ------------------------------------------------------ Taylor machinery ----


def _cauchy_raw(f, s0: complex, k_max: int, radius: float, nodes: int) -> tuple[np.ndarray, float]:
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.asarray(f(s0 + radius * w), dtype=complex)
    c = np.fft.fft(vals)[: k_max + 1] / nodes
    return c / radius ** np.arange(k_max + 1), float(np.max(np.abs(vals)))


def taylor_coefficients(
    f: Callable[[np.ndarray], np.ndarray],
    s0: complex,
    k_max: int,
    radius: float = DEFAULT_PROFILE.deriv_radius,
    nodes: int = DEFAULT_PROFILE.deriv_nodes,
    tol: float | None = DEFAULT_PROFILE.series_tol,
) -> np.ndarray:
    """Taylor coefficients c_0..c_k_max of ``f`` about ``s0``.

    Trapezoid rule on the Cauchy circle, evaluated through one FFT.  When
    ``tol`` is given the result is cross-checked against the circle of half
    the radius; disagreement in the scaled coefficients ``c_k r^k`` beyond
    ``tol * max|f|`` raises :class:`ToleranceError`.  ``f`` must accept an
    array of complex points.
    """
    if nodes <= 2 * k_max:
        raise ValueError("need more than 2*k_max circle nodes")
    c, fmax = _cauchy_raw(f, s0, k_max, radius, nodes)
    if tol is not None:
        half = 0.5 * radius
        c2, _ = _cauchy_raw(f, s0, k_max, half, nodes)
        scale = half ** np.arange(k_max + 1)
        err = np.max(np.abs(c - c2) * scale)
        if err > tol * max(1.0, fmax):
            raise ToleranceError(
                f"Cauchy-circle refinement disagreement {err:.3e} at s0={s0}"
            )
    return c


def _series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = min(len(a), len(b))
    return np.array([np.dot(a[: k + 1], b[k::-1]) for k in range(n)])


def _series_reciprocal(a: np.ndarray) -> np.ndarray:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no reciprocal")
    b = np.zeros_like(a)
    b[0] = 1.0 / a[0]
    for k in range(1, len(a)):
        b[k] = -np.dot(a[1: k + 1], b[k - 1:: -1]) / a[0]
    return b


def _regular_zeta_taylor(s0: complex, k_max: int, profile: PrecisionProfile) -> np.ndarray:
    """Taylor coefficients of the entire function (s-1) zeta(s) about s0."""

    def g(s):
        s = np.asarray(s, dtype=complex)
        out = np.empty_like(s)
        at_pole = np.abs(s - 1.0) < 1e-13
        out[at_pole] = 1.0
        out[~at_pole] = (s[~at_pole] - 1.0) * zeta(s[~at_pole], profile)
        return out

    return taylor_coefficients(g, s0, k_max, profile.deriv_radius,
                               max(profile.deriv_nodes, 2 * k_max + 2),
                               profile.series_tol)


def zeta_taylor(s0: complex, k_max: int, profile: PrecisionProfile | None = None) -> np.ndarray:
    """Taylor coefficients of zeta about ``s0`` (``s0 != 1``)."""
    profile = profile or current_profile()
    s0 = complex(s0)
    if s0 == 1.0:
        raise PoleError("zeta has a pole at s=1")
    g = _regular_zeta_taylor(s0, k_max, profile)
    # 1/(s0 - 1 + h) as a power series in h
    inv_lin = (-1.0 / (s0 - 1.0)) ** np.arange(k_max + 1) / (s0 - 1.0)
    return _series_mul(g, inv_lin)


def zeta_derivative(s, k: int, profile: PrecisionProfile | None = None) -> complex:
    """k-th derivative of zeta at ``s``.

    The Cauchy circle is applied to the entire function ``(s-1) zeta(s)`` and
    the pole is divided out afterwards, so the circle may enclose ``s=1``.
    """
    profile = profile or current_profile()
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return complex(zeta(s, profile))
    c = zeta_taylor(complex(s), k, profile)
    return complex(math.factorial(k) * c[k])


def inv_zeta_taylor(a: float, K: int, profile: PrecisionProfile | None = None) -> list[complex]:
    """Derivatives ``d^k/ds^k [1/zeta(a - s)]`` at ``s = 0`` for k = 0..K.

    Built by power-series arithmetic: reciprocal of the Taylor series of
    ``(s-1) zeta(s)`` about ``a``, multiplied by ``(a - 1 + h)``, then the sign
    flip ``h = -s``.
    """
    profile = profile or current_profile()
    if a == 1.0:
        raise PoleError("1/zeta(a - s) is not expanded at the pole a=1")
    g = _regular_zeta_taylor(complex(a), K, profile)
    if abs(g[0] / (a - 1.0)) < profile.series_tol:
        raise ZeroDivisionError(f"zeta({a}) is numerically zero")
    lin = np.zeros(K + 1, dtype=complex)
    lin[0] = a - 1.0
    if K >= 1:
        lin[1] = 1.0
    c = _series_mul(lin, _series_reciprocal(g))
    return [complex(math.factorial(k) * (-1) ** k * c[k]) for k in range(K + 1)]


# ------------------------------------------------------------------ xi ----


def xi(s, profile: PrecisionProfile | None = None):
    """Riemann xi function ``1/2 s (s-1) pi^(-s/2) Gamma(s/2) zeta(s)``.

    ``Xi(y)`` is ``xi(0.5 + 1j*y)``.  The removable singularities at 0, 1
    and the trivial zeros are handled explicitly.
    """
    profile = profile or current_profile()
    s, scalar = _as_complex(s)
    out = np.empty_like(s)
    fixed = (s == 0) | (s == 1)
    out[fixed] = 0.5
    even_neg = _is_nonpositive_integer(s) & (np.round(s.real) % 2 == 0) & ~fixed
    rest = ~(fixed | even_neg)
    sr = s[rest]
    log_pref = -0.5 * sr * math.log(math.pi) + log_gamma(0.5 * sr)
    out[rest] = 0.5 * sr * (sr - 1.0) * np.exp(log_pref) * zeta(sr, profile)
    if np.any(even_neg):
        out[even_neg] = xi(1.0 - s[even_neg], profile)
    return _ret(out, scalar)


def xi_derivatives(s0, K: int, profile: PrecisionProfile | None = None) -> list[complex]:
    """xi^(k)(s0) for k = 0..K via the Cauchy circle (K <= 12)."""
    profile = profile or current_profile()
    if K > 12:
        raise ValueError("xi derivatives are budgeted up to order 12")
    c = taylor_coefficients(lambda s: xi(s, profile), complex(s0), K,
                            XI_DERIV_RADIUS, XI_DERIV_NODES, profile.series_tol)
    return [complex(math.factorial(k) * c[k]) for k in range(K + 1)]


# ----------------------------------------------------------- Whittaker ----

Z_SWITCH = 30.0
_LIMIT_EPS = 1e-6


def whittaker_w_asymptotic(kappa: complex, mu: complex, z, tol: float = 1e-15,
                           scaled: bool = False):
    """Large-z expansion ``e^{-z/2} z^kappa sum (1/2+mu-kappa)_s (1/2-mu-kappa)_s / s! (-z)^-s``.

    Returns ``(value, converged)``; ``converged`` is False when the terms
    start growing before reaching ``tol`` relative to the sum.  Vectorised
    over ``z``.  With ``scaled`` the factor ``e^{-z/2}`` is left out.
    """
    z = np.asarray(z, dtype=float)
    a = 0.5 + mu - kappa
    b = 0.5 - mu - kappa
    term = np.ones_like(z, dtype=complex)
    total = term.copy()
    converged = np.zeros(z.shape, dtype=bool)
    prev = np.abs(term)
    for s in range(1, 200):
        term = term * (a + s - 1) * (b + s - 1) / (s * -z)
        mag = np.abs(term)
        growing = mag > prev
        live = ~converged & ~growing
        total = np.where(live, total + term, total)
        converged |= live & (mag < tol * np.abs(total))
        prev = np.where(live, mag, prev)
        if np.all(converged | growing):
            break
    val = z ** complex(kappa) * total
    if not scaled:
        val = np.exp(-0.5 * z) * val
    if val.ndim == 0:
        return complex(val), bool(converged)
    return val, converged


def _terminating_w(kappa, mu, z, m: int):
    # W = e^{-z/2} z^{mu+1/2} U(-m, 1+2mu, z), U a finite sum
    b = 1 + 2 * mu
    u = mpmath.mpf(0)
    for s in range(m + 1):
        u += mpmath.binomial(m, s) * mpmath.rf(b + s, m - s) * (-z) ** s
    u *= (-1) ** m
    return mpmath.exp(-z / 2) * z ** (mu + mpmath.mpf(1) / 2) * u


def _kummer_m(a, b, z):
    term = mpmath.mpf(1)
    total = mpmath.mpf(1)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps)
    k = 0
    while True:
        term = term * (a + k) / ((b + k) * (k + 1)) * z
        total += term
        k += 1
        if k > abs(a) + 2 and abs(term) <= eps * abs(total):
            return total
        if k > 10_000:
            raise DegenerateParamError("confluent series failed to converge")


def _m_combination(kappa, mu, z):
    half = mpmath.mpf(1) / 2
    m_plus = z ** (mu + half) * mpmath.exp(-z / 2) * _kummer_m(mu - kappa + half, 2 * mu + 1, z)
    m_minus = z ** (-mu + half) * mpmath.exp(-z / 2) * _kummer_m(-mu - kappa + half, -2 * mu + 1, z)
    return (mpmath.gamma(-2 * mu) * mpmath.rgamma(half - mu - kappa) * m_plus
            + mpmath.gamma(2 * mu) * mpmath.rgamma(half + mu - kappa) * m_minus)


def _near_int(x, tol=1e-12):
    x = complex(x)
    return abs(x.imag) < tol and abs(x.real - round(x.real)) < tol


def whittaker_w(gamma_, mu, z: float, z_switch: float = Z_SWITCH) -> complex:
    """Whittaker function W_{gamma,mu}(z) for real ``z > 0``.

    Evaluation paths, in order:

    * ``1/2 + mu - gamma`` (or ``1/2 - mu - gamma``) a nonpositive integer:
      the finite Laguerre-type sum, exact.
    * ``z > z_switch`` and the asymptotic series converges: that series.
    * ``2 mu`` not an integer: ``Gamma(-2mu)/Gamma(1/2-mu-gamma) M_{gamma,mu}
      + Gamma(2mu)/Gamma(1/2+mu-gamma) M_{gamma,-mu}`` with the confluent
      series summed at enough digits to absorb the ``e^z`` cancellation.
    * ``2 mu`` an integer: the same combination at ``mu +- eps`` and
      ``mu +- 2 eps`` (W is even in mu), Richardson-extrapolated.
    """
    if not z > 0:
        raise ValueError("whittaker_w needs z > 0")
    kappa = complex(gamma_)
    mu = complex(mu)
    for m_cand, mu_eff in ((0.5 + mu - kappa, mu), (0.5 - mu - kappa, -mu)):
        if _near_int(m_cand) and round(m_cand.real) <= 0:
            m = -int(round(m_cand.real))
            with mpmath.workdps(30):
                return complex(_terminating_w(mpmath.mpmathify(kappa), mpmath.mpmathify(mu_eff),
                                              mpmath.mpf(z), m))
    if z > z_switch:
        val, ok = whittaker_w_asymptotic(kappa, mu, z)
        if ok:
            return val
    degenerate = _near_int(2 * mu)
    dps = 20 + int(z / math.log(10)) + (14 if degenerate else 0)
    with mpmath.workdps(dps):
        zk = mpmath.mpf(z)
        kp = mpmath.mpmathify(kappa)
        mm = mpmath.mpmathify(mu)
        if not degenerate:
            val = _m_combination(kp, mm, zk)
        else:
            eps = mpmath.mpf(_LIMIT_EPS)

            def sym(e):
                return (_m_combination(kp, mm + e, zk) + _m_combination(kp, mm - e, zk)) / 2

            w1 = sym(eps)
            w2 = sym(2 * eps)
            val = (4 * w1 - w2) / 3
            if abs(w1 - val) > 1e-6 * max(abs(val), mpmath.mpf(10) ** -30):
                raise DegenerateParamError("limit path for integer 2*mu is unstable")
        out = complex(val)
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DegenerateParamError(f"W_{{{gamma_},{mu}}}({z}) is not finite")
    return out


# --------------------------------------------------------------- Theta ----

_THETA_TERMS = 8  # enough for y >= 1: next term ~ n^4 exp(-pi n^2)


def _theta_poly(m: int, order: int) -> np.ndarray:
    """Coefficients (in u = y^2, ascending) of (y d/dy)^order of the m-th term.

    The m-th term is (4 pi^2 m^4 u^2 - 6 pi m^2 u) e^{-pi m^2 u}; the Euler
    operator acts as 2u (d/du - c) on polynomial * e^{-cu}.
    """
    c = math.pi * m * m
    p = np.array([0.0, -6.0 * math.pi * m * m, 4.0 * math.pi ** 2 * m ** 4])
    for _ in range(order):
        dp = np.polynomial.polynomial.polyder(p) if len(p) > 1 else np.zeros(1)
        q = np.zeros(len(p) + 1)
        q[: len(dp)] += dp
        q[: len(p)] -= c * p
        p = np.concatenate(([0.0], 2.0 * q))[: len(p) + 1]
    return p


@lru_cache(maxsize=None)
def _theta_tables(order: int) -> tuple:
    return tuple(_theta_poly(m, order) for m in range(1, _THETA_TERMS + 1))


def _theta_series(y: np.ndarray, order: int) -> np.ndarray:
    u = y * y
    out = np.zeros_like(y)
    for m, p in enumerate(_theta_tables(order), start=1):
        out += np.polynomial.polynomial.polyval(u, p) * np.exp(-math.pi * m * m * u)
    return out


def theta_d_operator(y, n: int):
    """``(y d/dy)^n Theta(y)``, term by term with exact polynomial coefficients.

    For ``y < 1`` the symmetry ``Theta(y) = Theta(1/y)/y`` is used:
    ``D_n Theta(y) = (-1)^n / y * sum_j C(n,j) (D_j Theta)(1/y)``.  Summing the
    series directly there loses every digit to cancellation.
    """
    if n < 0 or n > 12:
        raise ValueError("n must lie in 0..12")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("Theta is defined for y > 0")
    out = np.empty_like(y)
    hi = y >= 1.0
    out[hi] = _theta_series(y[hi], n)
    if np.any(~hi):
        yl = y[~hi]
        inv = 1.0 / yl
        acc = np.zeros_like(yl)
        for j in range(n + 1):
            acc += binom(n, j) * _theta_series(inv, j)
        out[~hi] = (-1) ** n * acc / yl
    return float(out) if out.ndim == 0 else out


def theta_big(y):
    """Theta(y) = 2 y^2 sum_{n>=1} (2 pi^2 n^4 y^2 - 3 pi n^2) exp(-pi n^2 y^2)."""
    return theta_d_operator(y, 0)


def zeta_prime_trivial(k: int, profile: PrecisionProfile | None = None) -> float:
    """zeta'(-2k) = (-1)^k (2k)! zeta(2k+1) / (2^(2k+1) pi^(2k))."""
    profile = profile or current_profile()
    if k < 1:
        raise ValueError("k must be a positive integer")
    z = zeta(2 * k + 1, profile).real
    # log form keeps (2k)! from overflowing for large k
    logmag = math.lgamma(2 * k + 1) + math.log(z) - (2 * k + 1) * math.log(2) - 2 * k * math.log(math.pi)
    return (-1) ** k * math.exp(logmag)

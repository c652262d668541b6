"""Partial sums, Fejer means, Parseval checks and reconstruction errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import DEFAULT_QUADRATURE, QuadratureSpec, basis_e, dirichlet_kernel, fejer_kernel, phi_of_x
from .coefficients import (GRID_N_MAX, CoefficientTable, FunctionSpec, direct_coefficients,
                           grids, samples)
from .errors import IndexRangeError, ToleranceError

FIT_POINTS = 5


def _require(table: CoefficientTable, N: int) -> None:
    if N < 0:
        raise ValueError("N must be nonnegative")
    if not table.covers(-N, N):
        raise IndexRangeError(f"table covers {table.n_min}..{table.n_max}, need {-N}..{N}")


def partial_sum(table: CoefficientTable, x, N: int):
    """S_N(x) = sum_{|n| <= N} a_n e_n(x)."""
    _require(table, N)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for n in range(-N, N + 1):
        out = out + table[n] * basis_e(n, x)
    return complex(out) if out.ndim == 0 else out


def _kernel_integral(spec: FunctionSpec, phi0: float, kernel, q: QuadratureSpec) -> complex:
    grid = grids(q)[0]
    vals = samples(spec, q, "line")
    return complex(np.dot(grid.w * vals, kernel(phi0 - phi_of_x(grid.y))))


def partial_sum_kernel(spec: FunctionSpec, x: float, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """S_N(x) as the Dirichlet-kernel integral (1/2pi) int F(phi) D_N(phi0 - phi) dphi."""
    return _kernel_integral(spec, phi_of_x(x), lambda t: dirichlet_kernel(N, t), q)


def fejer_mean(spec: FunctionSpec, x0: float, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE,
               check: bool = True, tol: float = 1e-7) -> complex:
    """(C,1) mean of order N at the angle ``x0`` (the point x = tan(x0/2)/2).

    Computed as the Fejer-kernel integral; with ``check`` the average of the
    partial sums S_0..S_N built from quadrature coefficients must agree
    within ``tol``.
    """
    if not -math.pi < x0 < math.pi:
        raise ValueError("x0 is an angle in (-pi, pi)")
    value = _kernel_integral(spec, x0, lambda t: fejer_kernel(N, t), q)
    if check and N <= GRID_N_MAX:
        other = fejer_mean_cesaro(spec, x0, N, q)
        if abs(other - value) > tol:
            raise ToleranceError(f"Fejer routes differ by {abs(other - value):.2e}")
    return value


def fejer_mean_cesaro(spec: FunctionSpec, x0: float, N: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """(1/(N+1)) sum_{m<=N} S_m(x0), using (1 - |n|/(N+1)) weights on quadrature coefficients."""
    ns = range(-N, N + 1)
    a = direct_coefficients(spec, ns, q, check_routes=False).values
    return complex(sum((1.0 - abs(n) / (N + 1.0)) * a[n] * np.exp(-1j * n * x0) for n in ns))


def norm_squared(spec: FunctionSpec, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """int |f|^2 dmu; the caps use the mean of |f|^2."""
    grid = grids(q)[0]
    vals = samples(spec, q, "line")
    line = np.abs(vals[: grid.n_line]) ** 2
    caps = spec.asymptote_sq(grid.y_cap)
    return float(np.dot(grid.w, np.concatenate((line, caps))))


def geometric_tail(mags, ks) -> float:
    """Sum over k beyond max(ks) of |a_k|^2 from a least-squares fit of log|a_k| ~ c + b k.

    Returns ``inf`` when the fit shows no decay.
    """
    mags = np.asarray(mags, dtype=float)
    ks = np.asarray(ks, dtype=float)
    if np.any(mags <= 0):
        return 0.0 if np.all(mags == 0) else math.inf
    b, c = np.polyfit(ks, np.log(mags), 1)
    if b >= 0:
        return math.inf
    r2 = math.exp(2 * b)
    return math.exp(2 * (c + b * (ks.max() + 1))) / (1.0 - r2)


@dataclass(frozen=True)
class ParsevalReport:
    lhs: float
    rhs_partial: float
    tail_bound: float
    tol: float
    N: int
    history: tuple = field(default=())  # rhs_partial for 0..N

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs_partial)

    @property
    def verdict(self) -> bool:
        # an unbounded fit is no error control at all
        return math.isfinite(self.tail_bound) and self.difference <= self.tail_bound + 2 * self.tol

    @property
    def bessel(self) -> bool:
        return all(r <= self.lhs + self.tol for r in self.history)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs_partial": self.rhs_partial, "tail_bound": self.tail_bound,
                "tol": self.tol, "N": self.N, "difference": self.difference,
                "verdict": "pass" if self.verdict else "fail", "bessel": self.bessel}


def parseval_check(spec: FunctionSpec, table: CoefficientTable, N: int,
                   q: QuadratureSpec = DEFAULT_QUADRATURE) -> ParsevalReport:
    """Compare int |f|^2 dmu with sum_{|k|<=N} |a_k|^2 plus a fitted tail.

    Each side of the spectrum gets its own fit over its last five indices.
    A side whose last two coefficients lie below their error estimates (or
    the quadrature tolerance) has ended numerically and contributes no tail.  A fit without decay gives an infinite bound and a
    failing verdict.
    """
    _require(table, N)
    lhs = norm_squared(spec, q)
    history = []
    total = 0.0
    for m in range(N + 1):
        total += abs(table[m]) ** 2 + (abs(table[-m]) ** 2 if m else 0.0)
        history.append(total)
    tail = 0.0
    if N >= FIT_POINTS - 1:
        for sgn in (1, -1):
            ks = [sgn * k for k in range(N - FIT_POINTS + 1, N + 1)]
            mags = [abs(table[k]) for k in ks]
            errs = [max(table.errors.get(k, 0.0), q.tol) for k in ks]
            if all(m <= e for m, e in zip(mags[-2:], errs[-2:])):
                continue
            tail += geometric_tail(mags, [abs(k) for k in ks])
    else:
        tail = math.inf
    return ParsevalReport(lhs, total, tail, q.tol, N, tuple(history))


@dataclass(frozen=True)
class ReconstructionReport:
    spec: FunctionSpec
    N: int
    grid: list
    truncation_error: list
    sup_error: float
    l2_error: float
    f_values: list
    s_values: list
    quadrature: dict

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.params(),
            "N": self.N,
            "sup_error": self.sup_error,
            "l2_error": self.l2_error,
            "quadrature": self.quadrature,
            "columns": ["x", "re_f", "re_s_n", "error"],
            "rows": [[x, f.real, s.real, e] for x, f, s, e in
                     zip(self.grid, self.f_values, self.s_values, self.truncation_error)],
        }


def reconstruction_report(spec: FunctionSpec, table: CoefficientTable, grid, N: int,
                          q: QuadratureSpec = DEFAULT_QUADRATURE) -> ReconstructionReport:
    """Pointwise and mean-square error of S_N against f."""
    _require(table, N)
    x = np.asarray(grid, dtype=float)
    f = spec.evaluate(x)
    s = partial_sum(table, x, N)
    err = np.abs(f - s)
    qg = grids(q)[0]
    vals = samples(spec, q, "line")
    s_nodes = partial_sum(table, qg.y, N)
    line = np.abs(vals[: qg.n_line] - s_nodes[: qg.n_line]) ** 2
    sc = s_nodes[qg.n_line:]
    caps = spec.asymptote_sq(qg.y_cap) - 2 * np.real(np.conj(sc) * spec.asymptote(qg.y_cap)) + np.abs(sc) ** 2
    l2 = math.sqrt(max(0.0, float(np.dot(qg.w, np.concatenate((line, caps))))))
    qd = {"nodes": q.nodes, "y_max": q.y_max, "scheme": q.scheme, "tol": q.tol}
    return ReconstructionReport(spec, N, [float(v) for v in x], [float(e) for e in err],
                                float(err.max()) if err.size else 0.0, l2,
                                [complex(v) for v in f], [complex(v) for v in s], qd)

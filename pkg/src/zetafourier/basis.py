"""The measure mu, the map x -> phi = 2 arctan(2x), the basis e_n and kernels.

Quadrature against ``dmu = dy / (2 pi (1/4 + y^2))`` is done on a
:class:`Grid`: composite panels on ``[-y_max, y_max]`` plus two end caps
covering ``|y| > y_max``.  In the caps the integrand is evaluated through the
function's *asymptote* (for a bounded smooth function, the function itself;
for zeta-type functions, their mean value), since zeta cannot be evaluated
arbitrarily high up the strip.

Two grids exist for every spec.  The *line* grid places panels in ``y``;
the *periodic* grid places Gauss nodes in ``phi`` on panels whose breakpoints
are images of a staggered set of ``y`` breakpoints.  The classical statement
of this expansion writes ``x = tan(phi)/2``; with that substitution
``e^{-2in arctan 2x}`` is ``e^{-2in phi}``, which is not the Fourier basis on
``(-pi, pi)``.  The periodic route here uses ``x = tan(phi/2)/2`` so that the
basis becomes ``e^{-in phi}``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, RouteDisagreement, ToleranceError

SCHEMES = ("gauss-legendre-composite", "tanh-sinh")


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretisation of every integral against mu.

    ``nodes`` is the rule size per panel, ``panel`` the panel width in ``y``
    away from the origin (``fine_panel`` for ``|y| < 1``), ``y_max`` the end
    of the panelled region.
    """

    nodes: int = 16
    y_max: float = 5.0e3
    scheme: str = "gauss-legendre-composite"
    tol: float = 1e-10
    panel: float = 0.5
    fine_panel: float = 0.05

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.nodes < 2 or self.y_max <= 1.0 or self.tol <= 0:
            raise ValueError("nodes >= 2, y_max > 1 and tol > 0 are required")
        if not 0 < self.fine_panel <= self.panel:
            raise ValueError("need 0 < fine_panel <= panel")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.nodes, self.y_max, self.scheme, self.tol,
                              self.panel, self.fine_panel)

    def key(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


DEFAULT_QUADRATURE = QuadratureSpec()


def mu_density(y):
    """Density of mu: 1 / (2 pi (1/4 + y^2))."""
    y = np.asarray(y, dtype=float)
    out = 1.0 / (2.0 * np.pi * (0.25 + y * y))
    return float(out) if out.ndim == 0 else out


def mu_tail_mass(y_max: float) -> float:
    """mu({|y| > y_max}) = 1 - (2/pi) arctan(2 y_max)."""
    return 1.0 - 2.0 / math.pi * math.atan(2.0 * y_max)


def phi_of_x(x):
    """phi = 2 arctan(2x), in (-pi, pi)."""
    out = 2.0 * np.arctan(2.0 * np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def x_of_phi(phi):
    """x = tan(phi/2)/2 for |phi| < pi."""
    phi = np.asarray(phi, dtype=float)
    if np.any(np.abs(phi) >= np.pi):
        raise DomainError("x_of_phi needs |phi| < pi")
    out = 0.5 * np.tan(0.5 * phi)
    return float(out) if out.ndim == 0 else out


def basis_e(n: int, x):
    """e_n(x) = exp(-2 i n arctan(2x)); equals exp(-i n phi)."""
    out = np.exp(-2j * n * np.arctan(2.0 * np.asarray(x, dtype=float)))
    return complex(out) if out.ndim == 0 else out


def dirichlet_kernel(N: int, x):
    """D_N(x) = sin((N+1/2) x) / sin(x/2), with value 2N+1 at x = 0 mod 2 pi."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    x = np.asarray(x, dtype=float)
    den = np.sin(0.5 * x)
    at_zero = np.abs(den) < 1e-14
    safe = np.where(at_zero, 1.0, den)
    out = np.where(at_zero, 2 * N + 1.0, np.sin((N + 0.5) * x) / safe)
    return float(out) if out.ndim == 0 else out


def fejer_kernel(N: int, x):
    """K_N(x) = (1/(N+1)) sum_{n<=N} D_n(x) = (sin((N+1)x/2)/sin(x/2))^2 / (N+1)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    x = np.asarray(x, dtype=float)
    den = np.sin(0.5 * x)
    at_zero = np.abs(den) < 1e-14
    safe = np.where(at_zero, 1.0, den)
    out = np.where(at_zero, N + 1.0, (np.sin(0.5 * (N + 1) * x) / safe) ** 2 / (N + 1))
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------- rules ----


@lru_cache(maxsize=None)
def _rule(scheme: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    if scheme == "gauss-legendre-composite":
        return np.polynomial.legendre.leggauss(n)
    # tanh-sinh with n (odd-ified) points on |t| <= 3
    k = max(1, n // 2)
    h = 3.0 / k
    t = h * np.arange(-k, k + 1)
    u = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(u)
    w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    return x, w


def _panel_nodes(breaks: np.ndarray, scheme: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _rule(scheme, n)
    a = breaks[:-1, None]
    b = breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def _y_breaks(q: QuadratureSpec, n_max: int, offset: float = 0.0) -> np.ndarray:
    # e^{2in arctan 2y} turns at rate 4n/(1+4y^2); keep about 2 radians per panel
    pos = [0.0]
    y = 0.0
    while y < q.y_max:
        step = q.fine_panel if y < 1.0 else q.panel
        if n_max > 0:
            step = min(step, 2.0 * (1.0 + 4.0 * y * y) / n_max)
        if y == 0.0 and offset:
            step *= offset
        y = min(y + step, q.y_max)
        pos.append(y)
    pos = np.array(pos)
    return np.concatenate((-pos[:0:-1], pos))


@dataclass(frozen=True)
class Grid:
    """Quadrature nodes for integrals ``int F dmu``.

    ``y`` holds every node (line nodes first, then cap nodes), ``w`` the
    weights already including the density of mu, ``n_line`` the count of
    line nodes.  Cap nodes lie beyond ``y_max``.
    """

    y: np.ndarray
    w: np.ndarray
    n_line: int
    route: str

    @property
    def y_line(self) -> np.ndarray:
        return self.y[: self.n_line]

    @property
    def y_cap(self) -> np.ndarray:
        return self.y[self.n_line:]

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.dot(self.w, values))


def _caps(q: QuadratureSpec, phi_edge: float) -> tuple[np.ndarray, np.ndarray]:
    # cap |phi| in (phi_edge, pi): y = tan(phi/2)/2, dmu = dphi / 2pi
    breaks = np.linspace(phi_edge, np.pi, 5)
    p, w = _panel_nodes(breaks, "gauss-legendre-composite", q.nodes)
    y = 0.5 * np.tan(0.5 * p)
    w = w / (2.0 * np.pi)
    return np.concatenate((-y[::-1], y)), np.concatenate((w[::-1], w))


@lru_cache(maxsize=16)
def line_grid(q: QuadratureSpec, n_max: int = 0) -> Grid:
    """Panels in y on [-y_max, y_max] plus end caps."""
    y, w = _panel_nodes(_y_breaks(q, n_max), q.scheme, q.nodes)
    w = w * mu_density(y)
    yc, wc = _caps(q, phi_of_x(q.y_max))
    return Grid(np.concatenate((y, yc)), np.concatenate((w, wc)), y.size, "line")


@lru_cache(maxsize=16)
def periodic_grid(q: QuadratureSpec, n_max: int = 0) -> Grid:
    """Gauss nodes in phi on panels mapped from staggered y breakpoints."""
    phib = phi_of_x(_y_breaks(q, n_max, offset=0.5))
    p, w = _panel_nodes(phib, q.scheme, q.nodes)
    y = x_of_phi(p)
    w = w / (2.0 * np.pi)
    yc, wc = _caps(q, phib[-1])
    return Grid(np.concatenate((y, yc)), np.concatenate((w, wc)), y.size, "periodic")


def sample(f: Callable, grid: Grid, asymptote: Callable | None = None) -> np.ndarray:
    """Values of ``f`` on the grid; cap nodes use ``asymptote`` when given."""
    out = np.empty(grid.y.size, dtype=complex)
    out[: grid.n_line] = f(grid.y_line)
    out[grid.n_line:] = (asymptote or f)(grid.y_cap)
    return out


def inner_product(
    f: Callable,
    g: Callable,
    q: QuadratureSpec = DEFAULT_QUADRATURE,
    check_refinement: bool = True,
) -> complex:
    """<f, g> = int f conj(g) dmu by both routes.

    ``f`` and ``g`` take arrays of ``y``.  Raises :class:`RouteDisagreement`
    when the routes differ by more than ``2 tol`` and :class:`ToleranceError`
    when doubling the rule size moves the line result by more than ``tol``.
    """

    def integrand(y):
        return f(y) * np.conj(g(y))

    a = line_grid(q).integrate(sample(integrand, line_grid(q)))
    b = periodic_grid(q).integrate(sample(integrand, periodic_grid(q)))
    if abs(a - b) > 2 * q.tol:
        raise RouteDisagreement(f"routes differ by {abs(a - b):.3e}", a, b)
    if check_refinement:
        q2 = q.doubled()
        c = line_grid(q2).integrate(sample(integrand, line_grid(q2)))
        if abs(c - a) > q.tol:
            raise ToleranceError(f"node doubling moved the result by {abs(c - a):.3e}")
    return a


def gram_matrix(indices: Sequence[int], q: QuadratureSpec = DEFAULT_QUADRATURE,
                route: str = "line") -> np.ndarray:
    """Matrix of <e_m, e_n> over ``indices`` (used for orthonormality checks)."""
    nmax = max(abs(int(i)) for i in indices)
    grid = line_grid(q, nmax) if route == "line" else periodic_grid(q, nmax)
    phase = np.arctan(2.0 * grid.y)
    E = np.exp(-2j * np.outer(phase, np.asarray(indices)))
    return (E * grid.w[:, None]).T @ np.conj(E)

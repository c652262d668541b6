import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zetafourier.basis import (DEFAULT_QUADRATURE, QuadratureSpec, basis_e, dirichlet_kernel, fejer_kernel,
                               gram_matrix, inner_product, line_grid, mu_density, mu_tail_mass,
                               periodic_grid, phi_of_x, x_of_phi)
from zetafourier.errors import DomainError


def test_mu_is_a_probability_measure():
    total, _ = quad(mu_density, -np.inf, np.inf)
    assert abs(total - 1) < 1e-12
    assert abs(mu_density(0.0) - 2 / math.pi) < 1e-15


def test_tail_mass():
    tail, _ = quad(mu_density, 5e3, np.inf)
    assert abs(mu_tail_mass(5e3) - 2 * tail) < 1e-12
    assert 6.3e-5 < mu_tail_mass(5e3) < 6.4e-5


@settings(max_examples=80)
@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_phi_round_trip(x):
    assert abs(x_of_phi(phi_of_x(x)) - x) <= 1e-12 * max(1.0, abs(x)) ** 2


def test_x_of_phi_domain():
    with pytest.raises(DomainError):
        x_of_phi(math.pi)


@settings(max_examples=50)
@given(st.integers(-30, 30), st.floats(-50, 50))
def test_basis_matches_angle(n, x):
    assert abs(basis_e(n, x) - np.exp(-1j * n * phi_of_x(x))) < 1e-12
    assert abs(abs(basis_e(n, x)) - 1) < 1e-14


def test_basis_is_multiplicative():
    x = np.linspace(-3, 3, 13)
    assert np.allclose(basis_e(3, x) * basis_e(-5, x), basis_e(-2, x), atol=1e-14)


@pytest.mark.parametrize("N", [0, 1, 5, 12])
def test_dirichlet_kernel_matches_sum(N):
    x = np.linspace(-6, 6, 101)
    direct = sum(np.cos(k * x) for k in range(-N, N + 1))
    assert np.allclose(dirichlet_kernel(N, x), direct, atol=1e-12)
    assert dirichlet_kernel(N, 0.0) == 2 * N + 1


@pytest.mark.parametrize("N", [0, 3, 9])
def test_fejer_kernel_is_mean_of_dirichlet(N):
    x = np.linspace(-6, 6, 97)
    mean = sum(dirichlet_kernel(k, x) for k in range(N + 1)) / (N + 1)
    assert np.allclose(fejer_kernel(N, x), mean, atol=1e-12)
    assert np.all(fejer_kernel(N, x) >= 0)
    mass, _ = quad(lambda t: fejer_kernel(N, t), -math.pi, math.pi, limit=200)
    assert abs(mass / (2 * math.pi) - 1) < 1e-10


def test_kernels_reject_negative_order():
    with pytest.raises(ValueError):
        dirichlet_kernel(-1, 0.0)
    with pytest.raises(ValueError):
        fejer_kernel(-1, 0.0)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=1)
    with pytest.raises(ValueError):
        QuadratureSpec(fine_panel=1.0, panel=0.5)
    assert QuadratureSpec().doubled().nodes == 32
    assert QuadratureSpec().key() == QuadratureSpec().key()
    assert QuadratureSpec(nodes=20).key() != QuadratureSpec().key()


@pytest.mark.parametrize("route", ["line", "periodic"])
def test_grids_integrate_mu_exactly(route):
    grid = line_grid(DEFAULT_QUADRATURE) if route == "line" else periodic_grid(DEFAULT_QUADRATURE)
    assert abs(grid.w.sum() - 1) < 1e-13
    assert np.all(np.abs(grid.y_cap) > DEFAULT_QUADRATURE.y_max - 1e-9)


@pytest.mark.parametrize("route", ["line", "periodic"])
def test_orthonormality(route):
    idx = list(range(-20, 21))
    g = gram_matrix(idx, DEFAULT_QUADRATURE, route)
    assert np.abs(g - np.eye(len(idx))).max() < 1e-9


def test_orthonormality_high_index():
    idx = list(range(-64, 65, 7))
    g = gram_matrix(idx, DEFAULT_QUADRATURE, "line")
    assert np.abs(g - np.eye(len(idx))).max() < 1e-9


def test_inner_product_routes_agree():
    f = lambda y: 1.0 / (1.0 + 1j * y) ** 2
    val = inner_product(f, lambda y: np.ones_like(y, dtype=complex))
    # independent oracle: scipy on the circle variable
    re, _ = quad(lambda p: (1.0 / (1.0 + 0.5j * math.tan(p / 2)) ** 2).real / (2 * math.pi), -math.pi, math.pi,
                 limit=200)
    im, _ = quad(lambda p: (1.0 / (1.0 + 0.5j * math.tan(p / 2)) ** 2).imag / (2 * math.pi), -math.pi, math.pi,
                 limit=200)
    assert abs(val - complex(re, im)) < 1e-10

"""Analytic test functions and the symbolic model-operator action."""

import numpy as np
import pytest

from wigreg.hermite import (
    GaussianPacket,
    Hermite,
    PolyGauss,
    apply_model_operator,
    hermite_values,
    to_polygauss,
)

from oracles import hermite_quadrature_values

GRID = np.linspace(-10.0, 10.0, 2001)
DX = GRID[1] - GRID[0]


def test_hermite_values_match_independent_construction():
    for n in range(8):
        ours = hermite_values(n, GRID)
        ref = hermite_quadrature_values(n, GRID)
        assert np.max(np.abs(ours - ref)) < 1e-12, n


def test_hermite_rejects_bad_index():
    with pytest.raises(ValueError):
        hermite_values(-1, GRID)
    with pytest.raises(ValueError):
        hermite_values(1.5, GRID)


def test_hermite_orthonormality():
    funcs = [hermite_values(n, GRID) for n in range(6)]
    for i, fi in enumerate(funcs):
        for j, fj in enumerate(funcs):
            inner = np.trapezoid(fi * fj, dx=DX)
            assert abs(inner - (1.0 if i == j else 0.0)) < 1e-10, (i, j)


def test_hermite_decays_at_the_ends():
    vals = hermite_values(5, np.array([-10.0, 10.0]))
    assert np.max(np.abs(vals)) < 1e-15


def test_hermite_parity():
    vals_p = hermite_values(4, GRID)
    vals_m = hermite_values(4, -GRID)
    assert np.allclose(vals_p, vals_m)
    odd_p = hermite_values(3, GRID)
    odd_m = hermite_values(3, -GRID)
    assert np.allclose(odd_p, -odd_m)


def test_gaussian_packet_evaluates_and_validates():
    g = GaussianPacket(a=2.0, b=1.0, x0=0.5, amplitude=3.0)
    t = np.array([0.0, 0.5])
    assert np.allclose(g(t), 3.0 * np.exp(-2.0 * (t - 0.5) ** 2 + 1j * t))
    with pytest.raises(ValueError):
        GaussianPacket(a=0.0)


def test_polygauss_matches_hermite_pointwise():
    for n in range(6):
        h = Hermite(n)
        pg = h.to_polygauss()
        assert np.max(np.abs(pg(GRID) - h(GRID))) < 1e-12, n


def test_polygauss_trims_trailing_zeros_and_requires_width():
    pg = PolyGauss([1.0, 0.0, 0.0], a=1.0)
    assert pg.coeffs.size == 1
    with pytest.raises(ValueError):
        PolyGauss([1.0], a=-1.0)


def test_mul_t_matches_pointwise_product():
    pg = GaussianPacket(a=1.5, b=-2.0, x0=0.25).to_polygauss()
    assert np.allclose(pg.mul_t()(GRID), GRID * pg(GRID))


def test_apply_d_matches_central_differences():
    h = 1e-5
    for f in [Hermite(3).to_polygauss(),
              GaussianPacket(a=0.7, b=1.3, x0=-0.4).to_polygauss()]:
        derived = f.apply_d()
        fd = -1j * (f(GRID + h) - f(GRID - h)) / (2 * h)
        scale = np.max(np.abs(fd)) + 1.0
        assert np.max(np.abs(derived(GRID) - fd)) / scale < 1e-8


def test_apply_d_reproduces_ladder_identity():
    # D h_n = i/sqrt(2) (sqrt(n+1) h_{n+1} - sqrt(n) h_{n-1})
    for n in range(1, 5):
        lhs = Hermite(n).to_polygauss().apply_d()(GRID)
        rhs = (1j / np.sqrt(2)) * (np.sqrt(n + 1) * hermite_values(n + 1, GRID)
                                   - np.sqrt(n) * hermite_values(n - 1, GRID))
        assert np.max(np.abs(lhs - rhs)) < 1e-12, n


def test_add_requires_identical_envelopes():
    f = GaussianPacket(a=1.0).to_polygauss()
    g = GaussianPacket(a=2.0).to_polygauss()
    with pytest.raises(ValueError):
        f.add(g)


def test_to_polygauss_rejects_plain_callables():
    with pytest.raises(TypeError):
        to_polygauss(lambda t: t)


def test_model_operator_on_oscillator_eigenfunction():
    # (M^2 + D^2) h_n = (2n + 1) h_n
    coeffs = {(2, 0): 1.0 + 0j, (0, 2): 1.0 + 0j}
    for n in range(4):
        out = apply_model_operator(coeffs, Hermite(n))
        expect = (2 * n + 1) * hermite_values(n, GRID)
        assert np.max(np.abs(out(GRID) - expect)) < 1e-12, n


def test_model_operator_order_of_factors():
    # off-diagonal term M D: multiply after differentiating
    out = apply_model_operator({(1, 1): 1.0 + 0j}, Hermite(0))
    pg = Hermite(0).to_polygauss()
    expect = GRID * pg.apply_d()(GRID)
    assert np.allclose(out(GRID), expect)

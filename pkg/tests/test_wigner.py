"""Plane transform: closed forms, round trips, and grid file formats."""

import numpy as np
import pytest

from wigreg.hermite import GaussianPacket, Hermite
from wigreg.wigner import (
    BoundaryDecayError,
    Grid2D,
    GridFunction2D,
    _alternating_phase,
    _trig_upsample,
    manifest_path,
    read_grid,
    wig_forward,
    wig_inverse,
    write_grid,
)

GRID = Grid2D(12.0, 256)
H0, H1, H2 = Hermite(0), Hermite(1), Hermite(2)


def mesh(grid, dual=True):
    return np.meshgrid(grid.x_nodes, grid.axis_nodes(dual), indexing="ij")


# ---------------------------------------------------------------------------
# grid containers
# ---------------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid2D(0.0, 256)
    with pytest.raises(ValueError):
        Grid2D(12.0, 100)          # not a power of two
    with pytest.raises(ValueError):
        Grid2D(12.0, 2)


def test_grid_nodes():
    g = Grid2D(4.0, 8)
    assert g.dx == 1.0
    assert np.allclose(g.x_nodes, np.arange(-4.0, 4.0))
    assert np.allclose(g.dual_nodes, (np.pi / 4.0) * np.arange(-4, 4))
    assert g.dy_dual == pytest.approx(np.pi / 4.0)


def test_grid_function_validation():
    g = Grid2D(4.0, 8)
    with pytest.raises(ValueError):
        GridFunction2D(g, np.zeros((4, 4)))
    bad = np.zeros((8, 8))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        GridFunction2D(g, bad)
    a = GridFunction2D(g, np.ones((8, 8)))
    b = GridFunction2D(g, np.ones((8, 8)), dual_y=False)
    with pytest.raises(ValueError):
        a - b


def test_grid_function_norms():
    g = Grid2D(4.0, 8)
    gf = GridFunction2D(g, np.full((8, 8), 2.0), dual_y=False)
    assert gf.sup_norm() == 2.0
    # 64 cells of area dx*dx = 1, each contributing |2|^2
    assert gf.l2_norm() == pytest.approx(16.0)


def test_alternating_phase_matches_node_parity():
    g = Grid2D(4.0, 8)
    ks = np.arange(-4, 4)
    assert np.array_equal(_alternating_phase(8), (-1.0) ** ks)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def max_err(gf, expected):
    return float(np.max(np.abs(gf.samples - expected)))


def test_symmetric_gaussian_pair():
    # p = 1/2 on h0 (x) h0: sqrt(2/pi) exp(-x^2 - y^2)
    out = wig_forward(H0, H0, 0.5, GRID)
    gx, gy = mesh(GRID)
    expected = np.sqrt(2.0 / np.pi) * np.exp(-gx ** 2 - gy ** 2)
    assert max_err(out, expected) < 1e-13


def test_symmetric_gaussian_first_excited():
    # p = 1/2 on h0 (x) h1: (2/sqrt(pi)) (x + i y) exp(-x^2 - y^2)
    out = wig_forward(H0, H1, 0.5, GRID)
    gx, gy = mesh(GRID)
    expected = (2.0 / np.sqrt(np.pi)) * (gx + 1j * gy) * np.exp(-gx ** 2 - gy ** 2)
    assert max_err(out, expected) < 1e-13


def test_one_sided_shift_is_windowed_fourier():
    # p = 0: v(x) e^{ixy} uhat(y), and h0 is its own transform
    out = wig_forward(H0, H0, 0.0, GRID)
    gx, gy = mesh(GRID)
    expected = H0(gx) * H0(gy) * np.exp(1j * gx * gy)
    assert max_err(out, expected) < 1e-13
    # p = 1 is the mirror image with the opposite phase
    out = wig_forward(H0, H0, 1.0, GRID)
    expected = H0(gx) * H0(gy) * np.exp(-1j * gx * gy)
    assert max_err(out, expected) < 1e-13


def test_forward_is_bilinear():
    base = wig_forward(H0, H1, 0.5, GRID)
    scaled = wig_forward(lambda t: 3j * H0(t), H1, 0.5, GRID)
    assert np.allclose(scaled.samples, 3j * base.samples)
    other = wig_forward(H2, H1, 0.5, GRID)
    summed = wig_forward(lambda t: H0(t) + H2(t), H1, 0.5, GRID)
    assert np.allclose(summed.samples, base.samples + other.samples, atol=1e-14)


def test_boundary_decay_guard():
    wide = GaussianPacket(a=0.01)
    with pytest.raises(BoundaryDecayError, match="enlarge L"):
        wig_forward(wide, wide, 0.5, GRID)


def test_high_hermite_pair_clears_default_boundary():
    # worst smoke fixture: h2 (x) h1 at L = 12 sits just under the default
    out = wig_forward(H2, H1, 0.5, GRID)
    assert np.isfinite(out.sup_norm())


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 0.25])
def test_round_trip_on_fast_path(p):
    out = wig_inverse(wig_forward(H2, H1, p, GRID), p)
    assert not out.dual_y
    gs, gt = mesh(GRID, dual=False)
    expected = np.where(np.abs(gs - gt) < GRID.L, H2(gs) * H1(gt), 0.0)
    assert max_err(out, expected) < 1e-12


def test_round_trip_generic_p():
    p = 1.0 / 3.0
    out = wig_inverse(wig_forward(H1, H0, p, GRID), p)
    gs, gt = mesh(GRID, dual=False)
    expected = np.where(np.abs(gs - gt) < GRID.L, H1(gs) * H0(gt), 0.0)
    assert max_err(out, expected) < 1e-12


def test_inverse_rejects_spatial_axis():
    gf = GridFunction2D(GRID, np.zeros((256, 256)), dual_y=False)
    with pytest.raises(ValueError):
        wig_inverse(gf, 0.5)


def test_trig_upsample_is_exact_on_bandlimited_rows():
    n, factor = 16, 4
    coarse_t = np.arange(n) * (2 * np.pi / n)
    fine_t = np.arange(n * factor) * (2 * np.pi / (n * factor))

    def f(t):
        return np.cos(3 * t) + 0.5j * np.sin(5 * t) + 2.0

    up = _trig_upsample(f(coarse_t), factor, axis=0)
    assert np.max(np.abs(up - f(fine_t))) < 1e-13


# ---------------------------------------------------------------------------
# file round trips
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("fmt", ["csv", "raw"])
def test_grid_file_round_trip(tmp_path, fmt):
    gf = wig_forward(H0, H1, 0.5, Grid2D(12.0, 16))
    path = str(tmp_path / f"grid.{fmt}")
    write_grid(gf, path, fmt=fmt, extra={"p": "1/2"})
    back = read_grid(path)
    assert back.grid == gf.grid
    assert back.dual_y == gf.dual_y
    tol = 1e-15 if fmt == "raw" else 1e-14
    assert np.max(np.abs(back.samples - gf.samples)) <= tol
    import json
    with open(manifest_path(path)) as fh:
        manifest = json.load(fh)
    assert manifest["p"] == "1/2"
    assert manifest["axis_y"] == "dual"


def test_read_grid_requires_manifest(tmp_path):
    path = str(tmp_path / "orphan.csv")
    with open(path, "w") as fh:
        fh.write("x,y,re,im\n")
    with pytest.raises(FileNotFoundError):
        read_grid(path)


def test_read_grid_rejects_truncated_raw(tmp_path):
    gf = GridFunction2D(Grid2D(4.0, 8), np.ones((8, 8)))
    path = str(tmp_path / "grid.raw")
    write_grid(gf, path, fmt="raw")
    with open(path, "r+b") as fh:
        fh.truncate(100)
    with pytest.raises(ValueError, match="raw grid holds"):
        read_grid(path)


def test_write_grid_rejects_unknown_format(tmp_path):
    gf = GridFunction2D(Grid2D(4.0, 8), np.ones((8, 8)))
    with pytest.raises(ValueError):
        write_grid(gf, str(tmp_path / "grid.bin"), fmt="npz")

import numpy as np
import pytest
from hypothesis import given, strategies as st

from foawave.errors import GridMismatch, OutOfDomain
from foawave.grid import (Grid, apply_dirichlet, bilinear_sample, check_same_grid,
                          gradient_at, laplacian_5pt, row_blocks)

from conftest import random_field


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(2, 5)
    with pytest.raises(ValueError):
        Grid(5, 5, spacing=0.5)
    g = Grid(7, 4)
    assert g.shape == (4, 7)
    assert g.diagonal == pytest.approx(np.hypot(6, 3))
    with pytest.raises(GridMismatch):
        check_same_grid(np.zeros((4, 7)), np.zeros((7, 4)))


def test_laplacian_constant_is_zero():
    assert np.all(laplacian_5pt(np.full((6, 9), 3.7)) == 0.0)


def test_laplacian_of_quadratic():
    i = np.arange(5.0)[:, None] * np.ones((1, 5))
    lap = laplacian_5pt(i ** 2)
    assert np.all(lap[1:-1, 1:-1] == 2.0)


def test_laplacian_impulse():
    f = np.zeros((5, 5))
    f[2, 2] = 1.0
    expected = np.zeros((5, 5))
    expected[2, 2] = -4.0
    expected[1, 2] = expected[3, 2] = expected[2, 1] = expected[2, 3] = 1.0
    np.testing.assert_array_equal(laplacian_5pt(f), expected)


def test_laplacian_boundary_is_zero(rng):
    lap = laplacian_5pt(rng.standard_normal((7, 11)))
    ring = np.concatenate([lap[0], lap[-1], lap[:, 0], lap[:, -1]])
    assert np.all(ring == 0.0)


def test_laplacian_linear(rng):
    f, g = rng.standard_normal((2, 12, 15))
    a, b = 1.7, -0.3
    lhs = laplacian_5pt(a * f + b * g)
    rhs = a * laplacian_5pt(f) + b * laplacian_5pt(g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def _boundary_flux(f):
    # sum of (boundary - adjacent interior) over every edge crossing the inner ring
    flux = 0.0
    flux += np.sum(f[0, 1:-1] - f[1, 1:-1]) + np.sum(f[-1, 1:-1] - f[-2, 1:-1])
    flux += np.sum(f[1:-1, 0] - f[1:-1, 1]) + np.sum(f[1:-1, -1] - f[1:-1, -2])
    return flux


@given(st.integers(3, 20), st.integers(3, 20), st.integers(0, 2 ** 31))
def test_laplacian_telescopes_to_boundary_flux(h, w, seed):
    f = np.random.default_rng(seed).standard_normal((h, w))
    total = laplacian_5pt(f)[1:-1, 1:-1].sum()
    flux = _boundary_flux(f)
    assert abs(total - flux) <= 1e-10 * max(1.0, np.abs(f).sum())


@pytest.mark.parametrize("threads", [2, 3, 4, 7])
def test_laplacian_bit_identical_across_threads(rng, threads):
    f = rng.standard_normal((53, 41))
    np.testing.assert_array_equal(laplacian_5pt(f, threads=threads), laplacian_5pt(f))


def test_row_blocks_cover_interior():
    for n, t in ((10, 3), (5, 8), (100, 4)):
        blocks = row_blocks(n, t)
        rows = [r for a, b in blocks for r in range(a, b)]
        assert rows == list(range(1, n - 1))


def test_apply_dirichlet(rng):
    f = apply_dirichlet(np.ones((5, 6)))
    assert np.all(f[1:-1, 1:-1] == 1.0)
    assert f.sum() == 12.0
    assert np.all(apply_dirichlet(np.zeros((4, 4))) == 0.0)
    r = rng.standard_normal((8, 9))
    once = apply_dirichlet(r)
    np.testing.assert_array_equal(apply_dirichlet(once), once)
    np.testing.assert_array_equal(once[1:-1, 1:-1], r[1:-1, 1:-1])


def test_bilinear_examples():
    f = np.arange(20.0).reshape(4, 5)
    assert bilinear_sample(f, (3, 2)) == f[2, 3]
    g = np.zeros((3, 3))
    g[1, 2] = 2.0
    assert bilinear_sample(g, (1.5, 1)) == 1.0
    with pytest.raises(OutOfDomain):
        bilinear_sample(f, (-0.5, 3))
    with pytest.raises(OutOfDomain):
        bilinear_sample(f, (1, 3.01))
    with pytest.raises(OutOfDomain):
        bilinear_sample(f, (np.nan, 1))
    # the far corner is a valid node
    assert bilinear_sample(f, (4, 3)) == f[3, 4]


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(0, 9), st.floats(0, 6))
def test_bilinear_exact_on_bilinear_functions(a, b, c, d, x, y):
    i, j = np.mgrid[0:7, 0:10].astype(float)
    f = a + b * i + c * j + d * i * j
    expected = a + b * y + c * x + d * x * y
    assert bilinear_sample(f, (x, y)) == pytest.approx(expected, abs=1e-9)


def test_gradient_examples():
    i, j = np.mgrid[0:8, 0:8].astype(float)
    gx, gy = gradient_at(j, (3.3, 4.9))
    assert (gx, gy) == pytest.approx((1.0, 0.0))
    assert gradient_at(np.full((8, 8), 2.0), (2, 2)) == (0.0, 0.0)
    assert gradient_at(i + 2 * j, (2.5, 2.5)) == pytest.approx((2.0, 1.0))
    with pytest.raises(OutOfDomain):
        gradient_at(j, (0.5, 3))
    with pytest.raises(OutOfDomain):
        gradient_at(j, (3, 6.5))


@given(st.floats(2, 12), st.floats(2, 9))
def test_gradient_vanishes_at_bowl_minimum(x0, y0):
    i, j = np.mgrid[0:12, 0:15].astype(float)
    f = (i - y0) ** 2 + (j - x0) ** 2
    gx, gy = gradient_at(f, (x0, y0))
    assert abs(gx) < 1e-10 and abs(gy) < 1e-10


def test_gradient_matches_sampled_central_differences(rng):
    f = random_field(rng, 9, 11)
    gy_full, gx_full = np.gradient(f)
    for _ in range(20):
        p = (rng.uniform(1, 9), rng.uniform(1, 7))
        gx, gy = gradient_at(f, p)
        assert gx == pytest.approx(bilinear_sample(gx_full, p), abs=1e-12)
        assert gy == pytest.approx(bilinear_sample(gy_full, p), abs=1e-12)

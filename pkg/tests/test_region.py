import numpy as np
import pytest

from padeconv.model import MeromorphicModel, PoleSpec
from padeconv.polyalg import Poly
from padeconv.precision import EXACT
from padeconv.region import (
    g_values,
    in_N,
    sample_NF,
    scan_region,
    term_moduli,
    trace_boundaries,
)
from padeconv.rowtheory import TorusSpec, analyze_poles, compute_cj, omega_at
from padeconv.verify import projective_distance


TWO_POLE_BOX = (-1.2, 1.2, -1.2, 1.2)


@pytest.fixture
def two_pole(two_pole_model):
    d = analyze_poles(two_pole_model)
    c = compute_cj(two_pole_model, d)
    t = TorusSpec(thetas=(0, "0.5"), independent=False, relations=((1, 0), (0, 2)))
    return d, c, t


def test_two_pole_membership(two_pole):
    _, c, _ = two_pole
    assert g_values(c, 0.5j) == pytest.approx((0, 0), abs=1e-15)
    assert in_N(c, 0.7j)
    assert not in_N(c, 0.1 + 0.5j)
    assert not in_N(c, -0.3)


def test_two_pole_region_is_the_imaginary_axis(two_pole):
    d, c, _ = two_pole
    grid = scan_region(c, d, box=TWO_POLE_BOX, nx=301, ny=301)

    iy, ix = np.nonzero(grid.mask_n)
    assert len(ix) == 301
    assert np.all(np.abs(grid.xs[ix]) <= grid.cell_width)
    assert not np.any(grid.mask_u & grid.mask_n)
    assert grid.mask_uf is None


def test_two_pole_boundary_curves(two_pole):
    d, c, _ = two_pole
    grid = scan_region(c, d, box=TWO_POLE_BOX, nx=121, ny=121)
    curves = trace_boundaries(grid, c)

    assert curves.component_count == (1, 1)
    for j, polylines in enumerate(curves.curves):
        for polyline, tolerances in zip(polylines, curves.vertex_tolerance[j]):
            assert len(tolerances) == len(polyline.points)
            for z, tol in zip(polyline.points, tolerances):
                assert abs(z.real) <= grid.cell_width
                assert abs(g_values(c, z)[j]) <= tol


def test_curve_tolerance_follows_the_local_gradient(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    grid = scan_region(c, d, nx=121, ny=121)
    curves = trace_boundaries(grid, c)

    for j, polylines in enumerate(curves.curves):
        gy, gx = np.gradient(grid.g[j], grid.ys, grid.xs)
        widest = 2 * grid.cell_diagonal * np.hypot(gx, gy).max()
        tolerances = [t for per_line in curves.vertex_tolerance[j] for t in per_line]

        assert curves.tolerance[j] == max(tolerances)
        assert min(tolerances) < widest
        for polyline, per_line in zip(polylines, curves.vertex_tolerance[j]):
            for z, tol in zip(polyline.points, per_line):
                assert abs(g_values(c, z)[j]) <= tol


def test_g_values_sum_identity(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    rng = np.random.default_rng(13)

    for z in rng.uniform(-1.5, 1.5, size=(100, 2)) @ np.array([1, 1j]):
        total = term_moduli(c, z).sum()
        assert sum(g_values(c, z)) == pytest.approx((2 - d.nu) * total, rel=1e-12)


def test_refinement_keeps_interior_cells(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    coarse = scan_region(c, d, nx=61, ny=61)
    fine = scan_region(c, d, nx=121, ny=121)

    assert np.allclose(fine.xs[::2], coarse.xs)
    assert np.allclose(fine.ys[::2], coarse.ys)

    interior = coarse.gmax < 0
    assert interior.any()
    assert np.all(fine.gmax[::2, ::2][interior] < 0)
    assert np.all(fine.mask_n[::2, ::2][interior])


def test_two_pole_orbit_zeros(two_pole):
    d, c, t = two_pole
    sample = sample_NF(c, t, d, 40)

    assert len(sample) == 20
    assert np.abs(sample.points).max() <= 1e-8
    assert set(sample.sources) == set(range(1, 40, 2))
    assert not sample.equals_n
    assert sample.failures == 0


def test_orbit_root_tolerance_is_passed_through(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    t = TorusSpec.from_model(torus_model, d)

    assert sample_NF(c, t, d, 5).failures == 0
    strict = sample_NF(c, t, d, 5, tol=0.0)
    assert strict.failures > 0
    assert len(strict) < len(sample_NF(c, t, d, 5))


def test_dependent_arguments_shrink_the_excluded_set(two_pole):
    d, c, t = two_pole
    grid = scan_region(c, d, box=TWO_POLE_BOX, nx=121, ny=121)
    sample = sample_NF(c, t, d, 10)
    grid = grid.with_nf(sample)

    iy, ix = grid.cell_index([0.5j])
    assert grid.mask_n[iy[0], ix[0]]
    assert not grid.mask_u[iy[0], ix[0]]
    assert grid.mask_uf[iy[0], ix[0]]

    iy, ix = grid.cell_index([0j])
    assert not grid.mask_uf[iy[0], ix[0]]

    fraction = sample.fill_fraction(grid)
    assert 0 < fraction < 0.05


def test_fill_fraction_is_monotone(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    t = TorusSpec.from_model(torus_model, d)
    grid = scan_region(c, d, nx=81, ny=81)

    fractions = [sample_NF(c, t, d, M).fill_fraction(grid) for M in (10, 100, 400)]
    assert fractions == sorted(fractions)
    assert fractions[-1] > 0


def test_independent_arguments_use_the_full_region(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    t = TorusSpec.from_model(torus_model, d)
    grid = scan_region(c, d, nx=81, ny=81).with_nf(sample_NF(c, t, d, 5))
    assert np.array_equal(grid.mask_uf, grid.mask_u)


def test_inner_poles_are_excluded(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    grid = scan_region(c, d, nx=151, ny=151, exclusion_radius=0.05)

    iy, ix = grid.cell_index([0.5])
    assert grid.mask_excluded[iy[0], ix[0]]
    assert not grid.mask_u[iy[0], ix[0]]
    assert not np.any(grid.mask_u & ~grid.mask_disk)


def test_single_dominant_pole_has_no_curves(single_pole_model):
    d = analyze_poles(single_pole_model)
    c = compute_cj(single_pole_model, d)
    grid = scan_region(c, d, nx=51, ny=51)
    curves = trace_boundaries(grid, c)

    assert not grid.mask_n.any()
    assert np.array_equal(grid.mask_u, grid.mask_disk)
    assert curves.curves == ((),)
    assert curves.component_count == (0,)


@pytest.mark.parametrize("seed", range(5))
def test_orbit_zeros_lie_in_region(seed):
    """Zeros of omega never leave N"""
    rng = np.random.default_rng(seed)
    nu = 2 + seed % 2
    thetas = np.sort(rng.uniform(size=nu))
    poles = tuple(PoleSpec.polar(1, float(theta)) for theta in thetas)
    numerator = Poly(tuple(complex(*rng.normal(size=2)) for _ in range(nu)))
    model = MeromorphicModel(radius=2, poles=poles, rational_numerator=numerator)

    d = analyze_poles(model)
    c = compute_cj(model, d)
    t = TorusSpec.from_model(model, d)
    sample = sample_NF(c, t, d, 500 // (nu - 1) + 1)
    assert len(sample) >= 500

    for z in sample.points:
        terms = term_moduli(c, z)
        assert max(g_values(c, z)) <= 1e-6 * terms.sum()


def test_scaled_constants_give_the_same_region(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    scaled = c.scaled(3 - 4j)

    rng = np.random.default_rng(5)
    for z in rng.uniform(-1.2, 1.2, size=(200, 2)) @ np.array([1, 1j]):
        assert in_N(c, z) == in_N(scaled, z)


def test_scaled_constants_give_the_same_zeros(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    scaled = c.scaled(0.3 + 2j)
    rng = np.random.default_rng(9)

    for _ in range(10):
        tau = tuple(np.exp(2j * np.pi * rng.uniform(size=d.nu)))
        plain = omega_at(c, tau).poly
        other = omega_at(scaled, tau).poly
        assert projective_distance(plain.coeffs, other.coeffs) <= 1e-10


@pytest.mark.slow
def test_example_boundary_topology(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    grid = scan_region(c, d)
    curves = trace_boundaries(grid, c)

    ctx = EXACT.ctx
    target = complex(ctx.expjpi(2 * ctx.sqrt(2)))
    j = min(range(d.nu), key=lambda i: abs(c.locations[i] - target))
    assert curves.component_count[j] == 2

import numpy as np
import pytest

from padeconv.errors import ThetaMismatch, ZeroPrincipalCoefficient
from padeconv.model import MeromorphicModel, PoleSpec
from padeconv.polyalg import Poly
from padeconv.precision import EXACT, PrecisionOptions
from padeconv.rowtheory import (
    TorusSpec,
    analyze_poles,
    compute_cj,
    omega_at,
    orbit_point,
    predicted_limit_poles,
)


def _index_of(locations, z):
    return min(range(len(locations)), key=lambda i: abs(complex(locations[i]) - z))


def test_analyze_two_pole(two_pole_model):
    d = analyze_poles(two_pole_model)
    assert (d.rho, d.ell, d.mu, d.nu, d.lam) == (1, 2, 2, 2, 2)
    assert np.allclose(d.locations, [1, -1])
    assert d.inner_locations == ()


def test_analyze_single_pole(single_pole_model):
    d = analyze_poles(single_pole_model)
    assert (d.rho, d.ell, d.mu, d.nu, d.lam) == (1, 1, 1, 1, 1)


def test_analyze_torus_model(torus_model):
    d = analyze_poles(torus_model)
    assert (d.rho, d.ell, d.mu, d.nu, d.lam) == pytest.approx((1, 4, 3, 3, 4))
    assert d.inner_locations == pytest.approx((0.5,))
    # Dominant poles are ordered by argument
    turns = [np.angle(z) / (2 * np.pi) % 1 for z in d.dominant_locations]
    assert turns == sorted(turns)


def test_multiplicity_selects_dominant_poles():
    model = MeromorphicModel(
        radius=2,
        poles=(PoleSpec.polar(1, "0.25"), PoleSpec.polar(1, "0.5", 2), PoleSpec(0.5)),
    )
    d = analyze_poles(model)
    assert (d.mu, d.nu, d.lam) == (2, 1, 4)
    assert d.dominant_locations == pytest.approx((-1,))
    assert d.non_dominant_locations == pytest.approx((1j, 0.5))


def test_row_kinds(torus_model):
    d = analyze_poles(torus_model)
    assert d.row_kind(4) == "montessus_full"
    assert d.row_kind(3) == "last_intermediate"
    assert d.row_kind(2) == "intermediate"
    assert d.row_kind(1) == "montessus_inner"
    assert d.row_kind(0) == "other"
    assert list(d.intermediate_rows) == [2, 3]


def test_two_pole_cj(two_pole_model):
    c = compute_cj(two_pole_model, analyze_poles(two_pole_model))
    assert np.allclose([complex(x) for x in c.c], [-0.25, 0.25])
    assert np.allclose(c.delta.to_numpy(), [-1, 0, 1])


def test_single_pole_cj(single_pole_model):
    c = compute_cj(single_pole_model, analyze_poles(single_pole_model))
    assert complex(c.c[0]) == pytest.approx(1)
    assert c.delta_j[0].coeffs == (1,)


@pytest.mark.parametrize("precision", [None, PrecisionOptions("extended", 50)])
def test_example_cj(torus_model, precision):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d) if precision is None else compute_cj(torus_model, d, precision)

    ctx = EXACT.ctx
    expected = {
        2: 0.70400 + 0.17095j,
        3: 0.07853 + 0.17437j,
        5: 0.29275 + 0.04487j,
    }
    for k, value in expected.items():
        z = complex(ctx.expjpi(2 * ctx.sqrt(k)))
        j = _index_of(c.locations, z)
        assert abs(complex(c.c[j]).real - value.real) <= 1e-4
        assert abs(complex(c.c[j]).imag - value.imag) <= 1e-4


def test_delta_factorization(torus_model):
    c = compute_cj(torus_model, analyze_poles(torus_model))
    for zj, delta_j in zip(c.locations, c.delta_j):
        product = delta_j * Poly((-zj, 1))
        assert np.allclose(product.to_numpy(), c.delta.to_numpy())


def test_cj_ignores_analytic_part(torus_model):
    d = analyze_poles(torus_model)
    plain = compute_cj(torus_model, d)
    shifted = compute_cj(torus_model.with_analytic_part([1, -2, 3j]), d)
    assert np.allclose([complex(x) for x in plain.c], [complex(x) for x in shifted.c])


def test_zero_principal_coefficient():
    model = MeromorphicModel(
        radius=2,
        poles=(PoleSpec.polar(1, 0), PoleSpec.polar(1, "0.5")),
        rational_numerator=Poly((-1, 1)),
    )
    with pytest.raises(ZeroPrincipalCoefficient):
        compute_cj(model, analyze_poles(model))


def test_omega_two_pole(two_pole_model):
    c = compute_cj(two_pole_model, analyze_poles(two_pole_model))

    odd = omega_at(c, (1, -1)).poly
    assert np.allclose(odd.to_numpy(), [0, -0.5])

    even = omega_at(c, (1, 1)).poly
    assert even.degree == 0
    assert complex(even.coeffs[0]) == pytest.approx(-0.5)


def test_omega_single_pole_is_constant(single_pole_model):
    c = compute_cj(single_pole_model, analyze_poles(single_pole_model))
    poly = omega_at(c, (1j,)).poly
    assert poly.degree == 0
    assert complex(poly.coeffs[0]) == pytest.approx(1j)


def test_omega_rejects_bad_tau(two_pole_model):
    c = compute_cj(two_pole_model, analyze_poles(two_pole_model))
    with pytest.raises(ValueError):
        omega_at(c, (1,))
    with pytest.raises(ValueError):
        omega_at(c, (1, 2))


def test_dominant_poles_are_never_zeros(torus_model):
    d = analyze_poles(torus_model)
    c = compute_cj(torus_model, d)
    rng = np.random.default_rng(3)

    for _ in range(50):
        tau = tuple(np.exp(2j * np.pi * rng.uniform(size=d.nu)))
        poly = omega_at(c, tau).poly
        for j, zj in enumerate(c.locations):
            value = abs(complex(poly(zj)))
            assert value == pytest.approx(abs(complex(c.c[j] * c.delta_j[j](zj))))
            assert value >= 1e-12 * poly.scale(zj)


def test_orbit_point_basics():
    t = TorusSpec(thetas=(0, "0.5"), independent=False, relations=((1, 0), (0, 2)))
    assert orbit_point(t, 0) == pytest.approx((1, 1))
    assert orbit_point(t, 3) == pytest.approx((1, -1))


def test_orbit_point_homomorphism(torus_model):
    t = TorusSpec.from_model(torus_model, analyze_poles(torus_model))
    rng = np.random.default_rng(11)

    for a, b in rng.integers(0, 500_000, size=(20, 2)):
        left = np.array(orbit_point(t, int(a + b)))
        right = np.array(orbit_point(t, int(a))) * np.array(orbit_point(t, int(b)))
        assert np.abs(left - right).max() <= 1e-12


def test_torus_from_model_keeps_exact_arguments(torus_model):
    t = TorusSpec.from_model(torus_model, analyze_poles(torus_model))
    ctx = EXACT.ctx
    assert sorted(float(ctx.frac(x)) for x in t.thetas) == pytest.approx(
        sorted(float(ctx.frac(ctx.sqrt(k))) for k in (2, 3, 5)), abs=1e-40
    )
    assert t.declared_rank == 3
    assert t.rank_declaration == "independent"


def test_relations_are_checked():
    t = TorusSpec(thetas=(0, "0.5"), independent=False, relations=((1, 0), (0, 2)))
    assert t.declared_rank == 0
    assert t.rank_declaration == "relations"

    with pytest.raises(ThetaMismatch):
        TorusSpec(thetas=(0, "0.5"), independent=False, relations=((0, 3),))

    assert TorusSpec(thetas=(0.1,), independent=False).declared_rank is None


def test_inconsistent_argument():
    model = MeromorphicModel(radius=2, poles=(PoleSpec(1, theta="0.25"),))
    with pytest.raises(ThetaMismatch):
        TorusSpec.from_model(model, analyze_poles(model))


def test_predicted_limit_poles(two_pole_model, torus_model):
    d = analyze_poles(two_pole_model)
    predicted = predicted_limit_poles(two_pole_model, d, compute_cj(two_pole_model, d))
    assert predicted.isolated == ()

    d = analyze_poles(torus_model)
    predicted = predicted_limit_poles(torus_model, d, compute_cj(torus_model, d))
    assert [z for z, _ in predicted.isolated] == pytest.approx([0.5])
    assert predicted.points == pytest.approx([0.5])


def test_predicted_limit_poles_double_pole():
    model = MeromorphicModel(radius=2, poles=(PoleSpec.polar(1, 0, 2),))
    d = analyze_poles(model)
    predicted = predicted_limit_poles(model, d, compute_cj(model, d))
    assert len(predicted.isolated) == 1
    z, mult = predicted.isolated[0]
    assert (z, mult) == (pytest.approx(1), 1)

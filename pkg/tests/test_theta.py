import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import theta_1d_oracle, theta_box_oracle
from tubetheta.errors import BudgetExceeded, DomainError, UnsupportedConfiguration
from tubetheta.jordan import HermComplex, RealLine, SpinFactor, SymReal
from tubetheta.lattice import Lattice, dual_lattice
from tubetheta.representation import natural_representation
from tubetheta.theta import fourier_coefficient, plan_tail, tail_radius, theta_eval, theta_eval_many

R1 = natural_representation(RealLine())
Z1 = Lattice.standard(1)
S2 = natural_representation(SymReal(2))
Z2 = Lattice.standard(2)


def test_tail_radius_classical():
    R = tail_radius(R1, [1j], [0.0], 1e-12)
    assert R <= 4
    tail = sum(2 * math.exp(-math.pi * l * l) for l in range(int(math.floor(R)) + 1, 60))
    assert tail <= 1e-12


def test_infinite_tolerance_keeps_only_origin():
    assert tail_radius(R1, [1j], None, math.inf) == 0
    ev = theta_eval(S2, Z2, 1j * np.array([1, 0, 1]), None, math.inf)
    assert ev.value == 1 and ev.points_summed == 1


def test_tail_radius_monotone():
    radii = [tail_radius(R1, [t * 1j], [0.0], 1e-12) for t in (1, 2, 5, 10)]
    assert radii == sorted(radii, reverse=True)
    by_m = [tail_radius(R1, [1j], [m * 1j], 1e-12) for m in (0, 0.5, 1, 3)]
    assert by_m == sorted(by_m)
    by_tol = [tail_radius(R1, [1j], [0.2j], t) for t in (1e-4, 1e-8, 1e-12, 1e-15)]
    assert by_tol == sorted(by_tol)


@pytest.mark.parametrize("lam,m", [(1.0, 0.0), (0.3, 0.5), (2.0, 3.0), (0.05, 0.1)])
def test_plan_tail_certifies_1d(lam, m):
    # oracle: the tail of the 1D majorant sum, summed directly
    for tol in (1e-6, 1e-12):
        p = plan_tail(lam, m, 1, 1.0, tol)
        tail = sum(2 * math.exp(-math.pi * lam * l * l + 2 * math.pi * m * l)
                   for l in range(int(math.floor(p.radius)) + 1, 4000))
        assert tail <= p.bound <= tol


def test_classical_value():
    ev = theta_eval(R1, Z1, [1j], [0.0], 1e-12)
    oracle = sum(math.exp(-math.pi * l * l) for l in range(-8, 9))  # 17 terms
    assert abs(ev.value - oracle) < 1e-10
    assert ev.value.real == pytest.approx(1.0864348112, abs=1e-10)
    assert ev.tail_bound <= 1e-12 and ev.points_summed > 0


def test_large_imaginary_part():
    ev = theta_eval(R1, Z1, [100j], [0.0], 1e-12)
    assert abs(ev.value - 1) <= 1e-12


def test_siegel_factorization():
    ev = theta_eval(S2, Z2, 1j * np.array([1, 0, 1]), [0, 0], 1e-12)
    assert ev.value.real == pytest.approx(1.1803406, abs=1e-6)
    one = theta_eval(R1, Z1, [1j], [0.0], 1e-14).value
    assert abs(ev.value - one * one) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_error_within_tail_bound_1d(seed, backend):
    rng = np.random.default_rng(seed)
    z = complex(rng.uniform(-1, 1), rng.uniform(0.4, 2))
    u = complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
    for scale in (1, 2):
        lat = Lattice.standard(1, scale)
        ev = theta_eval(R1, lat, [z], [u], 1e-8, kernel=backend)
        oracle = theta_1d_oracle(z, u, scale)
        assert abs(ev.value - oracle) <= ev.tail_bound + 1e-13


@pytest.mark.parametrize("desc", [SymReal(2), SpinFactor(3)])
def test_error_within_tail_bound_2d(desc, backend):
    rep = natural_representation(desc)
    lat = Lattice.from_rows([[1, 0], ["1/2", 1]], rho=rep.rho)
    rng = np.random.default_rng(11)
    for _ in range(3):
        z = rng.uniform(-0.5, 0.5, 3) + 1j * (rep.base_point + 0.2 * rng.uniform(-1, 1, 3))
        u = rng.uniform(0, 1, 2) + 0.1j * rng.standard_normal(2)
        ev = theta_eval(rep, lat, z, u, 1e-9, kernel=backend)
        oracle = theta_box_oracle(rep.psi(z), rep.rho, dual_lattice(lat, rep.rho).basis, u)
        assert abs(ev.value - oracle) <= ev.tail_bound + 1e-12


def test_tolerance_stability_random():
    rng = np.random.default_rng(3)
    for desc in (RealLine(), SymReal(2), HermComplex(2)):
        rep = natural_representation(desc)
        lat = Lattice.standard(rep.dim_U)
        for _ in range(4):
            z = rng.uniform(-0.5, 0.5, rep.dim_V) + 1j * rep.base_point * rng.uniform(0.5, 1.5)
            u = rng.uniform(0, 1, rep.dim_U) + 0.2j * rng.standard_normal(rep.dim_U)
            for tol in (1e-4, 1e-8):
                a = theta_eval(rep, lat, z, u, tol).value
                b = theta_eval(rep, lat, z, u, tol / 100).value
                assert abs(a - b) <= tol


def test_evenness():
    z, u = 1j * np.array([1.2, 0.3, 0.9]) + 0.1, np.array([0.3 + 0.1j, -0.2])
    a = theta_eval(S2, Z2, z, u, 1e-13)
    b = theta_eval(S2, Z2, z, -u, 1e-13)
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-15


def test_holomorphy_surrogate():
    h = 1e-5
    f_z = lambda z: theta_eval(S2, Z2, z, np.array([0.2, 0.1]), 1e-14).value  # noqa: E731
    z0 = np.array([0.1 + 1.1j, 0.2 + 0.3j, -0.1 + 0.9j])
    for k in range(3):
        e = np.eye(3)[k]
        dx = (f_z(z0 + h * e) - f_z(z0 - h * e)) / (2 * h)
        dy = (f_z(z0 + 1j * h * e) - f_z(z0 - 1j * h * e)) / (2 * h)
        assert abs(dy - 1j * dx) < 1e-6
    f_u = lambda u: theta_eval(S2, Z2, z0, u, 1e-14).value  # noqa: E731
    u0 = np.array([0.2 + 0.1j, 0.4])
    for k in range(2):
        e = np.eye(2)[k]
        dx = (f_u(u0 + h * e) - f_u(u0 - h * e)) / (2 * h)
        dy = (f_u(u0 + 1j * h * e) - f_u(u0 - 1j * h * e)) / (2 * h)
        assert abs(dy - 1j * dx) < 1e-6


def test_domain_errors():
    with pytest.raises(DomainError) as info:
        theta_eval(R1, Z1, [0.5 + 0j], [0.0])
    assert info.value.boundary
    with pytest.raises(DomainError) as info:
        theta_eval(S2, Z2, 1j * np.array([1, 0, -1]), [0, 0])
    assert not info.value.boundary
    with pytest.raises(DomainError):
        tail_radius(R1, [-1j], None, 1e-6)


def test_budget_error_reports_achieved_bound():
    with pytest.raises(BudgetExceeded) as info:
        theta_eval(S2, Z2, 1e-3j * np.array([1, 0, 1]), [0, 0], 1e-12, budget=1000)
    assert info.value.achieved_bound > 1e-12


def test_strategies_and_streaming_agree():
    z, u = np.array([0.1 + 0.6j, 0.05 + 0.2j, -0.2 + 0.5j]), np.array([0.3, 0.1 + 0.05j])
    a = theta_eval(S2, Z2, z, u, 1e-10)
    b = theta_eval(S2, Z2, z, u, 1e-10, strategy="box")
    c = theta_eval(S2, Z2, z, u, 1e-10, stream_threshold=0)
    assert b.points_summed > a.points_summed == c.points_summed
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound
    assert abs(a.value - c.value) <= 1e-14
    with pytest.raises(ValueError):
        theta_eval(S2, Z2, z, u, 1e-10, strategy="spiral")


def test_hermitian_ellipsoid_fewer_terms_than_box():
    rep = natural_representation(HermComplex(2))
    lat = Lattice.standard(4)
    z = np.array([0.1 + 0.7j, 0.1j, 0.05j, 0.2 + 0.6j])
    a = theta_eval(rep, lat, z, None, 1e-10)
    b = theta_eval(rep, lat, z, None, 1e-10, strategy="box")
    assert a.points_summed < b.points_summed
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound


def test_reproducible_bits(backend):
    z, u = np.array([0.1 + 0.6j, 0.05 + 0.2j, -0.2 + 0.5j]), np.array([0.3, 0.1])
    a = theta_eval(S2, Z2, z, u, 1e-12, kernel=backend).value
    b = theta_eval(S2, Z2, z, u, 1e-12, kernel=backend).value
    assert a == b


def test_theta_eval_many_matches_single():
    z = np.array([0.1 + 0.8j, 0.1j, 0.2 + 1.1j])
    us = np.array([[0.1, 0.2], [0.5 + 0.1j, -0.3], [0.0, 0.9]])
    vals, bound = theta_eval_many(S2, Z2, z, us, 1e-12)
    for u, v in zip(us, vals):
        assert abs(v - theta_eval(S2, Z2, z, u, 1e-12).value) <= 2 * bound + 1e-14


def test_fourier_examples():
    assert abs(fourier_coefficient(R1, Z1, [1j], [0.0]) - 1) < 1e-12
    c1 = fourier_coefficient(R1, Z1, [1j], [1.0])
    assert c1.real == pytest.approx(0.0432139183, abs=1e-10)
    assert abs(fourier_coefficient(R1, Z1, [1j], [-1.0]) - c1) < 1e-14


def test_fourier_2d():
    z = np.array([0.2 + 1.0j, 0.1 + 0.2j, -0.1 + 0.8j])
    for l in ([1, 0], [1, -1], [2, 1], [0, 3]):
        l = np.array(l, float)
        expected = cmath.exp(1j * math.pi * ((S2.psi(z) @ l) @ l))
        assert abs(fourier_coefficient(S2, Z2, z, l) - expected) < 1e-6


def test_fourier_dimension_limit():
    rep = natural_representation(HermComplex(2))
    with pytest.raises(UnsupportedConfiguration):
        fourier_coefficient(rep, Lattice.standard(4), 1j * rep.base_point, np.zeros(4))


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(0.3, 3), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_classical_matches_direct_sum(x, y, a, b):
    z, u = complex(x, y), complex(a, b)
    ev = theta_eval(R1, Z1, [z], [u], 1e-10)
    assert abs(ev.value - theta_1d_oracle(z, u, terms=60)) <= ev.tail_bound + 1e-12 * max(1, abs(ev.value))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from pointint import core, regularization, schrodinger
from pointint.core import LambdaParams, SeparatedParams, UnitaryParams
from pointint.errors import NoDiscreteSpectrum, SideMismatch, SingularSystem, ValidationError
from pointint.schrodinger import BoundaryState

from _oracles import amplitudes_by_solve, bound_kappas_by_bisection

KS = (0.25, 1.0, 4.0)


def test_free_particle():
    res = schrodinger.scatter(core.IDENTITY, 1.0, "left")
    assert abs(res.r) < 1e-15
    assert res.t == pytest.approx(1.0)


@pytest.mark.parametrize("gamma", [-2.0, 0.3, 7.0])
@pytest.mark.parametrize("k", KS)
def test_delta_amplitudes(gamma, k):
    res = schrodinger.scatter(core.delta(gamma), k, "left")
    assert res.r == pytest.approx(gamma / (2j * k - gamma), abs=1e-14)
    assert res.t == pytest.approx(2j * k / (2j * k - gamma), abs=1e-14)


def test_delta_frozen_value():
    # gamma = -2, k = 1: r = -2 / (2i + 2)
    res = schrodinger.scatter(core.delta(-2.0), 1.0)
    assert res.r == pytest.approx(-0.5 + 0.5j, abs=1e-15)
    assert res.t == pytest.approx(0.5 + 0.5j, abs=1e-15)


def test_delta_matches_narrow_square_well():
    well = regularization.rect_delta(1e-4, strength=-2.0)
    res = regularization.transfer_scatter(regularization.ode_transfer(well, 1.0))
    ref = schrodinger.scatter(core.delta(-2.0), 1.0)
    assert abs(res.r - ref.r) < 1e-3
    assert abs(res.t - ref.t) < 1e-3


def test_random_members_match_direct_solve():
    rng = np.random.default_rng(21)
    for p in core.lambda_list(*core.sample_lambda(rng, 300)):
        for k in KS:
            for side in ("left", "right"):
                res = schrodinger.scatter(p, k, side)
                r, t = amplitudes_by_solve(p.matrix(), 1j * k, side)
                assert abs(res.r - r) < 1e-10
                assert abs(res.t - t) < 1e-10


@pytest.mark.parametrize("k", KS)
def test_dirichlet_and_neumann_walls(k):
    wall = schrodinger.scatter(SeparatedParams(math.inf, math.inf), k, "left")
    assert wall.r == -1 and wall.t == 0
    neumann = schrodinger.scatter(SeparatedParams(3.0, 0.0), k, "left")
    assert neumann.r == pytest.approx(1.0) and neumann.t == 0


@pytest.mark.parametrize("side", ["left", "right"])
def test_separated_reflection_is_unimodular_and_currents_vanish(side):
    p = SeparatedParams(-1.3, 0.8)
    res = schrodinger.scatter(p, 0.9, side)
    assert abs(res.r) == pytest.approx(1.0, abs=1e-14)
    minus, plus = schrodinger.scattering_states(res)
    assert abs(schrodinger.current(minus)) < 1e-12
    assert abs(schrodinger.current(plus)) < 1e-12
    # the incidence-side state obeys psi' = h psi
    st_, h = (minus, p.h_minus) if side == "left" else (plus, p.h_plus)
    assert st_.dpsi == pytest.approx(h * st_.psi, abs=1e-14)


def test_unitarity_and_current_balance_random():
    rng = np.random.default_rng(22)
    for p in core.lambda_list(*core.sample_lambda(rng, 500)):
        for k in KS:
            for side in ("left", "right"):
                res = schrodinger.scatter(p, k, side)
                assert res.unitarity_residual < 1e-10
                assert abs(res.current_balance) < 1e-10 * max(1.0, res.current_in)
                minus, plus = schrodinger.scattering_states(res)
                assert np.allclose(p.matrix() @ minus.vector(), plus.vector(), atol=1e-10)


def test_unitary_input_accepted_with_l0():
    u = core.lambda_to_unitary(core.delta(-2.0), l0=3.0)
    res = schrodinger.scatter(u, 1.0, "left", l0=3.0)
    assert res.r == pytest.approx(-0.5 + 0.5j, abs=1e-12)


def test_current_examples():
    assert schrodinger.current(BoundaryState(1.0, 1j, "left")) == pytest.approx(2.0)
    assert schrodinger.current(BoundaryState(1.0, 0.7, "left")) == 0.0


@pytest.mark.parametrize("k", [0.0, -1.0, math.inf, math.nan])
def test_bad_wavenumber(k):
    with pytest.raises(ValidationError):
        schrodinger.scatter(core.IDENTITY, k)


def test_bad_side():
    with pytest.raises(ValidationError):
        schrodinger.scatter(core.IDENTITY, 1.0, "up")


def test_singular_matching_raises():
    # det -1 with this shape is not a valid boundary matrix; the solver guards it
    with pytest.raises(SingularSystem):
        schrodinger.plane_wave_amplitudes(np.array([[0.0, 1.0], [1.0, 0.0]]), 1j, "left")


def test_scatter_many_matches_scalar_path():
    rng = np.random.default_rng(23)
    params = core.lambda_list(*core.sample_lambda(rng, 40))
    ks = np.array([0.3, 1.0, 2.5])
    out = schrodinger.scatter_many(params, ks)
    for i, p in enumerate(params):
        for j, k in enumerate(ks):
            left, right = schrodinger.scatter(p, k, "left"), schrodinger.scatter(p, k, "right")
            assert out["r_left"][i, j] == pytest.approx(left.r, abs=1e-12)
            assert out["t_left"][i, j] == pytest.approx(left.t, abs=1e-12)
            assert out["r_right"][i, j] == pytest.approx(right.r, abs=1e-12)
            assert out["t_right"][i, j] == pytest.approx(right.t, abs=1e-12)


# ---------------------------------------------------------------- bound states

def test_no_bound_state_for_free_particle():
    assert schrodinger.bound_states(core.IDENTITY) == []


def test_delta_bound_state():
    (st_,) = schrodinger.bound_states(core.delta(-2.0))
    assert st_.kappa == pytest.approx(1.0, abs=1e-12)
    assert st_.energy == pytest.approx(-1.0, abs=1e-12)
    assert st_.side == "both" and st_.multiplicity == 1
    assert schrodinger.bound_states(core.delta(2.0)) == []


@pytest.mark.parametrize("b", [-0.5, -2.0, -7.0])
def test_delta_prime_bound_state(b):
    (st_,) = schrodinger.bound_states(core.delta_prime(b))
    assert st_.kappa == pytest.approx(-2.0 / b, rel=1e-12)
    assert st_.energy == pytest.approx(-4.0 / b**2, rel=1e-12)


def test_delta_bound_state_agrees_with_narrow_square_well():
    # even state of a well of depth v0 and width w: q tan(q w / 2) = kappa
    width = 1e-4
    v0 = 2.0 / width

    def f(kappa):
        q = math.sqrt(v0 - kappa**2)
        return q * math.tan(q * width / 2) - kappa

    kappa = brentq(f, 0.5, 1.5, xtol=1e-14)
    assert kappa == pytest.approx(1.0, abs=1e-3)


def test_bound_states_match_bisection_oracle():
    rng = np.random.default_rng(24)
    for p in core.lambda_list(*core.sample_lambda(rng, 200)):
        mine = sorted(s.kappa for s in schrodinger.bound_states(p) if s.kappa <= 1e3)
        ref = sorted(bound_kappas_by_bisection(p.matrix(), hi=1e3))
        assert len(mine) == len(ref)
        for a, b in zip(mine, ref):
            assert abs(a - b) < 1e-10 * max(1.0, b)


def test_bound_state_satisfies_boundary_relation():
    rng = np.random.default_rng(25)
    for p in core.lambda_list(*core.sample_lambda(rng, 100)):
        for st_ in schrodinger.bound_states(p):
            out = p.matrix() @ np.array([1.0, st_.kappa])
            # parallel to the decaying right solution (1, -kappa)
            assert abs(out[1] + st_.kappa * out[0]) < 1e-9 * np.linalg.norm(out)


def test_phase_does_not_obstruct_bound_states():
    for phi in (0.0, 0.5, 2.5):
        (st_,) = schrodinger.bound_states(LambdaParams(phi, 1.0, 0.0, -2.0, 1.0))
        assert st_.energy == pytest.approx(-1.0)
    # phi close to pi is the same as phi = 0 with the matrix negated
    (st_,) = schrodinger.bound_states(LambdaParams(math.pi - 1e-13, -1.0, 0.0, 2.0, -1.0))
    assert st_.kappa == pytest.approx(1.0)


def test_separated_bound_states():
    states = schrodinger.bound_states(SeparatedParams(-1.5, 2.0))
    assert {(s.side, s.kappa) for s in states} == {("right-only", 1.5), ("left-only", 2.0)}
    assert schrodinger.bound_states(SeparatedParams(1.5, -2.0)) == []
    assert schrodinger.bound_states(SeparatedParams(math.inf, math.inf)) == []


def test_quadratic_degenerate_cases():
    assert schrodinger._positive_roots(0.0, 2.0, -2.0) == [(1.0, 1)]
    assert schrodinger._positive_roots(0.0, 0.0, 1.0) == []
    assert schrodinger._positive_roots(1.0, -2.0, 1.0) == [(1.0, 2)]
    assert schrodinger._positive_roots(1.0, 0.0, 1.0) == []
    with pytest.raises(NoDiscreteSpectrum):
        schrodinger._positive_roots(0.0, 0.0, 0.0)


def test_quadratic_is_stable_for_tiny_roots():
    roots = schrodinger._positive_roots(1.0, -1e8, 1.0)
    assert roots[0][0] == pytest.approx(1e-8, rel=1e-12)
    assert roots[1][0] == pytest.approx(1e8, rel=1e-12)


# ---------------------------------------------------------------- interaction coefficients

def test_identity_has_no_interaction():
    co = schrodinger.interaction_coefficients(core.IDENTITY, BoundaryState(0.3 + 1j, -2.0, "left"))
    assert (co.alpha0, co.alpha1) == (0, 0)


@pytest.mark.parametrize("gamma", [-2.0, 5.0])
def test_delta_coefficients(gamma):
    co = schrodinger.interaction_coefficients(core.delta(gamma), BoundaryState(1.0, 0.0, "left"))
    assert co.alpha0 == pytest.approx(gamma)
    assert co.alpha1 == 0


def test_explicit_left_formula():
    p = LambdaParams(0.4, 2.0, 1.5, 1.0, 1.25)
    psi, dpsi = 0.3 - 0.2j, 1.1 + 0.5j
    co = schrodinger.interaction_coefficients(p, BoundaryState(psi, dpsi, "left"))
    e = np.exp(1j * p.phi)
    assert co.alpha0 == pytest.approx(p.c * e * psi + (p.d * e - 1) * dpsi)
    assert co.alpha1 == pytest.approx((p.a * e - 1) * psi + p.b * e * dpsi)


def test_jump_reconstruction_and_left_right_consistency():
    rng = np.random.default_rng(26)
    for p in core.lambda_list(*core.sample_lambda(rng, 200)):
        k = rng.uniform(0.2, 3.0)
        res = schrodinger.scatter(p, k, rng.choice(["left", "right"]))
        minus, plus = schrodinger.scattering_states(res)
        left = schrodinger.interaction_coefficients(p, minus)
        right = schrodinger.interaction_coefficients(p, plus)
        scale = max(1.0, abs(plus.dpsi), abs(minus.dpsi))
        assert abs(left.alpha0 - (plus.dpsi - minus.dpsi)) < 1e-10 * scale
        assert abs(left.alpha1 - (plus.psi - minus.psi)) < 1e-10 * scale
        assert abs(left.alpha0 - right.alpha0) < 1e-10 * scale
        assert abs(left.alpha1 - right.alpha1) < 1e-10 * scale


def test_side_mismatch():
    p = core.delta(1.0)
    with pytest.raises(SideMismatch):
        schrodinger.interaction_coefficients(p, BoundaryState(1.0, 0.0, "left"), formula="right")


def test_separated_coefficients_need_both_sides():
    p = SeparatedParams(2.0, -1.0)
    left, right = BoundaryState(1.0, -1.0, "left"), BoundaryState(0.5, 1.0, "right")
    co = schrodinger.interaction_coefficients(p, left, right)
    assert co.alpha0 == pytest.approx(p.h_plus * 0.5 - p.h_minus * 1.0)
    assert co.alpha1 == pytest.approx(0.5 - 1.0)
    with pytest.raises(SideMismatch):
        schrodinger.interaction_coefficients(p, left)
    with pytest.raises(SideMismatch):
        schrodinger.interaction_coefficients(p, left, BoundaryState(1.0, 0.0, "left"))


def test_separated_coefficients_with_dirichlet_wall():
    p = SeparatedParams(math.inf, 0.0)
    co = schrodinger.interaction_coefficients(p, BoundaryState(2.0, 0.0, "left"), BoundaryState(0.0, 3.0, "right"))
    # psi(0+) = 0 so alpha1 = -psi(0-), alpha0 = psi'(0+) - psi'(0-)
    assert co.alpha1 == pytest.approx(-2.0)
    assert co.alpha0 == pytest.approx(3.0)


@settings(max_examples=200, deadline=None)
@given(
    theta=st.floats(0.0, math.pi, exclude_max=True),
    v=st.tuples(*[st.floats(-1, 1) for _ in range(4)]).filter(lambda v: np.linalg.norm(v) > 0.1),
    k=st.floats(0.05, 20.0),
    side=st.sampled_from(["left", "right"]),
)
def test_unitarity_property(theta, v, k, side):
    v = np.array(v) / np.linalg.norm(v)
    u = UnitaryParams(theta, complex(v[0], v[1]), complex(v[2], v[3]))
    if 0 < abs(u.w) < 1e-6:
        return
    res = schrodinger.scatter(u, k, side)
    assert res.unitarity_residual < 1e-10

import math
import warnings

import numpy as np
import pytest

from pointint import core, parity, regularization as reg, schrodinger
from pointint.core import LambdaParams, SeparatedParams
from pointint.errors import StepTooCoarse, ValidationError
from pointint.regularization import DeltaArray, NonConvergent, SampledPotential

from _oracles import barrier_transfer, free, seba_exact, seba_leading

# closed-form barrier V0 = 4, width 1, k = 1 (cosh/sinh of sqrt(3))
BARRIER = np.array([[2.91457744, 1.58058656], [4.74175969, 2.91457744]])


def quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return fn(*args, **kwargs)


# ---------------------------------------------------------------- delta arrays

def test_empty_array_is_identity():
    tm = reg.delta_array_transfer(DeltaArray(()), 1.3)
    assert np.array_equal(tm.entries, np.eye(2))


def test_single_delta_matches_point_interaction():
    tm = reg.delta_array_transfer(DeltaArray(((0.0, -2.0),)), 1.0)
    assert np.allclose(tm.entries, [[1, 0], [-2, 1]])
    for side in ("left", "right"):
        got = reg.transfer_scatter(tm, side)
        want = schrodinger.scatter(core.delta(-2.0), 1.0, side)
        assert abs(got.r - want.r) < 1e-14 and abs(got.t - want.t) < 1e-14
    left = reg.transfer_scatter(tm, "left")
    assert left.r == pytest.approx(-2.0 / (2j + 2.0), abs=1e-14)


def test_array_rejects_unordered_positions():
    with pytest.raises(ValidationError):
        DeltaArray(((0.0, 1.0), (0.0, 2.0)))


def test_array_matches_explicit_product():
    pts = ((-0.4, 1.5), (0.1, -0.7), (0.9, 2.0))
    k = 1.7
    want = np.eye(2)
    last = None
    for x, g in pts:
        if last is not None:
            want = free(x - last, k) @ want
        want = np.array([[1, 0], [g, 1]]) @ want
        last = x
    tm = reg.delta_array_transfer(DeltaArray(pts), k)
    assert np.allclose(tm.entries, want, atol=1e-14)
    assert abs(tm.det_drift) < 1e-12
    assert (tm.x_left, tm.x_right) == (-0.4, 0.9)


def test_random_arrays_are_unimodular():
    rng = np.random.default_rng(51)
    for _ in range(100):
        n = rng.integers(1, 8)
        pos = np.sort(rng.uniform(-2, 2, n))
        arr = DeltaArray(tuple(zip(pos, rng.normal(scale=3, size=n))))
        assert abs(reg.delta_array_transfer(arr, rng.uniform(0.1, 4)).det - 1) < 1e-10


def test_delta_array_composition():
    left = ((-1.0, 0.5), (-0.2, -1.0))
    right = ((0.3, 2.0), (1.1, 0.4))
    k = 0.8
    whole = reg.delta_array_transfer(DeltaArray(left + right), k).entries
    parts = (
        reg.delta_array_transfer(DeltaArray(right), k).entries
        @ free(0.5, k)
        @ reg.delta_array_transfer(DeltaArray(left), k).entries
    )
    assert np.max(np.abs(whole - parts)) < 1e-10


# ---------------------------------------------------------------- Seba pair

def test_seba_edges_matches_high_precision_oracle():
    for eps in (1e-2, 1e-3, 1e-4):
        r, t = seba_exact(eps, reference="edges")
        got = reg.transfer_scatter(reg.delta_array_transfer(reg.seba(eps), 1.0), reference="edges")
        assert abs(got.r - r) < 1e-12 and abs(got.t - t) < 1e-12


def test_seba_origin_matches_high_precision_oracle():
    for eps in (1e-2, 1e-3):
        r, t = seba_exact(eps, reference="origin")
        got = reg.transfer_scatter(reg.delta_array_transfer(reg.seba(eps), 1.0))
        assert abs(got.r - r) < 1e-12 and abs(got.t - t) < 1e-12


def test_seba_frozen_values():
    got = reg.transfer_scatter(reg.delta_array_transfer(reg.seba(1e-3), 1.0), reference="edges")
    assert got.r == pytest.approx(-0.9999920002133267 - 3.7332e-8j, abs=1e-12)
    assert got.t == pytest.approx(1.59995e-5 + 0.0039999067j, abs=1e-10)
    assert abs(got.r + 1) == pytest.approx(7.99987e-6, rel=1e-5)


def test_seba_leading_terms_edges():
    lead_r, lead_t = seba_leading("edges")
    import sympy as sp

    from _oracles import EPS, K

    assert sp.simplify(lead_t - 4 * sp.I * EPS * K) == 0
    # |r + 1| ~ 8 eps^2 k^2
    assert sp.simplify(sp.Abs(lead_r.subs({EPS: sp.Rational(1, 10**6), K: 1})) * 10**12 - 8) < sp.Rational(1, 10**3)
    eps = 1e-3
    got = reg.transfer_scatter(reg.delta_array_transfer(reg.seba(eps), 1.0), reference="edges")
    assert abs(got.r + 1) == pytest.approx(8 * eps**2, rel=1e-3)
    assert abs(got.t) == pytest.approx(4 * eps, rel=1e-3)


def _orders(values, eps):
    return [math.log(a / b) / math.log(ea / eb) for a, b, ea, eb in zip(values, values[1:], eps, eps[1:])]


def test_seba_rates_edges():
    eps = (1e-2, 1e-3, 1e-4)
    res = [reg.transfer_scatter(reg.delta_array_transfer(reg.seba(e), 1.0), reference="edges") for e in eps]
    assert min(_orders([abs(x.r + 1) for x in res], eps)) >= 2.0 - 1e-3
    assert min(_orders([abs(x.t) for x in res], eps)) >= 1.0 - 1e-3


def test_seba_rates_origin_are_first_order():
    # phasing at the origin adds a 2 i eps k term to r + 1
    eps = (1e-2, 1e-3, 1e-4)
    res = [reg.transfer_scatter(reg.delta_array_transfer(reg.seba(e), 1.0)) for e in eps]
    for e, x in zip(eps, res):
        assert abs(x.r + 1) == pytest.approx(2 * e, rel=2e-2)
        assert abs(x.t) == pytest.approx(4 * e, rel=2e-2)
    assert min(_orders([abs(x.r + 1) for x in res], eps)) == pytest.approx(1.0, abs=1e-2)


def test_transfer_scatter_reference_checked():
    tm = reg.delta_array_transfer(reg.seba(1e-2), 1.0)
    with pytest.raises(ValidationError):
        reg.transfer_scatter(tm, reference="middle")


def test_transfer_scatter_is_unitary():
    tm = reg.delta_array_transfer(DeltaArray(((-0.3, 2.0), (0.4, -1.0))), 1.2)
    for side in ("left", "right"):
        for ref in ("origin", "edges"):
            assert reg.transfer_scatter(tm, side, ref).unitarity_residual < 1e-12


# ---------------------------------------------------------------- ODE transfer

def test_zero_potential_is_free():
    pot = SampledPotential(np.linspace(-1, 1, 401), np.zeros(401))
    tm = reg.ode_transfer(pot, 1.0)
    assert np.max(np.abs(tm.entries - [[math.cos(2), math.sin(2)], [-math.sin(2), math.cos(2)]])) < 1e-8


def test_barrier_matches_closed_form():
    pot = reg.rectangle(0.0, 1.0, 4.0, pad=0.5, h=1e-3)
    tm = reg.ode_transfer(pot, 1.0)
    want = free(0.5, 1.0) @ barrier_transfer(4.0, 1.0, 1.0) @ free(0.5, 1.0)
    assert np.max(np.abs(tm.entries - want)) < 1e-8
    assert abs(tm.det_drift) < 1e-10


def test_unpadded_barrier_warns_and_matches():
    with pytest.warns(RuntimeWarning):
        tm = reg.ode_transfer(reg.rectangle(0.0, 1.0, 4.0, h=1e-3), 1.0)
    assert np.max(np.abs(tm.entries - BARRIER)) < 1e-8
    assert np.max(np.abs(barrier_transfer(4.0, 1.0, 1.0) - BARRIER)) < 1e-8


@pytest.mark.parametrize("v0, k", [(4.0, 3.0), (-5.0, 1.0), (1.0, 0.25)])
def test_other_barriers(v0, k):
    tm = quiet(reg.ode_transfer, reg.rectangle(-0.3, 0.7, v0, h=1e-3), k)
    assert np.max(np.abs(tm.entries - barrier_transfer(v0, 1.0, k))) < 1e-8


def test_gaussian_matches_delta_member():
    pot = reg.gaussian_delta(1e-3, -2.0, k_max=1.0)
    assert pot.integral() == pytest.approx(-2.0, abs=1e-8)
    tm = reg.ode_transfer(pot, 1.0)
    got = reg.transfer_scatter(tm)
    want = schrodinger.scatter(core.delta(-2.0), 1.0)
    assert abs(got.r - want.r) < 1e-3 and abs(got.t - want.t) < 1e-3


def test_ode_composition_homomorphism():
    pot = reg.gaussian_delta(0.1, -2.0)
    j = len(pot.grid) // 2
    j -= j % 2
    first = SampledPotential(pot.grid[: j + 1], pot.values[: j + 1])
    second = SampledPotential(pot.grid[j:], pot.values[j:])
    k = 1.3
    whole = reg.ode_transfer(pot, k).entries
    parts = quiet(reg.ode_transfer, second, k).entries @ quiet(reg.ode_transfer, first, k).entries
    assert np.max(np.abs(whole - parts)) < 1e-10


def test_ode_det_drift_is_reported():
    rng = np.random.default_rng(52)
    x = np.linspace(-1, 1, 2001)
    v = np.exp(-20 * x**2) * (rng.normal(size=4) @ np.vstack([np.ones_like(x), x, x**2, x**3]))
    tm = reg.ode_transfer(SampledPotential(x, v), 2.0)
    assert abs(tm.det - 1) == pytest.approx(abs(tm.det_drift))
    assert abs(tm.det_drift) < 1e-10


def test_step_too_coarse():
    x = np.linspace(-1, 1, 5)
    with pytest.raises(StepTooCoarse):
        quiet(reg.ode_transfer, SampledPotential(x, 400 * np.exp(-x**2)), 1.0)


def test_k_must_be_positive():
    with pytest.raises(ValidationError):
        reg.ode_transfer(reg.gaussian_delta(0.1), 0.0)
    with pytest.raises(ValidationError):
        reg.delta_array_transfer(DeltaArray(()), -1.0)


@pytest.mark.parametrize(
    "grid, values",
    [
        ([0.0], [1.0]),
        ([0.0, 1.0], [1.0, math.inf]),
        ([1.0, 0.0], [0.0, 0.0]),
        ([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]),
        ([0.0, 1.0, 1.0, 1.0, 2.0], [0.0] * 5),
    ],
)
def test_sampled_potential_validation(grid, values):
    with pytest.raises(ValidationError):
        SampledPotential(np.array(grid), np.array(values))


# ---------------------------------------------------------------- CSV and scaling

def test_csv_with_and_without_header(tmp_path):
    x = np.linspace(-0.5, 0.5, 101)
    v = -np.exp(-50 * x**2)
    plain = tmp_path / "plain.csv"
    plain.write_text("".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, v)))
    head = tmp_path / "head.csv"
    head.write_text("x,V\n" + plain.read_text())
    for path in (plain, head):
        pot = reg.load_potential_csv(path)
        assert np.array_equal(pot.grid, x) and np.array_equal(pot.values, v)


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\nfoo,bar\n1,2\n")
    with pytest.raises(ValidationError):
        reg.load_potential_csv(bad)
    short = tmp_path / "short.csv"
    short.write_text("x,V\n0,1\n")
    with pytest.raises(ValidationError):
        reg.load_potential_csv(short)


def test_scaled_sequences():
    base = SampledPotential(np.linspace(-1, 1, 11), np.linspace(0, 1, 11))
    seq = reg.scaled_sequence(base, "delta")
    assert seq(0.1).integral() == pytest.approx(base.integral())
    moment = lambda p: float(np.trapezoid(p.grid * p.values, p.grid))
    assert reg.scaled_sequence(base, "deltaprime")(0.1).grid[-1] == pytest.approx(0.1)
    assert moment(reg.scaled_sequence(base, "deltaprime")(0.1)) == pytest.approx(moment(base))
    with pytest.raises(ValidationError):
        reg.scaled_sequence(base, "cubic")


def test_named_sequences():
    assert set(reg.SEQUENCES) == {"seba", "gauss-delta", "dgauss-deltaprime", "rect"}
    with pytest.raises(ValidationError):
        reg.named_sequence("lorentz")
    assert reg.named_sequence("gauss-delta", strength=-3.0)(1e-2).integral() == pytest.approx(-3.0, abs=1e-6)
    assert reg.named_sequence("rect")(1e-2).integral() == pytest.approx(-2.0)


# ---------------------------------------------------------------- limit analysis

def test_seba_limit_is_impenetrable_wall():
    rep = reg.limit_analysis(reg.named_sequence("seba"))
    assert rep.limit == SeparatedParams(math.inf, math.inf)
    assert rep.parity == "Even"


def test_dgauss_limit_is_impenetrable_wall():
    rep = reg.limit_analysis(reg.named_sequence("dgauss-deltaprime"))
    assert rep.limit == SeparatedParams(math.inf, math.inf)
    assert rep.parity == "Even"


@pytest.mark.parametrize("name", ["gauss-delta", "rect"])
def test_delta_approximants_converge_to_delta(name):
    rep = reg.limit_analysis(reg.named_sequence(name, strength=-2.0))
    assert isinstance(rep.limit, LambdaParams)
    assert np.max(np.abs(rep.limit.real_matrix() - core.delta(-2.0).real_matrix())) < 1e-6
    assert rep.parity == "Even"


def test_gaussian_limit_from_schedule_ending_at_1e_3():
    rep = reg.limit_analysis(reg.named_sequence("gauss-delta", strength=-2.0), eps_schedule=(8e-3, 4e-3, 2e-3, 1e-3))
    assert isinstance(rep.limit, LambdaParams)
    assert rep.limit.c == pytest.approx(-2.0, abs=1e-3)


def test_gaussian_fit_carries_second_order_shift():
    # at finite width c = gamma + gamma^2 sigma / sqrt(pi) + O(sigma^2)
    rep = reg.limit_analysis(reg.named_sequence("gauss-delta", strength=-2.0))
    for ev in rep.evidence[2:]:
        shift = 4.0 * ev.eps / math.sqrt(math.pi)
        assert ev.fitted.c == pytest.approx(-2.0 + shift, abs=0.05 * shift)


def test_declared_limits_are_never_odd():
    seqs = [(reg.named_sequence(n), reg.DEFAULT_EPS_SCHEDULE) for n in reg.SEQUENCES]
    x = np.linspace(-1, 1, 401)
    base = SampledPotential(x, 10 * x * np.exp(-30 * x**2))
    seqs.append((reg.scaled_sequence(base, "deltaprime"), (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)))
    for seq, schedule in seqs:
        rep = quiet(reg.limit_analysis, seq, eps_schedule=schedule)
        assert rep.converged
        assert rep.parity in ("Even", "NoDefiniteParity")
        if isinstance(rep.limit, LambdaParams):
            assert not parity.odd_condition_check(core.lambda_to_unitary(rep.limit)).is_odd_candidate
    assert rep.limit == SeparatedParams(math.inf, math.inf)


def test_fixed_width_potential_is_not_a_point_limit():
    rep = quiet(reg.limit_analysis, lambda eps: reg.rectangle(-0.5, 0.5, 4.0, pad=0.5, h=1e-2))
    assert isinstance(rep.limit, NonConvergent)
    assert "k" in rep.limit.reason


def test_oscillating_sequence_is_not_cauchy():
    seq = lambda eps: DeltaArray(((0.0, 2.0 if round(math.log10(eps)) % 2 else -2.0),))
    rep = reg.limit_analysis(seq)
    assert isinstance(rep.limit, NonConvergent)
    assert not rep.converged


def test_limit_analysis_validates_schedules():
    seq = reg.named_sequence("seba")
    with pytest.raises(ValidationError):
        reg.limit_analysis(seq, eps_schedule=(1e-1, 1e-2, 1e-3))
    with pytest.raises(ValidationError):
        reg.limit_analysis(seq, eps_schedule=(1e-1, 1e-2, 1e-2, 1e-3))
    with pytest.raises(ValidationError):
        reg.limit_analysis(seq, k_grid=(0.5, 1.0))


def test_fitted_phase_near_pi_is_canonical():
    u = core.lambda_to_unitary(LambdaParams(math.pi - 1e-14, -1.0, 0.0, 2.0, -1.0)).matrix()
    p = reg._limit_params(u, 1e-12)
    assert p.phi == 0.0 and p.c == pytest.approx(-2.0)

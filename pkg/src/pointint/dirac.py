"""Relativistic point interactions for the one-dimensional Dirac equation.

Representation is fixed: ``beta = sigma_3``, ``alpha_x = sigma_1``,
spinor ``psi = (u, v)``, units hbar = c = 1. A plane wave of momentum
``k_r = sqrt(E^2 - m^2)`` moving right is ``(1, lam) e^{i k_r x}`` and
moving left ``(1, -lam) e^{-i k_r x}``, with ``lam = k_r / (E + m)``.

Scattering is matched directly on spinors. The large component ``u``
obeys a Schrodinger-like equation whose own boundary matrix is
``G Lambda_r G^{-1}`` with ``G = diag(1, i(E + m))``; :func:`u_reduction`
returns it so the two routes can be compared.

Strength conventions: the non-relativistic partner of a Dirac member is
taken in hbar = 2m = 1 units through ``b = b_r / 2m`` and ``c = 2m c_r``.
The mixed interaction ``c_r = gamma`` therefore maps to a delta with
``c = 2 m gamma``, and the inverted mix ``b_r = -gamma`` to a
delta-prime with ``b = -gamma / 2m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np
from scipy.optimize import brentq

from .core import (
    INF,
    VALIDATION_TOL,
    BoundaryMatrix,
    LambdaParams,
    SeparatedParams,
    decode_real,
    encode_real,
    lambda_to_unitary,
)
from .errors import BelowGap, ConstraintViolation, SideMismatch, ValidationError, WrongVariant
from .parity import ParityClass, classify, odd_condition_check
from .schrodinger import ScatteringResult, _check_side, plane_wave_amplitudes, plane_wave_states

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class DiracLambdaParams:
    phi_r: float
    a_r: float
    b_r: float
    c_r: float
    d_r: float

    form: ClassVar[str] = "lambda"


@dataclass(frozen=True)
class DiracSeparatedParams:
    h_r_plus: float
    h_r_minus: float

    form: ClassVar[str] = "separated"

    def __post_init__(self):
        for name in ("h_r_plus", "h_r_minus"):
            if getattr(self, name) == -INF:
                object.__setattr__(self, name, INF)


DiracParams = Union[DiracLambdaParams, DiracSeparatedParams]


@dataclass(frozen=True)
class DiracBoundaryState:
    u: complex
    v: complex
    side: str

    def vector(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=complex)


@dataclass(frozen=True)
class DiracSpinorCoefficient:
    """``Omega_0`` in ``S[psi] = Omega_0 delta(x)``."""

    omega0: tuple[complex, complex]

    def vector(self) -> np.ndarray:
        return np.array(self.omega0, dtype=complex)


@dataclass(frozen=True)
class DiracBoundState:
    energy: float
    kappa_r: float
    side: str = "both"


def validate_dirac(p: DiracParams, tol: float = VALIDATION_TOL) -> DiracParams:
    if isinstance(p, DiracLambdaParams):
        for name in ("phi_r", "a_r", "b_r", "c_r", "d_r"):
            if not math.isfinite(getattr(p, name)):
                raise ConstraintViolation(name, INF, f"{name} must be finite")
        if not 0.0 <= p.phi_r < math.pi:
            raise ConstraintViolation("phi_r", max(-p.phi_r, p.phi_r - math.pi), "phi_r must lie in [0, pi)")
        residual = abs(p.a_r * p.d_r - p.b_r * p.c_r - 1.0)
        if residual > tol:
            raise ConstraintViolation("a_r d_r - b_r c_r", residual)
    elif isinstance(p, DiracSeparatedParams):
        for name in ("h_r_plus", "h_r_minus"):
            if math.isnan(getattr(p, name)):
                raise ConstraintViolation(name, INF, f"{name} must be real or inf")
    else:
        raise ValidationError(f"unknown Dirac parameter type {type(p).__name__}")
    return p


def _check_mass(m: float) -> None:
    if not (m > 0 and math.isfinite(m)):
        raise ValidationError(f"mass must be positive, got {m!r}")


def build_lambda_r(p: DiracParams) -> BoundaryMatrix:
    validate_dirac(p)
    if not isinstance(p, DiracLambdaParams):
        raise WrongVariant("separated Dirac interactions have no boundary matrix")
    e = np.exp(1j * p.phi_r)
    mat = e * np.array([[p.a_r, 1j * p.b_r], [-1j * p.c_r, p.d_r]], dtype=complex)
    return BoundaryMatrix(mat, "relativistic")


def spinor_current(state: DiracBoundaryState) -> float:
    """``psi^dagger alpha_x psi = u* v + u v*``."""
    return 2.0 * (complex(state.u).conjugate() * complex(state.v)).real


def _momentum(energy: float, m: float, allow_negative_energy: bool) -> tuple[float, float]:
    _check_mass(m)
    if abs(energy) <= m:
        raise BelowGap(f"|E| = {abs(energy)} lies in the gap (m = {m}); use dirac_bound_states")
    if energy < -m and not allow_negative_energy:
        raise BelowGap("negative-energy scattering requires allow_negative_energy=True")
    k_r = math.sqrt(energy * energy - m * m)
    return k_r, k_r / (energy + m)


def dirac_scatter(
    p: DiracParams, energy: float, m: float = 1.0, side: str = "left", allow_negative_energy: bool = False
) -> ScatteringResult:
    """Reflection and transmission of a unit spinor plane wave.

    The ``E < -m`` channel is computed with the same matching formulas
    and is not validated against any reference.
    """
    validate_dirac(p)
    _check_side(side)
    k_r, lam = _momentum(energy, m, allow_negative_energy)
    if isinstance(p, DiracSeparatedParams):
        h = p.h_r_minus if side == "left" else p.h_r_plus
        if math.isinf(h):
            r = -1.0 + 0j
        else:
            ih = 1j * h
            r = (lam - ih) / (lam + ih) if side == "left" else (lam + ih) / (lam - ih)
        t = 0j
    else:
        r, t = plane_wave_amplitudes(build_lambda_r(p).entries, lam, side)
    minus, plus = plane_wave_states(r, t, lam, side)
    j_minus = spinor_current(DiracBoundaryState(*minus, "left"))
    j_plus = spinor_current(DiracBoundaryState(*plus, "right"))
    j_in, j_out = (j_minus, j_plus) if side == "left" else (j_plus, j_minus)
    return ScatteringResult(complex(r), complex(t), k_r, side, j_in, j_out)


def dirac_scattering_states(result: ScatteringResult, energy: float, m: float = 1.0):
    lam = result.k / (energy + m)
    minus, plus = plane_wave_states(result.r, result.t, lam, result.side)
    return DiracBoundaryState(*minus, "left"), DiracBoundaryState(*plus, "right")


def matching_determinant(p: DiracLambdaParams, energy: float, m: float = 1.0) -> float:
    """Real matching function for a gap state at ``energy``; zero at bound states.

    Decaying solutions are ``(1, -i mu)`` on the left and ``(1, i mu)`` on
    the right with ``mu = kappa_r / (E + m)``. The determinant of
    ``[Lambda_r (1, -i mu), (1, i mu)]`` carries a constant factor
    ``i e^{i phi_r}``, divided out here.
    """
    lam = build_lambda_r(p).entries
    mu = math.sqrt((m - energy) / (m + energy))
    x = lam @ np.array([1.0, -1j * mu])
    det = 1j * mu * x[0] - x[1]
    return float((det / (1j * np.exp(1j * p.phi_r))).real)


def _matching_on_grid(p: DiracLambdaParams, energies: np.ndarray, m: float) -> np.ndarray:
    lam = build_lambda_r(p).entries
    mu = np.sqrt((m - energies) / (m + energies))
    x0 = lam[0, 0] - 1j * mu * lam[0, 1]
    x1 = lam[1, 0] - 1j * mu * lam[1, 1]
    det = 1j * mu * x0 - x1
    return (det / (1j * np.exp(1j * p.phi_r))).real


def _energy_from_mu(mu: float, m: float) -> float:
    return m * (1.0 - mu * mu) / (1.0 + mu * mu)


def dirac_bound_states(p: DiracParams, m: float = 1.0, n_scan: int = 10_000, tol: float = 1e-10):
    """Bound states with energy in ``(-m, m)``.

    The matching determinant is scanned for sign changes on ``n_scan``
    energies and each bracket is refined with Brent's method. Tangential
    (double) roots produce no sign change and are not reported.
    """
    validate_dirac(p)
    _check_mass(m)
    if isinstance(p, DiracSeparatedParams):
        states = []
        # v = i h u with u ~ e^{-kappa x} on the right needs h_r+ = mu > 0
        if not math.isinf(p.h_r_plus) and p.h_r_plus > 0:
            e = _energy_from_mu(p.h_r_plus, m)
            states.append(DiracBoundState(e, math.sqrt(m * m - e * e), "right-only"))
        if not math.isinf(p.h_r_minus) and p.h_r_minus < 0:
            e = _energy_from_mu(-p.h_r_minus, m)
            states.append(DiracBoundState(e, math.sqrt(m * m - e * e), "left-only"))
        return states

    edge = 1e-9 * m
    grid = np.linspace(-m + edge, m - edge, n_scan)
    f = _matching_on_grid(p, grid, m)
    roots = []
    for i in range(n_scan - 1):
        if f[i] == 0.0:
            roots.append(grid[i])
        elif f[i] * f[i + 1] < 0:
            root = brentq(
                lambda e: matching_determinant(p, e, m), grid[i], grid[i + 1],
                xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps,
            )
            roots.append(root)
    if f[-1] == 0.0:
        roots.append(grid[-1])
    return [DiracBoundState(float(e), math.sqrt(m * m - e * e)) for e in roots]


def dirac_interaction_spinor(
    p: DiracParams,
    state: DiracBoundaryState,
    other: DiracBoundaryState | None = None,
    formula: str | None = None,
) -> DiracSpinorCoefficient:
    """``Omega_0`` with ``psi(0+) - psi(0-) = -i alpha_x Omega_0``."""
    validate_dirac(p)
    if isinstance(p, DiracSeparatedParams):
        if other is None:
            raise SideMismatch("separated interactions need both one-sided states")
        pair = {state.side: state, other.side: other}
        if set(pair) != {"left", "right"}:
            raise SideMismatch("need one left and one right state")
        jump = _projected(p.h_r_plus, pair["right"]) - _projected(p.h_r_minus, pair["left"])
        return DiracSpinorCoefficient(tuple(complex(x) for x in 1j * SIGMA1 @ jump))

    formula = formula or state.side
    _check_side(formula)
    if formula != state.side:
        raise SideMismatch(f"{formula}-state formula requested with a {state.side} state")
    lam = build_lambda_r(p).entries
    eye = np.eye(2)
    if formula == "left":
        jump = (lam - eye) @ state.vector()
    else:
        jump = (eye - np.linalg.inv(lam)) @ state.vector()
    return DiracSpinorCoefficient(tuple(complex(x) for x in 1j * SIGMA1 @ jump))


def _projected(h: float, st: DiracBoundaryState) -> np.ndarray:
    # [[1, 0], [i h, 0]] psi, whose h -> inf limit keeps only v with u = 0
    if math.isinf(h):
        return np.array([0.0, st.v], dtype=complex)
    return np.array([st.u, 1j * h * st.u], dtype=complex)


def to_nonrelativistic(p: DiracParams, m: float = 1.0) -> LambdaParams | SeparatedParams:
    validate_dirac(p)
    _check_mass(m)
    if isinstance(p, DiracSeparatedParams):
        return SeparatedParams(_scale_h(p.h_r_plus, -2 * m), _scale_h(p.h_r_minus, -2 * m))
    return LambdaParams(p.phi_r, p.a_r, p.b_r / (2 * m), 2 * m * p.c_r, p.d_r)


def from_nonrelativistic(p: LambdaParams | SeparatedParams, m: float = 1.0) -> DiracParams:
    _check_mass(m)
    if isinstance(p, SeparatedParams):
        return DiracSeparatedParams(_scale_h(p.h_plus, -1 / (2 * m)), _scale_h(p.h_minus, -1 / (2 * m)))
    return DiracLambdaParams(p.phi, p.a, 2 * m * p.b, p.c / (2 * m), p.d)


def _scale_h(h: float, factor: float) -> float:
    return INF if math.isinf(h) else factor * h


def u_reduction(p: DiracParams, energy: float, m: float = 1.0) -> LambdaParams | SeparatedParams:
    """Exact boundary relation obeyed by ``(u, u')`` at this energy."""
    validate_dirac(p)
    em = energy + m
    if isinstance(p, DiracSeparatedParams):
        return SeparatedParams(_scale_h(p.h_r_plus, -em), _scale_h(p.h_r_minus, -em))
    return LambdaParams(p.phi_r, p.a_r, p.b_r / em, em * p.c_r, p.d_r)


def classify_dirac(p: DiracParams, m: float = 1.0) -> ParityClass:
    return classify(to_nonrelativistic(p, m))


def dirac_odd_candidate(p: DiracParams, m: float = 1.0) -> bool:
    """Whether ``p`` satisfies the odd condition (only the identity does)."""
    nr = to_nonrelativistic(p, m)
    if isinstance(nr, SeparatedParams):
        # the odd condition forces |w| = 1, incompatible with w = 0
        return False
    return odd_condition_check(lambda_to_unitary(nr)).is_odd_candidate


def mixed(gamma: float) -> DiracLambdaParams:
    """Equal electrostatic/scalar mix, ``S = gamma (1 + beta) psi(0-) delta / 2``."""
    return DiracLambdaParams(0.0, 1.0, 0.0, float(gamma), 1.0)


def inverted_mix(gamma: float) -> DiracLambdaParams:
    """Inverted mix, ``S = gamma (1 - beta) psi(0-) delta / 2``."""
    return DiracLambdaParams(0.0, 1.0, -float(gamma), 0.0, 1.0)


DIRAC_IDENTITY = DiracLambdaParams(0.0, 1.0, 0.0, 0.0, 1.0)


def dirac_params_to_dict(p: DiracParams, m: float) -> dict:
    if isinstance(p, DiracLambdaParams):
        body = {"form": "lambda", "phi_r": p.phi_r, "a_r": p.a_r, "b_r": p.b_r, "c_r": p.c_r, "d_r": p.d_r}
    else:
        body = {"form": "separated", "h_r_plus": encode_real(p.h_r_plus), "h_r_minus": encode_real(p.h_r_minus)}
    body["mass"] = m
    return body


def dirac_params_from_dict(data: dict) -> tuple[DiracParams, float]:
    """Parse the Dirac JSON schema; ``mass`` is mandatory."""
    if not isinstance(data, dict):
        raise ValidationError("parameters must be a JSON object")
    if "mass" not in data:
        raise ValidationError("Dirac parameters need a 'mass' field")
    m = decode_real(data["mass"])
    _check_mass(m)
    form = data.get("form") or ("separated" if "h_r_plus" in data or "h_r_minus" in data else "lambda")
    try:
        if form == "lambda":
            p = DiracLambdaParams(*(decode_real(data[k]) for k in ("phi_r", "a_r", "b_r", "c_r", "d_r")))
        elif form == "separated":
            p = DiracSeparatedParams(decode_real(data["h_r_plus"]), decode_real(data["h_r_minus"]))
        else:
            raise ValidationError(f"unknown form {form!r}")
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r} for Dirac form {form!r}") from None
    return validate_dirac(p), m

"""Non-relativistic point interactions: scattering, bound states, interaction terms.

Units are hbar = 2m = 1, so ``E = k**2`` and bound states have
``E = -kappa**2``. Scattering amplitudes are normalised to a unit
incident plane wave; "left" incidence comes in from ``x = -inf``.

Bound states
------------
With ``psi = A e^{kappa x}`` for ``x < 0`` and ``B e^{-kappa x}`` for
``x > 0`` the boundary relation ``Phi(0+) = Lambda Phi(0-)`` requires
``Lambda (1, kappa)`` to be parallel to ``(1, -kappa)``. The phase
``e^{i phi}`` factors out of that condition, leaving the real quadratic

    b kappa**2 + (a + d) kappa + c = 0,

so a complex phase never obstructs a normalisable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    InteractionParams,
    LambdaParams,
    SeparatedParams,
    resolve,
)
from .errors import NoDiscreteSpectrum, SideMismatch, SingularSystem, ValidationError

SIDES = ("left", "right")


@dataclass(frozen=True)
class BoundaryState:
    """``(psi, psi')`` on one side of the origin."""

    psi: complex
    dpsi: complex
    side: str

    def vector(self) -> np.ndarray:
        return np.array([self.psi, self.dpsi], dtype=complex)


@dataclass(frozen=True)
class InteractionCoefficients:
    """Weights of ``delta`` (``alpha0``) and ``delta'`` (``alpha1``) in the interaction term."""

    alpha0: complex
    alpha1: complex


@dataclass(frozen=True)
class ScatteringResult:
    r: complex
    t: complex
    k: float
    side: str
    current_in: float
    current_out: float

    @property
    def reflection(self) -> float:
        return abs(self.r) ** 2

    @property
    def transmission(self) -> float:
        return abs(self.t) ** 2

    @property
    def unitarity_residual(self) -> float:
        return abs(self.reflection + self.transmission - 1.0)

    @property
    def current_balance(self) -> float:
        return self.current_in - self.current_out


@dataclass(frozen=True)
class BoundState:
    energy: float
    kappa: float
    side: str = "both"
    multiplicity: int = 1


def current(state: BoundaryState) -> float:
    """Probability current ``-i (psi* psi' - psi*' psi)``."""
    return 2.0 * (complex(state.psi).conjugate() * complex(state.dpsi)).imag


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")


def _check_k(k: float) -> None:
    if not (k > 0 and math.isfinite(k)):
        raise ValidationError(f"wavenumber must be positive and finite, got {k!r}")


def plane_wave_amplitudes(A: np.ndarray, s: complex, side: str) -> tuple[complex, complex]:
    """Solve the matching of unit incident waves across ``x(0+) = A x(0-)``.

    ``s`` is the second component of the right-moving wave ``(1, s)``; the
    left-moving wave is ``(1, -s)``. ``s = ik`` for ``(psi, psi')``.
    """
    a00, a01, a10, a11 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    den = s * (a00 + a11) - a10 - s * s * a01
    scale = abs(s) * (abs(a00) + abs(a11)) + abs(a10) + abs(s) ** 2 * abs(a01)
    if abs(den) <= 1e-14 * scale:
        raise SingularSystem("matching matrix is singular; boundary matrix is not unimodular")
    if side == "left":
        r = -(s * (a00 - a11) - a10 + s * s * a01) / den
        t = 2.0 * s * (a00 * a11 - a01 * a10) / den
    else:
        r = (s * (a00 - a11) + a10 - s * s * a01) / den
        t = 2.0 * s / den
    return complex(r), complex(t)


def plane_wave_states(r: complex, t: complex, s: complex, side: str):
    """Two-component boundary vectors ``(x(0-), x(0+))`` of the scattering solution."""
    if side == "left":
        minus = (1 + r, s * (1 - r))
        plus = (t, s * t)
    else:
        plus = (1 + r, -s * (1 - r))
        minus = (t, -s * t)
    return minus, plus


def scatter(params: InteractionParams, k: float, side: str = "left", l0: float = 1.0) -> ScatteringResult:
    _check_k(k)
    _check_side(side)
    p = resolve(params, l0)
    s = 1j * k
    if isinstance(p, SeparatedParams):
        h = p.h_minus if side == "left" else -p.h_plus
        r = -1.0 + 0j if math.isinf(h) else (s - h) / (s + h)
        t = 0j
    else:
        r, t = plane_wave_amplitudes(p.matrix(), s, side)
    minus, plus = plane_wave_states(r, t, s, side)
    j_minus = current(BoundaryState(*minus, "left"))
    j_plus = current(BoundaryState(*plus, "right"))
    j_in, j_out = (j_minus, j_plus) if side == "left" else (j_plus, j_minus)
    return ScatteringResult(complex(r), complex(t), float(k), side, j_in, j_out)


def scattering_states(result: ScatteringResult) -> tuple[BoundaryState, BoundaryState]:
    """Boundary states at ``0-`` and ``0+`` of a Schrodinger scattering solution."""
    minus, plus = plane_wave_states(result.r, result.t, 1j * result.k, result.side)
    return BoundaryState(*minus, "left"), BoundaryState(*plus, "right")


def scatter_many(params: list[LambdaParams], ks) -> dict[str, np.ndarray]:
    """Vectorised scattering for many Lambda-form members over a k grid.

    Returns arrays of shape ``(len(params), len(ks))`` keyed by
    ``r_left, t_left, r_right, t_right``.
    """
    ks = np.asarray(ks, dtype=float)
    if np.any(ks <= 0):
        raise ValidationError("wavenumbers must be positive")
    mats = np.array([resolve(p).matrix() for p in params], dtype=complex).reshape(-1, 2, 2)
    n, m = len(mats), len(ks)
    A = np.repeat(mats, m, axis=0)
    s = np.tile(1j * ks, n).astype(complex)
    out = kernels.scatter_lambda(np.ascontiguousarray(A), s)
    keys = ("r_left", "t_left", "r_right", "t_right")
    return {key: np.asarray(v).reshape(n, m) for key, v in zip(keys, out)}


def bound_states(params: InteractionParams, l0: float = 1.0) -> list[BoundState]:
    p = resolve(params, l0)
    if isinstance(p, SeparatedParams):
        states = []
        if not math.isinf(p.h_plus) and p.h_plus < 0:
            states.append(BoundState(-p.h_plus**2, -p.h_plus, "right-only"))
        if not math.isinf(p.h_minus) and p.h_minus > 0:
            states.append(BoundState(-p.h_minus**2, p.h_minus, "left-only"))
        return states
    return [BoundState(-k * k, k, "both", mult) for k, mult in _positive_roots(p.b, p.a + p.d, p.c)]


def _positive_roots(qa: float, qb: float, qc: float) -> list[tuple[float, int]]:
    """Positive roots of ``qa x^2 + qb x + qc`` with multiplicities."""
    if qa == 0.0:
        if qb == 0.0:
            if qc == 0.0:
                raise NoDiscreteSpectrum("boundary condition is satisfied for every kappa")
            return []
        root = -qc / qb
        return [(root, 1)] if root > 0 else []
    disc = qb * qb - 4.0 * qa * qc
    if abs(disc) <= 1e-12 * max(qb * qb, abs(4.0 * qa * qc)):
        root = -qb / (2.0 * qa)
        return [(root, 2)] if root > 0 else []
    if disc < 0:
        return []
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb if qb != 0 else 1.0))
    roots = [q / qa]
    if q != 0.0:
        roots.append(qc / q)
    return [(x, 1) for x in sorted(roots) if x > 0]


def interaction_coefficients(
    params: InteractionParams,
    state: BoundaryState,
    other: BoundaryState | None = None,
    formula: str | None = None,
    l0: float = 1.0,
) -> InteractionCoefficients:
    """Coefficients of ``s[psi] = alpha0 delta + alpha1 delta'`` for the given boundary data.

    For the Lambda form one state suffices: a left state uses
    ``(Lambda - 1) Phi(0-)``, a right state ``(1 - Lambda^{-1}) Phi(0+)``.
    Passing ``formula`` forces one of the two and must agree with
    ``state.side``. The separated form needs both one-sided states.
    """
    p = resolve(params, l0)
    if isinstance(p, SeparatedParams):
        if other is None:
            raise SideMismatch("separated interactions need both one-sided states")
        pair = {state.side: state, other.side: other}
        if set(pair) != {"left", "right"}:
            raise SideMismatch("need one left and one right state")
        return _separated_coefficients(p, pair["left"], pair["right"])

    formula = formula or state.side
    _check_side(formula)
    if formula != state.side:
        raise SideMismatch(f"{formula}-state formula requested with a {state.side} state")
    lam = p.matrix()
    eye = np.eye(2)
    if formula == "left":
        omega = (lam - eye) @ state.vector()
    else:
        omega = (eye - np.linalg.inv(lam)) @ state.vector()
    return InteractionCoefficients(complex(omega[1]), complex(omega[0]))


def _one_sided(h: float, st: BoundaryState) -> tuple[complex, complex]:
    # (psi, psi') consistent with psi' = h psi; h = inf forces psi = 0
    if math.isinf(h):
        return 0j, complex(st.dpsi)
    return complex(st.psi), h * complex(st.psi)


def _separated_coefficients(p: SeparatedParams, left: BoundaryState, right: BoundaryState):
    psi_m, dpsi_m = _one_sided(p.h_minus, left)
    psi_p, dpsi_p = _one_sided(p.h_plus, right)
    return InteractionCoefficients(dpsi_p - dpsi_m, psi_p - psi_m)

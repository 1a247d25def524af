"""Space-reflection symmetry of point interactions.

Reflection maps the unitary matrix ``U`` to ``sigma_1 U sigma_1``. An
interaction is even when that leaves the interaction term unchanged and
odd when it flips its sign. The odd condition pins ``U`` to a single
point whose boundary matrix is the identity, i.e. no interaction at all.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    InteractionParams,
    LambdaParams,
    SeparatedParams,
    UnitaryParams,
    sample_unitary,
    unitary_to_interaction,
    validate,
)
from .schrodinger import scatter

PARITY_TOL = 1e-10
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)


class Parity(enum.Enum):
    EVEN = "Even"
    NO_DEFINITE_PARITY = "NoDefiniteParity"


@dataclass(frozen=True)
class ParityClass:
    value: Parity
    note: str | None = None

    @property
    def is_even(self) -> bool:
        return self.value is Parity.EVEN


def classify(params: InteractionParams, tol: float = PARITY_TOL) -> ParityClass:
    validate(params)
    if isinstance(params, LambdaParams):
        # phi near pi is phi = 0 with M -> -M
        phase_ok = min(params.phi, math.pi - params.phi) <= tol
        even = phase_ok and abs(params.a - params.d) <= tol
    elif isinstance(params, UnitaryParams):
        even = abs(complex(params.z).imag) <= tol and abs(complex(params.w).real) <= tol
    else:
        hp, hm = params.h_plus, params.h_minus
        if math.isinf(hp) and math.isinf(hm):
            even = True
        elif math.isinf(hp) or math.isinf(hm):
            return ParityClass(
                Parity.NO_DEFINITE_PARITY,
                "one wall is Dirichlet and the other finite; classified as no definite parity",
            )
        else:
            even = abs(hp + hm) <= tol * max(1.0, abs(hp), abs(hm))
    return ParityClass(Parity.EVEN if even else Parity.NO_DEFINITE_PARITY)


def reflected_unitary(u: UnitaryParams) -> np.ndarray:
    return SIGMA1 @ u.matrix() @ SIGMA1


def a_matrices(l0: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    a1 = 0.5 * np.array([[-1j, 1j], [1 / l0, 1 / l0]])
    a2 = 0.5 * np.array([[1j, -1j], [1 / l0, 1 / l0]])
    return a1, a2


@dataclass(frozen=True)
class OddCheck:
    is_odd_candidate: bool
    lambda_is_identity: bool
    residual: float


def odd_condition_check(u: UnitaryParams, l0: float = 1.0, tol: float = PARITY_TOL) -> OddCheck:
    """Test ``A1 - A2 U~ = -(A1 - A2 U)`` and whether ``Lambda`` is the identity."""
    validate(u)
    a1, a2 = a_matrices(l0)
    lhs = a1 - a2 @ reflected_unitary(u)
    rhs = -(a1 - a2 @ u.matrix())
    residual = float(np.max(np.abs(lhs - rhs)))
    return OddCheck(residual <= tol, _lambda_is_identity(u, l0), residual)


def _lambda_is_identity(u: UnitaryParams, l0: float, tol: float = 1e-8) -> bool:
    p = unitary_to_interaction(u, l0)
    if isinstance(p, SeparatedParams):
        return False
    return float(np.max(np.abs(p.matrix() - np.eye(2)))) < tol


ODD_POINT = UnitaryParams(math.pi / 2, 0j, -1j)


@dataclass(frozen=True)
class OddSearchReport:
    samples: int
    seed: int
    odd_candidates_found: int
    all_identity: bool
    min_residual: float
    analytic_point_residual: float
    analytic_point_identity: bool


# fixed so that a seed names the same sample set regardless of memory settings
SEARCH_BLOCK = 250_000


def odd_search(samples: int, seed: int = 42, l0: float = 1.0, tol: float = PARITY_TOL):
    """Rejection-sample ``U`` for the odd condition.

    Every accepted sample is checked for ``Lambda = 1``. The analytic odd
    point is always checked alongside the random draws.
    """
    rng = np.random.default_rng(seed)
    found = 0
    all_identity = True
    min_res = math.inf
    remaining = samples
    while remaining > 0:
        n = min(SEARCH_BLOCK, remaining)
        theta, z, w = sample_unitary(rng, n)
        res = kernels.odd_residual(theta, z.astype(complex), w.astype(complex), float(l0))
        min_res = min(min_res, float(res.min()))
        for i in np.flatnonzero(res <= tol):
            found += 1
            check = odd_condition_check(UnitaryParams(float(theta[i]), complex(z[i]), complex(w[i])), l0, tol)
            all_identity &= check.lambda_is_identity
        remaining -= n
    point = odd_condition_check(ODD_POINT, l0, tol)
    return OddSearchReport(
        samples, seed, found, bool(all_identity and point.lambda_is_identity), min_res,
        point.residual, point.lambda_is_identity,
    )


@dataclass(frozen=True)
class ReflectionAsymmetry:
    max_r_asymmetry: float
    max_t_asymmetry: float


def reflection_symmetry_test(params: InteractionParams, k_grid, l0: float = 1.0) -> ReflectionAsymmetry:
    ks = list(k_grid)
    if not ks:
        raise ValueError("k_grid must be nonempty")
    dr = dt = 0.0
    for k in ks:
        left = scatter(params, k, "left", l0)
        right = scatter(params, k, "right", l0)
        dr = max(dr, abs(left.r - right.r))
        dt = max(dt, abs(left.t - right.t))
    return ReflectionAsymmetry(dr, dt)

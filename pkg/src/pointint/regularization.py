"""Finite-range regularisations and their zero-range limits.

Transfer matrices act on ``(psi, psi')`` and solve ``psi'' + k^2 psi = V psi``.
A delta of strength ``g`` contributes ``[[1, 0], [g, 1]]``; smooth or
piecewise potentials are integrated with fixed-step RK4 on their mesh.

A sampled potential lives on a mesh that is uniform within each smooth
piece. A node listed twice marks a jump: the first copy carries the
left limit, the second the right limit. RK4 steps span two mesh cells
so the middle node supplies the midpoint value without interpolation.

Limit detection works in the space of unitary matrices ``U``: unlike
the boundary matrix, ``U`` stays bounded when a sequence drifts towards
a decoupled (separated) wall, so "Cauchy in epsilon" is well posed there.
The criterion is operational: a limit is declared when the fitted ``U``
is k-independent and its successive changes shrink. It is a proxy for
distributional convergence of ``psi V_eps``, not a proof of it.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import kernels
from .core import (
    SEPARATED_W_TOL,
    LambdaParams,
    SeparatedParams,
    UnitaryParams,
    lambda_to_unitary,
    unitary_to_interaction,
)
from .errors import StepTooCoarse, ValidationError
from .parity import classify
from .schrodinger import BoundaryState, ScatteringResult, current, plane_wave_amplitudes, plane_wave_states

DEFAULT_EPS_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
DEFAULT_K_GRID = (0.5, 1.0, 2.0)
PHASE_SNAP = 1e-9


@dataclass(frozen=True)
class DeltaArray:
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(g)) for x, g in self.points)
        object.__setattr__(self, "points", pts)
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("delta positions must be strictly increasing")

    @property
    def support(self) -> tuple[float, float]:
        if not self.points:
            return 0.0, 0.0
        return self.points[0][0], self.points[-1][0]


@dataclass(frozen=True, eq=False)
class SampledPotential:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 2:
            raise ValidationError("grid and values must be 1-d arrays of equal length >= 2")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValidationError("grid and values must be finite")
        gaps = np.diff(grid)
        if np.any(gaps < 0):
            raise ValidationError("grid must be nondecreasing")
        zero = np.flatnonzero(gaps == 0)
        if np.any(np.diff(zero) == 1) or (len(zero) and (zero[0] == 0 or zero[-1] == len(gaps) - 1)):
            raise ValidationError("a jump node may appear at most twice and not at the ends")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def half_width(self) -> float:
        return 0.5 * (self.grid[-1] - self.grid[0])

    def segments(self):
        """Smooth pieces as ``(grid, values)`` pairs, split at jump nodes."""
        cuts = np.flatnonzero(np.diff(self.grid) == 0) + 1
        starts = np.concatenate([[0], cuts])
        stops = np.concatenate([cuts, [len(self.grid)]])
        return [(self.grid[a:b], self.values[a:b]) for a, b in zip(starts, stops)]

    def integral(self) -> float:
        return float(sum(np.trapezoid(v, x) for x, v in self.segments()))


Regularization = Union[DeltaArray, SampledPotential]


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    entries: np.ndarray
    k: float
    x_left: float
    x_right: float
    det_drift: float = 0.0
    local_error: float = 0.0

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))


def free_matrix(d: float, k: float) -> np.ndarray:
    """Free propagation of ``(psi, psi')`` over signed distance ``d``."""
    c, s = math.cos(k * d), math.sin(k * d)
    return np.array([[c, s / k], [-k * s, c]])


def delta_array_transfer(arr: DeltaArray, k: float) -> TransferMatrix:
    _check_k(k)
    pos = np.array([x for x, _ in arr.points], dtype=float)
    g = np.array([s for _, s in arr.points], dtype=float)
    T = kernels.delta_chain(pos, g, float(k))
    x0, x1 = arr.support
    return TransferMatrix(np.asarray(T), float(k), x0, x1, float(np.linalg.det(T) - 1.0))


def _check_k(k: float) -> None:
    if not (k > 0 and math.isfinite(k)):
        raise ValidationError(f"wavenumber must be positive, got {k!r}")


def _midpoint(x: np.ndarray, v: np.ndarray, j: int) -> float:
    # cubic Lagrange on four uniform nodes when available, else linear
    n = len(x)
    if n >= 4:
        if 1 <= j <= n - 3:
            return (-v[j - 1] + 9 * v[j] + 9 * v[j + 1] - v[j + 2]) / 16.0
        if j == n - 2:
            return 0.0625 * v[j - 2] - 0.3125 * v[j - 1] + 0.9375 * v[j] + 0.3125 * v[j + 1]
        if j == 0:
            return 0.3125 * v[0] + 0.9375 * v[1] - 0.3125 * v[2] + 0.0625 * v[3]
    return 0.5 * (v[j] + v[j + 1])


def _rk4_schedule(pot: SampledPotential):
    h, v0, vm, v1 = [], [], [], []
    for x, v in pot.segments():
        n = len(x) - 1
        j = 0
        while j + 2 <= n:
            span = x[j + 2] - x[j]
            if abs(x[j + 1] - x[j] - 0.5 * span) <= 1e-9 * span:
                h.append(span)
                v0.append(v[j])
                vm.append(v[j + 1])
                v1.append(v[j + 2])
                j += 2
            else:
                break
        while j < n:
            h.append(x[j + 1] - x[j])
            v0.append(v[j])
            vm.append(_midpoint(x, v, j))
            v1.append(v[j + 1])
            j += 1
    return tuple(np.array(a, dtype=float) for a in (h, v0, vm, v1))


def ode_transfer(pot: SampledPotential, k: float, max_local_error: float = 1e-6) -> TransferMatrix:
    """RK4 transfer matrix of ``pot`` across its whole mesh.

    The determinant should stay 1; its drift is reported in ``det_drift``
    rather than corrected.
    """
    _check_k(k)
    peak = float(np.max(np.abs(pot.values)))
    if peak > 0 and max(abs(pot.values[0]), abs(pot.values[-1])) > 1e-6 * peak:
        warnings.warn("potential has not decayed at the mesh ends", RuntimeWarning, stacklevel=2)
    h, v0, vm, v1 = _rk4_schedule(pot)
    T, err = kernels.rk4_steps(h, v0, vm, v1, float(k) ** 2)
    if err > max_local_error:
        raise StepTooCoarse(f"estimated local RK4 error {err:.2e} exceeds {max_local_error:.0e}")
    T = np.asarray(T)
    x0, x1 = pot.support
    return TransferMatrix(T, float(k), x0, x1, float(np.linalg.det(T) - 1.0), float(err))


def transfer(reg: Regularization, k: float) -> TransferMatrix:
    if isinstance(reg, DeltaArray):
        return delta_array_transfer(reg, k)
    return ode_transfer(reg, k)


def effective_lambda(tm: TransferMatrix) -> np.ndarray:
    """Boundary matrix at the origin after stripping free propagation to the support edges."""
    return free_matrix(-tm.x_right, tm.k) @ tm.entries @ free_matrix(tm.x_left, tm.k)


def transfer_scatter(tm: TransferMatrix, side: str = "left", reference: str = "origin") -> ScatteringResult:
    """Scattering amplitudes of a finite-range transfer.

    ``reference="origin"`` phases all plane waves at ``x = 0``, the
    convention of the point interaction it approximates.
    ``reference="edges"`` phases the incident and reflected waves at the
    entrance face and the transmitted wave at the exit face, i.e. the raw
    transfer matrix is matched as it stands.
    """
    s = 1j * tm.k
    if reference == "origin":
        mat = effective_lambda(tm)
    elif reference == "edges":
        mat = tm.entries
    else:
        raise ValidationError("reference must be 'origin' or 'edges'")
    r, t = plane_wave_amplitudes(mat, s, side)
    minus, plus = plane_wave_states(r, t, s, side)
    j_minus = current(BoundaryState(*minus, "left"))
    j_plus = current(BoundaryState(*plus, "right"))
    j_in, j_out = (j_minus, j_plus) if side == "left" else (j_plus, j_minus)
    return ScatteringResult(r, t, tm.k, side, j_in, j_out)


# ---------------------------------------------------------------- named sequences

def _even(n: float) -> int:
    return max(2, 2 * math.ceil(n / 2))


def _smooth_mesh(half: float, h: float) -> np.ndarray:
    n = _even(2 * half / h)
    return np.linspace(-half, half, n + 1)


def seba(eps: float, strength: float = 1.0) -> DeltaArray:
    """``strength * [delta(x + eps) - delta(x - eps)] / (2 eps)``."""
    g = strength / (2.0 * eps)
    return DeltaArray(((-eps, g), (eps, -g)))


def gaussian_delta(sigma: float, strength: float = -2.0, k_max: float = 2.0, width: float = 10.0) -> SampledPotential:
    """Normalised Gaussian of area ``strength``; tends to ``strength * delta``."""
    h = min(sigma / 20.0, 1.0 / (20.0 * k_max))
    x = _smooth_mesh(width * sigma, h)
    v = strength * np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return SampledPotential(x, v)


def dgauss_deltaprime(sigma: float, strength: float = 1.0, k_max: float = 2.0, width: float = 10.0) -> SampledPotential:
    """Derivative of a normalised Gaussian; tends to ``strength * delta'``."""
    h = min(sigma / 20.0, 1.0 / (20.0 * k_max))
    x = _smooth_mesh(width * sigma, h)
    g = np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return SampledPotential(x, -strength * x / sigma**2 * g)


def rectangle(x0: float, x1: float, height: float, pad: float = 0.0, h: float | None = None) -> SampledPotential:
    """``height`` on ``[x0, x1]``, zero on the padding either side, jumps at the edges."""
    width = x1 - x0
    if width <= 0:
        raise ValidationError("rectangle needs x1 > x0")
    h = h or width / 200.0
    pieces_x, pieces_v = [], []
    if pad > 0:
        pieces_x.append(np.linspace(x0 - pad, x0, _even(pad / h) + 1))
        pieces_v.append(np.zeros_like(pieces_x[-1]))
    pieces_x.append(np.linspace(x0, x1, _even(width / h) + 1))
    pieces_v.append(np.full_like(pieces_x[-1], height))
    if pad > 0:
        pieces_x.append(np.linspace(x1, x1 + pad, _even(pad / h) + 1))
        pieces_v.append(np.zeros_like(pieces_x[-1]))
    return SampledPotential(np.concatenate(pieces_x), np.concatenate(pieces_v))


def rect_delta(eps: float, strength: float = -2.0, k_max: float = 2.0) -> SampledPotential:
    """Square well of width ``eps`` and area ``strength``; tends to ``strength * delta``."""
    h = min(eps / 40.0, 1.0 / (20.0 * k_max))
    return rectangle(-eps / 2, eps / 2, strength / eps, pad=eps / 2, h=h)


SEQUENCES: dict[str, Callable[..., Regularization]] = {
    "seba": seba,
    "gauss-delta": gaussian_delta,
    "dgauss-deltaprime": dgauss_deltaprime,
    "rect": rect_delta,
}


def named_sequence(name: str, strength: float | None = None, k_max: float = 2.0) -> Callable[[float], Regularization]:
    if name not in SEQUENCES:
        raise ValidationError(f"unknown sequence {name!r}; choose from {sorted(SEQUENCES)}")
    build = SEQUENCES[name]
    kwargs = {} if strength is None else {"strength": strength}
    if name != "seba":
        kwargs["k_max"] = k_max
    return lambda eps: build(eps, **kwargs)


def load_potential_csv(path) -> SampledPotential:
    """Two columns ``x, V(x)``; a non-numeric first row is taken as a header."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0 and not rows:
                    continue
                raise ValidationError(f"bad CSV row {i + 1}: {row!r}") from None
    if len(rows) < 2:
        raise ValidationError("potential CSV needs at least two rows")
    data = np.array(rows)
    return SampledPotential(data[:, 0], data[:, 1])


def scaled_sequence(base: SampledPotential, scaling: str = "delta") -> Callable[[float], SampledPotential]:
    """``V_eps(x) = eps^-p V(x / eps)``; ``p = 1`` keeps the area, ``p = 2`` the first moment."""
    power = {"delta": 1, "deltaprime": 2}.get(scaling)
    if power is None:
        raise ValidationError("scaling must be 'delta' or 'deltaprime'")
    return lambda eps: SampledPotential(base.grid * eps, base.values / eps**power)


# ---------------------------------------------------------------- limit analysis

@dataclass(frozen=True)
class NonConvergent:
    reason: str


@dataclass(frozen=True)
class EpsilonEvidence:
    eps: float
    fitted: LambdaParams | SeparatedParams
    k_variation: float
    max_abs_t: float
    step_distance: float | None
    u_matrix: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class LimitReport:
    limit: LambdaParams | SeparatedParams | NonConvergent
    evidence: list[EpsilonEvidence]
    extrapolation_error: float | None = None
    parity: str | None = None

    @property
    def converged(self) -> bool:
        return not isinstance(self.limit, NonConvergent)


def _align(u: np.ndarray, ref: np.ndarray) -> np.ndarray:
    # U and -U describe the same interaction
    return u if np.linalg.norm(u - ref) <= np.linalg.norm(u + ref) else -u


def _u_distance(u1: np.ndarray, u2: np.ndarray) -> float:
    return float(min(np.linalg.norm(u1 - u2), np.linalg.norm(u1 + u2)))


def _nearest_unitary(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def unitary_from_matrix(u: np.ndarray) -> UnitaryParams:
    """Read ``(theta, z, w)`` off ``e^{i theta} [[z, w], [-w*, z*]]`` with ``theta`` in ``[0, pi)``."""
    theta = 0.5 * np.angle(np.linalg.det(u))
    if theta < 0:
        theta += math.pi
    if theta >= math.pi:
        theta = 0.0
    e = np.exp(-1j * theta)
    z, w = complex(e * u[0, 0]), complex(e * u[0, 1])
    norm = math.hypot(abs(z), abs(w))
    return UnitaryParams(float(theta), z / norm, w / norm)


def _fit_u(mats: Sequence[np.ndarray]) -> tuple[np.ndarray, float]:
    us = []
    for lam in mats:
        m = lam / math.sqrt(abs(np.linalg.det(lam)))
        us.append(lambda_to_unitary(LambdaParams.from_matrix(m, tol=1e-6)).matrix())
    ref = us[len(us) // 2]
    us = [_align(u, ref) for u in us]
    mean = _nearest_unitary(np.mean(us, axis=0))
    spread = max(float(np.linalg.norm(u - mean)) for u in us)
    return mean, spread


def _limit_params(u: np.ndarray, sep_tol: float) -> LambdaParams | SeparatedParams:
    up = unitary_from_matrix(u)
    if abs(up.w) <= sep_tol:
        z = up.z / abs(up.z)
        e = np.exp(1j * up.theta)
        zp, zm = z * e, z.conjugate() * e
        h_plus = math.inf if abs(1 + zp) <= sep_tol else 2 * zp.imag / abs(1 + zp) ** 2
        h_minus = math.inf if abs(1 + zm) <= sep_tol else -2 * zm.imag / abs(1 + zm) ** 2
        return SeparatedParams(float(h_plus), float(h_minus))
    p = unitary_to_interaction(up)
    if isinstance(p, LambdaParams) and math.pi - p.phi < PHASE_SNAP:
        # a fitted phase a hair below pi is phase 0 with the matrix negated
        p = LambdaParams(0.0, -p.a, -p.b, -p.c, -p.d)
    return p


def limit_analysis(
    sequence: Callable[[float], Regularization],
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
    k_grid: Sequence[float] = DEFAULT_K_GRID,
    k_tol: float = 1e-4,
    cauchy_tol: float = 1e-2,
    t_separated: float = 1e-6,
) -> LimitReport:
    """Identify the point interaction a regularising sequence tends to.

    For each ``eps`` the effective boundary matrix is computed at every
    ``k`` and mapped to its unitary matrix; the k-average is the fitted
    candidate. A limit is declared when the spread over ``k`` at the
    smallest ``eps`` is below ``k_tol`` and the last two successive
    distances decrease (the last below ``cauchy_tol``). The limit is a
    Richardson extrapolation of the last three candidates; it is taken
    as separated when ``|w|`` is within the extrapolation error or when
    ``|t| < t_separated`` over the whole grid.
    """
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 4 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise ValidationError("eps_schedule must be strictly decreasing, positive, with >= 4 entries")
    ks = [float(k) for k in k_grid]
    if len(ks) < 3:
        raise ValidationError("k_grid needs at least 3 values")

    evidence: list[EpsilonEvidence] = []
    prev = None
    for e in eps:
        reg = sequence(e)
        mats, ts = [], []
        for k in ks:
            tm = transfer(reg, k)
            mats.append(effective_lambda(tm))
            ts.append(abs(transfer_scatter(tm).t))
        u, spread = _fit_u(mats)
        if prev is not None:
            u = _align(u, prev)
        dist = None if prev is None else _u_distance(u, prev)
        evidence.append(EpsilonEvidence(e, _limit_params(u, SEPARATED_W_TOL), spread, max(ts), dist, u))
        prev = u

    last = evidence[-1]
    if last.k_variation >= k_tol:
        return LimitReport(NonConvergent(f"fitted interaction depends on k (spread {last.k_variation:.2e})"), evidence)
    d1, d2 = evidence[-2].step_distance, evidence[-1].step_distance
    if not (d2 < d1 and d2 < cauchy_tol):
        return LimitReport(NonConvergent(f"successive distances not shrinking ({d1:.2e} -> {d2:.2e})"), evidence)

    u1, u2, u3 = (ev.u_matrix for ev in evidence[-3:])
    ratio = eps[-2] / eps[-1]
    if d2 == 0.0:
        u0, err = u3, 0.0
    else:
        order = min(max(math.log(d1 / d2) / math.log(ratio), 0.5), 4.0)
        u0 = u3 + (u3 - u2) / (ratio**order - 1.0)
        err = float(np.linalg.norm(u3 - u0))
    u0 = _nearest_unitary(u0)
    sep_tol = max(SEPARATED_W_TOL, err)
    if last.max_abs_t < t_separated:
        sep_tol = max(sep_tol, abs(unitary_from_matrix(u0).w))
    limit = _limit_params(u0, sep_tol)
    return LimitReport(limit, evidence, err, classify(limit).value.value)

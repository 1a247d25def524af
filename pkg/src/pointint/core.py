"""Parameter representations of a one-dimensional point interaction.

Three equivalent ways of naming a member of the four-parameter family:

* ``UnitaryParams``: the unitary matrix ``U = e^{i theta} [[z, w], [-w*, z*]]``
  that links the current-carrying boundary combinations on both sides.
* ``LambdaParams``: the boundary matrix ``Lambda = e^{i phi} [[a, b], [c, d]]``
  with ``ad - bc = 1``, acting as ``(psi, psi')(0+) = Lambda (psi, psi')(0-)``.
* ``SeparatedParams``: the ``w = 0`` subfamily ``psi'(0+-) = h_+- psi(0+-)``
  where the half lines decouple. ``h = inf`` is the Dirichlet wall.

The unitary form depends on an arbitrary length scale ``l0`` (default 1);
all conversions take it explicitly.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .errors import ConditioningWarning, ConstraintViolation, NoPreimage, ValidationError, WrongVariant

INF = math.inf

# constraint checks on raw input
VALIDATION_TOL = 1e-9
# |w| at or below this selects the separated branch
SEPARATED_W_TOL = 1e-12
# |w| below this (but above SEPARATED_W_TOL) is ill-conditioned
CONDITIONING_W_TOL = 1e-6


@dataclass(frozen=True)
class UnitaryParams:
    theta: float
    z: complex
    w: complex

    form: ClassVar[str] = "unitary"

    def matrix(self) -> np.ndarray:
        z, w = complex(self.z), complex(self.w)
        return cmath.exp(1j * self.theta) * np.array(
            [[z, w], [-w.conjugate(), z.conjugate()]], dtype=complex
        )


@dataclass(frozen=True)
class LambdaParams:
    phi: float
    a: float
    b: float
    c: float
    d: float

    form: ClassVar[str] = "lambda"

    def real_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def matrix(self) -> np.ndarray:
        return cmath.exp(1j * self.phi) * self.real_matrix().astype(complex)

    @classmethod
    def from_matrix(cls, lam, tol: float = VALIDATION_TOL) -> "LambdaParams":
        """Reduce a complex 2x2 matrix to ``e^{i phi} M`` with real unimodular ``M``.

        ``phi`` is brought into ``[0, pi)``; the sign of ``M`` absorbs the
        shift by ``pi``.
        """
        lam = np.asarray(lam, dtype=complex)
        det = lam[0, 0] * lam[1, 1] - lam[0, 1] * lam[1, 0]
        if abs(abs(det) - 1.0) > tol:
            raise ConstraintViolation("det", abs(abs(det) - 1.0))
        phi = 0.5 * cmath.phase(det)
        m = lam * cmath.exp(-1j * phi)
        imag = float(np.max(np.abs(m.imag)))
        if imag > tol * max(1.0, float(np.max(np.abs(m.real)))):
            raise ConstraintViolation("phase", imag, "matrix is not a phase times a real matrix")
        return _normalized(phi, m.real)


@dataclass(frozen=True)
class SeparatedParams:
    h_plus: float
    h_minus: float

    form: ClassVar[str] = "separated"

    def __post_init__(self):
        # the point at infinity is unsigned
        for name in ("h_plus", "h_minus"):
            if getattr(self, name) == -INF:
                object.__setattr__(self, name, INF)


InteractionParams = Union[UnitaryParams, LambdaParams, SeparatedParams]


@dataclass(frozen=True)
class BoundaryMatrix:
    entries: np.ndarray
    kind: str = "nonrelativistic"

    @property
    def det(self) -> complex:
        e = self.entries
        return complex(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])


def _normalized(phi: float, m: np.ndarray) -> LambdaParams:
    turns = math.floor(phi / math.pi)
    phi -= turns * math.pi
    if turns % 2:
        m = -m
    if phi >= math.pi:  # rounding
        phi = 0.0
        m = -m
    return LambdaParams(float(phi), float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


def is_infinite(h: float) -> bool:
    return math.isinf(h)


def validate(params: InteractionParams, tol: float = VALIDATION_TOL) -> InteractionParams:
    """Return ``params`` unchanged if every invariant of its variant holds."""
    if isinstance(params, LambdaParams):
        for name in ("phi", "a", "b", "c", "d"):
            if not math.isfinite(getattr(params, name)):
                raise ConstraintViolation(name, INF, f"{name} must be finite")
        if not 0.0 <= params.phi < math.pi:
            raise ConstraintViolation("phi", _range_excess(params.phi), "phi must lie in [0, pi)")
        residual = abs(params.a * params.d - params.b * params.c - 1.0)
        if residual > tol:
            raise ConstraintViolation("ad-bc", residual)
    elif isinstance(params, UnitaryParams):
        if not math.isfinite(params.theta):
            raise ConstraintViolation("theta", INF, "theta must be finite")
        if not 0.0 <= params.theta < math.pi:
            raise ConstraintViolation("theta", _range_excess(params.theta), "theta must lie in [0, pi)")
        residual = abs(abs(params.z) ** 2 + abs(params.w) ** 2 - 1.0)
        if not math.isfinite(residual) or residual > tol:
            raise ConstraintViolation("|z|^2+|w|^2", residual)
    elif isinstance(params, SeparatedParams):
        for name in ("h_plus", "h_minus"):
            h = getattr(params, name)
            if not isinstance(h, (int, float)) or math.isnan(h):
                raise ConstraintViolation(name, INF, f"{name} must be real or inf")
    else:
        raise ValidationError(f"unknown parameter type {type(params).__name__}")
    return params


def _range_excess(x: float) -> float:
    return max(-x, x - math.pi, 0.0)


def unitary_to_interaction(
    u: UnitaryParams, l0: float = 1.0, w_tol: float = SEPARATED_W_TOL
) -> LambdaParams | SeparatedParams:
    """Boundary relation implied by the unitary matrix ``u`` at length scale ``l0``.

    For ``|w| > w_tol`` this is ``Lambda = R_+^{-1} R_-`` written in closed form;
    otherwise the half lines decouple and the Robin constants ``h_+-`` are returned.
    """
    validate(u)
    if l0 <= 0:
        raise ConstraintViolation("l0", -l0, "l0 must be positive")
    w = complex(u.w)
    z = complex(u.z)
    aw = abs(w)
    if aw <= w_tol:
        return _separated_from_unitary(u.theta, z, l0)
    if aw < CONDITIONING_W_TOL:
        warnings.warn(
            f"|w| = {aw:.2e} is close to the separated branch; Lambda is ill-conditioned",
            ConditioningWarning,
            stacklevel=2,
        )
    st, ct = math.sin(u.theta), math.cos(u.theta)
    n = np.array(
        [[st - z.imag, l0 * (ct + z.real)], [(z.real - ct) / l0, st + z.imag]],
        dtype=float,
    )
    # i / conj(w) = e^{i(pi/2 + arg w)} / |w|
    return _normalized(0.5 * math.pi + cmath.phase(w), n / aw)


def _separated_from_unitary(theta: float, z: complex, l0: float) -> SeparatedParams:
    e = cmath.exp(1j * theta)
    zp = z * e
    zm = z.conjugate() * e
    h_plus = INF if abs(1 + zp) <= SEPARATED_W_TOL else 2 * zp.imag / (l0 * abs(1 + zp) ** 2)
    h_minus = INF if abs(1 + zm) <= SEPARATED_W_TOL else -2 * zm.imag / (l0 * abs(1 + zm) ** 2)
    return SeparatedParams(h_plus, h_minus)


def lambda_to_unitary(p: LambdaParams, l0: float = 1.0) -> UnitaryParams:
    """Invert :func:`unitary_to_interaction` on the non-separated branch.

    Writing the closed-form Lambda as ``(i / w*) N`` with real ``N = s M``
    fixes ``w = -i s e^{i phi}``; the entries of ``N`` then give ``theta``
    and ``z`` linearly, and ``sin^2 + cos^2 = 1`` fixes ``|s|``. The sign
    of ``s`` is chosen so that ``theta`` lands in ``[0, pi)``.
    """
    validate(p)
    a, b, c, d = p.a, p.b, p.c, p.d
    trace = a + d
    skew = b / l0 - c * l0
    # a+d = 0 and b/l0 = c l0 together contradict ad - bc = 1
    s = 2.0 / math.hypot(trace, skew)
    if trace < 0 or (trace == 0 and skew < 0):
        s = -s
    sin_t = 0.5 * s * trace
    cos_t = 0.5 * s * skew
    theta = math.atan2(sin_t, cos_t)
    if theta >= math.pi:
        theta = 0.0
    z = complex(0.5 * s * (b / l0 + c * l0), 0.5 * s * (d - a))
    w = -1j * s * cmath.exp(1j * p.phi)
    # restore exact unitarity lost to rounding
    norm = math.sqrt(abs(z) ** 2 + abs(w) ** 2)
    u = UnitaryParams(theta, z / norm, w / norm)

    back = unitary_to_interaction(u, l0)
    if not isinstance(back, LambdaParams):
        raise NoPreimage("inversion landed on the separated branch")
    residual = float(np.max(np.abs(back.matrix() - p.matrix())))
    scale = max(1.0, float(np.max(np.abs(p.real_matrix()))))
    if residual > 1e-8 * scale:
        raise NoPreimage(f"round-trip residual {residual:.3e}")
    return u


def resolve(params: InteractionParams, l0: float = 1.0) -> LambdaParams | SeparatedParams:
    """Bring any representation to the Lambda or separated form."""
    validate(params)
    if isinstance(params, UnitaryParams):
        return unitary_to_interaction(params, l0)
    return params


def lambda_matrix(params: InteractionParams, l0: float = 1.0) -> BoundaryMatrix:
    p = resolve(params, l0)
    if isinstance(p, SeparatedParams):
        raise WrongVariant("separated interactions have no boundary matrix")
    return BoundaryMatrix(p.matrix(), "nonrelativistic")


def delta(gamma: float) -> LambdaParams:
    """The delta interaction ``psi'(0+) - psi'(0-) = gamma psi(0)``."""
    return LambdaParams(0.0, 1.0, 0.0, float(gamma), 1.0)


def delta_prime(beta: float) -> LambdaParams:
    """The (even) delta-prime interaction ``psi(0+) - psi(0-) = beta psi'(0)``."""
    return LambdaParams(0.0, 1.0, float(beta), 0.0, 1.0)


IDENTITY = LambdaParams(0.0, 1.0, 0.0, 0.0, 1.0)


# ---------------------------------------------------------------- sampling

def sample_unitary(rng: np.random.Generator, n: int):
    """``theta`` uniform on ``[0, pi)``, ``(z, w)`` uniform on the unit 3-sphere."""
    theta = rng.uniform(0.0, math.pi, n)
    g = rng.standard_normal((n, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    z = g[:, 0] + 1j * g[:, 1]
    w = g[:, 2] + 1j * g[:, 3]
    return theta, z, w


def sample_lambda(rng: np.random.Generator, n: int, max_entry: float = 50.0):
    """Random ``(phi, a, b, c, d)`` arrays with ``ad - bc = 1``.

    Gaussian 2x2 matrices scaled to unit determinant; draws with an entry
    above ``max_entry`` are rejected to keep conditioning bounded.
    """
    out = np.empty((0, 4))
    while len(out) < n:
        m = rng.standard_normal((2 * n, 4))
        det = m[:, 0] * m[:, 3] - m[:, 1] * m[:, 2]
        flip = det < 0
        m[flip, 0:2] *= -1.0
        det = np.abs(det)
        ok = det > 1e-3
        m = m[ok] / np.sqrt(det[ok])[:, None]
        m = m[np.max(np.abs(m), axis=1) <= max_entry]
        out = np.vstack([out, m])
    out = out[:n]
    phi = rng.uniform(0.0, math.pi, n)
    return phi, out[:, 0], out[:, 1], out[:, 2], out[:, 3]


def lambda_list(phi, a, b, c, d) -> list[LambdaParams]:
    return [LambdaParams(*map(float, row)) for row in zip(phi, a, b, c, d)]


# ---------------------------------------------------------------- JSON

def encode_real(x: float):
    return "inf" if math.isinf(x) else float(x)


def decode_real(x) -> float:
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "+inf", "infinity", "-inf"):
            return INF
        raise ValidationError(f"expected a number or 'inf', got {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"expected a number, got {x!r}")
    return float(x)


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(decode_real(x[0]), decode_real(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise ValidationError(f"complex numbers are [re, im] pairs, got {x!r}")


def params_to_dict(p: InteractionParams) -> dict:
    if isinstance(p, LambdaParams):
        return {"form": "lambda", "phi": p.phi, "a": p.a, "b": p.b, "c": p.c, "d": p.d}
    if isinstance(p, UnitaryParams):
        return {
            "form": "unitary",
            "theta": p.theta,
            "z": encode_complex(p.z),
            "w": encode_complex(p.w),
        }
    return {"form": "separated", "h_plus": encode_real(p.h_plus), "h_minus": encode_real(p.h_minus)}


def params_from_dict(data: dict) -> InteractionParams:
    if not isinstance(data, dict):
        raise ValidationError("parameters must be a JSON object")
    form = data.get("form")
    if form is None:
        form = _infer_form(data)
    try:
        if form == "lambda":
            p = LambdaParams(*(decode_real(data[k]) for k in ("phi", "a", "b", "c", "d")))
        elif form == "unitary":
            p = UnitaryParams(
                decode_real(data["theta"]), decode_complex(data["z"]), decode_complex(data["w"])
            )
        elif form == "separated":
            p = SeparatedParams(decode_real(data["h_plus"]), decode_real(data["h_minus"]))
        else:
            raise ValidationError(f"unknown form {form!r}")
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r} for form {form!r}") from None
    return validate(p)


def _infer_form(data: dict) -> str:
    if "h_plus" in data or "h_minus" in data:
        return "separated"
    if "theta" in data:
        return "unitary"
    return "lambda"

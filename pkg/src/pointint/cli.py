"""Command-line interface.

Every command writes one JSON document to stdout (``sweep`` writes CSV).
Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures, including a unitarity residual above ``--tolerance``. Errors
are reported on stderr as ``{"error": {"kind": ..., "detail": ...}}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import core, dirac, parity, regularization, schrodinger
from .errors import NumericalError, PointInteractionError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3
DEFAULT_SEED = 42
DEFAULT_TOLERANCE = 1e-10


class ResidualTooLarge(NumericalError):
    kind = "UnitarityResidual"


@dataclass
class Output:
    text: str
    status: int = EXIT_OK
    error: PointInteractionError | None = None


# ---------------------------------------------------------------- input helpers

def _default_seed() -> int:
    raw = os.environ.get("POINTINT_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"POINTINT_SEED must be an integer, got {raw!r}") from None


def _load_json(args) -> dict:
    if args.params is not None and args.params_file is not None:
        raise ValidationError("give --params or --params-file, not both")
    if args.params is not None:
        text = args.params
    elif args.params_file is not None:
        try:
            with open(args.params_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read {args.params_file}: {exc.strerror}") from None
    else:
        raise ValidationError("interaction parameters are required (--params or --params-file)")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON parameters: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError("parameters must be a JSON object")
    if args.form:
        data["form"] = args.form
    return data


def _is_dirac(data: dict) -> bool:
    return any(key in data for key in ("phi_r", "a_r", "b_r", "c_r", "d_r", "h_r_plus", "h_r_minus"))


def _schrodinger_params(args):
    data = _load_json(args)
    if _is_dirac(data):
        raise ValidationError("expected non-relativistic parameters, got Dirac fields")
    return core.params_from_dict(data)


def _with_mass(data: dict, mass: float | None) -> dict:
    if mass is None:
        return data
    if "mass" in data and core.decode_real(data["mass"]) != mass:
        raise ValidationError(f"--mass {mass} conflicts with mass {data['mass']} in the parameters")
    return {**data, "mass": mass}


def _dirac_params(args):
    return dirac.dirac_params_from_dict(_with_mass(_load_json(args), args.mass))


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"{name} must be a comma-separated list of numbers") from None


def _k_values(args, default=None) -> list[float]:
    if args.k_grid is not None:
        ks = _float_list(args.k_grid, "--k-grid")
    elif args.k is not None:
        ks = [args.k]
    elif default is not None:
        ks = list(default)
    else:
        raise ValidationError("a wavenumber is required (--k or --k-grid)")
    for k in ks:
        if not (k > 0 and math.isfinite(k)):
            raise ValidationError(f"wavenumbers must be positive, got {k!r}")
    return ks


def _sides(side: str) -> list[str]:
    return ["left", "right"] if side == "both" else [side]


def _cplx(z: complex) -> list[float]:
    return core.encode_complex(z)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _scattering_row(res: schrodinger.ScatteringResult) -> dict:
    return {
        "k": res.k,
        "side": res.side,
        "r": _cplx(res.r),
        "t": _cplx(res.t),
        "reflection": res.reflection,
        "transmission": res.transmission,
        "unitarity_residual": res.unitarity_residual,
        "current_in": res.current_in,
        "current_out": res.current_out,
    }


def _check_residuals(rows, tol: float) -> ResidualTooLarge | None:
    worst = max((row["unitarity_residual"] for row in rows), default=0.0)
    if worst > tol:
        return ResidualTooLarge(f"unitarity residual {worst:.3e} exceeds tolerance {tol:.1e}")
    return None


def _finish(doc: dict, rows, tol: float) -> Output:
    err = _check_residuals(rows, tol)
    return Output(_dump(doc), EXIT_NUMERICAL if err else EXIT_OK, err)


# ---------------------------------------------------------------- commands

def cmd_scatter(args) -> Output:
    p = _schrodinger_params(args)
    rows = [
        _scattering_row(schrodinger.scatter(p, k, side, args.l0))
        for k in _k_values(args)
        for side in _sides(args.side)
    ]
    doc = {"params": core.params_to_dict(p), "l0": args.l0}
    if len(rows) == 1:
        doc.update(rows[0])
    else:
        doc["results"] = rows
    return _finish(doc, rows, args.tolerance)


def _bound_row(st: schrodinger.BoundState) -> dict:
    return {"energy": st.energy, "kappa": st.kappa, "side": st.side, "multiplicity": st.multiplicity}


def cmd_bound(args) -> Output:
    p = _schrodinger_params(args)
    states = schrodinger.bound_states(p, args.l0)
    return Output(_dump({"params": core.params_to_dict(p), "l0": args.l0, "bound_states": [_bound_row(s) for s in states]}))


def _state(text: str | None, name: str) -> schrodinger.BoundaryState | None:
    if text is None:
        return None
    try:
        data = json.loads(text)
        return schrodinger.BoundaryState(
            core.decode_complex(data["psi"]), core.decode_complex(data["dpsi"]), str(data.get("side", "left"))
        )
    except (json.JSONDecodeError, KeyError, TypeError):
        raise ValidationError(f'{name} must look like {{"psi": [re, im], "dpsi": [re, im], "side": "left"}}') from None


def cmd_coeffs(args) -> Output:
    p = _schrodinger_params(args)
    state = _state(args.state, "--state")
    if state is None:
        raise ValidationError("--state is required")
    other = _state(args.other_state, "--other-state")
    co = schrodinger.interaction_coefficients(p, state, other, args.formula, args.l0)
    return Output(_dump({"params": core.params_to_dict(p), "alpha0": _cplx(co.alpha0), "alpha1": _cplx(co.alpha1)}))


def cmd_classify(args) -> Output:
    data = _load_json(args)
    if _is_dirac(data):
        p, m = dirac.dirac_params_from_dict(_with_mass(data, args.mass))
        cls = dirac.classify_dirac(p, m)
        doc = {"params": dirac.dirac_params_to_dict(p, m)}
    else:
        p = core.params_from_dict(data)
        cls = parity.classify(p)
        doc = {"params": core.params_to_dict(p)}
    doc.update({"parity": cls.value.value, "note": cls.note})
    if not isinstance(p, (core.SeparatedParams, dirac.DiracSeparatedParams)):
        asym = _asymmetry(p, m if _is_dirac(data) else None, args.l0)
        doc["max_r_asymmetry"], doc["max_t_asymmetry"] = asym
    return Output(_dump(doc))


def _asymmetry(p, m, l0) -> tuple[float, float]:
    if m is None:
        rep = parity.reflection_symmetry_test(p, (0.5, 1.0, 2.0), l0)
        return rep.max_r_asymmetry, rep.max_t_asymmetry
    dr = dt = 0.0
    for e in (1.25 * m, 1.5 * m, 2.0 * m):
        left, right = dirac.dirac_scatter(p, e, m, "left"), dirac.dirac_scatter(p, e, m, "right")
        dr, dt = max(dr, abs(left.r - right.r)), max(dt, abs(left.t - right.t))
    return dr, dt


def cmd_odd_search(args) -> Output:
    if args.samples < 0:
        raise ValidationError("--samples must be nonnegative")
    rep = parity.odd_search(args.samples, args.seed, args.l0, args.tolerance)
    return Output(_dump({
        "samples": rep.samples,
        "seed": rep.seed,
        "tolerance": args.tolerance,
        "odd_candidates_found": rep.odd_candidates_found,
        "all_identity": rep.all_identity,
        "min_residual": rep.min_residual,
        "analytic_point_residual": rep.analytic_point_residual,
        "analytic_point_identity": rep.analytic_point_identity,
    }))


def _energies(args) -> list[float]:
    if args.energy_grid is not None:
        return _float_list(args.energy_grid, "--energy-grid")
    if args.energy is None:
        raise ValidationError("--energy is required")
    return [args.energy]


def cmd_dirac_scatter(args) -> Output:
    p, m = _dirac_params(args)
    rows = []
    for e in _energies(args):
        for side in _sides(args.side):
            res = dirac.dirac_scatter(p, e, m, side, args.allow_negative_energy)
            row = _scattering_row(res)
            row["energy"] = e
            row["k_r"] = row.pop("k")
            rows.append(row)
    doc = {"params": dirac.dirac_params_to_dict(p, m)}
    if len(rows) == 1:
        doc.update(rows[0])
    else:
        doc["results"] = rows
    return _finish(doc, rows, args.tolerance)


def cmd_dirac_bound(args) -> Output:
    p, m = _dirac_params(args)
    states = dirac.dirac_bound_states(p, m)
    rows = [{"energy": s.energy, "kappa_r": s.kappa_r, "side": s.side} for s in states]
    return Output(_dump({"params": dirac.dirac_params_to_dict(p, m), "bound_states": rows}))


def cmd_dirac_map(args) -> Output:
    p, m = _dirac_params(args)
    doc = {
        "params": dirac.dirac_params_to_dict(p, m),
        "nonrelativistic": core.params_to_dict(dirac.to_nonrelativistic(p, m)),
        "parity": dirac.classify_dirac(p, m).value.value,
        "odd_candidate": dirac.dirac_odd_candidate(p, m),
    }
    if args.energy is not None:
        doc["energy"] = args.energy
        doc["u_reduction"] = core.params_to_dict(dirac.u_reduction(p, args.energy, m))
    return Output(_dump(doc))


def _eps_schedule(text: str) -> list[float]:
    if text == "default":
        return list(regularization.DEFAULT_EPS_SCHEDULE)
    return _float_list(text, "--eps-schedule")


def _limit_dict(limit) -> dict:
    if isinstance(limit, regularization.NonConvergent):
        return {"form": "nonconvergent", "reason": limit.reason}
    return core.params_to_dict(limit)


def cmd_regularize(args) -> Output:
    if (args.sequence is None) == (args.potential_csv is None):
        raise ValidationError("give exactly one of --sequence or --potential-csv")
    if args.k_grid is None and args.k is not None:
        # a single k cannot test k-independence; bracket it
        ks = [0.5 * args.k, args.k, 2.0 * args.k]
    else:
        ks = _k_values(args, regularization.DEFAULT_K_GRID)
    if args.sequence is not None:
        seq = regularization.named_sequence(args.sequence, args.strength, max(ks))
        source = {"sequence": args.sequence, "strength": args.strength}
    else:
        base = regularization.load_potential_csv(args.potential_csv)
        if args.strength is not None:
            base = regularization.SampledPotential(base.grid, base.values * args.strength)
        seq = regularization.scaled_sequence(base, args.scaling)
        source = {"potential_csv": args.potential_csv, "scaling": args.scaling, "strength": args.strength}
    rep = regularization.limit_analysis(seq, _eps_schedule(args.eps_schedule), ks)
    evidence = [
        {
            "eps": ev.eps,
            "fitted": core.params_to_dict(ev.fitted),
            "k_variation": ev.k_variation,
            "max_abs_t": ev.max_abs_t,
            "step_distance": ev.step_distance,
        }
        for ev in rep.evidence
    ]
    doc = {
        **source,
        "k_grid": ks,
        "converged": rep.converged,
        "limit": _limit_dict(rep.limit),
        "parity": rep.parity,
        "extrapolation_error": rep.extrapolation_error,
        "evidence": evidence,
    }
    return Output(_dump(doc))


# ---------------------------------------------------------------- sweep

SCHRODINGER_PRESETS = {"delta": core.delta, "delta-prime": core.delta_prime}
DIRAC_PRESETS = {"mixed": dirac.mixed, "inverted-mix": dirac.inverted_mix}


def parse_grid(text: str) -> tuple[str, np.ndarray]:
    """``NAME=start:stop:num[:log]`` into an axis name and its values."""
    try:
        name, spec = text.split("=", 1)
        parts = spec.split(":")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        log = len(parts) == 4 and parts[3] == "log"
        if len(parts) not in (3, 4) or (len(parts) == 4 and not log):
            raise ValueError
    except (ValueError, IndexError):
        raise ValidationError(f"--grid must look like NAME=start:stop:num[:log], got {text!r}") from None
    if num < 0:
        raise ValidationError("grid size must be nonnegative")
    if log:
        if start <= 0 or stop <= 0:
            raise ValidationError("log grids need positive end points")
        return name.strip(), np.geomspace(start, stop, num)
    return name.strip(), np.linspace(start, stop, num)


def _sweep_axes(args):
    axes = dict(parse_grid(g) for g in args.grid or [])
    wave = "energy" if args.dirac else "k"
    if wave in axes:
        waves = list(axes.pop(wave))
    elif args.dirac:
        waves = _energies(args)
    else:
        waves = _k_values(args)
    if len(axes) > 1:
        raise ValidationError("sweep takes at most one parameter axis besides the wave axis")
    param_axis = next(iter(axes.items()), None)
    return wave, waves, param_axis


def _sweep_members(args, param_axis):
    """Yield ``(axis_value, params)`` in grid order."""
    presets = DIRAC_PRESETS if args.dirac else SCHRODINGER_PRESETS
    if args.preset is not None:
        if args.preset not in presets:
            raise ValidationError(f"unknown preset {args.preset!r}; choose from {sorted(presets)}")
        build = presets[args.preset]
        if param_axis is None:
            if args.strength is None:
                raise ValidationError("a preset needs --strength or a strength grid")
            return [(None, build(args.strength))]
        name, values = param_axis
        if name not in ("strength", "gamma", "beta"):
            raise ValidationError(f"preset sweeps vary 'strength', got {name!r}")
        return [(float(v), build(float(v))) for v in values]

    data = _load_json(args)
    if param_axis is None:
        values, name = [None], None
    else:
        name, values = param_axis
        if name not in data:
            raise ValidationError(f"grid axis {name!r} is not a parameter field")
    out = []
    for v in values:
        if name is not None:
            data = {**data, name: float(v)}
        if args.dirac:
            out.append((None if v is None else float(v), _dirac_from(data, args)))
        else:
            out.append((None if v is None else float(v), core.params_from_dict(data)))
    return out


def _dirac_from(data: dict, args):
    return dirac.dirac_params_from_dict(_with_mass(data, args.mass))[0]


def _dirac_mass(args) -> float:
    if args.preset is not None:
        return 1.0 if args.mass is None else args.mass
    return dirac.dirac_params_from_dict(_with_mass(_load_json(args), args.mass))[1]


def cmd_sweep(args) -> Output:
    wave, waves, param_axis = _sweep_axes(args)
    members = _sweep_members(args, param_axis) if (param_axis is None or len(param_axis[1])) else []
    m = _dirac_mass(args) if args.dirac else None
    header = ([param_axis[0]] if param_axis else []) + [wave]
    if args.dirac:
        header.append("k_r")
    header += ["side", "r_re", "r_im", "t_re", "t_im", "reflection", "transmission", "unitarity_residual"]

    rows = []
    for value, p in members:
        for w in waves:
            for side in _sides(args.side):
                if args.dirac:
                    res = dirac.dirac_scatter(p, float(w), m, side, args.allow_negative_energy)
                    lead = [float(w), res.k]
                else:
                    res = schrodinger.scatter(p, float(w), side, args.l0)
                    lead = [float(w)]
                row = ([value] if param_axis else []) + lead + [
                    side, res.r.real, res.r.imag, res.t.real, res.t.imag,
                    res.reflection, res.transmission, res.unitarity_residual,
                ]
                rows.append(row)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([[_csv_cell(c) for c in row] for row in rows])
    err = _check_residuals([{"unitarity_residual": row[-1]} for row in rows], args.tolerance)
    return Output(buf.getvalue(), EXIT_NUMERICAL if err else EXIT_OK, err)


def _csv_cell(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


# ---------------------------------------------------------------- parser

COMMANDS = {
    "scatter": cmd_scatter,
    "bound": cmd_bound,
    "coeffs": cmd_coeffs,
    "classify": cmd_classify,
    "odd-search": cmd_odd_search,
    "dirac-scatter": cmd_dirac_scatter,
    "dirac-bound": cmd_dirac_bound,
    "dirac-map": cmd_dirac_map,
    "regularize": cmd_regularize,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    # usage errors go through the same JSON error channel as bad parameters
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--params", help="interaction parameters as inline JSON")
    common.add_argument("--params-file", help="path to a JSON parameter file")
    common.add_argument("--form", choices=("lambda", "unitary", "separated"), help="override the 'form' field")
    common.add_argument("--l0", type=float, default=1.0, help="length scale L0 (default 1)")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="residual tolerance")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $POINTINT_SEED or 42)")
    common.add_argument("--output", choices=("json", "csv"), default=None)
    common.add_argument("--k", type=float, help="wavenumber")
    common.add_argument("--k-grid", help="comma-separated wavenumbers")
    common.add_argument("--side", choices=("left", "right", "both"), default="left")
    common.add_argument("--mass", type=float, help="Dirac mass; fills a missing JSON 'mass', must agree otherwise")
    common.add_argument("--energy", type=float, help="Dirac energy")
    common.add_argument("--energy-grid", help="comma-separated Dirac energies")
    common.add_argument("--allow-negative-energy", action="store_true")

    parser = _Parser(prog="pointint", description="Point interactions in one dimension.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("scatter", "bound", "classify", "dirac-scatter", "dirac-bound", "dirac-map"):
        sub.add_parser(name, parents=[common])

    co = sub.add_parser("coeffs", parents=[common])
    co.add_argument("--state", help='boundary state JSON {"psi": [re, im], "dpsi": [re, im], "side": "left"}')
    co.add_argument("--other-state", help="second one-sided state (separated interactions)")
    co.add_argument("--formula", choices=("left", "right"))

    odd = sub.add_parser("odd-search", parents=[common])
    odd.add_argument("--samples", type=int, default=1_000_000)

    reg = sub.add_parser("regularize", parents=[common])
    reg.add_argument("--sequence", choices=sorted(regularization.SEQUENCES))
    reg.add_argument("--potential-csv", help="CSV of x, V(x) samples")
    reg.add_argument("--scaling", choices=("delta", "deltaprime"), default="delta")
    reg.add_argument("--strength", type=float)
    reg.add_argument("--eps-schedule", default="default", help="'default' or comma-separated decreasing values")

    sw = sub.add_parser("sweep", parents=[common])
    sw.add_argument("--grid", action="append", help="NAME=start:stop:num[:log]; NAME is k, energy or a parameter")
    sw.add_argument("--dirac", action="store_true", help="sweep Dirac scattering over energy")
    sw.add_argument("--preset", help="delta, delta-prime (Schrodinger) or mixed, inverted-mix (Dirac)")
    sw.add_argument("--strength", type=float)
    return parser


def run(argv: list[str] | None = None) -> Output:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    fmt = args.output or ("csv" if args.command == "sweep" else "json")
    if (fmt == "csv") != (args.command == "sweep"):
        raise ValidationError(f"{args.command} writes {'csv' if args.command == 'sweep' else 'json'} only")
    if not (args.l0 > 0 and math.isfinite(args.l0)):
        raise ValidationError("--l0 must be positive")
    return COMMANDS[args.command](args)


def _error_text(err: Exception) -> str:
    kind = getattr(err, "kind", type(err).__name__)
    if kind in ("validation", "numerical", "error"):
        kind = type(err).__name__
    return json.dumps({"error": {"kind": kind, "detail": str(err)}}) + "\n"


def main(argv: list[str] | None = None) -> int:
    try:
        out = run(argv)
    except ValidationError as err:
        sys.stderr.write(_error_text(err))
        return EXIT_VALIDATION
    except NumericalError as err:
        sys.stderr.write(_error_text(err))
        return EXIT_NUMERICAL
    sys.stdout.write(out.text)
    if out.error is not None:
        sys.stderr.write(_error_text(out.error))
    return out.status


if __name__ == "__main__":
    sys.exit(main())

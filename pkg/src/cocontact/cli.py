"""Command-line front end: simulate, verify, classify, and reconstruct.

Six subcommands cover the library's main flows::

    cocontact simulate       integrate a Hamiltonian flow, write CSV + JSON
    cocontact hj-check       residual-check a Hamilton-Jacobi solution on a grid
    cocontact quantity-check classify a quantity as conserved/dissipated on a box
    cocontact noether        build the symmetry of a dissipated quantity and test it
    cocontact bracket        evaluate a Jacobi bracket on a sample box
    cocontact reconstruct    integrate leafwise and lift through a section

Every command prints one JSON document to stdout (schema in
``schemas/output.schema.json``); ``--out`` additionally writes the primary
artifact (trajectory CSV for simulate/reconstruct, residual-grid CSV for
hj-check, a copy of the JSON otherwise).  Outputs are deterministic: same
config and seed give byte-identical bytes.  Exit codes: 0 pass, 2 config
error, 3 runtime/numeric error, 4 verdict fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import expressions
from . import hamilton_jacobi as hj
from . import quantities as qn
from . import systems as sy
from .dynamics import IntegrationError, ScalarField, herglotz_action, integrate
from .geometry import DimensionMismatch, PhasePoint


class ConfigError(ValueError):
    """Invalid or inconsistent command-line / config-file input."""


COMMANDS = ("simulate", "hj-check", "quantity-check", "noether", "bracket", "reconstruct")

_COMMAND_TOL = {"hj-check": 1e-6, "quantity-check": 1e-6, "noether": 1e-5}


# -- argument plumbing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cocontact",
        description="Time-dependent contact Hamiltonian mechanics toolkit",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--system", help="built-in system name")
    ap.add_argument("--H", help="Hamiltonian expression in t, q1.., p1.., z")
    ap.add_argument("--params", help="parameter bindings k=v[,k=v...]")
    ap.add_argument("--init", help="initial point t,q..,p..,z (comma floats)")
    ap.add_argument("--t-end", dest="t_end", type=float)
    ap.add_argument("--dt", type=float, help="fixed step size (rk4 scheme)")
    ap.add_argument("--adaptive", action="store_true", default=None,
                    help="use the embedded adaptive scheme instead of rk4")
    ap.add_argument("--rtol", type=float)
    ap.add_argument("--atol", type=float)
    ap.add_argument("--grid", help="tmin:tmax:N,qmin:qmax:N[,zmin:zmax:N]")
    ap.add_argument("--tol", type=float, help="verdict tolerance")
    ap.add_argument("--seed", type=int, help="sample-box RNG seed (default 0)")
    ap.add_argument("--jobs", type=int, help="worker threads for sweeps")
    ap.add_argument("--out", help="write the primary artifact to this path")
    ap.add_argument("--config", help="JSON config file; flags override its keys")
    ap.add_argument("--f", help="quantity expression or registered name")
    ap.add_argument("--g", help="second bracket argument")
    ap.add_argument("--kind", choices=("conserved", "dissipated"))
    ap.add_argument("--S", help="generating-function expression in t, q1..")
    ap.add_argument("--gamma", help="comma-separated section components")
    ap.add_argument("--lambda", dest="lam", help="leaf parameters (comma floats)")
    ap.add_argument("--q0", help="base initial configuration (comma floats)")
    ap.add_argument("--t0", type=float)
    ap.add_argument("--n", type=int, help="degrees of freedom for expression mode")
    ap.add_argument("--box", help="sample box t0:t1,q0:q1,p0:p1,z0:z1")
    ap.add_argument("--samples", type=int, help="sample count (default 200)")
    return ap


_CONFIG_KEYS = {
    "system", "H", "params", "init", "t_end", "dt", "adaptive", "rtol", "atol",
    "grid", "tol", "seed", "jobs", "out", "f", "g", "kind", "S", "gamma",
    "lam", "q0", "t0", "n", "box", "samples",
}


def _merge_config_file(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(
                f"unknown config key {key!r} (accepted: {', '.join(sorted(_CONFIG_KEYS))})"
            )
        if getattr(args, key) is None:  # flags override file values
            setattr(args, key, value)
    return args


def _parse_floats(value, flag: str):
    """Comma string or ready-made list -> tuple of floats."""
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [s for s in str(value).split(",") if s.strip()]
    try:
        return tuple(float(v) for v in items)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {value!r}") from exc


def _parse_params(value) -> dict:
    if value is None:
        return {}
    if isinstance(value, dict):
        return dict(value)
    out = {}
    for part in str(value).split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"--params entry {part!r} is not of the form k=v")
        key, raw = (s.strip() for s in part.split("=", 1))
        try:
            out[key] = float(raw)
        except ValueError:
            out[key] = raw  # law selectors such as mass_law=linear stay strings
    return out


def _parse_grid(value):
    """'tmin:tmax:N,qmin:qmax:N[,zmin:zmax:N]' -> list of (lo, hi, count)."""
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        segments = [tuple(seg) for seg in value]
    else:
        segments = []
        for part in str(value).split(","):
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"grid segment {part!r} is not lo:hi:N")
            segments.append((bits[0], bits[1], bits[2]))
    if len(segments) not in (2, 3):
        raise ConfigError("--grid needs a t segment, a q segment, and optionally z")
    try:
        return [(float(lo), float(hi), int(count)) for lo, hi, count in segments]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad --grid value {value!r}") from exc


def _parse_box(value, n: int):
    """'t0:t1,q0:q1,p0:p1,z0:z1' -> box in the shape sample_box expects."""
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        pairs = [tuple(seg) for seg in value]
    else:
        pairs = []
        for part in str(value).split(","):
            bits = part.split(":")
            if len(bits) != 2:
                raise ConfigError(f"box segment {part!r} is not lo:hi")
            pairs.append((bits[0], bits[1]))
    if len(pairs) != 4:
        raise ConfigError("--box needs exactly four lo:hi ranges (t, q, p, z)")
    try:
        return tuple((float(lo), float(hi)) for lo, hi in pairs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad --box value {value!r}") from exc


def _float_params(params: dict) -> dict:
    """Expression parameters must be numeric; law selectors are dropped."""
    return {k: v for k, v in params.items() if isinstance(v, (int, float))}


def _expr_params(spec, params: dict) -> dict:
    """Bindings for a user expression: system parameters, then overrides."""
    if spec is None:
        return params
    return {**_float_params(spec.params), **params}


def _resolve_hamiltonian(args):
    """-> (system spec or None, Hamiltonian field, n)."""
    params = _parse_params(args.params)
    if args.system and args.H:
        raise ConfigError("give either --system or --H, not both")
    if args.system:
        spec = sy.build_system(args.system, params or None)
        return spec, spec.H, spec.n
    if args.H:
        field = ScalarField.from_expression(args.H, n=args.n, params=_float_params(params))
        return None, field, field.n
    raise ConfigError("a Hamiltonian is required: --system <name> or --H <expr>")


def _resolve_quantity(args, name_or_expr: Optional[str], flag: str, spec, n: int):
    """Registered quantity name or expression -> (field, declared kind or None)."""
    if not name_or_expr:
        raise ConfigError(f"{flag} is required for this command")
    if spec is not None and name_or_expr in spec.quantities:
        return spec.quantities[name_or_expr]
    field = ScalarField.from_expression(
        name_or_expr, n=n, params=_float_params(_parse_params(args.params))
    )
    return field, None


def _pool_map(jobs: int, fn, items: list) -> list:
    """Deterministic fan-out: results come back in input order."""
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- output helpers ----------------------------------------------------------------------


def _trajectory_csv(traj) -> str:
    n = traj.n
    header = (
        "t,"
        + ",".join(f"q{i + 1}" for i in range(n))
        + ","
        + ",".join(f"p{i + 1}" for i in range(n))
        + ",z"
    )
    lines = [header]
    for x in traj.samples:
        lines.append(",".join(repr(float(v)) for v in (x.t, *x.q, *x.p, x.z)))
    return "\n".join(lines) + "\n"


def _endpoint_json(x: PhasePoint) -> dict:
    return {"t": x.t, "q": list(x.q), "p": list(x.p), "z": x.z}


def _emit(args, payload: dict, artifact: Optional[str] = None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(artifact if artifact is not None else text)


# -- commands ----------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec, H, n = _resolve_hamiltonian(args)
    init = _parse_floats(args.init, "--init")
    if init is None:
        raise ConfigError("--init t,q..,p..,z is required for simulate")
    if len(init) != 2 * n + 2:
        raise ConfigError(
            f"--init needs {2 * n + 2} numbers for n={n}, got {len(init)}"
        )
    x0 = PhasePoint.of(init[0], init[1 : 1 + n], init[1 + n : 1 + 2 * n], init[-1])
    scheme = "adaptive" if args.adaptive else "rk4"
    traj = integrate(
        H, x0, args.t_end, scheme=scheme, h=args.dt, rtol=args.rtol, atol=args.atol
    )
    action = herglotz_action(H, traj)
    endpoint = traj.endpoint()
    defect = abs(action - (endpoint.z - x0.z))
    payload = {
        "command": "simulate",
        "system": args.system,
        "hamiltonian": H.label,
        "n": n,
        "scheme": scheme,
        "samples": len(traj),
        "accepted": traj.accepted,
        "rejected": traj.rejected,
        "endpoint": _endpoint_json(endpoint),
        "herglotz_action": action,
        "action_defect": defect,
    }
    _emit(args, payload, artifact=_trajectory_csv(traj))
    return 0


def _hj_grid(args, n: int, want_z: bool):
    segs = _parse_grid(args.grid)
    if segs is None:
        segs = [(0.0, 2.0, 50), (-2.0, 2.0, 50)]
        if want_z:
            segs.append((-2.0, 2.0, 5))
    if want_z and len(segs) == 2:
        segs = segs + [(-2.0, 2.0, 5)]
    t_lo, t_hi, nt = segs[0]
    q_lo, q_hi, nq = segs[1]
    if want_z:
        z_lo, z_hi, nz = segs[2]
        points = hj.grid_TZ(n, (t_lo, t_hi), (q_lo, q_hi), (z_lo, z_hi), nt, nq, nz)
    else:
        points = hj.grid_T(n, (t_lo, t_hi), (q_lo, q_hi), nt, nq)
    return segs, points


def _grid_json(segs, want_z: bool) -> dict:
    out = {
        "t": [segs[0][0], segs[0][1], segs[0][2]],
        "q": [segs[1][0], segs[1][1], segs[1][2]],
    }
    out["z"] = [segs[2][0], segs[2][1], segs[2][2]] if want_z else None
    return out


def cmd_hj_check(args) -> int:
    spec, H, n = _resolve_hamiltonian(args)
    params = _float_params(_parse_params(args.params))
    approach = None
    section = None
    generating = None
    label = None

    # an explicit --S/--gamma candidate wins over the registered solution,
    # so a built-in --system can supply just the Hamiltonian to test against
    if args.S:
        approach = "T"
        generating = hj.GeneratingFunction.from_expression(
            args.S, n, params=_expr_params(spec, params))
        label = generating.label
    elif args.gamma:
        approach = "TZ"
        comps = [s.strip() for s in str(args.gamma).split(",") if s.strip()]
        if len(comps) != n:
            raise ConfigError(f"--gamma needs {n} comma-separated components")
        section = hj.SectionTZ.from_expressions(
            comps, n, params=_expr_params(spec, params))
        label = section.label
    elif spec is not None:
        sol = spec.solutions[0]
        lam = _parse_floats(args.lam, "--lambda") or (0.0,) * sol.lam_dim
        if len(lam) != sol.lam_dim:
            raise ConfigError(f"--lambda needs {sol.lam_dim} numbers for {spec.name}")
        approach = sol.approach
        section = sol.section(lam)
        if approach == "T":
            generating = hj.generating_of(section)
        label = section.label
    else:
        raise ConfigError("hj-check needs a built-in --system, an --S, or a --gamma")

    segs, points = _hj_grid(args, n, want_z=(approach == "TZ"))

    if approach == "T":
        def residual(point):
            t, q = point
            return abs(hj.hj_independent_residual(generating, H, t, q))

        residuals = _pool_map(args.jobs, residual, points)
        coiso_sup = None
        rows = [
            (t, *q, r) for (t, q), r in zip(points, residuals)
        ]
        header = "t," + ",".join(f"q{i+1}" for i in range(n)) + ",residual"
    else:
        def residual(point):
            t, q, z = point
            e = hj.hj_dependent_residual(section, H, t, q, z, check_coisotropy=False)
            r = hj.coisotropy_residual(section, t, q, z)
            return float(np.max(np.abs(e))), float(np.max(np.abs(r)))

        both = _pool_map(args.jobs, residual, points)
        residuals = [e for e, _ in both]
        coiso_sup = max((c for _, c in both), default=0.0)
        rows = [
            (t, *q, z, r) for (t, q, z), (r, _) in zip(points, both)
        ]
        header = "t," + ",".join(f"q{i+1}" for i in range(n)) + ",z,residual"

    sup = max(residuals, default=0.0)
    mean = sum(residuals) / len(residuals) if residuals else 0.0
    verdict = "pass" if sup < args.tol else "fail"
    payload = {
        "command": "hj-check",
        "approach": approach,
        "system": args.system,
        "solution": label,
        "hamiltonian": H.label,
        "n": n,
        "grid": _grid_json(segs, approach == "TZ"),
        "points": len(points),
        "sup_residual": float(sup),
        "mean_residual": float(mean),
        "coisotropy_sup": coiso_sup,
        "tol": args.tol,
        "verdict": verdict,
    }
    csv_lines = [header] + [",".join(repr(float(v)) for v in row) for row in rows]
    _emit(args, payload, artifact="\n".join(csv_lines) + "\n")
    return 0 if verdict == "pass" else 4


def cmd_quantity_check(args) -> int:
    spec, H, n = _resolve_hamiltonian(args)
    field, registered_kind = _resolve_quantity(args, args.f, "--f", spec, n)
    kind = args.kind or registered_kind
    if kind is None:
        raise ConfigError("--kind conserved|dissipated is required for expressions")
    residual_fn = (
        qn.conservation_residual if kind == "conserved" else qn.dissipation_residual
    )
    box = _parse_box(args.box, n)
    points = qn.sample_box(n, count=args.samples, seed=args.seed, box=box)
    values = _pool_map(args.jobs, lambda x: abs(residual_fn(field, H, x)), points)
    sup = max(values, default=0.0)
    mean = sum(values) / len(values) if values else 0.0
    verdict = "pass" if sup < args.tol else "fail"
    payload = {
        "command": "quantity-check",
        "system": args.system,
        "quantity": field.label,
        "kind": kind,
        "n": n,
        "samples": len(points),
        "seed": args.seed,
        "sup_residual": float(sup),
        "mean_residual": float(mean),
        "tol": args.tol,
        "verdict": verdict,
    }
    _emit(args, payload)
    return 0 if verdict == "pass" else 4


def cmd_noether(args) -> int:
    from .geometry import eta

    spec, H, n = _resolve_hamiltonian(args)
    field, _ = _resolve_quantity(args, args.f, "--f", spec, n)
    Y = qn.noether_symmetry(field)
    box = _parse_box(args.box, n)
    points = qn.sample_box(n, count=args.samples, seed=args.seed, box=box)

    def at(x):
        eta_res, tau_res = qn.symmetry_residual(Y, H, x)
        recovered = -eta(x, Y(x)) - field.value(x)
        return eta_res, tau_res, abs(recovered)

    triples = _pool_map(args.jobs, at, points)
    eta_sup = max((a for a, _, _ in triples), default=0.0)
    tau_sup = max((b for _, b, _ in triples), default=0.0)
    rec_sup = max((c for _, _, c in triples), default=0.0)
    verdict = "pass" if max(eta_sup, tau_sup) < args.tol else "fail"
    payload = {
        "command": "noether",
        "system": args.system,
        "quantity": field.label,
        "n": n,
        "samples": len(points),
        "seed": args.seed,
        "eta_bracket_sup": float(eta_sup),
        "tau_sup": float(tau_sup),
        "recovered_sup": float(rec_sup),
        "tol": args.tol,
        "verdict": verdict,
    }
    _emit(args, payload)
    return 0 if verdict == "pass" else 4


def _coordinate_kind(source: str):
    """'q3' -> ('q', 3); 'z' -> ('z', None); otherwise None."""
    s = source.strip()
    if s == "z":
        return ("z", None)
    if len(s) >= 2 and s[0] in "qp" and s[1:].isdigit() and int(s[1:]) >= 1:
        return (s[0], int(s[1:]))
    return None


def _darboux_table(n: int, i: int, j: int, points) -> dict:
    """Numerically verified canonical bracket relations for indices i, j."""
    from .geometry import jacobi_bracket

    def coord(kind, idx):
        src = kind if kind == "z" else f"{kind}{idx}"
        return ScalarField.from_expression(src, n=n)

    qi, pj = coord("q", i), coord("p", j)
    qj, pi = coord("q", j), coord("p", i)
    zf = coord("z", None)
    expected_delta = 1.0 if i == j else 0.0
    entries = {}

    def sup_err(f, g, expect):
        return max(abs(jacobi_bracket(f, g, x) - expect(x)) for x in points)

    entries[f"{{q{i},p{j}}}"] = {
        "expected": expected_delta,
        "sup_error": float(sup_err(qi, pj, lambda x: expected_delta)),
    }
    entries[f"{{q{i},q{j}}}"] = {
        "expected": 0.0,
        "sup_error": float(sup_err(qi, qj, lambda x: 0.0)),
    }
    entries[f"{{p{i},p{j}}}"] = {
        "expected": 0.0,
        "sup_error": float(sup_err(pi, pj, lambda x: 0.0)),
    }
    entries[f"{{q{i},z}}"] = {
        "expected": f"-q{i}",
        "sup_error": float(sup_err(qi, zf, lambda x: -x.q[i - 1])),
    }
    entries[f"{{p{i},z}}"] = {
        "expected": f"-2*p{i}",
        "sup_error": float(sup_err(pi, zf, lambda x: -2.0 * x.p[i - 1])),
    }
    return entries


def cmd_bracket(args) -> int:
    from .geometry import jacobi_bracket

    if not args.f or not args.g:
        raise ConfigError("bracket needs both --f and --g")
    params = _float_params(_parse_params(args.params))
    n = args.n
    if n is None:
        probe_n = 1_000_000
        idx = 0
        for src in (args.f, args.g):
            idx = max(idx, expressions.max_index(expressions.parse(src, probe_n)))
        n = max(idx, 1)
    f = ScalarField.from_expression(args.f, n=n, params=params)
    g = ScalarField.from_expression(args.g, n=n, params=params)
    box = _parse_box(args.box, n)
    points = qn.sample_box(n, count=args.samples, seed=args.seed, box=box)
    values = _pool_map(args.jobs, lambda x: jacobi_bracket(f, g, x), points)
    lo = min(values, default=0.0)
    hi = max(values, default=0.0)
    constant = float(values[0]) if values and hi - lo < 1e-12 else None

    table = None
    cf, cg = _coordinate_kind(args.f), _coordinate_kind(args.g)
    if cf is not None and cg is not None:
        i = cf[1] if cf[0] in "qp" else cg[1] if cg[0] in "qp" else 1
        j = cg[1] if cg[0] in "qp" else i
        i = i or 1
        j = j or i
        table = _darboux_table(n, i, j, points)

    payload = {
        "command": "bracket",
        "f": args.f,
        "g": args.g,
        "n": n,
        "samples": len(points),
        "seed": args.seed,
        "min": float(lo),
        "max": float(hi),
        "mean": float(sum(values) / len(values)) if values else 0.0,
        "constant": constant,
        "darboux_table": table,
    }
    _emit(args, payload)
    return 0


def cmd_reconstruct(args) -> int:
    spec, H, n = _resolve_hamiltonian(args)
    if args.S:
        # explicit --S wins over a registered family (see cmd_hj_check)
        params = _expr_params(spec, _float_params(_parse_params(args.params)))
        generating = hj.GeneratingFunction.from_expression(args.S, n, params=params)
        section = hj.SectionT.from_generating(generating)
        lam = None
    elif spec is not None:
        sol = spec.solutions[0]
        if sol.approach != "T":
            raise ConfigError(
                f"{spec.name} registers an action-dependent solution; "
                "reconstruction is leafwise on action-independent ones"
            )
        lam = _parse_floats(args.lam, "--lambda") or (0.0,) * sol.lam_dim
        if len(lam) != sol.lam_dim:
            raise ConfigError(f"--lambda needs {sol.lam_dim} numbers for {spec.name}")
        section = sol.section(lam)
    else:
        raise ConfigError("reconstruct needs a built-in --system or an --S expression")

    q0 = _parse_floats(args.q0, "--q0")
    if q0 is None:
        raise ConfigError("--q0 is required for reconstruct")
    if len(q0) != n:
        raise ConfigError(f"--q0 needs {n} numbers for n={n}")
    scheme = "adaptive" if args.adaptive else "rk4"
    traj = hj.reconstruct_T(
        section, H, t0=args.t0, q0=q0, t_end=args.t_end,
        scheme=scheme, h=args.dt, rtol=args.rtol, atol=args.atol,
    )
    fidelity = hj.lifted_fidelity(section, H, traj)
    payload = {
        "command": "reconstruct",
        "system": args.system,
        "solution": section.label,
        "hamiltonian": H.label,
        "n": n,
        "lambda": list(lam) if lam is not None else None,
        "scheme": scheme,
        "samples": len(traj),
        "endpoint": _endpoint_json(traj.endpoint()),
        "lifted_fidelity_sup": float(fidelity),
    }
    _emit(args, payload, artifact=_trajectory_csv(traj))
    return 0


_DISPATCH = {
    "simulate": cmd_simulate,
    "hj-check": cmd_hj_check,
    "quantity-check": cmd_quantity_check,
    "noether": cmd_noether,
    "bracket": cmd_bracket,
    "reconstruct": cmd_reconstruct,
}

_DEFAULTS = {
    "t_end": 1.0, "dt": 1e-3, "rtol": 1e-9, "atol": 1e-12, "adaptive": False,
    "seed": 0, "samples": 200, "t0": 0.0,
}


def _apply_defaults(args: argparse.Namespace) -> argparse.Namespace:
    for key, val in _DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    if args.tol is None:
        args.tol = _COMMAND_TOL.get(args.command, 1e-6)
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    return args


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args = _merge_config_file(args)
        args = _apply_defaults(args)
    except ConfigError as exc:
        print(f"cocontact: config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _DISPATCH[args.command](args)
    except expressions.EvalDomainError as exc:
        print(f"cocontact: evaluation error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, expressions.ExpressionError, DimensionMismatch,
            sy.UnknownSystemError, sy.UnknownParameterError,
            sy.MissingParameterError, sy.NonPositiveMassError) as exc:
        print(f"cocontact: config error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, sy.QuadratureError, sy.SelfTestError,
            ZeroDivisionError, OverflowError, ValueError, ArithmeticError) as exc:
        print(f"cocontact: runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

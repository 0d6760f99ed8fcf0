"""Command-line front end.

Subcommands::

    dtnstack transfer   --config cfg.json [--out DIR]
    dtnstack dtn        --config cfg.json [--out DIR]
    dtnstack certify    --config cfg.json [--out DIR] [--tol T] [--parallel N] [--cr-step H]
    dtnstack energy     --config cfg.json [--out DIR] [--tol T] [--quad-points N]
    dtnstack sweep      --config cfg.json [--out DIR] [--parallel N] [--cr-step H]
    dtnstack trajectory --config cfg.json [--out DIR] [--tol T]

Exit codes: 0 success, 1 usage or input error, 2 certification failure or
numerical anomaly. Every successful run writes a deterministic
``report.json`` (plus a ``run_meta.json`` timestamp sidecar, and
``sweep.csv`` for sweeps) into the output directory.

Config document::

    {"stack": <stack doc>, "kappa": [k1, k2],
     "omega_grid": {"re_min": .., "re_max": .., "re_steps": ..,
                    "im_min": .., "im_max": .., "im_steps": ..},
     "z0": <num, optional>, "z1": <num, optional>,
     "psi0": <4 [re,im] pairs, optional, energy only>,
     "trajectory": {"L0": <3×3 real>, "omega": [re, im],
                    "f": <6 [re,im] pairs>}  (optional, trajectory only)}

Single-point commands (transfer, dtn, energy) evaluate at the first grid
point ``(re_min, im_min)``; certify/sweep/trajectory iterate the full grid.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analyticity import (
    certify_point,
    herglotz_certify,
    omega_grid_points,
    phase_tensors,
    scalar_sample,
)
from .dtn import dtn, dtn_from_tensors, energy_balance, flux_form
from .exceptions import (
    NumericRangeError,
    SingularMatrixError,
    StackParseError,
    ToolkitError,
)
from .report import emit_report, make_report_body, write_sweep_csv
from .stack import StackSpec, parse_stack
from .transfer import transfer
from .tubular import (
    herglotz_along_trajectory,
    trajectory_coeffs,
    trajectory_point,
    trajectory_roundtrip,
)

__all__ = ["main", "RunConfig"]

#: commands whose frequencies must lie in the open upper half-plane
CERTIFICATION_COMMANDS = {"dtn", "certify", "energy", "sweep", "trajectory"}


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad usage; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail(key: str, msg: str):
    raise StackParseError(f"{key}: {msg}", key=key)


def _num(doc, key: str, path: str, default=None) -> float:
    if key not in doc:
        if default is not None:
            return default
        _fail(f"{path}.{key}", "missing required key")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        _fail(f"{path}.{key}", "must be a finite number")
    return float(v)


def _int(doc, key: str, path: str) -> int:
    if key not in doc:
        _fail(f"{path}.{key}", "missing required key")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}", "must be an integer")
    return v


def _cvec(obj, key: str, length: int) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        _fail(key, "expected [re, im] pairs")
    if arr.shape != (length, 2):
        _fail(key, f"expected {length} [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


@dataclass(frozen=True)
class RunConfig:
    """Validated run inputs shared by all commands."""

    command: str
    stack: StackSpec
    kappa: tuple[float, float]
    grid: tuple[complex, ...]
    z0: float
    z1: float
    psi0: np.ndarray
    f: np.ndarray
    traj_L0: np.ndarray
    traj_omega: complex
    echo: dict


def parse_run_config(doc: dict, command: str) -> RunConfig:
    """Validate the config document for one command.

    Raises :class:`StackParseError` naming the offending key on any schema
    violation, including a real-frequency grid for certification commands.
    """
    if not isinstance(doc, dict):
        _fail("config", "top level must be an object")
    stack = parse_stack(doc)

    kappa_doc = doc.get("kappa", [0.0, 0.0])
    try:
        kappa_arr = np.asarray(kappa_doc, dtype=float).reshape(2)
    except (TypeError, ValueError):
        _fail("kappa", "expected two real numbers")
    if not np.all(np.isfinite(kappa_arr)):
        _fail("kappa", "entries must be finite")

    if "omega_grid" not in doc:
        _fail("omega_grid", "missing required key")
    g = doc["omega_grid"]
    if not isinstance(g, dict):
        _fail("omega_grid", "expected an object")
    re_min = _num(g, "re_min", "omega_grid")
    re_max = _num(g, "re_max", "omega_grid")
    im_min = _num(g, "im_min", "omega_grid")
    im_max = _num(g, "im_max", "omega_grid")
    re_steps = _int(g, "re_steps", "omega_grid")
    im_steps = _int(g, "im_steps", "omega_grid")
    if re_steps < 1:
        _fail("omega_grid.re_steps", "must be >= 1")
    if im_steps < 1:
        _fail("omega_grid.im_steps", "must be >= 1")
    if re_max < re_min:
        _fail("omega_grid.re_max", "must be >= re_min")
    if im_max < im_min:
        _fail("omega_grid.im_max", "must be >= im_min")
    if command in CERTIFICATION_COMMANDS and im_min <= 0.0:
        _fail("omega_grid.im_min", "must be > 0")
    grid = tuple(omega_grid_points(re_min, re_max, re_steps,
                                   im_min, im_max, im_steps))

    z0 = _num(doc, "z0", "config", default=stack.z_min)
    z1 = _num(doc, "z1", "config", default=stack.z_max)
    if not (stack.z_min <= z0 <= stack.z_max):
        _fail("z0", f"must lie inside the stack [{stack.z_min}, {stack.z_max}]")
    if not (stack.z_min <= z1 <= stack.z_max):
        _fail("z1", f"must lie inside the stack [{stack.z_min}, {stack.z_max}]")
    if command in CERTIFICATION_COMMANDS and not z0 < z1:
        _fail("z1", "must be > z0")

    psi0 = (_cvec(doc["psi0"], "psi0", 4) if "psi0" in doc
            else np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))

    traj = doc.get("trajectory", {})
    if not isinstance(traj, dict):
        _fail("trajectory", "expected an object")
    f = (_cvec(traj["f"], "trajectory.f", 6) if "f" in traj
         else np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], dtype=complex))
    if "L0" in traj:
        try:
            L0 = np.asarray(traj["L0"], dtype=float)
        except (TypeError, ValueError):
            _fail("trajectory.L0", "expected a real 3×3 matrix")
        if L0.shape != (3, 3):
            _fail("trajectory.L0", f"expected shape (3, 3), got {L0.shape}")
        if not np.allclose(L0, L0.T, atol=1e-12):
            _fail("trajectory.L0", "must be symmetric")
    else:
        L0 = np.zeros((3, 3))
    if "omega" in traj:
        w = _cvec([traj["omega"]], "trajectory.omega", 1)[0]
        if w.imag <= 0.0:
            _fail("trajectory.omega", "must have positive imaginary part")
        traj_omega = complex(w)
    else:
        traj_omega = grid[0]

    return RunConfig(command, stack, (float(kappa_arr[0]), float(kappa_arr[1])),
                     grid, z0, z1, psi0, f, L0, traj_omega, doc)


def _cjson(M) -> list:
    """Complex array → nested [re, im] pairs."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in A]
    return [_cjson(row) for row in A]


def _certificate_json(cert) -> dict:
    wd = cert.well_defined
    return {
        "passive": cert.passive,
        "layer_passivity": [{"ok": p.ok, "min_eig_eps": p.min_eig_eps,
                             "min_eig_mu": p.min_eig_mu}
                            for p in cert.layer_passivity],
        "flux_positive": wd.flux_positive,
        "flux_min_eig": wd.flux_min_eig,
        "blocks_invertible": list(wd.blocks_invertible),
        "condition_T12": wd.condition_T12,
        "transfer_norm": wd.transfer_norm,
        "flux_resolution": wd.flux_resolution,
        "im_min_eig": cert.im_min_eig,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_transfer(cfg: RunConfig, args) -> tuple[dict, list, int]:
    w = cfg.grid[0]
    T = transfer(cfg.stack, cfg.kappa, w, cfg.z0, cfg.z1)
    F = flux_form(T)
    results = {
        "omega": w, "kappa": list(cfg.kappa), "z0": cfg.z0, "z1": cfg.z1,
        "transfer_matrix": _cjson(T.matrix),
        "flux_min_eig": F.min_eig,
    }
    return results, [], 0


def _cmd_dtn(cfg: RunConfig, args) -> tuple[dict, list, int]:
    w = cfg.grid[0]
    L, cert = dtn(cfg.stack, cfg.kappa, w, cfg.z0, cfg.z1)
    results = {
        "omega": w, "kappa": list(cfg.kappa), "z0": cfg.z0, "z1": cfg.z1,
        "lambda": _cjson(L.matrix),
        "tangential_compression": _cjson(L.tangential_compression),
        "certificate": _certificate_json(cert),
    }
    return results, list(cert.anomalies), 0 if cert.ok else 2


def _grid_certify(cfg: RunConfig, args, cr_tol: float):
    if args.parallel > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as ex:
            return herglotz_certify(cfg.stack, cfg.kappa, cfg.grid, cfg.z0,
                                    cfg.z1, cr_tol=cr_tol, map_fn=ex.map,
                                    step=args.cr_step)
    return herglotz_certify(cfg.stack, cfg.kappa, cfg.grid, cfg.z0, cfg.z1,
                            cr_tol=cr_tol, step=args.cr_step)


def _cmd_certify(cfg: RunConfig, args) -> tuple[dict, list, int]:
    cr_tol = args.tol if args.tol is not None else 1e-5
    hc = _grid_certify(cfg, args, cr_tol)
    results = {
        "grid": [complex(w) for w in hc.grid],
        "min_im_eig": hc.min_im_eig,
        "worst_cr": hc.worst_cr,
        "cr_tol": cr_tol,
        "cr_step": args.cr_step,
        "passed": hc.passed,
        "points": [{"omega": p.omega, "min_im_eig": p.min_im_eig,
                    "worst_cr": p.worst_cr, "condition_T12": p.condition_T12}
                   for p in hc.points],
    }
    return results, list(hc.anomalies), 0 if hc.passed else 2


def _cmd_energy(cfg: RunConfig, args) -> tuple[dict, list, int]:
    tol = args.tol if args.tol is not None else 1e-6
    rep = energy_balance(cfg.stack, cfg.psi0, cfg.kappa, cfg.grid[0],
                         cfg.z0, cfg.z1, n_points=args.quad_points)
    passed = (rep.relative_gap <= tol and rep.boundary_flux >= 0.0
              and rep.absorption_integral >= 0.0)
    anomalies = []
    if rep.boundary_flux < 0.0 or rep.absorption_integral < 0.0:
        anomalies.append(
            f"energy sides must be nonnegative for passive input "
            f"(boundary {rep.boundary_flux:.3e}, absorbed "
            f"{rep.absorption_integral:.3e})")
    results = {
        "omega": cfg.grid[0], "kappa": list(cfg.kappa),
        "z0": cfg.z0, "z1": cfg.z1,
        "boundary_flux": rep.boundary_flux,
        "absorption_integral": rep.absorption_integral,
        "relative_gap": rep.relative_gap,
        "n_points": rep.n_points,
        "tolerance": tol,
        "passed": passed,
    }
    return results, anomalies, 0 if passed else 2


def _cmd_sweep(cfg: RunConfig, args) -> tuple[dict, list, int]:
    cr_tol = args.tol if args.tol is not None else 1e-5
    hc = _grid_certify(cfg, args, cr_tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = write_sweep_csv(out / "sweep.csv", hc.points)
    results = {
        "n_points": len(hc.points),
        "csv": csv_path.name,
        "min_im_eig": hc.min_im_eig,
        "worst_cr": hc.worst_cr,
        "cr_tol": cr_tol,
        "cr_step": args.cr_step,
    }
    return results, list(hc.anomalies), 0 if not hc.anomalies else 2


def _cmd_trajectory(cfg: RunConfig, args) -> tuple[dict, list, int]:
    cr_tol = args.tol if args.tol is not None else 1e-5
    labels, phase_of_layer, Z = phase_tensors(cfg.stack, cfg.traj_omega)
    P = len(labels)
    thicknesses = [ly.thickness for ly in cfg.stack.layers]

    def builder(tensors):
        layer_tensors = [(thicknesses[j], tensors[phase_of_layer[j]],
                          tensors[P + phase_of_layer[j]])
                         for j in range(len(thicknesses))]
        return dtn_from_tensors(layer_tensors, cfg.kappa, cfg.stack.c,
                                cfg.stack.z_min)[0]

    roundtrip = trajectory_roundtrip(cfg.traj_L0, Z)
    spec = trajectory_coeffs(cfg.traj_L0, Z)
    cert = herglotz_along_trajectory(builder, spec, cfg.f, cfg.grid,
                                     cr_tol=cr_tol)
    sample_orig = scalar_sample(builder(Z), cfg.f)
    sample_back = scalar_sample(builder(trajectory_point(spec, 1j)), cfg.f)
    sample_dev = abs(sample_back - sample_orig) / max(abs(sample_orig), 1.0)
    passed = cert.passed and roundtrip <= 1e-12
    results = {
        "phases": labels,
        "omega": cfg.traj_omega,
        "roundtrip_deviation": roundtrip,
        "sample_roundtrip_deviation": sample_dev,
        "s_grid": [complex(s) for s in cert.grid],
        "h_values": [complex(v) for v in cert.values],
        "min_im_h": cert.min_im,
        "worst_cr": cert.worst_cr,
        "cr_tol": cr_tol,
        "passed": passed,
    }
    return results, [], 0 if passed else 2


_COMMANDS = {
    "transfer": _cmd_transfer,
    "dtn": _cmd_dtn,
    "certify": _cmd_certify,
    "energy": _cmd_energy,
    "sweep": _cmd_sweep,
    "trajectory": _cmd_trajectory,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="dtnstack",
                     description="Transfer matrices, boundary operators, and "
                                 "passivity certification for layered media.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "transfer": "compute a transfer matrix at one frequency",
        "dtn": "compute and certify the boundary operator at one frequency",
        "certify": "sweep a frequency grid and certify positivity/analyticity",
        "energy": "check the energy-conservation identity for one solution",
        "sweep": "sweep a frequency grid and write per-point data as CSV",
        "trajectory": "certify scalar samples along a material trajectory",
    }
    for name, h in helps.items():
        p = sub.add_parser(name, help=h)
        p.add_argument("--config", required=True, help="path to the run config JSON")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--tol", type=float, default=None,
                       help="certification tolerance (CR residual or energy gap)")
        p.add_argument("--quad-points", type=int, default=2000, dest="quad_points",
                       help="quadrature point count for energy checks")
        p.add_argument("--parallel", type=int, default=1,
                       help="process count for grid sweeps")
        p.add_argument("--cr-step", type=float, default=None, dest="cr_step",
                       help="CR stencil width (default: 1e-4 scaled by |omega|)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            print(f"dtnstack: cannot read config: {exc}", file=sys.stderr)
            return 1
        except json.JSONDecodeError as exc:
            print(f"dtnstack: config is not valid JSON: {exc}", file=sys.stderr)
            return 1
        cfg = parse_run_config(doc, args.command)
        if args.quad_points < 1:
            print("dtnstack: --quad-points must be >= 1", file=sys.stderr)
            return 1
        if args.parallel < 1:
            print("dtnstack: --parallel must be >= 1", file=sys.stderr)
            return 1
        results, anomalies, code = _COMMANDS[args.command](cfg, args)
    except (SingularMatrixError, NumericRangeError) as exc:
        print(f"dtnstack: numerical anomaly: {exc}", file=sys.stderr)
        return 2
    except ToolkitError as exc:
        print(f"dtnstack: {exc}", file=sys.stderr)
        return 1
    body = make_report_body(args.command, cfg.echo, results, anomalies)
    try:
        path = emit_report(args.out, body)
    except OSError as exc:
        print(f"dtnstack: cannot write report: {exc}", file=sys.stderr)
        return 1
    status = "PASS" if code == 0 else "FAIL"
    print(f"[{args.command}] {status} report={path}")
    for a in anomalies:
        print(f"[{args.command}] anomaly: {a}")
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 a check failed (or golden mismatch, or step
collapse), 2 a coefficient had no s -> infinity limit, 3 no usable matrix
model could be drawn.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import grammar
from .expoly import NonConvergent
from .series import bp_flow_series, hnw_series, omega_series, omega_u_limit, omega_u_series

EXIT_OK, EXIT_FAIL, EXIT_NONCONVERGENT, EXIT_DEGENERATE = 0, 1, 2, 3

DEFAULTS = {
    "max_order": 6,
    "dim": 8,
    "seed": 1,
    "kappa_list": [0.2, 0.1, 0.05, 0.025],
    "s_max": 6.0,
    "step": 1e-3,
}
SERIES_KINDS = ("omega", "Omega", "Omega-inf", "h", "hU")


# -- series -----------------------------------------------------------------
def series_files(what: str, max_order: int, field: str = "E") -> dict[str, object]:
    """Map file stem -> OperatorExpr for one family of series."""
    out = {}
    if what == "omega":
        tab = omega_series(max_order, field)
        out = {f"omega_{n}": tab[n] for n in tab}
    elif what in ("Omega", "Omega-inf"):
        top = max_order if max_order % 2 else max_order - 1
        if top < 1:
            return {}
        tab = omega_u_series(top, field) if what == "Omega" else omega_u_limit(top, field)
        stem = "Omega" if what == "Omega" else "Omega_inf"
        out = {f"{stem}_{n}": tab[n] for n in tab if n % 2}
    elif what == "h":
        top = max_order - max_order % 2
        if top >= 2:
            tab = hnw_series(top, field)
            out = {f"h_{n}": tab[n] for n in tab if n % 2 == 0}
    elif what == "hU":
        if max_order >= 2:
            tab = bp_flow_series(max_order)
            out = {f"hU_{n}": tab[n] for n in tab if n % 2 == 0}
    else:
        raise ValueError(f"unknown series {what!r}")
    return out


def _file_text(expr, fmt):
    if fmt == "json":
        return json.dumps(grammar.to_json(expr), indent=2, sort_keys=False) + "\n"
    return grammar.render(expr) + "\n"


def cmd_series(cfg) -> int:
    kinds = SERIES_KINDS if cfg.what == "all" else (cfg.what,)
    ext = ".json" if cfg.output_format == "json" else ".txt"
    try:
        files = {}
        for kind in kinds:
            files.update(series_files(kind, cfg.max_order, cfg.field))
    except NonConvergent as exc:
        print(f"non-convergent coefficient: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT

    status = EXIT_OK
    if cfg.golden_dir is not None:
        gdir = Path(cfg.golden_dir)
        if cfg.bless:
            gdir.mkdir(parents=True, exist_ok=True)
        for stem, expr in files.items():
            path = gdir / (stem + ext)
            text = _file_text(expr, cfg.output_format)
            if cfg.bless:
                path.write_text(text)
                print(f"blessed {path}")
            elif not path.exists():
                print(f"missing golden file {path}")
                status = EXIT_FAIL
            elif path.read_text() != text:
                print(f"MISMATCH {path}")
                status = EXIT_FAIL
            else:
                print(f"ok {path}")
        return status

    out = Path(cfg.output_path or ".")
    out.mkdir(parents=True, exist_ok=True)
    for stem, expr in files.items():
        (out / (stem + ext)).write_text(_file_text(expr, cfg.output_format))
        print(f"{stem}: {grammar.render(expr)}")
    return status


# -- reports ----------------------------------------------------------------
def make_report(check, values, passed, tolerance, dim=None, seed=None, kappa=None) -> dict:
    return {
        "check": check,
        "dim": dim,
        "seed": seed,
        "kappa": kappa,
        "values": values,
        "pass": bool(passed),
        "tolerance": tolerance,
    }


def _emit_report(report: dict, cfg, default_name: str):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.output_path == "-":
        sys.stdout.write(text)
        return
    path = Path(cfg.output_path or default_name)
    if path.is_dir():
        path = path / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"report written to {path}")


def cmd_verify_symbolic(cfg) -> int:
    from .identities import run_all

    perturb = Fraction(cfg.inject_perturbation) if cfg.inject_perturbation else Fraction(0)
    try:
        verdicts = run_all(cfg.only, cfg.n, perturb)
    except NonConvergent as exc:
        print(f"non-convergent coefficient: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except KeyError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    values = {}
    for v in verdicts:
        entry = {"status": v.status}
        if v.witness is not None:
            entry["residual"] = grammar.render(v.witness)
        if v.note:
            entry["note"] = v.note
        values[v.name] = entry
        line = f"{v.name:32s} {v.status.upper()}"
        if v.witness is not None:
            line += f"  residual: {grammar.render(v.witness)}"
        print(line)
    passed = all(v.holds for v in verdicts)
    _emit_report(make_report("verify-symbolic", values, passed, 0), cfg, "verify-symbolic.json")
    return EXIT_OK if passed else EXIT_FAIL


def numeric_checks(dim: int, seed: int, kappa: float, kappa_list, special_class: bool = False,
                   sweeps: bool = True) -> tuple[dict, bool]:
    """All matrix-level checks; returns (values, passed)."""
    from . import bridge
    from . import matrixlab as ml

    model = ml.build_model(dim, seed, kappa, special_class=special_class)
    h, b = model.h, model.beta
    eye = np.eye(dim)
    vals: dict[str, object] = {}
    ok = True

    def record(name, value, tol):
        nonlocal ok
        vals[name] = value
        good = value is not None and value <= tol
        ok = ok and good
        return good

    z = ml.exact_z(model, 1.0)
    lam = ml.sign_operator(h)
    record("z_involution", ml.norm(z @ z - eye), 1e-10)
    record("z_hermitian", ml.norm(z - z.conj().T), 1e-10)
    record("lambda_involution", ml.norm(lam @ lam - eye), 1e-10)
    record("z_limit", ml.norm(ml.exact_z(model, 8.0) - lam), 1e-6)
    t = ml.eriksen_t(model)
    record("t_unitary", ml.norm(t @ t.conj().T - eye), 1e-10)
    record("t_vs_ue", ml.norm(t - ml.eriksen_ue(model)), 1e-10)
    record("beta_t_intertwines", ml.norm(b @ t - t @ lam), 1e-10)
    hnw = ml.nw_exact(model)
    record("nw_commutator", ml.norm(b @ hnw - hnw @ b), 1e-10)
    record("nw_energy_separation", ml.norm(hnw - b @ ml.hermitian_sqrt(hnw @ hnw)), 1e-10)
    record("nw_isospectral", float(np.max(np.abs(np.linalg.eigvalsh(hnw) - np.linalg.eigvalsh(h)))), 1e-10)

    res = [ml.riccati_residual(model, 1.0, step) for step in (2e-4, 1e-4)]
    record("riccati_residual", res[1], 1e-6)
    if min(res) > 1e-13:
        vals["riccati_stencil_order"] = math.log2(res[0] / res[1])
        ok = ok and abs(vals["riccati_stencil_order"] - 2) <= 0.5
    else:
        vals["riccati_stencil_order"] = None  # residual at rounding level

    if special_class:
        try:
            worst = 0.0
            for s in (0.1, 0.5, 1.0, 2.0):
                worst = max(worst, ml.norm(ml.special_class_z0(model, s, check=False) - ml.exact_z(model, s)))
            record("special_class_z0_vs_z", worst, 1e-8)
            record("special_class_z0_limit", ml.norm(ml.special_class_z0(model, 8.0, check=False) - lam), 1e-6)
        except ml.BranchFailure as exc:
            vals["special_class_branch_failure"] = str(exc)
            ok = False
        record("special_class_nw", ml.norm(hnw - b @ ml.hermitian_sqrt(h @ h)), 1e-10)

    if sweeps:
        sweep = bridge.convergence_sweep(dim, seed, kappa_list)
        vals["truncation_errors"] = {str(n): e for n, e in sweep["errors"].items()}
        for n, expected in ((2, 4), (4, 6), (6, 8)):
            slope = sweep["slopes"][n]
            vals[f"slope_{n}"] = slope
            ok = ok and abs(slope - expected) <= 0.5
        om = bridge.omega_u_sweep(dim, seed, kappa_list)
        vals["omega_u_off_block"] = om["off_block"]
        vals["omega_u_slope"] = om["slope"]
        ok = ok and abs(om["slope"] - 7) <= 0.5
    return vals, ok


def cmd_verify_numeric(cfg) -> int:
    from .matrixlab import Degenerate

    kappa = cfg.kappa if cfg.kappa is not None else cfg.kappa_list[0]
    try:
        vals, ok = numeric_checks(cfg.dim, cfg.seed, kappa, cfg.kappa_list, cfg.special_class,
                                  sweeps=not cfg.no_sweeps)
    except Degenerate as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DEGENERATE
    for k, v in vals.items():
        print(f"{k:28s} {v}")
    print("PASS" if ok else "FAIL")
    report = make_report("verify-numeric", vals, ok, {"identity": 1e-10, "limit": 1e-6, "slope": 0.5},
                         cfg.dim, cfg.seed, kappa)
    _emit_report(report, cfg, "verify-numeric.json")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_flow(cfg) -> int:
    from . import matrixlab as ml
    from .flow import StepCollapse, double_bracket_flow, flow_representation_check

    kappa = cfg.kappa if cfg.kappa is not None else cfg.kappa_list[0]
    try:
        model = ml.build_model(cfg.dim, cfg.seed, kappa)
        traj = double_bracket_flow(model, cfg.s_max, cfg.step)
    except ml.Degenerate as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DEGENERATE
    except StepCollapse as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    out = Path(cfg.output_path or ".")
    out.mkdir(parents=True, exist_ok=True)
    ev0 = np.linalg.eigvalsh(model.h)
    worst_rep, worst_iso = 0.0, 0.0
    guard = ml.Z_GUARD / (2 * np.linalg.norm(model.h, 2))
    with open(out / "flow.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "phi", "off_block_norm", "representation_residual"])
        for p in traj.samples:
            rep = ""
            if p.s <= guard:
                r = flow_representation_check(model, traj, p.s)["representation"]
                worst_rep = max(worst_rep, r)
                rep = repr(r)
            worst_iso = max(worst_iso, float(np.max(np.abs(np.linalg.eigvalsh(p.h) - ev0))))
            w.writerow([repr(round(p.s, 12)), repr(p.phi), repr(p.off_block), rep])
    vals = {
        "phi_initial": traj.samples[0].phi,
        "phi_final": traj.final.phi,
        "phi_monotone": traj.phi_monotone(),
        "final_commutator": traj.final.off_block,
        "max_representation_residual": worst_rep,
        "max_eigenvalue_drift": worst_iso,
        "step_halvings": traj.halvings,
        "backend": traj.backend,
        "s_max": cfg.s_max,
        "step": cfg.step,
    }
    ok = (vals["phi_monotone"] and worst_iso <= 1e-8 and worst_rep <= 1e-6
          and vals["final_commutator"] <= 1e-6)
    report = make_report("flow", vals, ok, {"commutator": 1e-6, "representation": 1e-6, "spectrum": 1e-8},
                         cfg.dim, cfg.seed, kappa)
    (out / "flow.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"phi {vals['phi_initial']:.6e} -> {vals['phi_final']:.6e}, |[b,H]| = {vals['final_commutator']:.3e}, "
          f"max |H - V+HV| = {worst_rep:.3e}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


# -- argument parsing ---------------------------------------------------------
def _kappa_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; argparse's default 2 would collide with EXIT_NONCONVERGENT
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-order", type=int, default=DEFAULTS["max_order"])
    common.add_argument("--field", choices=("E", "F"), default="E")
    common.add_argument("--dim", type=int, default=DEFAULTS["dim"])
    common.add_argument("--seed", type=int, default=None, help="default 1, or $DIRACFLOW_SEED")
    common.add_argument("--kappa-list", type=_kappa_list, default=list(DEFAULTS["kappa_list"]))
    common.add_argument("--kappa", type=float, default=None, help="coupling for single-model checks")
    common.add_argument("--s-max", type=float, default=DEFAULTS["s_max"])
    common.add_argument("--step", type=float, default=DEFAULTS["step"])
    common.add_argument("--output-format", choices=("text", "json"), default="text")
    common.add_argument("--output-path", default=None)

    p = _Parser(prog="diracflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("series", parents=[common], help="write series coefficients in canonical form")
    s.add_argument("--what", choices=SERIES_KINDS + ("all",), default="all")
    s.add_argument("--golden-dir", default=None, help="compare against (or with --bless, rewrite) golden files")
    s.add_argument("--bless", action="store_true")
    v = sub.add_parser("verify-symbolic", parents=[common], help="exact identity suite")
    v.add_argument("--only", default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--inject-perturbation", default=None, metavar="RATIONAL",
                   help="test mode: shift one sixth-order coefficient before the discrepancy check")
    n = sub.add_parser("verify-numeric", parents=[common], help="matrix-model checks and convergence sweeps")
    n.add_argument("--special-class", action="store_true")
    n.add_argument("--no-sweeps", action="store_true", help="skip the convergence sweeps")
    sub.add_parser("flow", parents=[common], help="integrate the double-bracket flow")
    return p


def resolve_config(argv=None):
    cfg = build_parser().parse_args(argv)
    if cfg.seed is None:
        env = os.environ.get("DIRACFLOW_SEED")
        cfg.seed = int(env) if env else DEFAULTS["seed"]
    return cfg


COMMANDS = {
    "series": cmd_series,
    "verify-symbolic": cmd_verify_symbolic,
    "verify-numeric": cmd_verify_numeric,
    "flow": cmd_flow,
}


def main(argv=None) -> int:
    cfg = resolve_config(argv)
    try:
        return COMMANDS[cfg.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

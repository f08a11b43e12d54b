"""Command-line entry point: ``mixedflow {verify,solve,depend,stability,constants}``.

Exit codes: 0 pass, 1 assertion failure, 2 config error, 3 numeric error.
"""

import argparse
import os
import sys

from . import bounds, experiments
from .conductivity import Interpolated, Piecewise, Rational, perturbation_constants
from .config import load_config
from .errors import ConfigError, ConvergenceError, DomainError, StepRejected
from .solver import Term, discrete_norm, fmt, pbar, snapshot_text, solve_ibvp

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _out_path(out, name):
    if out is None:
        return None
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, name)


def _write(out, name, text):
    path = _out_path(out, name)
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def constants_table(rc):
    """Rows ``(name, value)`` of every constant defined for the configured model."""
    m = rc.model
    sc = m.sandwich_constants()
    rows = [("beta1", m.beta1), ("beta2", m.beta2), ("xi_c", m.xi_c)]
    if isinstance(m, Piecewise):
        rows += [("c1", m.c1), ("c2", m.c2), ("Z1", m.Z1), ("Z2", m.Z2), ("M1", m.M1), ("M2", m.M2)]
    if isinstance(m, Rational):
        rows += [("a", m.a), ("b", m.b), ("c", m.c)]
    if isinstance(m, Interpolated):
        rows.append(("xi0", m.coeffs.xi0))
    if sc.d1 is not None:
        rows.append(("d1", sc.d1))
    rows += [("d2", sc.d2), ("d3", sc.d3), ("d4", sc.d4), ("d5", sc.d5), ("Kstar_at_xi_c", sc.kstar_at_xic)]
    if isinstance(m, Interpolated) and rc.second_coefficients is not None:
        d6, d7 = perturbation_constants(m.coeffs, rc.second_coefficients, m.profile)
        rows += [("d6", d6), ("d7", d7)]
    return rows


def cmd_constants(rc, args):
    text = "".join(f"{k:<14} {fmt(v)}\n" for k, v in constants_table(rc))
    sys.stdout.write(text)
    _write(args.out, "constants.txt", text)
    return EXIT_PASS


def cmd_verify(rc, args):
    v = rc.verify
    reports = bounds.verification_suite(
        rc.model,
        seed=args.seed,
        n_grid=v["n_grid"],
        n_pairs=v["n_pairs"],
        n_adversarial=v["n_adversarial"],
        d5_scale=v["d5_scale"],
        second=rc.second_coefficients,
    )
    text = bounds.reports_to_text(reports)
    sys.stdout.write(text)
    _write(args.out, "reports.txt", text)
    _write(args.out, "reports.jsonl", bounds.reports_to_jsonl(reports))
    failed = [r for r in reports if not r.passed]
    if failed:
        sys.stdout.write(f"first failing check: {failed[0].name}\n")
        return EXIT_FAIL
    return EXIT_PASS


def cmd_solve(rc, args):
    ex = rc.experiment
    kind = ex["kind"]
    snaps = rc.output["snapshots"]
    p0 = experiments.make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    report = None
    if kind == "energy_decay":
        report = experiments.run_energy_decay(
            rc.model, p0, rc.profile, ex["T"], ex["tol"] or 1e-3, rc.solver, snapshots=snaps
        )
    elif kind == "gradient_decay":
        report = experiments.run_gradient_decay(
            rc.model, p0, rc.profile, ex["T"], ex["tol"], ex["psi_factor"], rc.solver, snapshots=snaps
        )
    elif kind == "uniform_gronwall":
        report = experiments.run_uniform_gronwall(
            rc.model, rc.grid, rc.profile, tuple(ex["factors"]), ex["t_eval"], ex["teeth"], ex["max_ratio"], rc.solver
        )
    res = report.result if report is not None else None
    if res is None and kind != "uniform_gronwall":
        res = solve_ibvp(p0, rc.profile, rc.model, ex["T"], rc.solver, snapshots=snaps)
    if res is not None:
        _write(args.out, "diagnostics.csv", res.series.to_csv())
        for i, snap in enumerate(res.snapshots):
            _write(args.out, f"snapshot_{i:04d}.txt", snapshot_text(snap))
        s = res.series
        sys.stdout.write(
            f"t={fmt(res.field.t)} steps={res.n_steps}\n"
            f"final ||pbar|| = {fmt(discrete_norm(pbar(res.field, rc.profile), rc.grid))}\n"
            f"final grad_norm = {fmt(s.grad_norm[-1])}\n"
            f"final energy = {fmt(s.energy[-1])}\n"
        )
    if report is None:
        return EXIT_PASS
    for line in report.lines():
        sys.stdout.write(line + "\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _sweep(rc, args, runner, name):
    ex = rc.experiment
    p0 = experiments.make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    kwargs = dict(ladder=tuple(ex["ladder"]), T=ex["T"], config=rc.solver, workers=ex["workers"])
    if runner is experiments.run_continuous_dependence:
        if ex["bump"] is not None:
            kwargs["bump"] = Term(**ex["bump"])
        kwargs["t_start"] = ex["t_start"]
    else:
        kwargs["direction"] = ex["direction"]
    rep = runner(rc.model, p0, rc.profile, **kwargs)
    _write(args.out, f"{name}.csv", rep.to_csv())
    for line in rep.lines():
        sys.stdout.write(line + "\n")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_depend(rc, args):
    return _sweep(rc, args, experiments.run_continuous_dependence, "dependence")


def cmd_stability(rc, args):
    return _sweep(rc, args, experiments.run_structural_stability, "stability")


COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "depend": cmd_depend,
    "stability": cmd_stability,
    "constants": cmd_constants,
}


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="mixedflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        sp.add_argument("--config", required=True, help="YAML file, or preset:NAME for a bundled preset")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=_seed, default=0, help="random seed (u64)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](rc, args)
    except StepRejected as exc:
        sys.stderr.write(f"step rejected: {exc}\n")
        return EXIT_NUMERIC
    except (ConvergenceError, ArithmeticError, FloatingPointError) as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except DomainError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

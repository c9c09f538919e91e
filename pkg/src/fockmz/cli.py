"""Command-line driver.

Exit codes: 0 all checks passed, 1 a numeric check failed (the report is still
written), 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError
from .fock import tail_energy_bound, tail_energy_exact
from .gabor import gabor_fock_crosscheck
from .pointsets import (
    FamilySpec,
    LatticeSpec,
    Mode,
    build_family,
    cardinality_report,
    local_count_diagnostics,
)
from .reports import render_report
from .specfun import asymptotic_gap_check, regularized_gamma
from .spectral import QF_RTOL, interp_report, mz_report, square_case_scan

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULTS = {
    Mode.SAMPLING: {"alpha": 0.95, "tau": 6.0},
    Mode.INTERPOLATION: {"alpha": 1.1, "tau": 2.0},
}
DEFAULT_DEGREES = (25, 50, 100, 200)
GAMMA_SWEEP = (100, 400, 1600, 10000)
GAMMA_TAUS = (0.0, 1.0, 2.0, 3.0)


class UsageError(Exception):
    pass


def _degrees(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid degree list {text!r}")
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"degrees must be nonnegative integers, got {text!r}")
    return values


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockmz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fockmz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output(p, fmt="csv"):
        p.add_argument("--out", type=Path)
        p.add_argument("--format", choices=("csv", "json"), default=fmt)

    def family(p, mode=None):
        p.add_argument("--family", type=Path, help="FamilySpec JSON document")
        p.add_argument("--alpha", type=_finite)
        if mode is None:
            p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SAMPLING.value)
        else:
            p.set_defaults(mode=mode.value)
        p.add_argument("--tau", type=_finite)
        p.add_argument("--degrees", type=_degrees)

    p = sub.add_parser("gamma-check", help="regularized incomplete gamma values and asymptotics")
    p.add_argument("--a", type=_finite)
    p.add_argument("--x", type=_finite)
    p.add_argument("--tau", type=_finite)
    p.add_argument("--degrees", type=_degrees, help="orders a for the asymptotic sweep")
    p.add_argument("--tol", type=_finite, default=1e-13)
    output(p)

    p = sub.add_parser("family-build", help="write a FamilySpec document")
    family(p)
    p.add_argument("--epsilon", type=_finite, default=0.1)
    p.add_argument("--rho", type=_finite, default=1.0)
    p.add_argument("--layers-out", type=Path, help="also write the point sets as JSON")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("mz-report", help="MZ frame bounds per degree")
    family(p, Mode.SAMPLING)
    p.add_argument("--tol", type=_finite, default=QF_RTOL)
    output(p)

    p = sub.add_parser("interp-report", help="Gram matrix bounds per degree")
    family(p, Mode.INTERPOLATION)
    output(p)

    p = sub.add_parser("gabor-crosscheck", help="quadrature vs closed-form V_n frame matrices")
    family(p, Mode.SAMPLING)
    p.add_argument("--tol", type=_finite, default=1e-6)
    output(p, "json")

    p = sub.add_parser("tail-energy", help="exact tail energy against its bound")
    p.add_argument("--degrees", type=_degrees)
    p.add_argument("--rho", type=_finite)
    p.add_argument("--tau", type=_finite, help="use pi rho^2 = n + sqrt(n) tau when --rho is absent")
    p.add_argument("--tol", type=_finite, default=1e-12)
    output(p)

    p = sub.add_parser("degenerate-scan", help="frame bounds with exactly n+1 nearest points")
    p.add_argument("--alpha", type=_finite, default=0.95)
    p.add_argument("--degrees", type=_degrees, default=(10, 20, 40, 80))
    output(p)
    return parser


def _resolve_family(args) -> FamilySpec:
    if args.family is not None:
        if any(getattr(args, k) is not None for k in ("alpha", "tau", "degrees")):
            raise UsageError("--family cannot be combined with --alpha/--tau/--degrees")
        try:
            text = args.family.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read family document: {exc}")
        try:
            spec = FamilySpec.loads(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"invalid family document {args.family}: {exc}")
        if spec.mode.value != args.mode:
            raise UsageError(f"family is in {spec.mode.value} mode, command needs {args.mode}")
        return spec
    mode = Mode(args.mode)
    alpha = args.alpha if args.alpha is not None else DEFAULTS[mode]["alpha"]
    tau = args.tau if args.tau is not None else DEFAULTS[mode]["tau"]
    degrees = args.degrees if args.degrees is not None else DEFAULT_DEGREES
    return FamilySpec(LatticeSpec.square(alpha), mode, tau, degrees)


def _emit(rows, args, config: dict) -> None:
    text = render_report(rows, args.format)
    if args.out is None:
        sys.stdout.write(text)
        return
    try:
        args.out.write_text(text, encoding="utf-8")
        meta = {"version": __version__, "config": config}
        meta_path = args.out.with_name(args.out.name + ".meta.json")
        meta_path.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write report: {exc}")


def _config(args, **extra) -> dict:
    cfg = {}
    for k, v in vars(args).items():
        if k in ("out", "layers_out"):
            continue
        cfg[k] = str(v) if isinstance(v, Path) else (list(v) if isinstance(v, tuple) else v)
    cfg.update(extra)
    return cfg


def cmd_gamma_check(args) -> int:
    if (args.a is None) != (args.x is None):
        raise UsageError("--a and --x must be given together")
    if args.a is not None:
        if args.a <= 0 or args.x < 0:
            raise UsageError("need --a > 0 and --x >= 0")
        v = regularized_gamma(args.a, args.x)
        print(f"p = {v.p!r}")
        print(f"q = {v.q!r}")
        print(f"method = {v.method.value}")
        ok = abs(v.p + v.q - 1.0) <= args.tol
        rows = [{"a": args.a, "x": args.x, "p": v.p, "q": v.q, "method": v.method.value}]
        if args.out is not None:
            _emit(rows, args, _config(args))
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    orders = args.degrees if args.degrees is not None else GAMMA_SWEEP
    taus = (args.tau,) if args.tau is not None else GAMMA_TAUS
    rows = []
    for a in orders:
        for tau in taus:
            if a < 10 or a + tau * math.sqrt(a) < 0:
                raise UsageError(f"asymptotic check needs a >= 10 and a + tau sqrt(a) >= 0 (a={a}, tau={tau})")
    for a in orders:
        for tau in taus:
            g = asymptotic_gap_check(a, tau)
            rows.append({"a": a, "tau": tau, "q": g.q, "limit": g.limit, "gap": g.gap,
                         "bound": g.bound, "pass": g.passed})
    _emit(rows, args, _config(args, bound="2*(|tau^2-1|/3+1)*exp(-tau^2/2)/sqrt(2*pi*a)"))
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_CHECK_FAILED


def cmd_family_build(args) -> int:
    spec = _resolve_family(args)
    if not 0 < args.epsilon < 1 or args.rho <= 0:
        raise UsageError("need 0 < --epsilon < 1 and --rho > 0")
    text = json.dumps(spec.to_json()) + "\n"
    family = build_family(spec)
    try:
        if args.out is None:
            sys.stdout.write(text)
        else:
            args.out.write_text(text, encoding="utf-8")
        if args.layers_out is not None:
            layers = {str(n): family[n].to_json() for n in sorted(family)}
            args.layers_out.write_text(json.dumps(layers) + "\n", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write family: {exc}")
    if family:
        for row in cardinality_report(family):
            d = local_count_diagnostics(family[row.n], row.n, args.epsilon, args.rho, spec.tau)
            print(f"n={row.n} count={row.count} ratio={row.ratio!r} "
                  f"max_disk_count={d.max_disk_count} outside_bulk={d.outside_bulk_count} "
                  f"transition={d.transition_count} min_separation={d.min_separation!r}",
                  file=sys.stderr)
    return EXIT_OK


def cmd_mz_report(args) -> int:
    spec = _resolve_family(args)
    rows = mz_report(build_family(spec))
    _emit(rows, args, _config(args, family=spec.to_json()))
    ok = all(r.a > 0 and r.quadratic_form_error <= args.tol
             and r.residual <= 1e-9 * max(1.0, r.b) for r in rows)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_interp_report(args) -> int:
    spec = _resolve_family(args)
    rows = interp_report(build_family(spec))
    _emit(rows, args, _config(args, family=spec.to_json()))
    return EXIT_OK if all(r.lambda_min > 0 for r in rows) else EXIT_CHECK_FAILED


def cmd_gabor_crosscheck(args) -> int:
    spec = _resolve_family(args)
    family = build_family(spec)
    rows = [gabor_fock_crosscheck(n, family[n]) for n in sorted(family)]
    _emit(rows, args, _config(args, family=spec.to_json()))
    ok = all(r.max_entry_gap <= args.tol and r.eig_gap <= args.tol for r in rows)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_tail_energy(args) -> int:
    degrees = args.degrees if args.degrees is not None else (30,)
    if args.rho is not None and args.rho <= 0:
        raise UsageError("--rho must be positive")
    tau = args.tau if args.tau is not None else 0.0
    rng = np.random.default_rng(0)
    rows = []
    for n in degrees:
        rho = args.rho if args.rho is not None else math.sqrt(max(n + math.sqrt(n) * tau, 1e-12) / math.pi)
        bound = tail_energy_bound(n, rho)
        worst = -math.inf
        for _ in range(100):
            a = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            worst = max(worst, tail_energy_exact(a, rho) - bound * float(np.vdot(a, a).real))
        rows.append({"n": n, "rho": rho, "bound": bound, "max_excess": worst,
                     "pass": worst <= args.tol})
    _emit(rows, args, _config(args))
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_CHECK_FAILED


def cmd_degenerate_scan(args) -> int:
    if args.alpha <= 0:
        raise UsageError("--alpha must be positive")
    rows = square_case_scan(LatticeSpec.square(args.alpha), args.degrees)
    _emit(rows, args, _config(args))
    ok = all(r.count == r.n + 1 for r in rows)
    if len(rows) >= 2:
        ok = ok and rows[-1].a <= 0.5 * rows[0].a
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "gamma-check": cmd_gamma_check,
    "family-build": cmd_family_build,
    "mz-report": cmd_mz_report,
    "interp-report": cmd_interp_report,
    "gabor-crosscheck": cmd_gabor_crosscheck,
    "tail-energy": cmd_tail_energy,
    "degenerate-scan": cmd_degenerate_scan,
}


def dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
    except DomainError as exc:
        print(f"fockmz: {exc}", file=sys.stderr)
    except ConvergenceError as exc:
        print(f"fockmz: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()

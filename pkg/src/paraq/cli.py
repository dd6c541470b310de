"""Command-line front end.

All output is CSV with a header row; floats use 17 significant digits and
complex numbers are split into ``re``/``im`` columns.

Exit codes: 0 success, 2 invalid input or violated assumption (the failing
flag is named on stderr), 1 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

from . import approx, grid, ldrate, simulate, surface
from .harmonic import HarmonicityError
from .model import (
    EXAMPLE_PARAMS,
    FIELDS,
    AssumptionError,
    ParameterError,
    QueueParams,
    read_config,
    require_valid,
    transform_Tn,
    validate,
    xpoint,
)


def fmt(v) -> str:
    if isinstance(v, float):
        return f"{v + 0.0:.16e}"
    return str(v)


def _pair(text: str, cast=int):
    try:
        a, b = text.split(",")
        return cast(a), cast(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")


def _fpair(text: str):
    return _pair(text, float)


def load_params(args) -> QueueParams:
    """Flags override the config file; with neither, the worked example is used."""
    values = read_config(args.config) if args.config else {}
    for f in FIELDS:
        v = getattr(args, f, None)
        if v is not None:
            values[f] = v
    if not values:
        return EXAMPLE_PARAMS
    missing = [f for f in FIELDS if f not in values]
    if missing:
        raise ParameterError(f"missing rate(s): {', '.join(missing)}")
    return QueueParams(*(values[f] for f in FIELDS))


@contextmanager
def _writer(args):
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        yield csv.writer(fh, lineterminator="\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def _rows(args, header, rows):
    with _writer(args) as w:
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def cmd_validate(args, params):
    rep = validate(params)
    rows = [(f, getattr(params, f)) for f in FIELDS]
    rows += [("rho1", params.rho1), ("rho2", params.rho2), ("r", params.r)]
    rows += [(f, int(getattr(rep, f))) for f in (*rep.REQUIRED, "geometric_case")]
    _rows(args, ("name", "value"), rows)
    require_valid(params)


def cmd_surface(args, params):
    alpha = complex(*args.alpha)
    roots = surface.betas_of_alpha(params, alpha)
    rows = []
    for label, b in (("beta1", roots.beta1), ("beta2", roots.beta2)):
        a2 = surface.conjugate_alpha(params, b, alpha)
        res = abs(surface.char_poly(params, b, alpha) - 1)
        res2 = abs(surface.char_poly(params, b, a2) - 1)
        rows.append((label, b.real, b.imag, a2.real, a2.imag, res, res2))
    _rows(args, ("root", "beta_re", "beta_im", "conj_alpha_re", "conj_alpha_im",
                 "residual", "conj_residual"), rows)


def _build(params, K, radius):
    return approx.build_h_a0(params) if K == 0 else approx.build_h_aK(params, K, radius)


def cmd_build_approx(args, params):
    res = _build(params, args.K, args.alpha_radius)
    rows = [("coefficient", j, c.real, c.imag) for j, c in enumerate(res.coefficients)]
    rows.append(("cstar", "", res.cstar, 0.0))
    rows.append(("argmax", res.argmax_diagonal, float(res.argmax_diagonal), 0.0))
    rows.append(("tail_bound", "", res.tail_bound_used, 0.0))
    if res.c8 is not None:
        rows.append(("c8", "", res.c8, 0.0))
    if args.profile:
        errs = approx.diagonal_errors(res.superposition, args.profile)
        rows += [("diagonal_error", k, float(e), 0.0) for k, e in enumerate(errs)]
    _rows(args, ("quantity", "index", "re", "im"), rows)


def cmd_exact(args, params):
    sol = grid.solve_pn(params, args.n, method=args.method)
    print(f"# sweeps={sol.iterations} final_relative_change={sol.final_relative_change:.3e}",
          file=sys.stderr)
    pts = [args.at] if args.at else list(sol.points())
    _rows(args, ("x1", "x2", "value"), ((a, b, sol[(a, b)]) for a, b in pts))


def cmd_limit(args, params):
    vals, (m1, m2) = grid.py_inf_values(params, [args.y], args.rtol)
    _rows(args, ("y1", "y2", "value", "m1", "m2"), [(*args.y, float(vals[0]), m1, m2)])


_MC_HEADER = ("walk", "start1", "start2", "n", "trials", "hits", "mean", "half_width_95",
              "seed", "truncated_paths", "escaped_paths")


def cmd_mc(args, params):
    e = simulate.mc_pn(params, args.x, args.n, args.trials, args.seed)
    _rows(args, _MC_HEADER, [("X", *args.x, args.n, e.trials, e.hits, e.mean, e.half_width_95,
                              e.seed, e.truncated_paths, e.escaped_paths)])


def cmd_mc_limit(args, params):
    e = simulate.mc_py_inf(params, args.y, args.trials, args.max_steps, args.seed, args.escape)
    _rows(args, _MC_HEADER, [("Y", *args.y, "", e.trials, e.hits, e.mean, e.half_width_95,
                              e.seed, e.truncated_paths, e.escaped_paths)])


def cmd_ldrate(args, params):
    # values on x1 = 0 carry no approximation certificate
    _rows(args, ("x1", "x2", "V", "Vsigma0"), ldrate.rate_table(params, args.resolution))


def cmd_compare(args, params):
    sol = grid.solve_pn(params, args.n)
    if args.at:
        # convergence table K' -> h^{a,K'}(T_n(x)) at one point
        y = transform_Tn(xpoint(*args.at), args.n)
        exact = sol[args.at]
        rows = []
        for k in range(args.K + 1):
            res = _build(params, k, args.alpha_radius)
            h = res((y.c1, y.c2))
            rows.append((k, *args.at, exact, h, abs(h - exact) / exact, res.cstar))
        _rows(args, ("K", "x1", "x2", "exact", "approx", "relative_error", "cstar"), rows)
        return
    res = _build(params, args.K, args.alpha_radius)
    rows = []
    for a, b in sol.points():
        if a + b == args.n or (a, b) == (0, 0):
            continue
        exact = sol[(a, b)]
        h = res((args.n - a, b))
        rows.append((a, b, exact, h, abs(h - exact) / exact))
    _rows(args, ("x1", "x2", "exact", "approx", "relative_error"), rows)


def build_parser() -> argparse.ArgumentParser:
    def common(default):
        # subcommands must not overwrite flags given before the subcommand name
        p = argparse.ArgumentParser(add_help=False, argument_default=default)
        p.add_argument("--config", help="file of 'key = value' lines (lambda1, lambda2, mu1, mu2)")
        p.add_argument("--out", help="write CSV here instead of stdout")
        for f in FIELDS:
            p.add_argument(f"--{f}", type=float)
        return p

    parser = argparse.ArgumentParser(
        prog="paraq", parents=[common(None)],
        description="Overflow probabilities of two parallel queues.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common(argparse.SUPPRESS)], help=help)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "derived rates and assumption flags")
    p = add("surface", cmd_surface, "roots beta1, beta2 at a complex alpha")
    p.add_argument("--alpha", type=_fpair, required=True, metavar="RE,IM")
    p = add("build-approx", cmd_build_approx, "harmonic approximation and its certificate")
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--alpha-radius", type=float, default=0.7)
    p.add_argument("--profile", type=int, default=0, metavar="KMAX",
                   help="also emit |h(k,k) - 1| for k = 0..KMAX")
    p = add("exact", cmd_exact, "P_x(tau_n < tau_0) on A_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--at", type=_pair, default=None, metavar="X1,X2")
    p.add_argument("--method", choices=("gauss-seidel", "direct"), default="gauss-seidel")
    p = add("limit", cmd_limit, "P_y(tau < inf) from the truncated-wedge oracle")
    p.add_argument("--y", type=_pair, required=True, metavar="Y1,Y2")
    p.add_argument("--rtol", type=float, default=1e-8)
    p = add("mc", cmd_mc, "Monte Carlo estimate of P_x(tau_n < tau_0)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=_pair, required=True, metavar="A,B")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p = add("mc-limit", cmd_mc_limit, "Monte Carlo estimate of P_y(tau < inf)")
    p.add_argument("--y", type=_pair, required=True, metavar="A,B")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--max-steps", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--escape", type=int, default=None,
                   help="distance from the diagonal counted as escape (0 disables)")
    p = add("ldrate", cmd_ldrate, "rate functions V and V_sigma(0, .) on a grid")
    p.add_argument("--resolution", type=float, default=0.01)
    p = add("compare", cmd_compare, "exact p_n against h^{a,K}(T_n(x))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--alpha-radius", type=float, default=0.7)
    p.add_argument("--at", type=_pair, default=None, metavar="X1,X2",
                   help="emit the K' = 0..K convergence table at this point instead")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = load_params(args)
        args.func(args, params)
    except AssumptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, surface.DomainError, HarmonicityError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

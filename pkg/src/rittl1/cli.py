"""Command line interface.

Examples::

    rittl1 coeffs --alpha 0.5 --K 20
    rittl1 conv-power --measure lazy_walk --n 8
    rittl1 ritt --measure lazy_walk --N 4096 --out ritt.csv
    rittl1 certify --measure nu_alpha:0.5 --alpha 1 --s 3 --m 1
    rittl1 square-fn --measure nu_alpha:0.5 --m 1 --alpha 1 --s 3 --N 1024 --out q.csv
    rittl1 var-norm --values 0 1 0.9 2 --s 2
    rittl1 probe main_theorem --n-random 0 --out results/main
    rittl1 run configs/main_theorem.yaml

The number of worker threads for probes comes from ``RITTL1_THREADS``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import lemma2_quantities, lemma_quantities, ritt_constant
from .experiments import (
    PROBES,
    ConfigError,
    F0Spec,
    default_config,
    jsonable,
    load_config,
    make_test_functions,
    run_config,
    write_plot_data,
)
from .fractional import frac_coeff, trajectory
from .functionals import (
    dyadic_blocks,
    gap_subsequence,
    maximal_function,
    oscillation_norm,
    square_function,
    variation_norm,
)
from .kernels import kernel_for, kernel_trajectory
from .measure import SpatialSequence, convolution_power, indicator
from .registry import canonical, resolve_measure, resolve_symbol

logger = logging.getLogger("rittl1")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_json(obj, path: str | None) -> None:
    _emit(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n", path)


def parse_f(spec: str, seed: int, w_max: int | None = None) -> SpatialSequence:
    """Parse a test function given as ``kind:argument``.

    Kinds: ``delta:<x>`` is an indicator; ``random:<radius>`` draws seeded values with
    unit l1 norm; ``file:<path>`` reads ``site value`` lines.
    """
    head, _, arg = spec.partition(":")
    if head == "delta":
        return indicator(int(arg or 0), w_max)
    if head == "random":
        tf = make_test_functions(F0Spec(delta=False, n_random=1, radius=int(arg or 4)), seed,
                                 w_max)
        return tf[0].f
    if head == "file":
        data = np.loadtxt(arg, ndmin=2)
        return SpatialSequence.from_dict({int(x): float(v) for x, v in data}, w_max)
    raise argparse.ArgumentTypeError(f"bad test function spec {spec!r}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(args) -> int:
    c = frac_coeff(args.alpha, args.K)
    lines = ["k,g"] + [f"{k},{v!r}" for k, v in enumerate(c.values.tolist(), start=1)]
    _emit("\n".join(lines) + "\n", args.out)
    logger.info("tail 1 - sum_{k<=%d} g = %.6g", args.K, c.tail)
    return 0


def cmd_conv_power(args) -> int:
    mu = resolve_measure(args.measure, args.K)
    _emit(convolution_power(mu, args.n, args.trunc).to_text(), args.out)
    return 0


def cmd_ritt(args) -> int:
    tr = ritt_constant(resolve_measure(args.measure, args.K), args.N, args.eps)
    rows = ["n,trend,error"] + [f"{n},{t!r},{e!r}" for n, (t, e) in
                                 enumerate(zip(tr.trend.tolist(), tr.error.tolist()), start=1)]
    _emit("\n".join(rows) + "\n", args.out)
    if args.plot:
        write_plot_data(args.plot, range(1, args.N + 1), tr.trend)
    summary = {"sup": tr.sup, "N": args.N, "measure": args.measure,
               "sup_over_second_half": tr.sup_between(max(1, args.N // 2), args.N)}
    sys.stderr.write(json.dumps(summary) + "\n")
    return 0


def cmd_certify(args) -> int:
    sym = resolve_symbol(args.measure, args.K, args.t_min) if args.t_min else \
        resolve_symbol(args.measure, args.K)
    if args.gaps_alpha is None:
        rep = lemma_quantities(sym, args.alpha, args.s, args.m, N=args.N, tol=args.tol,
                               check_stability=not args.no_stability)
    else:
        gaps = gap_subsequence(args.gaps_alpha, args.N)
        rep = lemma2_quantities(sym, gaps, args.beta, args.s, tol=args.tol, mode=args.mode,
                                check_stability=not args.no_stability)
    _dump_json(rep.to_dict(), args.out)
    return 0


def _trajectory_for(args, f: SpatialSequence, N: int):
    key = canonical(args.measure)
    kernel = kernel_for(key)
    if args.method == "kernel" or (args.method == "auto" and kernel is not None
                                   and float(args.m) == int(args.m)):
        if kernel is None:
            raise SystemExit(f"no closed-form kernel for {key}")
        return kernel_trajectory(kernel, int(args.m), f, N)
    mu = resolve_measure(args.measure, args.K)
    return trajectory(mu, args.m, f, N, eps=args.eps, w_max=args.w_max, K=args.K)


def cmd_square_fn(args) -> int:
    w_max = None if args.method == "kernel" else args.w_max
    f = parse_f(args.f, args.seed, w_max)
    traj = _trajectory_for(args, f, args.N)
    if args.maximal:
        res = maximal_function(traj, args.alpha, N=args.N)
    else:
        res = square_function(traj, args.alpha, args.s, N=args.N)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    res.to_csv(out)
    summary = res.summary()
    summary.update({"measure": args.measure, "m": args.m, "f": args.f,
                    "f_l1": f.l1(), "ratio": res.l1_norm / f.l1(), "method": traj.method,
                    "trajectory_error_budget": float(traj.error_budget[-1])})
    _dump_json(summary, str(out.with_suffix(".json")))
    if args.trajectory_csv:
        traj.to_csv(args.trajectory_csv, [n for n in (0, 1, 16, 256, args.N) if n <= args.N])
    logger.info("l1 norm %.10g (ratio %.10g)", res.l1_norm, summary["ratio"])
    return 0


def cmd_var_norm(args) -> int:
    if args.file:
        vals = np.loadtxt(args.file, ndmin=1)
    else:
        vals = np.asarray(args.values, dtype=float)
    blocks = args.blocks or dyadic_blocks(vals.size)
    out = {"s": args.s, "length": int(vals.size),
           "variation": variation_norm(vals, args.s),
           "oscillation": oscillation_norm(vals, blocks, args.s), "blocks": list(blocks)}
    _dump_json(out, args.out)
    return 0


def _probe_overrides(args) -> dict:
    ov: dict = {"seed": args.seed, "trajectory": {"f0": {}}, "output": {}}
    if args.measure:
        ov["measure"] = {"key": args.measure}
    if args.N_levels:
        ov["trajectory"]["N_levels"] = args.N_levels
    if args.n_random is not None:
        ov["trajectory"]["f0"]["n_random"] = args.n_random
    if args.m is not None:
        ov["trajectory"]["m"] = args.m
    if args.out:
        ov["output"]["dir"] = args.out
    if args.certificate:
        ov["certificate"] = {"enabled": True}
    if args.conditions:
        ov["conditions"] = {"enabled": True}
    return ov


def _summarize(rec) -> None:
    for arm in rec.arms:
        name = arm["name"]
        tab = rec.tables[name]
        first = next(iter(tab))
        vals = ", ".join(f"{v:.6g}" for v in tab[first])
        print(f"{name:45s} {str(rec.verdicts[name]):25s} {first}: {vals}")


def cmd_probe(args) -> int:
    cfg = default_config(args.name, **_probe_overrides(args))
    rec = run_config(cfg)
    _summarize(rec)
    print(f"report written to {cfg.output.dir}")
    return 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed_given:
        cfg.seed = args.seed
    if args.out:
        cfg.output.dir = args.out
    rec = run_config(cfg)
    _summarize(rec)
    print(f"report written to {cfg.output.dir}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="RNG seed for random test functions")
    common.add_argument("--log-level", default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="rittl1", description=__doc__.split("\n\n")[0],
                                parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)  # type: ignore

    def measure_args(sp, default="nu_alpha:0.5"):
        sp.add_argument("--measure", default=default,
                        help="nu_alpha:<a> | lazy_walk | delta:<k> | from_file:<path>")
        sp.add_argument("--K", type=int, default=1 << 14, help="atoms kept for nu_alpha")

    sp = sub.add_parser("coeffs", help="fractional coefficients g(alpha, k)")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--K", type=int, default=20)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("conv-power", help="convolution power in the measure text format")
    measure_args(sp, "lazy_walk")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trunc", type=float, default=0.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_conv_power)

    sp = sub.add_parser("ritt", help="trend n ||mu^n - mu^(n+1)||_1")
    measure_args(sp, "lazy_walk")
    sp.add_argument("--N", type=int, default=1024)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--out")
    sp.add_argument("--plot", help="two-column plot-data file")
    sp.set_defaults(func=cmd_ritt)

    sp = sub.add_parser("certify", help="certificate quantities A, B, B~, C, D, E")
    measure_args(sp)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--gaps-alpha", type=float, default=None,
                    help="use the block family of this gap sequence")
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--mode", choices=("endpoint-diff", "block-max"), default="endpoint-diff")
    sp.add_argument("--N", type=int, default=1 << 17)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--t-min", type=float, default=None)
    sp.add_argument("--no-stability", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("square-fn", help="square (or maximal) function of one trajectory")
    measure_args(sp)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=3.0)
    sp.add_argument("--N", type=int, default=1024)
    sp.add_argument("--f", default="delta:0", help="delta:<x> | random:<r> | file:<path>")
    sp.add_argument("--method", choices=("auto", "kernel", "iterate"), default="auto")
    sp.add_argument("--w-max", type=int, default=8192)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--maximal", action="store_true")
    sp.add_argument("--trajectory-csv")
    sp.add_argument("--out", default="square_fn.csv")
    sp.set_defaults(func=cmd_square_fn)

    sp = sub.add_parser("var-norm", help="variation and oscillation norms of a sequence")
    sp.add_argument("--values", type=float, nargs="*")
    sp.add_argument("--file")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--blocks", type=int, nargs="*")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_var_norm)

    sp = sub.add_parser("probe", help="run a preset probe")
    sp.add_argument("name", choices=PROBES)
    sp.add_argument("--measure")
    sp.add_argument("--m", type=float)
    sp.add_argument("--N-levels", type=int, nargs="+", dest="N_levels")
    sp.add_argument("--n-random", type=int)
    sp.add_argument("--certificate", action="store_true")
    sp.add_argument("--conditions", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("run", help="run a probe from a YAML config")
    sp.add_argument("config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # defaults are applied here: parents share action objects, so set_defaults on the
    # top-level parser would also reset the subcommand copies of --seed / --log-level
    args.log_level = getattr(args, "log_level", "WARNING")
    args.seed = getattr(args, "seed", None)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 20240101
    if args.command == "var-norm" and not (args.values or args.file):
        parser.error("var-norm needs --values or --file")
    try:
        return int(args.func(args) or 0)
    except ConfigError as exc:
        parser.exit(2, f"config error: {exc}\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

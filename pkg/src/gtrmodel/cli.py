"""Command-line front end: ``gtr <command> [flags]``.

Exit codes: 0 success, 2 parse/input error, 3 infeasible parameters,
4 degenerate data, 5 impossible forced outcome.
"""
import argparse
import csv
import os
import sys

from gtrmodel import kernels
from gtrmodel.core import (
    OUTCOMES,
    LocallyUniformDistribution,
    ModelParams,
    RatioSolution,
    sequential_probabilities,
)
from gtrmodel.datasets import BUILTIN, dump_json, load_dataset, load_params_file
from gtrmodel.errors import GTRError, InfeasibleError, ParameterDomainError
from gtrmodel.hilbert import q_prime_statistic, qq_statistic
from gtrmodel.inversion import (
    DEFAULT_EPS_A,
    admissible_epsilon_a_interval,
    concretize,
    embed_bloch,
    feasibility_report,
    fit_ratios,
)
from gtrmodel.montecarlo import estimate_sequential
from gtrmodel.replicability import Session, parse_sequence, run_sequence
from gtrmodel.unpacking import (
    PackedResult,
    UnpackedResult,
    additivity_gap,
    check_degenerate_equality,
    classify,
    gtr_unpacking_gap,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_DEGENERATE = 4
EXIT_IMPOSSIBLE = 5

PLOT_HEADER = ("step", "x_lo", "x_hi", "density")


def _orders(arg):
    return ("AB", "BA") if arg.lower() == "both" else (arg.upper(),)


def _floats(text, count, what):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ParameterDomainError(f"{what}: expected {count} comma-separated numbers, got {text!r}") from None
    if len(values) != count:
        raise ParameterDomainError(f"{what}: expected {count} numbers, got {len(values)}")
    return values


def _default_seed():
    raw = os.environ.get("GTR_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ParameterDomainError(f"GTR_SEED must be an integer, got {raw!r}") from None


def _resolve_params(args):
    """ModelParams from --params (ratios or params) or from fitting --dataset."""
    if args.params:
        loaded = load_params_file(args.params)
    else:
        loaded = fit_ratios(load_dataset(args.dataset).table())
    if isinstance(loaded, RatioSolution):
        return loaded, concretize(loaded, args.epsilon_a)
    return loaded.ratios(), loaded


def _write_plot_data(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PLOT_HEADER)
        for step, dist in rows:
            for lo, hi, h in dist.intervals():
                writer.writerow([step, repr(lo), repr(hi), repr(h)])


def _table(rows, headers=None):
    rows = [[_fmt(c) for c in r] for r in rows]
    if headers:
        rows.insert(0, list(headers))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


# -- commands ---------------------------------------------------------------


def cmd_datasets(args):
    report = {name: ds.as_dict() for name, ds in BUILTIN.items()}
    if args.format == "json":
        return report, None
    lines = []
    for name, ds in BUILTIN.items():
        lines.append(f"{name}")
        lines.append("  AB: " + ", ".join(f"{o}={ds.order_ab[o]}" for o in OUTCOMES))
        lines.append("  BA: " + ", ".join(f"{o}={ds.order_ba[o]}" for o in OUTCOMES))
        lines.append(f"  provenance: {ds.provenance}")
    return report, "\n".join(lines)


def cmd_fit(args):
    dataset = load_dataset(args.probs or args.dataset)
    table = dataset.table()
    ratios = fit_ratios(table)
    feas = feasibility_report(ratios, args.epsilon_a)
    interval = admissible_epsilon_a_interval(ratios)
    report = {
        "dataset": dataset.name,
        "table": table.as_dict(),
        "ratios": ratios.as_dict(),
        "epsilon_a": args.epsilon_a,
        "feasibility": feas.as_dict(),
        "admissible_eps_a": {"lo": interval.lo, "hi": interval.hi, "empty": interval.empty},
        "params": None,
        "embedding": None,
    }
    if args.save_params:
        dump_json({"ratios": ratios.as_dict()}, args.save_params)
    # infeasible eps_a is reported after the ratios have been written out
    params = concretize(ratios, args.epsilon_a)
    report["params"] = params.as_dict()
    try:
        x_psi, a_y, b_y = embed_bloch(params)
        report["embedding"] = {
            "x_psi": [x_psi.x, x_psi.y, x_psi.z],
            "a_y": [a_y.x, a_y.y, a_y.z],
            "b_y": [b_y.x, b_y.y, b_y.z],
        }
    except InfeasibleError as exc:
        report["embedding"] = {"error": str(exc)}
    if args.plot_data:
        _write_plot_data(args.plot_data, [("0:A", params.rho_a.to_piecewise()), ("0:B", params.rho_b.to_piecewise())])
    if args.format == "json":
        return report, None
    text = [
        f"dataset: {dataset.name}",
        "ratios:",
        _table([[k, v] for k, v in ratios.as_dict().items()]),
        f"parameters at eps_a = {args.epsilon_a}:",
        _table([[k, v] for k, v in params.as_dict().items()]),
        f"admissible eps_a: ({interval.lo:g}, {interval.hi:.6g}]" + (" (empty)" if interval.empty else ""),
        f"born_compatible: {feas.born_compatible}",
        f"same density for A and B possible: {feas.same_rule_possible}",
        "constraints:",
        _table([[k, "pass" if v else "FAIL"] for k, v in feas.constraints.items()]),
    ]
    emb = report["embedding"]
    if "error" in emb:
        text.append(f"embedding: none ({emb['error']})")
    else:
        text.append("embedding: " + ", ".join(f"{k}=({', '.join(f'{c:.6g}' for c in v)})" for k, v in emb.items()))
    return report, "\n".join(text)


def cmd_forward(args):
    ratios, params = _resolve_forward(args)
    report = {"ratios": ratios.as_dict(), "orders": {}}
    if params is not None:
        report["params"] = params.as_dict()
    for order in _orders(args.order):
        report["orders"][order] = dict(zip(OUTCOMES, sequential_probabilities(ratios, order)))
    if args.format == "json":
        return report, None
    rows = [[order] + list(probs.values()) for order, probs in report["orders"].items()]
    return report, _table(rows, headers=["order", *OUTCOMES])


def _resolve_forward(args):
    if args.params:
        loaded = load_params_file(args.params)
        if isinstance(loaded, ModelParams):
            return loaded.ratios(), loaded
        return loaded, None
    ratios = fit_ratios(load_dataset(args.dataset).table())
    return ratios, None


def cmd_equalities(args):
    dataset = load_dataset(args.probs or args.dataset)
    table = dataset.table()
    q, qp = qq_statistic(table), q_prime_statistic(table)
    report = {
        "dataset": dataset.name,
        "q": q,
        "q_prime": qp,
        "q_tolerance": args.q_tol,
        "q_prime_tolerance": args.q_prime_tol,
        "q_obeyed": abs(q) <= args.q_tol,
        "q_prime_obeyed": abs(qp) <= args.q_prime_tol,
    }
    if args.format == "json":
        return report, None
    verdict = {True: "obeyed", False: "violated"}
    return report, _table(
        [
            ["q (QQ equality)", q, f"|q| <= {args.q_tol:g}", verdict[report["q_obeyed"]]],
            ["q'", qp, f"|q'| <= {args.q_prime_tol:g}", verdict[report["q_prime_obeyed"]]],
        ],
        headers=["statistic", "value", "threshold", "verdict"],
    )


def cmd_simulate(args):
    _, params = _resolve_params(args)
    seed = args.seed if args.seed is not None else _default_seed()
    report = {"params": params.as_dict(), "backend": kernels.BACKEND, "runs": {}}
    rows = []
    for order in _orders(args.order):
        est = estimate_sequential(params, order, args.n, seed, shards=args.shards, workers=args.workers)
        exact = sequential_probabilities(params.ratios(), order)
        entry = est.as_dict()
        entry["exact"] = dict(zip(OUTCOMES, exact))
        entry["z_scores"] = dict(zip(OUTCOMES, est.z_scores(exact)))
        report["runs"][order] = entry
        for o, e, p, se, z in zip(OUTCOMES, est.estimates, exact, est.standard_errors, est.z_scores(exact)):
            rows.append([order, o, e, p, se, z])
    if args.format == "json":
        return report, None
    head = f"n={args.n} seed={seed} shards={args.shards} backend={kernels.BACKEND}"
    return report, head + "\n" + _table(rows, headers=["order", "outcome", "estimate", "exact", "std_err", "z"])


def cmd_replicate(args):
    _, params = _resolve_params(args)
    seed = args.seed if args.seed is not None else _default_seed()
    items = parse_sequence(args.sequence)
    session = Session(params)
    try:
        run_sequence(params, items, seed, session=session)
    finally:
        if args.plot_data:
            rows = []
            for k, (da, db) in enumerate(session.snapshots):
                rows += [(f"{k}:A", da), (f"{k}:B", db)]
            _write_plot_data(args.plot_data, rows)
    steps = [dict(step=i + 1, **s.as_dict()) for i, s in enumerate(session.history)]
    report = {"params": params.as_dict(), "seed": seed, "sequence": args.sequence, "steps": steps}
    if args.format == "json":
        return report, None
    return report, _table(
        [[s["step"], s["label"], s["outcome"], s["probability"]] for s in steps],
        headers=["step", "measurement", "outcome", "probability"],
    )


def cmd_unpack(args):
    if args.gtr:
        if args.cos_theta_a is None or not args.packed_dist or not args.unpacked_dist:
            raise ParameterDomainError("--gtr needs --cos-theta-a, --packed-dist EPS,D and --unpacked-dist EPS,D")
        rp = LocallyUniformDistribution(*_floats(args.packed_dist, 2, "--packed-dist"))
        ru = LocallyUniformDistribution(*_floats(args.unpacked_dist, 2, "--unpacked-dist"))
        gap = gtr_unpacking_gap(args.cos_theta_a, rp, ru)
        report = {
            "form": "gtr",
            "cos_theta_a": args.cos_theta_a,
            "packed_dist": {"epsilon": rp.epsilon, "d": rp.d},
            "unpacked_dist": {"epsilon": ru.epsilon, "d": ru.d},
            "gap": gap,
            "classification": classify(gap, args.tol),
        }
    else:
        if not args.packed or not args.unpacked:
            raise ParameterDomainError("need --packed P_YES,P_NO and --unpacked P_YY,P_YN,P_N (or --gtr)")
        packed = PackedResult(*_floats(args.packed, 2, "--packed"))
        unpacked = UnpackedResult(*_floats(args.unpacked, 3, "--unpacked"))
        gap, label = additivity_gap(packed, unpacked, args.tol)
        report = {
            "form": "probabilities",
            "packed": {"p_yes": packed.p_yes, "p_no": packed.p_no},
            "unpacked": {"p_yy": unpacked.p_yy, "p_yn": unpacked.p_yn, "p_n": unpacked.p_n},
            "gap": gap,
            "classification": label,
            "degenerate_equality": check_degenerate_equality(packed, unpacked, args.tol),
        }
    if args.format == "json":
        return report, None
    rows = [[k, v] for k, v in report.items() if not isinstance(v, dict)]
    return report, _table(rows)


# -- parser -----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="gtr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("table", "json"), default="table")
        return p

    def data_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--dataset", help="built-in name or dataset JSON path")
        g.add_argument("--probs", help="dataset JSON path")

    def param_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--params", help="params JSON ({'ratios': ...} or {'params': ...})")
        g.add_argument("--dataset", help="fit this dataset first")
        p.add_argument("--epsilon-a", type=float, default=DEFAULT_EPS_A, help="free scale when starting from ratios")

    common(sub.add_parser("datasets", help="list built-in datasets"))

    p = common(sub.add_parser("fit", help="fit ratios and parameters to a dataset"))
    data_source(p)
    p.add_argument("--epsilon-a", type=float, default=DEFAULT_EPS_A)
    p.add_argument("--save-params", metavar="PATH", help="write the fitted ratios as a params file")
    p.add_argument("--plot-data", metavar="PATH", help="write the fitted densities as CSV")

    p = common(sub.add_parser("forward", help="sequential probabilities from ratios or parameters"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--params")
    g.add_argument("--dataset")
    p.add_argument("--order", default="both", choices=("AB", "BA", "both", "ab", "ba"))

    p = common(sub.add_parser("equalities", help="QQ and q' statistics of a dataset"))
    data_source(p)
    p.add_argument("--q-tol", type=float, default=0.01)
    p.add_argument("--q-prime-tol", type=float, default=0.01)

    p = common(sub.add_parser("simulate", help="Monte Carlo estimate of sequential probabilities"))
    param_source(p)
    p.add_argument("--order", default="both", choices=("AB", "BA", "both", "ab", "ba"))
    p.add_argument("-n", "--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None, help="defaults to $GTR_SEED, else 0")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)

    p = common(sub.add_parser("replicate", help="run a measurement sequence with memory"))
    param_source(p)
    p.add_argument("--sequence", required=True, help="e.g. A,B,A or A:y,B,A")
    p.add_argument("--seed", type=int, default=None, help="defaults to $GTR_SEED, else 0")
    p.add_argument("--plot-data", metavar="PATH", help="CSV of both densities after every step")

    p = common(sub.add_parser("unpack", help="packed vs unpacked additivity"))
    p.add_argument("--packed", help="P_YES,P_NO")
    p.add_argument("--unpacked", help="P_YY,P_YN,P_N")
    p.add_argument("--gtr", action="store_true", help="compare two densities instead of probabilities")
    p.add_argument("--cos-theta-a", type=float)
    p.add_argument("--packed-dist", help="EPS,D")
    p.add_argument("--unpacked-dist", help="EPS,D")
    p.add_argument("--tol", type=float, default=1e-9)
    return parser


COMMANDS = {
    "datasets": cmd_datasets,
    "fit": cmd_fit,
    "forward": cmd_forward,
    "equalities": cmd_equalities,
    "simulate": cmd_simulate,
    "replicate": cmd_replicate,
    "unpack": cmd_unpack,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report, text = COMMANDS[args.command](args)
    except GTRError as exc:
        print(f"gtr {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(dump_json(report) if text is None else text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

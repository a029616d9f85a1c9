"""Command line entry point: ``lxbbsca {list,run,compare,traces}``.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .algorithms import AlgorithmId
from .experiment import (
    ExperimentConfig,
    ValidationError,
    compare_report,
    expand_problem_ids,
    export_traces,
    problem_registry,
    run_experiment,
)

log = logging.getLogger("lxbbsca")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lxbbsca", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="print the problem and algorithm registry")
    p_list.add_argument("--format", choices=("csv", "json"), default="csv")

    p_run = sub.add_parser("run", help="run an experiment matrix")
    p_run.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields; flags override it")
    p_run.add_argument("--algorithms", type=_csv_list)
    p_run.add_argument("--problems", type=_csv_list,
                       help="comma list of ids, ranges such as F1-F13, or the groups 'benchmarks'/'engineering'")
    p_run.add_argument("--trials", type=int)
    p_run.add_argument("--budget", type=int, help="objective evaluations per run (default: per-problem)")
    p_run.add_argument("--pop", type=int)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.add_argument("--eq5-mode", choices=("progress", "literal"))
    p_run.add_argument("--r2-mode", choices=("two_pi", "strict"))
    p_run.add_argument("--replace-mode", choices=("emigration", "random"))
    p_run.add_argument("--wilcoxon", choices=("signed-rank", "rank-sum"))
    p_run.add_argument("--penalty-coeff", type=float)
    p_run.add_argument("--integer-gear", action="store_true", default=None)
    p_run.add_argument("--bridge-mode", choices=("literal", "system"))

    p_cmp = sub.add_parser("compare", help="paired t-test and Wilcoxon report for two algorithms")
    p_cmp.add_argument("results_dir", type=Path)
    p_cmp.add_argument("algo_a")
    p_cmp.add_argument("algo_b")
    p_cmp.add_argument("--wilcoxon", choices=("signed-rank", "rank-sum"), default="signed-rank")
    p_cmp.add_argument("--problems", type=_csv_list)

    p_tr = sub.add_parser("traces", help="median convergence curves for one problem")
    p_tr.add_argument("results_dir", type=Path)
    p_tr.add_argument("problem")
    p_tr.add_argument("--points", type=int, default=50)
    return parser


_FLAG_TO_FIELD = {
    "algorithms": "algorithms",
    "problems": "problems",
    "trials": "trials",
    "budget": "eval_budget",
    "pop": "population",
    "seed": "base_seed",
    "out": "out_dir",
    "eq5_mode": "eq5_mode",
    "r2_mode": "r2_mode",
    "replace_mode": "replace_mode",
    "wilcoxon": "wilcoxon",
    "penalty_coeff": "penalty_coeff",
    "integer_gear": "integer_gear",
    "bridge_mode": "bridge_mode",
}


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config file {args.config}: {exc}") from None
    for flag, key in _FLAG_TO_FIELD.items():
        value = getattr(args, flag)
        if value is not None:
            data[key] = value
    if "wilcoxon" in data:
        data["wilcoxon"] = data["wilcoxon"].replace("-", "_")
    if "problems" in data:
        data["problems"] = expand_problem_ids(data["problems"])
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


def _cmd_list(args) -> int:
    rows = problem_registry()
    algorithms = [a.value for a in AlgorithmId]
    if args.format == "json":
        print(json.dumps({"problems": rows, "algorithms": algorithms}, indent=2))
        return EXIT_OK
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    print(f"# algorithms: {', '.join(algorithms)}")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = config_from_args(args)
    config.validate()
    out = run_experiment(config)
    print(f"results written to {out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    problems = expand_problem_ids(args.problems) if args.problems else None
    try:
        path = compare_report(args.results_dir, args.algo_a, args.algo_b, args.wilcoxon.replace("-", "_"), problems)
    except KeyError as exc:
        raise ValidationError(str(exc.args[0])) from None
    print(path)
    return EXIT_OK


def _cmd_traces(args) -> int:
    for path in export_traces(args.results_dir, args.problem, args.points):
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"list": _cmd_list, "run": _cmd_run, "compare": _cmd_compare, "traces": _cmd_traces}[args.command]
    try:
        return handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        log.debug("unexpected failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

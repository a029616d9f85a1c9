"""Experiment runner: run matrices, summary/comparison reports and traces.

Output directory layout::

    manifest.json                  exact config and seed policy
    trials.csv                     one row per (algorithm, problem, trial)
    summary.csv                    Min/Max/Std/Average/Median per cell
    engineering.csv                best runs next to published reference rows
    compare_<A>_vs_<B>.csv         paired t-test and Wilcoxon per problem
    traces/<problem>/<algorithm>/trial_<k>.csv   best-so-far per run
    curves/<problem>__<algorithm>.csv            median curve on a checkpoint grid

Nothing time- or host-dependent is written, so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .algorithms import AlgorithmId, OptimizerConfig, run_trials, trial_seed
from .benchmarks import BENCHMARKS, DEFAULT_BUDGET, get_benchmark
from .core import ObjectiveProblem
from .operators import LaplaceParams
from .problems import (
    ENGINEERING_BUDGET,
    ENGINEERING_IDS,
    PenaltyPolicy,
    get_engineering_problem,
    reference_rows,
    reliability_of,
)
from .stats import WILCOXON_MODES, paired_t_test, wilcoxon_test

SUMMARY_COLUMNS = ("Min", "Max", "Std", "Average", "Median")
SEED_POLICY = "seed = base_seed + trial_index"
CHECKPOINTS = 50


class ValidationError(ValueError):
    """Bad experiment configuration or missing inputs; CLI exit code 1."""


def fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass
class ExperimentConfig:
    algorithms: list = field(default_factory=lambda: ["LXBBSCA", "LXBBO", "BBO"])
    problems: list = field(default_factory=list)
    trials: int = 30
    eval_budget: Optional[int] = None
    population: int = 50
    base_seed: int = 0
    out_dir: str = "results"
    laplace_a: float = 0.0
    laplace_b: float = 0.5
    gamma_min: float = 0.0
    gamma_max: float = 1.0
    gamma_k: float = 2.0
    eq5_mode: str = "progress"
    r2_mode: str = "two_pi"
    replace_mode: str = "emigration"
    mutation_rate: float = 0.01
    penalty_coeff: float = 1e6
    penalty_exponent: float = 2.0
    integer_gear: bool = False
    bridge_mode: str = "literal"
    wilcoxon: str = "signed_rank"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def validate(self) -> None:
        if not self.algorithms:
            raise ValidationError("algorithm list is empty")
        if not self.problems:
            raise ValidationError("problem list is empty")
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        for a in self.algorithms:
            try:
                AlgorithmId.parse(a)
            except KeyError:
                raise ValidationError(f"unknown algorithm id {a!r}") from None
        for p in self.problems:
            if not is_known_problem(p):
                raise ValidationError(f"unknown problem id {p!r}")
        if self.wilcoxon not in WILCOXON_MODES:
            raise ValidationError(f"wilcoxon mode must be one of {WILCOXON_MODES}")
        try:
            self.optimizer_config(DEFAULT_BUDGET)
            self.penalty_policy()
            if self.eval_budget is not None and self.eval_budget < self.population:
                raise ValueError("budget must be at least the population size")
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    def algorithm_ids(self) -> list:
        return [AlgorithmId.parse(a).value for a in self.algorithms]

    def penalty_policy(self) -> PenaltyPolicy:
        return PenaltyPolicy(self.penalty_coeff, self.penalty_exponent)

    def optimizer_config(self, budget: int) -> OptimizerConfig:
        return OptimizerConfig(
            population_size=self.population,
            eval_budget=budget,
            mutation_rate=self.mutation_rate,
            laplace=LaplaceParams(self.laplace_a, self.laplace_b, self.gamma_min, self.gamma_max, self.gamma_k),
            eq5_mode=self.eq5_mode,
            r2_mode=self.r2_mode,
            replace_mode=self.replace_mode,
        )

    def budget_for(self, problem: ObjectiveProblem) -> int:
        if self.eval_budget is not None:
            return int(self.eval_budget)
        return int(problem.default_budget or DEFAULT_BUDGET)


def expand_problem_ids(tokens) -> list:
    """Accept ids, ``benchmarks``/``engineering`` groups and ranges like ``F1-F13``."""
    out = []
    for token in tokens:
        token = token.strip()
        if not token:
            continue
        low = token.lower()
        if low == "benchmarks":
            out.extend(BENCHMARKS)
        elif low == "engineering":
            out.extend(ENGINEERING_IDS)
        elif re.fullmatch(r"[Ff]\d+-[Ff]\d+", token):
            a, b = (int(s[1:]) for s in token.split("-"))
            out.extend(f"F{i}" for i in range(a, b + 1))
        else:
            out.append(canonical_problem_id(token))
    return out


def canonical_problem_id(token: str) -> str:
    if re.fullmatch(r"[Ff]\d+", token):
        return token.upper()
    for pid in ENGINEERING_IDS:
        if pid.lower() == token.lower():
            return pid
    return token


def is_known_problem(pid: str) -> bool:
    return pid in BENCHMARKS or pid in ENGINEERING_IDS


def build_problem(pid: str, config: ExperimentConfig) -> ObjectiveProblem:
    if pid in BENCHMARKS:
        return get_benchmark(pid).problem()
    eng = get_engineering_problem(pid, integer_gear=config.integer_gear, bridge_mode=config.bridge_mode)
    return eng.to_objective(config.penalty_policy())


def _write_csv(path: Path, header, rows, comments=()) -> None:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def _read_csv(path: Path) -> list:
    with path.open() as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _position_text(x) -> str:
    return " ".join(fmt(float(v)) for v in np.asarray(x).ravel())


def run_experiment(config: ExperimentConfig) -> Path:
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    algorithms = config.algorithm_ids()

    trial_rows, summary_rows, budgets = [], [], {}
    results = {}
    for pid in config.problems:
        problem = build_problem(pid, config)
        budget = config.budget_for(problem)
        budgets[pid] = budget
        opt_config = config.optimizer_config(budget)
        for alg in algorithms:
            summary, runs = run_trials(problem, alg, opt_config, config.trials, config.base_seed)
            results[(alg, pid)] = runs
            summary_rows.append(
                [alg, pid, config.trials, budget, config.population, SEED_POLICY, config.base_seed]
                + [getattr(summary, c.lower()) for c in SUMMARY_COLUMNS]
            )
            for k, run in enumerate(runs):
                trial_rows.append(
                    [alg, pid, k, run.seed, budget, run.evals_used, run.best.fitness, _position_text(run.best.position)]
                )
                _write_csv(
                    out / "traces" / pid / alg / f"trial_{k:03d}.csv",
                    ["eval_count", "best_fitness"],
                    run.trace.points,
                    comments=[f"algorithm={alg} problem={pid} trial={k} seed={run.seed} budget={budget}"],
                )

    _write_csv(
        out / "trials.csv",
        ["algorithm", "problem", "trial", "seed", "budget", "evals_used", "best_fitness", "best_position"],
        trial_rows,
    )
    _write_csv(
        out / "summary.csv",
        ["algorithm", "problem", "trials", "budget", "population", "seed_policy", "base_seed", *SUMMARY_COLUMNS],
        summary_rows,
    )
    engineering = [pid for pid in config.problems if pid in ENGINEERING_IDS]
    if engineering:
        write_engineering_report(out / "engineering.csv", engineering, results, config)
    manifest = {
        "package_version": __version__,
        "config": asdict(config),
        "algorithms": algorithms,
        "budgets": budgets,
        "seed_policy": SEED_POLICY,
        "seeds": [trial_seed(config.base_seed, k) for k in range(config.trials)],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for a, b in itertools.combinations(algorithms, 2):
        compare_report(out, a, b, mode=config.wilcoxon)
    for pid in config.problems:
        export_traces(out, pid)

    return out


def write_engineering_report(path: Path, problem_ids, results, config: ExperimentConfig) -> None:
    """Best run per algorithm next to the published rows.

    Every published row is re-evaluated at its printed point so deltas
    between printed and recomputed values stay visible.
    """
    header = [
        "problem", "source", "technique", "x", "objective", "recomputed_objective",
        "delta", "reliability", "recomputed_reliability", "penalized_objective", "feasible",
    ]
    rows = []
    for pid in problem_ids:
        eng = get_engineering_problem(pid, integer_gear=config.integer_gear, bridge_mode=config.bridge_mode)
        policy = config.penalty_policy()
        for alg in config.algorithm_ids():
            runs = results.get((alg, pid))
            if not runs:
                continue
            best = min(runs, key=lambda r: r.best.fitness)
            x = best.best.position
            raw = float(eng.raw_objective(x))
            penalized = float(eng.to_objective(policy).evaluate(x))
            rel = reliability_of(pid, x)
            rows.append([
                pid, "this run", alg, _position_text(x), raw, raw, 0.0,
                "" if rel is None else rel, "" if rel is None else rel, penalized, _feasible(eng, x),
            ])
        for ref in reference_rows(pid):
            x = np.asarray(ref["x"], dtype=float)
            raw = float(eng.raw_objective(x))
            rel = reliability_of(pid, x)
            printed_rel = ref.get("reliability", "")
            penalized = float(eng.to_objective(policy).evaluate(np.clip(x, eng.space.lower, eng.space.upper)))
            rows.append([
                pid, "published reference", ref["technique"], _position_text(x), ref["objective"], raw,
                raw - ref["objective"], printed_rel, "" if rel is None else rel, penalized, _feasible(eng, x),
            ])
    _write_csv(path, header, rows, comments=[
        f"engineering report; per-trial budget per problem in summary.csv; {SEED_POLICY}; "
        f"penalty coefficient={fmt(config.penalty_coeff)} exponent={fmt(config.penalty_exponent)}",
    ])


def _feasible(eng, x) -> bool:
    x = np.asarray(x, dtype=float)
    in_box = eng.space.contains(x)
    viol = eng.violations(x)
    return bool(in_box and np.all(viol <= 0) and np.isfinite(eng.raw_objective(x)))


def _load_trials(results_dir: Path) -> list:
    path = Path(results_dir) / "trials.csv"
    if not path.exists():
        raise ValidationError(f"no trial records at {path}")
    return _read_csv(path)


def _fitness_by_trial(rows, algorithm, problem) -> dict:
    return {int(r["trial"]): float(r["best_fitness"]) for r in rows if r["algorithm"] == algorithm and r["problem"] == problem}


def compare_report(results_dir, algo_a: str, algo_b: str, mode: str = "signed_rank", problems=None) -> Path:
    """Per-problem paired t-test and Wilcoxon rows for ``algo_a`` vs ``algo_b``."""
    results_dir = Path(results_dir)
    a_id, b_id = AlgorithmId.parse(algo_a).value, AlgorithmId.parse(algo_b).value
    rows = _load_trials(results_dir)
    if problems is None:
        problems = list(dict.fromkeys(r["problem"] for r in rows))
    out_rows = []
    for pid in problems:
        fa = _fitness_by_trial(rows, a_id, pid)
        fb = _fitness_by_trial(rows, b_id, pid)
        for alg, rec in ((a_id, fa), (b_id, fb)):
            if not rec:
                raise ValidationError(f"missing trial records for ({alg}, {pid})")
        paired = sorted(set(fa) & set(fb))
        a = np.array([fa[k] for k in paired])
        b = np.array([fb[k] for k in paired])
        if len(paired) >= 2:
            tt = paired_t_test(a, b)
            t_fields = [tt.mean_diff, tt.std_diff, tt.std_error, tt.ci_low, tt.ci_high, tt.t, tt.p, tt.label]
        else:
            t_fields = [""] * 8
        wx = wilcoxon_test(a, b, mode)
        out_rows.append([pid, len(paired), *t_fields, wx.z, wx.p, wx.sign, wx.mode])
    header = [
        "problem", "n", "mean", "std_deviation", "std_error_mean", "ci95_lower", "ci95_upper",
        "t", "p", "conclusion", "wilcoxon_z", "wilcoxon_p", "wilcoxon_sign", "wilcoxon_mode",
    ]
    path = results_dir / f"compare_{a_id}_vs_{b_id}.csv"
    _write_csv(path, header, out_rows, comments=[
        f"{a_id} (first) vs {b_id} (second); differences first - second, paired by trial; {SEED_POLICY}",
        "conclusion: a+ p<=0.001, a p<=0.05, b otherwise; wilcoxon sign '+' = first significantly smaller",
    ])
    return path


def _read_trace(path: Path):
    rows = _read_csv(path)
    return np.array([int(r["eval_count"]) for r in rows]), np.array([float(r["best_fitness"]) for r in rows])


def checkpoint_grid(start: int, budget: int, count: int = CHECKPOINTS) -> np.ndarray:
    return np.unique(np.linspace(start, budget, count).round().astype(int))


def export_traces(results_dir, problem: str, count: int = CHECKPOINTS) -> list:
    """Median best-so-far curve per algorithm on a fixed checkpoint grid."""
    results_dir = Path(results_dir)
    base = results_dir / "traces" / problem
    if not base.is_dir():
        raise ValidationError(f"no traces recorded for problem {problem!r} under {results_dir}")
    manifest_path = results_dir / "manifest.json"
    population = None
    if manifest_path.exists():
        population = json.loads(manifest_path.read_text())["config"]["population"]
    written = []
    for alg_dir in sorted(p for p in base.iterdir() if p.is_dir()):
        files = sorted(alg_dir.glob("trial_*.csv"))
        if not files:
            raise ValidationError(f"no trace files for ({alg_dir.name}, {problem})")
        traces = [_read_trace(f) for f in files]
        budget = max(int(c[-1]) for c, _ in traces)
        start = population or min(int(c[0]) for c, _ in traces)
        grid = checkpoint_grid(start, budget, count)
        curves = []
        for counts, best in traces:
            idx = np.searchsorted(counts, grid, side="right") - 1
            curves.append(np.where(idx >= 0, best[np.clip(idx, 0, None)], best[0]))
        median = np.median(np.vstack(curves), axis=0)
        path = results_dir / "curves" / f"{problem}__{alg_dir.name}.csv"
        _write_csv(path, ["eval_count", "median_best_fitness"], zip(grid.tolist(), median.tolist()), comments=[
            f"algorithm={alg_dir.name} problem={problem} trials={len(files)} budget={budget} "
            f"statistic=median over trials; {SEED_POLICY}",
        ])
        written.append(path)
    return written


def problem_registry() -> list:
    rows = []
    for spec in BENCHMARKS.values():
        space = spec.space
        rows.append({"id": spec.id, "kind": "benchmark", "name": spec.name, "dim": spec.dim,
                     "lower": fmt(space.lower[0]), "upper": fmt(space.upper[0]), "f_min": fmt(spec.f_min),
                     "default_budget": DEFAULT_BUDGET})
    for pid in ENGINEERING_IDS:
        eng = get_engineering_problem(pid)
        rows.append({"id": pid, "kind": "engineering", "name": eng.description, "dim": eng.space.dim,
                     "lower": _position_text(eng.space.lower), "upper": _position_text(eng.space.upper),
                     "f_min": "", "default_budget": ENGINEERING_BUDGET})
    return rows

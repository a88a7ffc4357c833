"""Experiment orchestration and command-line entry points.

Configs are flat ``key = value`` lines (repeatable ``dataset`` and
``method`` keys); see the README for the full grammar.  Every method in
an experiment is evaluated on the identical per-dataset fold plan, and
the machine-readable results file is byte-identical across reruns of the
same config.  Exit codes: 0 success, 1 partial failure (some
dataset/method combination failed; everything else is still written),
2 configuration problem.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .combinatorics import (
    enumerate_splits,
    measure_subset_proportions,
    space_table,
)
from .data import Dataset, parse_arff, parse_csv, stratified_folds
from .dichotomy import build_nd
from .ensemble import (
    build_adaboost_ensemble,
    build_bagged_ensemble,
    build_multiboost_ensemble,
    build_random_ensemble,
)
from .errors import ConfigError, NDError
from .evaluation import CVResult, corrected_t, format_results_table, run_cv
from .learners import LogisticParams, TreeParams
from .seeds import child_seed
from .selection import STRATEGIES, SubsetSelector

ENSEMBLE_KINDS = ("none", "random", "bagging", "adaboost", "multiboost")

_ENSEMBLE_BUILDERS = {
    "random": build_random_ensemble,
    "bagging": build_bagged_ensemble,
    "adaboost": build_adaboost_ensemble,
    "multiboost": build_multiboost_ensemble,
}


@dataclass(frozen=True)
class DatasetRef:
    path: str
    format: str = ""  # inferred from the extension when empty
    class_col: int = -1
    header: bool = False

    @property
    def dataset_id(self) -> str:
        return Path(self.path).stem

    def load(self) -> Dataset:
        text = Path(self.path).read_text()
        fmt = self.format or Path(self.path).suffix.lstrip(".").lower()
        if fmt == "arff":
            return parse_arff(text)
        if fmt == "csv":
            return parse_csv(text, class_column=self.class_col, header=self.header)
        raise ConfigError(0, f"unknown dataset format {fmt!r} for {self.path}")


@dataclass(frozen=True)
class MethodSpec:
    name: str
    strategy_id: str = "random_pair"
    learner_kind: str = "logistic"
    ensemble_kind: str = "none"
    size: int = 1
    ridge: float = 1e-8
    max_iterations: int = 200
    gradient_tolerance: float = 1e-8
    min_leaf: int = 2
    pruning_confidence: float = 0.25
    use_gain_ratio: bool = True
    prune: bool = True
    subsample_cap: int | None = None  # overrides the experiment default

    def __post_init__(self):
        if self.strategy_id not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy_id!r}")
        if self.learner_kind not in ("logistic", "tree"):
            raise ValueError(f"unknown learner {self.learner_kind!r}")
        if self.ensemble_kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.ensemble_kind!r}")
        if self.size < 1:
            raise ValueError("ensemble size must be >= 1")

    def learner_params(self):
        if self.learner_kind == "logistic":
            return LogisticParams(
                ridge=self.ridge,
                max_iterations=self.max_iterations,
                gradient_tolerance=self.gradient_tolerance,
            )
        return TreeParams(
            min_instances_per_leaf=self.min_leaf,
            pruning_confidence=self.pruning_confidence,
            use_gain_ratio=self.use_gain_ratio,
            prune=self.prune,
        )

    def make_builder(self, default_cap: int | None):
        cap = self.subsample_cap if self.subsample_cap is not None else default_cap
        strategy = SubsetSelector(
            self.strategy_id, cap if self.strategy_id == "random_pair" else None
        )
        learner = self.learner_params()

        def builder(train: Dataset, seed: int):
            if self.ensemble_kind == "none":
                return build_nd(train, strategy, learner, seed)
            build = _ENSEMBLE_BUILDERS[self.ensemble_kind]
            return build(train, strategy, learner, self.size, seed)

        return builder


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetRef, ...]
    methods: tuple[MethodSpec, ...]
    k: int = 10
    repeats: int = 10
    seed: int = 1
    reference: str = ""  # defaults to the first method
    out: str = "results"
    jobs: int = 1
    subsample_cap: int | None = None

    def __post_init__(self):
        if not self.datasets:
            raise ValueError("at least one dataset required")
        if not self.methods:
            raise ValueError("at least one method required")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ValueError("method names must be unique")
        ref = self.reference or names[0]
        if ref not in names:
            raise ValueError(f"reference method {ref!r} not in the method list")
        object.__setattr__(self, "reference", ref)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

_BOOLS = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def _parse_bool(value: str, lineno: int) -> bool:
    try:
        return _BOOLS[value.lower()]
    except KeyError:
        raise ConfigError(lineno, f"expected a boolean, got {value!r}") from None


def _parse_tokens(text: str, lineno: int) -> dict[str, str]:
    out = {}
    for token in text.split():
        if "=" not in token:
            raise ConfigError(lineno, f"expected key=value, got {token!r}")
        key, _, value = token.partition("=")
        if not key or not value:
            raise ConfigError(lineno, f"expected key=value, got {token!r}")
        out[key] = value
    return out


def _method_from_tokens(tokens: dict[str, str], lineno: int) -> MethodSpec:
    converters = {
        "name": str,
        "strategy": str,
        "learner": str,
        "ensemble": str,
        "size": int,
        "ridge": float,
        "max_iter": int,
        "tol": float,
        "min_leaf": int,
        "cf": float,
        "gain_ratio": lambda v: _parse_bool(v, lineno),
        "prune": lambda v: _parse_bool(v, lineno),
        "cap": int,
    }
    rename = {
        "strategy": "strategy_id",
        "learner": "learner_kind",
        "ensemble": "ensemble_kind",
        "max_iter": "max_iterations",
        "tol": "gradient_tolerance",
        "cf": "pruning_confidence",
        "cap": "subsample_cap",
    }
    if "name" not in tokens:
        raise ConfigError(lineno, "method needs a name=... token")
    kwargs = {}
    for key, value in tokens.items():
        if key not in converters:
            raise ConfigError(lineno, f"unknown method option {key!r}")
        try:
            kwargs[rename.get(key, key)] = converters[key](value)
        except ValueError as exc:
            raise ConfigError(lineno, f"bad value for {key}: {exc}") from None
    try:
        return MethodSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(lineno, str(exc)) from None


def parse_config(text: str) -> ExperimentConfig:
    datasets: list[DatasetRef] = []
    methods: list[MethodSpec] = []
    scalars: dict[str, str] = {}
    scalar_lines: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(lineno, f"expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not value:
            raise ConfigError(lineno, f"empty value for {key!r}")
        if key == "dataset":
            parts = value.split()
            tokens = _parse_tokens(" ".join(parts[1:]), lineno)
            bad = set(tokens) - {"format", "class_col", "header"}
            if bad:
                raise ConfigError(lineno, f"unknown dataset option {bad.pop()!r}")
            try:
                datasets.append(
                    DatasetRef(
                        path=parts[0],
                        format=tokens.get("format", ""),
                        class_col=int(tokens.get("class_col", "-1")),
                        header=_parse_bool(tokens.get("header", "false"), lineno),
                    )
                )
            except ValueError as exc:
                raise ConfigError(lineno, str(exc)) from None
        elif key == "method":
            methods.append(_method_from_tokens(_parse_tokens(value, lineno), lineno))
        else:
            scalars[key] = value
            scalar_lines[key] = lineno

    def scalar_int(key: str, default: int) -> int:
        if key not in scalars:
            return default
        try:
            return int(scalars[key])
        except ValueError:
            raise ConfigError(
                scalar_lines[key], f"expected an integer for {key!r}"
            ) from None

    known = {"k", "repeats", "seed", "reference", "out", "jobs", "subsample_cap"}
    for key in scalars:
        if key not in known:
            raise ConfigError(scalar_lines[key], f"unknown config key {key!r}")
    try:
        return ExperimentConfig(
            datasets=tuple(datasets),
            methods=tuple(methods),
            k=scalar_int("k", 10),
            repeats=scalar_int("repeats", 10),
            seed=scalar_int("seed", 1),
            reference=scalars.get("reference", ""),
            out=scalars.get("out", "results"),
            jobs=scalar_int("jobs", 1),
            subsample_cap=scalar_int("subsample_cap", 0) or None,
        )
    except ValueError as exc:
        raise ConfigError(0, str(exc)) from None


# ---------------------------------------------------------------------------
# Experiment runner
# ---------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    exit_code: int
    files: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Evaluate every method on every dataset over one shared fold plan
    per dataset, then write the results table, the machine-readable
    results file, and the per-run timing file."""
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = ExperimentReport(exit_code=0)

    loaded: list[tuple[DatasetRef, Dataset]] = []
    for ref in cfg.datasets:
        try:
            loaded.append((ref, ref.load()))
        except (OSError, NDError) as exc:
            report.failures.append(f"{ref.dataset_id}: {exc}")

    ref_index = [m.name for m in cfg.methods].index(cfg.reference)
    results: dict[tuple[str, str], CVResult] = {}

    def one_cell(ref: DatasetRef, d: Dataset, plan, method: MethodSpec):
        builder = method.make_builder(cfg.subsample_cap)
        return run_cv(d, builder, plan, dataset_id=ref.dataset_id, method_id=method.name)

    jobs = []
    for ref, d in loaded:
        plan = stratified_folds(d, cfg.k, cfg.repeats, child_seed(cfg.seed, ref.dataset_id))
        for method in cfg.methods:
            jobs.append((ref, d, plan, method))

    def run_job(job):
        ref, d, plan, method = job
        return (ref.dataset_id, method.name), one_cell(ref, d, plan, method)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(run_job, job) for job in jobs]
            outcomes = []
            for job, fut in zip(jobs, futures):
                try:
                    outcomes.append(fut.result())
                except Exception as exc:
                    outcomes.append(((job[0].dataset_id, job[3].name), exc))
    else:
        outcomes = []
        for job in jobs:
            try:
                outcomes.append(run_job(job))
            except Exception as exc:
                outcomes.append(((job[0].dataset_id, job[3].name), exc))

    for key, value in outcomes:
        if isinstance(value, Exception):
            report.failures.append(f"{key[0]}/{key[1]}: {value}")
        else:
            results[key] = value

    _write_outputs(cfg, loaded, results, ref_index, out_dir, report)
    if report.failures:
        report.exit_code = 1
        for failure in report.failures:
            print(f"error: {failure}", file=sys.stderr)
    return report


def _write_outputs(cfg, loaded, results, ref_index, out_dir: Path, report):
    grid = []
    for ref, _ in loaded:
        row = [results.get((ref.dataset_id, m.name)) for m in cfg.methods]
        if all(r is not None for r in row):
            grid.append(row)

    if grid:
        table = format_results_table(grid, reference=ref_index)
        table_path = out_dir / "results.txt"
        table_path.write_text(table)
        report.files.append(str(table_path))

    csv_lines = ["dataset,method,mean,std,t_vs_reference,significant,plan"]
    for ref, _ in loaded:
        base = results.get((ref.dataset_id, cfg.reference))
        for method in cfg.methods:
            res = results.get((ref.dataset_id, method.name))
            if res is None:
                continue
            if method.name == cfg.reference or base is None:
                t_txt, sig_txt = "", ""
            else:
                outcome = corrected_t(base, res)
                t_txt = f"{outcome.t:.6f}" if math.isfinite(outcome.t) else (
                    "inf" if outcome.t > 0 else "-inf"
                )
                sig_txt = "1" if outcome.significant else "0"
            csv_lines.append(
                f"{res.dataset_id},{res.method_id},{res.mean:.10f},{res.std:.10f},"
                f"{t_txt},{sig_txt},{res.plan_fingerprint}"
            )
    csv_path = out_dir / "results.csv"
    csv_path.write_text("\n".join(csv_lines) + "\n")
    report.files.append(str(csv_path))

    timing_lines = ["dataset,method,repeat,fold,train_ms"]
    for (dataset_id, method_id), res in sorted(results.items()):
        for i, seconds in enumerate(res.train_seconds):
            r, f = divmod(i, res.k)
            timing_lines.append(
                f"{dataset_id},{method_id},{r},{f},{1000.0 * seconds:.3f}"
            )
    timing_path = out_dir / "timing.csv"
    timing_path.write_text("\n".join(timing_lines) + "\n")
    report.files.append(str(timing_path))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _load_data_args(paths) -> list[tuple[str, Dataset]]:
    out = []
    for p in paths:
        ref = DatasetRef(path=p)
        out.append((ref.dataset_id, ref.load()))
    return out


def _learner_from_args(args):
    if args.learner == "tree":
        return TreeParams()
    return LogisticParams()


def _cmd_space(args) -> int:
    lines = [
        f"{row.c},{row.full},{row.balanced},{round(row.random_pair_estimate)}"
        for row in space_table(args.max_c)
    ]
    _emit(lines, args.out)
    return 0


def _cmd_splits(args) -> int:
    lines = []
    for name, d in _load_data_args(args.data):
        census = enumerate_splits(
            d, d.classes_present(), _learner_from_args(args), cap=args.cap, seed=args.seed
        )
        lines.append(f"{census.n_classes},{census.distinct}")
        print(
            f"{name}: {census.distinct} distinct splits over "
            f"{census.pairs_tried} pairs at {census.n_classes} classes",
            file=sys.stderr,
        )
    _emit(lines, args.out)
    return 0


def _cmd_proportions(args) -> int:
    datasets = [d for _, d in _load_data_args(args.data)]
    strategy = SubsetSelector("random_pair", args.cap)
    mean = measure_subset_proportions(
        datasets, strategy, _learner_from_args(args), args.trees, args.seed
    )
    _emit([f"{mean:.6f}"], args.out)
    return 0


def _cmd_inspect(args) -> int:
    [(_, d)] = _load_data_args([args.data])
    strategy = SubsetSelector(args.strategy, args.cap)
    nd = build_nd(d, strategy, _learner_from_args(args), args.seed)
    _emit([(nd.to_dot() if args.dot else nd.to_text()).rstrip("\n")], args.out)
    return 0


def _cmd_train(args) -> int:
    [(_, d)] = _load_data_args([args.data])
    method = _method_from_tokens(_parse_tokens(args.method, 0), 0)
    model = method.make_builder(args.cap)(d, args.seed)
    text = model.to_model_text() if hasattr(model, "to_model_text") else model.to_text()
    _emit([text.rstrip("\n")], args.out)
    return 0


def _cmd_evaluate(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(0, f"cannot read config: {exc}") from exc
    cfg = parse_config(text)
    if args.out:
        cfg = replace(cfg, out=args.out)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    report = run_experiment(cfg)
    for path in report.files:
        print(path)
    return report.exit_code


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        print(text, end="")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndich", description="Nested dichotomies toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("space", help="tree-space size table")
    p.add_argument("--max-c", type=int, default=12)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_space)

    p = sub.add_parser("splits", help="distinct random-pair splits per dataset")
    p.add_argument("--data", action="append", required=True)
    p.add_argument("--learner", choices=("logistic", "tree"), default="logistic")
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_splits)

    p = sub.add_parser("proportions", help="mean smaller-subset share")
    p.add_argument("--data", action="append", required=True)
    p.add_argument("--trees", type=int, default=20)
    p.add_argument("--learner", choices=("logistic", "tree"), default="logistic")
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_proportions)

    p = sub.add_parser("inspect", help="dump one tree's structure")
    p.add_argument("--data", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="random_pair")
    p.add_argument("--learner", choices=("logistic", "tree"), default="logistic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("train", help="train one model and dump it")
    p.add_argument("--data", required=True)
    p.add_argument("--method", required=True, help="method tokens, e.g. "
                   "'name=m strategy=random_pair learner=logistic'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_train)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, NDError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

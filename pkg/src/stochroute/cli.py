"""Benchmark CLI: solve, construction ablations, sensitivity sweeps, oracles.

All randomness flows from ``--seed`` (run r uses seed+r), so any command
repeated with identical flags reproduces its output byte for byte except
the wall-clock cpu_s column.  Exit codes: 0 success, 2 parse/config error,
3 infeasible instance.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
from scipy import stats

from . import datasets
from .construct import ConstructParams, build_initial
from .model import Solution, UnrepairableError, evaluate
from .oracle import InfeasibleInstanceError, exhaustive, gen_tiny, simulate
from .report import Column, Report
from .search import SearchParams, run_pts, trace_to_csv
from .solomon import AugmentConfig, ParseError, StochasticInstance, augment, load_solomon

SEARCH_ALGOS = ("pts", "ts", "ga")
CONSTRUCT_ALGOS = ("gk", "kmeans", "greedy")


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_base(spec: str):
    path = Path(spec)
    if path.exists():
        try:
            return load_solomon(path)
        except ParseError as err:
            _fail(2, f"{path}: {err}")
    try:
        return datasets.load(spec)
    except FileNotFoundError:
        _fail(2, f"no such instance file or bundled name: {spec!r}")


def _prepare(spec: str, first_n: int, full: bool, cfg: AugmentConfig) -> StochasticInstance:
    base = _resolve_base(spec)
    if not full:
        if first_n > base.n:
            _fail(2, f"--first-n {first_n} exceeds instance size {base.n}")
        base = base.first(first_n)
    return augment(base, cfg)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _instance_options(f):
    for opt in reversed([
        click.option("--instance", "-i", "instances", multiple=True, required=True,
                     help="Instance file path or bundled name (e.g. C101); repeatable."),
        click.option("--first-n", default=25, show_default=True,
                     help="Use only the first n customers."),
        click.option("--full", is_flag=True, help="Use all customers."),
        click.option("--eps1", default=0.05, show_default=True,
                     help="Capacity chance level epsilon_1."),
        click.option("--eps2", default=0.05, show_default=True,
                     help="Time-window chance level epsilon_2."),
        click.option("--xi1", default=1000.0, show_default=True, help="Fixed cost per AMR."),
        click.option("--xi2", default=1.0, show_default=True, help="Cost per expected time unit."),
        click.option("--xi3", default=1.0, show_default=True, help="Delay penalty coefficient."),
        click.option("--speed-factor", default=1.0, show_default=True,
                     help="Travel time per distance unit."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True),
        click.option("--out", default=None, help="Write the report here instead of stdout."),
        click.option("--seed", default=0, show_default=True),
    ]):
        f = opt(f)
    return f


def _search_options(f):
    for opt in reversed([
        click.option("--runs", default=10, show_default=True),
        click.option("--iters", default=50, show_default=True),
        click.option("--pop", default=120, show_default=True),
        click.option("--xover", default=0.7, show_default=True),
        click.option("--mut", default=0.15, show_default=True),
        click.option("--fill-ratio", default=1.0, show_default=True),
        click.option("--tenure", default=7, show_default=True),
        click.option("--candidates", default=40, show_default=True),
        click.option("--k", default=None, type=int,
                     help="Cluster count (default: capacity heuristic)."),
    ]):
        f = opt(f)
    return f


def _cfg(eps1, eps2, xi1, xi2, xi3, speed_factor) -> AugmentConfig:
    try:
        return AugmentConfig(eps1=eps1, eps2=eps2, xi1=xi1, xi2=xi2, xi3=xi3,
                             speed_factor=speed_factor)
    except ValueError as err:
        _fail(2, str(err))


def _search_params(iters, pop, xover, mut, fill_ratio, tenure, candidates, k, mode) -> SearchParams:
    try:
        return SearchParams(iterations=iters, population=pop, crossover_prob=xover,
                            mutation_prob=mut, fill_ratio=fill_ratio, tenure=tenure,
                            candidates=candidates, mode=mode,
                            construct=ConstructParams(k=k))
    except ValueError as err:
        _fail(2, str(err))


def _run_algo(inst, algo, params_by_mode, k, seed):
    """One seeded run; returns (objective, solution, cpu_seconds)."""
    t0 = time.perf_counter()
    if algo in SEARCH_ALGOS:
        result = run_pts(inst, params_by_mode(algo), seed=seed)
        obj, sol = result.best_objective, result.best_solution
    else:
        sol = build_initial(inst, ConstructParams(k=k), rng=seed, method=algo)
        obj = evaluate(inst, sol)
    return obj, sol, time.perf_counter() - t0


_RUN_COLUMNS = (
    Column("kind", "str"), Column("instance", "str"), Column("n", "int"),
    Column("algo", "str"), Column("run", "int"), Column("seed", "int"),
    Column("scalar", "float"), Column("f1", "float"), Column("f2", "float"),
    Column("delay", "float"), Column("m", "int"), Column("cpu_s", "float"),
)


@click.group()
def main():
    """Stochastic multi-trip routing solver and benchmark harness."""


@main.command()
@_instance_options
@_search_options
@click.option("--algo", default="pts", show_default=True,
              help="Comma-separated subset of pts,ts,ga,gk,kmeans,greedy.")
@click.option("--save-solution", default=None,
              help="Write the overall best solution as JSON here.")
@click.option("--trace-out", default=None,
              help="Write the best run's iteration trace as CSV here.")
@click.option("--dump-instance", default=None,
              help="Write the augmented stochastic instance as JSON here.")
def solve(instances, first_n, full, eps1, eps2, xi1, xi2, xi3, speed_factor,
          fmt, out, seed, runs, iters, pop, xover, mut, fill_ratio, tenure,
          candidates, k, algo, save_solution, trace_out, dump_instance):
    """Seeded solver runs with per-run rows and best/average summaries."""
    algos = [a.strip() for a in algo.split(",") if a.strip()]
    for a in algos:
        if a not in SEARCH_ALGOS + CONSTRUCT_ALGOS:
            _fail(2, f"unknown algorithm {a!r}")
    cfg = _cfg(eps1, eps2, xi1, xi2, xi3, speed_factor)
    params_by_mode = lambda mode: _search_params(
        iters, pop, xover, mut, fill_ratio, tenure, candidates, k, mode)
    report = Report(_RUN_COLUMNS, [])
    best_overall = None
    best_trace = None
    for spec in instances:
        inst = _prepare(spec, first_n, full, cfg)
        if dump_instance:
            Path(dump_instance).write_text(inst.to_json(indent=2) + "\n",
                                           encoding="utf-8")
        averages = {}
        for a in algos:
            objs = []
            for r in range(runs):
                run_seed = seed + r
                t0 = time.perf_counter()
                if a in SEARCH_ALGOS:
                    try:
                        result = run_pts(inst, params_by_mode(a), seed=run_seed)
                    except UnrepairableError as err:
                        _fail(3, f"{inst.name}: {err}")
                    obj, sol = result.best_objective, result.best_solution
                    trace = result.trace
                else:
                    try:
                        sol = build_initial(inst, ConstructParams(k=k), rng=run_seed, method=a)
                    except UnrepairableError as err:
                        _fail(3, f"{inst.name}: {err}")
                    obj = evaluate(inst, sol)
                    trace = None
                cpu = time.perf_counter() - t0
                report.append("run", inst.name, inst.n, a, r, run_seed, obj.scalar,
                              obj.f1, obj.f2, obj.delay, obj.m, cpu)
                objs.append((obj, sol, trace))
            best = min(objs, key=lambda t: t[0].scalar)
            f_ave = sum(o.scalar for o, _, _ in objs) / len(objs)
            averages[a] = f_ave
            report.append("best", inst.name, inst.n, a, -1, seed, best[0].scalar,
                          best[0].f1, best[0].f2, best[0].delay, best[0].m, 0.0)
            report.append("ave", inst.name, inst.n, a, -1, seed, f_ave,
                          0.0, 0.0, 0.0, 0, 0.0)
            if best_overall is None or best[0].scalar < best_overall[0].scalar:
                best_overall = (best[0], best[1])
                best_trace = best[2]
        if "pts" in averages:
            for a in algos:
                if a == "pts":
                    continue
                gap = (averages[a] - averages["pts"]) / averages["pts"] * 100.0
                report.append("gap_vs_pts", inst.name, inst.n, a, -1, seed, gap,
                              0.0, 0.0, 0.0, 0, 0.0)
    _emit(report.render(fmt), out)
    if save_solution and best_overall:
        doc = best_overall[1].to_json_dict(best_overall[0])
        Path(save_solution).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if trace_out and best_trace:
        Path(trace_out).write_text(trace_to_csv(best_trace), encoding="utf-8")


@main.command()
@_instance_options
@click.option("--runs", default=10, show_default=True)
@click.option("--k", default=None, type=int)
def initials(instances, first_n, full, eps1, eps2, xi1, xi2, xi3, speed_factor,
             fmt, out, seed, runs, k):
    """Construction comparison: gk and kmeans over seeds, greedy once."""
    cfg = _cfg(eps1, eps2, xi1, xi2, xi3, speed_factor)
    report = Report(_RUN_COLUMNS, [])
    for spec in instances:
        inst = _prepare(spec, first_n, full, cfg)
        averages = {}
        for method in ("gk", "kmeans", "greedy"):
            n_runs = 1 if method == "greedy" else runs
            objs = []
            for r in range(n_runs):
                run_seed = seed + r
                t0 = time.perf_counter()
                try:
                    sol = build_initial(inst, ConstructParams(k=k), rng=run_seed,
                                        method=method)
                except UnrepairableError as err:
                    _fail(3, f"{inst.name}: {err}")
                obj = evaluate(inst, sol)
                cpu = time.perf_counter() - t0
                report.append("run", inst.name, inst.n, method, r, run_seed,
                              obj.scalar, obj.f1, obj.f2, obj.delay, obj.m, cpu)
                objs.append(obj)
            best = min(objs, key=lambda o: o.scalar)
            f_ave = sum(o.scalar for o in objs) / len(objs)
            averages[method] = f_ave
            report.append("best", inst.name, inst.n, method, -1, seed, best.scalar,
                          best.f1, best.f2, best.delay, best.m, 0.0)
            report.append("ave", inst.name, inst.n, method, -1, seed, f_ave,
                          0.0, 0.0, 0.0, 0, 0.0)
        imp1 = (averages["kmeans"] - averages["gk"]) / averages["kmeans"] * 100.0
        imp2 = (averages["greedy"] - averages["gk"]) / averages["greedy"] * 100.0
        report.append("imp1", inst.name, inst.n, "gk_vs_kmeans", -1, seed, imp1,
                      0.0, 0.0, 0.0, 0, 0.0)
        report.append("imp2", inst.name, inst.n, "gk_vs_greedy", -1, seed, imp2,
                      0.0, 0.0, 0.0, 0, 0.0)
    _emit(report.render(fmt), out)


_SENS_COLUMNS = (
    Column("kind", "str"), Column("instance", "str"), Column("level", "float"),
    Column("runs", "int"), Column("m_mean", "float"), Column("tds_mean", "float"),
    Column("scalar_mean", "float"),
)


@main.command()
@_instance_options
@_search_options
@click.option("--levels", default="0.6,0.7,0.8,0.9,0.95", show_default=True,
              help="Comma-separated capacity confidence levels (1 - eps1).")
def sensitivity(instances, first_n, full, eps1, eps2, xi1, xi2, xi3, speed_factor,
                fmt, out, seed, runs, iters, pop, xover, mut, fill_ratio, tenure,
                candidates, k, levels):
    """Re-solve per capacity-confidence level; emits m and total delay trends."""
    try:
        level_values = [float(tok) for tok in levels.split(",") if tok.strip()]
    except ValueError:
        _fail(2, f"bad --levels {levels!r}")
    for lv in level_values:
        if not 0.5 < lv < 1.0:
            _fail(2, f"levels must lie in (0.5, 1), got {lv}")
    params_by_mode = lambda mode: _search_params(
        iters, pop, xover, mut, fill_ratio, tenure, candidates, k, mode)
    report = Report(_SENS_COLUMNS, [])
    agg = {lv: ([], []) for lv in level_values}
    for spec in instances:
        for lv in level_values:
            cfg = _cfg(1.0 - lv, eps2, xi1, xi2, xi3, speed_factor)
            inst = _prepare(spec, first_n, full, cfg)
            ms, tds, scalars = [], [], []
            for r in range(runs):
                try:
                    result = run_pts(inst, params_by_mode("pts"), seed=seed + r)
                except UnrepairableError as err:
                    _fail(3, f"{inst.name}: {err}")
                ms.append(result.best_objective.m)
                tds.append(result.best_objective.delay)
                scalars.append(result.best_objective.scalar)
            m_mean = sum(ms) / len(ms)
            tds_mean = sum(tds) / len(tds)
            report.append("level", inst.name, lv, runs, m_mean, tds_mean,
                          sum(scalars) / len(scalars))
            agg[lv][0].append(m_mean)
            agg[lv][1].append(tds_mean)
    m_means = [sum(agg[lv][0]) / len(agg[lv][0]) for lv in level_values]
    tds_means = [sum(agg[lv][1]) / len(agg[lv][1]) for lv in level_values]
    for lv, mm, tm in zip(level_values, m_means, tds_means):
        report.append("aggregate", "all", lv, runs, mm, tm, 0.0)
    if len(level_values) >= 2:
        report.append("spearman", "all", -1.0, runs,
                      _spearman(level_values, m_means),
                      _spearman(level_values, tds_means), 0.0)
    _emit(report.render(fmt), out)


def _spearman(x, y) -> float:
    """Rank correlation; 0.0 when one side is constant (no trend resolvable)."""
    if len(set(x)) < 2 or len(set(y)) < 2:
        return 0.0
    return float(stats.spearmanr(x, y).statistic)


@main.command(name="simulate")
@_instance_options
@click.option("--solution", default=None,
              help="Solution JSON to replay (default: simulate a fresh gk build).")
@click.option("--samples", default=100_000, show_default=True)
def simulate_cmd(instances, first_n, full, eps1, eps2, xi1, xi2, xi3, speed_factor,
                 fmt, out, seed, solution, samples):
    """Monte-Carlo replay of a solution; emits the SimReport as JSON."""
    if len(instances) != 1:
        _fail(2, "simulate expects exactly one --instance")
    cfg = _cfg(eps1, eps2, xi1, xi2, xi3, speed_factor)
    inst = _prepare(instances[0], first_n, full, cfg)
    if solution:
        try:
            doc = json.loads(Path(solution).read_text(encoding="utf-8"))
            sol = Solution.from_json_dict(doc)
        except (OSError, ValueError, KeyError) as err:
            _fail(2, f"cannot read solution {solution!r}: {err}")
    else:
        try:
            sol = build_initial(inst, rng=seed, method="gk")
        except UnrepairableError as err:
            _fail(3, f"{inst.name}: {err}")
    if samples < 1:
        _fail(2, "--samples must be >= 1")
    rep = simulate(inst, sol, samples=samples, seed=seed)
    _emit(json.dumps(rep.to_json_dict(), indent=2) + "\n", out)


@main.command(name="oracle")
@click.option("--instance", "-i", "instance", default=None,
              help="Instance file path or bundled name (first-n must keep n <= 8).")
@click.option("--first-n", default=6, show_default=True)
@click.option("--tiny-n", default=None, type=int,
              help="Generate a tiny instance of this size instead.")
@click.option("--tiny-seed", default=0, show_default=True)
@click.option("--profile", default="default", show_default=True,
              type=click.Choice(["default", "windowed"]))
@click.option("--eps1", default=0.05, show_default=True)
@click.option("--eps2", default=0.05, show_default=True)
@click.option("--out", default=None)
def oracle_cmd(instance, first_n, tiny_n, tiny_seed, profile, eps1, eps2, out):
    """Exhaustive optimum of a tiny instance."""
    if (instance is None) == (tiny_n is None):
        _fail(2, "oracle needs exactly one of --instance or --tiny-n")
    if tiny_n is not None:
        if not 1 <= tiny_n <= 8:
            _fail(2, "--tiny-n must be in 1..8")
        inst = gen_tiny(tiny_n, seed=tiny_seed, profile=profile)
        inst = inst.with_confidence(eps1=eps1, eps2=eps2)
    else:
        cfg = _cfg(eps1, eps2, 1000.0, 1.0, 1.0, 1.0)
        inst = _prepare(instance, first_n, False, cfg)
        if inst.n > 8:
            _fail(2, f"exhaustive search needs n <= 8, got {inst.n}")
    try:
        sol, obj = exhaustive(inst)
    except InfeasibleInstanceError as err:
        _fail(3, str(err))
    doc = {"instance": inst.name, "solution": sol.to_json_dict(obj)}
    _emit(json.dumps(doc, indent=2) + "\n", out)


if __name__ == "__main__":
    main()

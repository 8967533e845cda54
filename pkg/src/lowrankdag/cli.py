"""Command-line interface: gen, simulate, fit, bounds, bench.

Exit codes: 0 on success; 1 on usage, I/O, or validation errors; 2 when a
generator reports FAIL or a fit does not converge.

The ``--config`` flag (and ``--plan`` for bench) accepts either a path to a
JSON file or an inline JSON object (any argument starting with "{").
"""

import argparse
import dataclasses
import hashlib
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import numpy as np

from . import generate, graph, metrics, sem, solver

logger = logging.getLogger(__name__)

WORKERS_ENV = "LOWRANKDAG_WORKERS"
METHODS = ("baseline", "lowrank", "lowrank+nuclear")
DEFAULT_NUCLEAR_WEIGHT = 0.1
GRID_KEYS = ("kind", "d", "deg", "r", "rank_hat", "method", "noise", "n")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to 1 (2 means FAIL here)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_json(arg: str) -> dict:
    text = arg if arg.lstrip().startswith("{") else Path(arg).read_text()
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    return obj


def _stage_seeds(seed: int) -> tuple[int, int, int, int]:
    """Independent per-stage seeds (graph, weights, data, solver) from one seed."""
    state = np.random.SeedSequence(seed).generate_state(4)
    return tuple(int(v) for v in state)


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# gen / simulate / fit / bounds
# ---------------------------------------------------------------------------

def _gen_config(cfg: dict, seed_override) -> tuple[str, generate.GenConfig]:
    cfg = dict(cfg)
    kind = cfg.pop("kind", "rank")
    if kind not in ("rank", "er", "sf"):
        raise ValueError(f"unknown generator kind {kind!r}")
    if seed_override is not None:
        cfg["seed"] = seed_override
    lo = cfg.pop("weight_lo", None)
    hi = cfg.pop("weight_hi", None)
    if (lo is None) != (hi is None):
        raise ValueError("weight_lo and weight_hi must be given together")
    if lo is not None:
        cfg["weight_range"] = (float(lo), float(hi))
    return kind, generate.GenConfig(**cfg)


def _generate_graph(kind: str, cfg: generate.GenConfig) -> graph.Dag | None:
    if kind == "rank":
        return generate.gen_rank_specified(cfg)
    if kind == "er":
        return generate.gen_erdos_renyi(cfg)
    return generate.gen_scale_free(cfg)


def cmd_gen(args) -> int:
    if args.config is None:
        raise ValueError("gen requires --config with at least d, deg, and kind-specific keys")
    kind, cfg = _gen_config(_load_json(args.config), args.seed)
    g = _generate_graph(kind, cfg)
    if g is None:
        print("FAIL: generator could not reach the requested edge count at the "
              "requested rank", file=sys.stderr)
        return 2
    out = g if args.no_weights else generate.assign_weights(g, cfg)
    graph.write_edge_list(args.out, out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_json(args.config) if args.config else {}
    if args.seed is not None:
        cfg["seed"] = args.seed
    g = graph.read_edge_list(args.graph)
    if not isinstance(g, graph.WeightedDag):
        raise ValueError(f"{args.graph}: simulate requires a weighted edge list")
    data = sem.simulate_linear(
        g, n=int(cfg.get("n", 1000)), noise=cfg.get("noise", "gaussian"),
        seed=int(cfg.get("seed", 0)), standardize=bool(cfg.get("standardize", False)))
    data.save_csv(args.out)
    return 0


def _solver_config(cfg: dict, seed_override) -> solver.SolverConfig:
    cfg = dict(cfg)
    if seed_override is not None:
        cfg["seed"] = seed_override
    return solver.SolverConfig(**cfg)


def _fit_payload(result: solver.FitResult, cfg: solver.SolverConfig,
                 pruned: graph.WeightedDag | None) -> dict:
    payload = {
        "config": dataclasses.asdict(cfg),
        "h_final": result.h_final,
        "converged": result.converged,
        "outer_iters": result.outer_iters,
        "cycles_removed": result.cycles_removed,
        "wall_time": result.wall_time,
        "w_star": result.w_star.tolist(),
        "trace": [dataclasses.asdict(s) for s in result.objective_trace],
    }
    if pruned is not None:
        payload["pruned_edges"] = {f"{i},{j}": w for (i, j), w in sorted(pruned.weights.items())}
    return payload


def cmd_fit(args) -> int:
    cfg = _solver_config(_load_json(args.config) if args.config else {}, args.seed)
    data = sem.Dataset.load_csv(args.data)
    result = solver.fit(data, cfg)
    pruned = None
    final_graph: graph.Dag | graph.WeightedDag = result.dag
    if not args.no_prune:
        pruned = solver.prune_refit(data, result.dag, cfg.w_threshold)
        final_graph = pruned
    if args.out:
        _write_json(args.out, _fit_payload(result, cfg, pruned))
    if args.out_graph:
        graph.write_edge_list(args.out_graph, final_graph)
    if not result.converged:
        print(f"fit did not converge: h_final={result.h_final:.3e}", file=sys.stderr)
        return 2
    return 0


def cmd_bounds(args) -> int:
    g = graph.read_edge_list(args.graph)
    base = g.graph if isinstance(g, graph.WeightedDag) else g
    bounds = graph.rank_bounds(base)
    cover = graph.min_head_tail_cover(base)
    payload = {"d": base.d, "num_edges": base.num_edges, **bounds.as_dict(),
               "min_cover": {"heads": sorted(cover.heads),
                             "tails": sorted(cover.tails), "size": cover.size}}
    if isinstance(g, graph.WeightedDag):
        payload["numeric_rank"] = graph.numeric_rank(g)
    if args.out:
        _write_json(args.out, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class BenchPlan:
    """A validated benchmark sweep: the cell grid, seeds, and solver overrides."""

    cells: tuple[dict, ...]
    seeds: tuple[int, ...]
    solver: dict
    prune: bool

    @classmethod
    def from_json(cls, obj: dict) -> "BenchPlan":
        grid = dict(obj.get("grid", {}))
        unknown = set(grid) - set(GRID_KEYS)
        if unknown:
            raise ValueError(f"unknown grid keys: {sorted(unknown)}")
        axes = []
        for key in GRID_KEYS:
            default = {"kind": ["rank"], "noise": ["gaussian"], "rank_hat": [None],
                       "r": [None]}.get(key)
            vals = grid.get(key, default)
            if vals is None:
                raise ValueError(f"bench plan grid is missing {key!r}")
            if not isinstance(vals, list) or not vals:
                raise ValueError(f"grid[{key!r}] must be a non-empty list")
            axes.append(vals)
        cells = [dict(zip(GRID_KEYS, combo)) for combo in itertools.product(*axes)]
        seeds = obj.get("seeds", [0])
        if not isinstance(seeds, list):
            raise ValueError("seeds must be a list of integers")
        plan = cls(cells=tuple(cells), seeds=tuple(int(s) for s in seeds),
                   solver=dict(obj.get("solver", {})),
                   prune=bool(obj.get("prune", True)))
        for cell in plan.cells:
            _cell_configs(cell, 0, plan.solver)  # validate every cell up front
        return plan


def _cell_configs(cell: dict, seed: int, solver_overrides: dict):
    if cell["method"] not in METHODS:
        raise ValueError(f"unknown method {cell['method']!r}, expected one of {METHODS}")
    graph_seed, weight_seed, data_seed, solver_seed = _stage_seeds(seed)
    gen_cfg = generate.GenConfig(
        d=int(cell["d"]), deg=float(cell["deg"]),
        r=None if cell["r"] is None else int(cell["r"]),
        gamma=float(cell["gamma"]) if cell.get("gamma") is not None else None,
        seed=graph_seed)
    if cell["kind"] == "rank" and gen_cfg.r is None:
        raise ValueError("kind 'rank' requires r")
    if cell["kind"] == "sf" and gen_cfg.gamma is None:
        gen_cfg = dataclasses.replace(gen_cfg, gamma=2.0)
    overrides = dict(solver_overrides)
    overrides["seed"] = solver_seed
    if cell["method"] == "baseline":
        overrides["rank_hat"] = None
        overrides.setdefault("lambda_nuc", 0.0)
    else:
        if cell["rank_hat"] is None:
            raise ValueError(f"method {cell['method']!r} requires rank_hat")
        overrides["rank_hat"] = int(cell["rank_hat"])
        if cell["method"] == "lowrank+nuclear":
            if not overrides.get("lambda_nuc"):
                overrides["lambda_nuc"] = DEFAULT_NUCLEAR_WEIGHT
        else:
            overrides.setdefault("lambda_nuc", 0.0)
    fit_cfg = solver.SolverConfig(**overrides)
    n = int(cell["n"])
    if n < 1:
        raise ValueError("n must be >= 1")
    return gen_cfg, dataclasses.replace(gen_cfg, seed=weight_seed), data_seed, fit_cfg, n


def _config_hash(cell: dict, seed: int, solver_overrides: dict, prune: bool) -> str:
    blob = json.dumps({"cell": cell, "seed": seed, "solver": solver_overrides,
                       "prune": prune}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _cached_dataset(wg: graph.WeightedDag, n: int, noise: str, data_seed: int,
                    cache_dir: Path) -> sem.Dataset:
    key_src = [f"n={n}", f"noise={noise}", f"seed={data_seed}", f"d={wg.d}"]
    key_src += [f"{i},{j},{graph.format_float(w)}" for (i, j), w in sorted(wg.weights.items())]
    key = hashlib.sha256("\n".join(key_src).encode()).hexdigest()[:24]
    path = cache_dir / f"{key}.csv"
    if path.exists():
        return sem.Dataset.load_csv(path)
    data = sem.simulate_linear(wg, n=n, noise=noise, seed=data_seed)
    rows = "\n".join(",".join(graph.format_float(v) for v in row) for row in data.X)
    _atomic_write(path, rows + "\n")
    return data


def bench_run(cell: dict, seed: int, solver_overrides: dict, prune: bool,
              cache_dir: str) -> dict:
    """Execute one (cell, seed) benchmark run; never raises for run failures."""
    row = {"config_hash": _config_hash(cell, seed, solver_overrides, prune),
           "seed": seed, **{k: cell.get(k) for k in GRID_KEYS},
           "status": "ok", "shd": None, "tpr": None, "fdr": None,
           "seconds": None, "h_final": None, "converged": None}
    try:
        gen_cfg, weight_cfg, data_seed, fit_cfg, n = _cell_configs(
            cell, seed, solver_overrides)
        truth = _generate_graph(cell["kind"], gen_cfg)
        if truth is None:
            row["status"] = "gen_fail"
            return row
        wg = generate.assign_weights(truth, weight_cfg)
        data = _cached_dataset(wg, n, cell["noise"], data_seed, Path(cache_dir))
        t0 = time.perf_counter()
        result = solver.fit(data, fit_cfg)
        est = solver.prune_refit(data, result.dag, fit_cfg.w_threshold).graph \
            if prune else result.dag
        seconds = time.perf_counter() - t0
        tpr, fdr = metrics.tpr_fdr(truth, est)
        row.update(shd=metrics.shd(truth, est), tpr=tpr, fdr=fdr,
                   seconds=seconds, h_final=result.h_final,
                   converged=result.converged)
        if not result.converged:
            row["status"] = "not_converged"
    except Exception as exc:  # a failed run is recorded, never fatal
        logger.exception("bench run failed (seed=%d)", seed)
        row["status"] = f"error: {exc}"
    return row


_CSV_FIELDS = ("config_hash", "seed", "kind", "d", "deg", "r", "rank_hat",
               "method", "noise", "n", "status", "shd", "tpr", "fdr",
               "seconds", "h_final", "converged")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return graph.format_float(v)
    return str(v)


def _summarize(rows: list[dict]) -> dict:
    cells: dict[tuple, dict] = {}
    for row in rows:
        key = tuple(row[k] for k in GRID_KEYS)
        cells.setdefault(key, {"cell": {k: row[k] for k in GRID_KEYS},
                               "runs": 0, "statuses": {}, "reports": []})
        agg = cells[key]
        agg["runs"] += 1
        agg["statuses"][row["status"]] = agg["statuses"].get(row["status"], 0) + 1
        if row["shd"] is not None:
            agg["reports"].append(metrics.MetricsReport(
                shd=row["shd"], tpr=row["tpr"], fdr=row["fdr"],
                wall_time=row["seconds"]))
    out = []
    for key in sorted(cells, key=lambda k: tuple(str(x) for x in k)):
        agg = cells[key]
        entry = {"cell": agg["cell"], "runs": agg["runs"], "statuses": agg["statuses"]}
        if agg["reports"]:
            entry["metrics"] = metrics.aggregate(agg["reports"])
        out.append(entry)
    return {"cells": out}


def _worker_cap(flag_value) -> int:
    if flag_value:
        return max(1, int(flag_value))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def cmd_bench(args) -> int:
    plan = BenchPlan.from_json(_load_json(args.plan))
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        cache_dir = out_dir / "cache"
        cache_dir.mkdir(exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output dir {out_dir} is not writable: {exc}") from exc

    tasks = [(ci, cell, seed) for ci, cell in enumerate(plan.cells)
             for seed in plan.seeds]
    rows: dict[tuple[int, int], dict] = {}
    workers = min(_worker_cap(args.workers), max(1, len(tasks)))
    done = 0
    if workers == 1:
        for ci, cell, seed in tasks:
            rows[(ci, seed)] = bench_run(cell, seed, plan.solver, plan.prune,
                                         str(cache_dir))
            done += 1
            print(f"[{done}/{len(tasks)}] cell={ci} seed={seed} "
                  f"status={rows[(ci, seed)]['status']}", file=sys.stderr)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(bench_run, cell, seed, plan.solver, plan.prune,
                                   str(cache_dir)): (ci, seed)
                       for ci, cell, seed in tasks}
            for fut in as_completed(futures):
                ci, seed = futures[fut]
                rows[(ci, seed)] = fut.result()
                done += 1
                print(f"[{done}/{len(tasks)}] cell={ci} seed={seed} "
                      f"status={rows[(ci, seed)]['status']}", file=sys.stderr)

    ordered = [rows[key] for key in sorted(rows)]
    lines = [",".join(_CSV_FIELDS)]
    lines += [",".join(_csv_cell(row[f]) for f in _CSV_FIELDS) for row in ordered]
    _atomic_write(out_dir / "results.csv", "\n".join(lines) + "\n")
    _atomic_write(out_dir / "summary.json",
                  json.dumps(_summarize(ordered), indent=2, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="lowrankdag",
                     description="Low-rank DAG structure learning toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the seed in --config")
    common.add_argument("--config", default=None,
                        help="JSON object (inline or a file path)")

    p = sub.add_parser("gen", parents=[common], help="generate a random DAG")
    p.add_argument("--out", required=True, help="output edge-list path")
    p.add_argument("--no-weights", action="store_true",
                   help="emit structure only (default assigns weights)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", parents=[common], help="sample a linear SEM")
    p.add_argument("--graph", required=True, help="weighted edge-list path")
    p.add_argument("--out", required=True, help="output dataset CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common], help="estimate a DAG from data")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--out", default=None, help="output JSON path")
    p.add_argument("--out-graph", default=None, help="estimated edge-list path")
    p.add_argument("--no-prune", action="store_true",
                   help="skip the least-squares pruning pass")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bounds", help="graphical rank bounds of a graph file")
    p.add_argument("--graph", required=True, help="edge-list path")
    p.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--plan", required=True, help="plan JSON (inline or path)")
    p.add_argument("--out-dir", required=True, help="results directory")
    p.add_argument("--workers", type=int, default=None,
                   help=f"parallel worker cap (default: {WORKERS_ENV} or cpu count)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

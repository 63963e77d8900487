"""Experiment orchestration: validated configs, seeded row fan-out over a
bounded worker pool, and deterministic CSV/JSON/SVG artifacts with a run
manifest.

Rows always land in files in deterministic order (and with deterministic
bytes) regardless of worker scheduling; per-row failures go to a sidecar
file instead of aborting the run.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, ensembles, gaussian, ho, lovasz, serialize, spectral, svgplot
from .majorana import PackedTerms
from .rng import derive_seed

EXPERIMENTS = ("universality", "gap", "witness", "lovasz-scaling")


class ConfigError(ValueError):
    """Invalid experiment config; carries every detected problem."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    raw: dict = field(repr=False)

    @classmethod
    def from_dict(cls, data):
        problems = []
        experiment = data.get("experiment")
        if experiment not in EXPERIMENTS:
            problems.append(
                f"experiment must be one of {EXPERIMENTS}, got {experiment!r}"
            )
            raise ConfigError(problems)
        check = _VALIDATORS[experiment]
        problems = check(data)
        if problems:
            raise ConfigError(problems)
        return cls(experiment=experiment, raw=dict(data))

    def __getitem__(self, key):
        return self.raw[key]

    def get(self, key, default=None):
        return self.raw.get(key, default)


def _listify(value):
    return value if isinstance(value, (list, tuple)) else [value]


def _common_problems(data, n_even=False, n_cap=None):
    problems = []
    ns = _listify(data.get("n", []))
    if not ns:
        problems.append("grid 'n' must be a nonempty list")
    for n in ns:
        if not isinstance(n, int) or n < 2:
            problems.append(f"n={n!r} must be an integer >= 2")
        elif n_even and n % 2:
            problems.append(f"n={n} must be even for this experiment")
        elif n_cap is not None and n > n_cap:
            problems.append(f"n={n} above the cap {n_cap} for this experiment")
    ps = _listify(data.get("p", []))
    if not ps:
        problems.append("grid 'p' must be a nonempty list")
    for p in ps:
        if not isinstance(p, (int, float)) or not 0 < p <= 1:
            problems.append(f"p={p!r} outside (0, 1]")
    trials = data.get("trials")
    if not isinstance(trials, int) or trials < 1:
        problems.append(f"trials={trials!r} must be a positive integer")
    seed = data.get("seed")
    if not isinstance(seed, int):
        problems.append(f"seed={seed!r} must be an integer")
    return problems


def _validate_universality(data):
    cap = (spectral.LANCZOS_QUBIT_CAP
           if data.get("method", "auto") != "dense" else 14)
    return _common_problems(data, n_cap=cap)


def _validate_gap(data):
    problems = _common_problems(data, n_cap=8)
    for n in _listify(data.get("n", [])):
        if isinstance(n, int) and n >= 2:
            n1 = ensembles.default_partition(n)
            ext = 4 * n - n1
            if ext > ho.SWEEP_MAJORANA_CAP:
                problems.append(
                    f"n={n} needs a {ext}-Majorana extended register, above "
                    f"the sweep cap {ho.SWEEP_MAJORANA_CAP}"
                )
    step = data.get("theta_step", 0.01)
    if not 0 < step <= 1:
        problems.append(f"theta_step={step!r} outside (0, 1]")
    return problems


def _validate_witness(data):
    return _common_problems(data, n_even=True)


def _validate_lovasz(data):
    problems = []
    n = data.get("n", 5)
    q = data.get("q", 4)
    if not isinstance(n, int) or n < 2:
        problems.append(f"n={n!r} must be an integer >= 2")
    if not isinstance(q, int) or q % 2 or q < 2 or (isinstance(n, int) and q > 2 * n):
        problems.append(f"q={q!r} must be even with 2 <= q <= 2n")
    if isinstance(n, int) and isinstance(q, int) and 2 <= q <= 2 * n:
        if math.comb(2 * n, q) > 1200:
            problems.append(
                f"full graph has {math.comb(2 * n, q)} vertices, above the "
                "solver budget of 1200"
            )
    ps = _listify(data.get("p", []))
    if len(set(ps)) < 3:
        problems.append("grid 'p' needs at least 3 distinct values for the fit")
    for p in ps:
        if not isinstance(p, (int, float)) or not 0 < p <= 1:
            problems.append(f"p={p!r} outside (0, 1]")
    trials = data.get("trials")
    if not isinstance(trials, int) or trials < 1:
        problems.append(f"trials={trials!r} must be a positive integer")
    if not isinstance(data.get("seed"), int):
        problems.append(f"seed={data.get('seed')!r} must be an integer")
    return problems


_VALIDATORS = {
    "universality": _validate_universality,
    "gap": _validate_gap,
    "witness": _validate_witness,
    "lovasz-scaling": _validate_lovasz,
}


def pool_map(fn, jobs):
    """Bounded-pool map preserving job order; SYKLAB_THREADS caps workers."""
    jobs = list(jobs)
    workers = int(os.environ.get("SYKLAB_THREADS", "0") or 0)
    if workers <= 0:
        workers = min(8, os.cpu_count() or 1)
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _guarded(fn):
    def wrapped(job):
        try:
            return fn(job)
        except Exception as exc:  # noqa: BLE001 - row isolation by contract
            return exc

    return wrapped


@dataclass
class RunResult:
    out_dir: Path
    files: dict
    failures: list


def _write_manifest(out_dir, config, row_seeds, timings):
    manifest = {
        "experiment": config.experiment,
        "config": config.raw,
        "config_hash": serialize.config_hash(config.raw),
        "version": __version__,
        "row_seeds": row_seeds,
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
    }
    serialize.save_json(manifest, out_dir / "manifest.json")


def _write_failures(out_dir, failures):
    if failures:
        serialize.write_csv(
            out_dir / "failures.csv",
            ["kind", "key", "message"],
            [(kind, key, msg.replace(",", ";")) for kind, key, msg in failures],
        )


def run_universality(config, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    spec = ensembles.EnsembleSpec(
        model="ssyk",
        p_grid=tuple(_listify(config["p"])),
        trials=config["trials"],
        base_seed=config["seed"],
        n=tuple(_listify(config["n"])),
        q=config.get("q", 4),
        method=config.get("method", "auto"),
        tol=config.get("tol", 1e-8),
    )
    table = spectral.universality_scan(spec, pool_map=pool_map)
    scan_time = time.perf_counter() - t0

    serialize.write_csv(
        out_dir / "table.csv",
        ["n", "p", "seed", "lambda_max", "lambda_over_sqrt_n", "residual",
         "iterations"],
        table.rows,
    )
    summary = {
        "cells": [
            {"n": n, "p": p, "mean_lambda_over_sqrt_n": mean, "std": std,
             "trials": count}
            for n, p, mean, std, count in table.cells
        ]
    }
    serialize.save_json(summary, out_dir / "summary.json")
    failures = [("row", f"n={n},p={p},seed={s}", msg)
                for n, p, s, msg in table.failures]
    _write_failures(out_dir, failures)
    _write_manifest(out_dir, config, [r[2] for r in table.rows],
                    {"scan": scan_time})
    return RunResult(out_dir, {"table": out_dir / "table.csv",
                               "summary": out_dir / "summary.json"}, failures)


def _gap_row(job):
    n, p, seed, restarts, theta_step, theta_max, method = job
    inst = ensembles.sample_syk(n, 4, p, seed)
    if not inst.terms:
        return (n, p, seed, 0.0, 0.0, 0.0, 0.0, 0.0)
    lam = spectral.lambda_max(inst, method=method, seed=seed).lambda_max
    opt = gaussian.gaussian_maximize(inst, restarts=restarts)
    n1 = ensembles.default_partition(n)
    twoc, c3, tbar = ensembles.extract_two_color(inst, n1)
    ws = ho.SweepWorkspace(twoc)
    grid = np.arange(0.0, theta_max + 1e-12, theta_step)
    sweep = ho.theta_sweep(twoc, grid, workspace=ws)
    rho_star = ws.state(sweep.best_theta)
    ext = twoc.n_modes
    tbar_energy = 0.0
    if tbar:
        h_tbar = PackedTerms([(c, m.embed(ext)) for c, m in tbar], ext)
        tbar_energy = float(np.real(np.trace(rho_star @ h_tbar.materialize())))
    ho_full = c3 * sweep.best_energy + tbar_energy
    gauss_ratio = gaussian.approx_factor(opt.energy, lam) if lam > 0 else 0.0
    ho_ratio = ho_full / lam if lam > 0 else 0.0
    return (n, p, seed, lam, opt.energy, ho_full, gauss_ratio, ho_ratio)


def run_gap(config, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    jobs = [
        (n, p, derive_seed(config["seed"], t), config.get("restarts", 4),
         config.get("theta_step", 0.01), config.get("theta_max", 1.0),
         config.get("method", "auto"))
        for n in _listify(config["n"])
        for p in _listify(config["p"])
        for t in range(config["trials"])
    ]
    outcomes = pool_map(_guarded(_gap_row), jobs)
    rows, failures = [], []
    for job, outcome in zip(jobs, outcomes):
        if isinstance(outcome, Exception):
            failures.append(("row", f"n={job[0]},p={job[1]},seed={job[2]}",
                             str(outcome)))
        else:
            rows.append(outcome)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    serialize.write_csv(
        out_dir / "gap.csv",
        ["n", "p", "seed", "lambda_max", "lambda_gauss", "ho_energy_on_full",
         "gauss_ratio", "ho_ratio"],
        rows,
    )
    cells = []
    for n in _listify(config["n"]):
        for p in _listify(config["p"]):
            sub = [r for r in rows if r[0] == n and r[1] == p]
            if sub:
                cells.append({
                    "n": n, "p": p, "trials": len(sub),
                    "mean_lambda_max": float(np.mean([r[3] for r in sub])),
                    "mean_lambda_gauss": float(np.mean([r[4] for r in sub])),
                    "mean_ho_energy": float(np.mean([r[5] for r in sub])),
                    "mean_gauss_ratio": float(np.mean([r[6] for r in sub])),
                    "mean_ho_ratio": float(np.mean([r[7] for r in sub])),
                })
    serialize.save_json({"cells": cells}, out_dir / "summary.json")
    _write_failures(out_dir, failures)
    _write_manifest(out_dir, config, [r[2] for r in rows],
                    {"rows": time.perf_counter() - t0})
    return RunResult(out_dir, {"table": out_dir / "gap.csv",
                               "summary": out_dir / "summary.json"}, failures)


def _witness_row(job):
    n, p, seed, zero_couplings = job
    inst = ensembles.sample_syk(n, 4, p, seed)
    if zero_couplings:
        inst = ensembles.SykInstance(
            n=inst.n, q=inst.q, p=inst.p, seed=inst.seed,
            terms=tuple((0.0, m) for _, m in inst.terms),
        )
    _, energy = gaussian.explicit_witness(inst)
    return (n, p, seed, energy)


def run_witness(config, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    zero = bool(config.get("zero_couplings", False))
    jobs = [
        (n, p, derive_seed(config["seed"], t), zero)
        for n in _listify(config["n"])
        for p in _listify(config["p"])
        for t in range(config["trials"])
    ]
    outcomes = pool_map(_guarded(_witness_row), jobs)
    rows, failures = [], []
    for job, outcome in zip(jobs, outcomes):
        if isinstance(outcome, Exception):
            failures.append(("row", f"n={job[0]},p={job[1]},seed={job[2]}",
                             str(outcome)))
        else:
            rows.append(outcome)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    serialize.write_csv(out_dir / "witness.csv", ["n", "p", "seed", "energy"],
                        rows)
    cells = []
    for n in _listify(config["n"]):
        for p in _listify(config["p"]):
            vals = [r[3] for r in rows if r[0] == n and r[1] == p]
            if vals:
                cells.append({"n": n, "p": p, "trials": len(vals),
                              "mean_energy": float(np.mean(vals)),
                              "std_energy": float(np.std(vals))})
    serialize.save_json({"cells": cells}, out_dir / "summary.json")
    _write_failures(out_dir, failures)
    _write_manifest(out_dir, config, [r[2] for r in rows],
                    {"rows": time.perf_counter() - t0})
    return RunResult(out_dir, {"table": out_dir / "witness.csv",
                               "summary": out_dir / "summary.json"}, failures)


def run_lovasz_scaling(config, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    n, q = config.get("n", 5), config.get("q", 4)
    tol = config.get("tol", 1e-7)
    parent = lovasz.build_graph(lovasz.degree_q_monomials(n, q))
    parent_name = f"degree-{q} graph on 2n={2 * n}"
    ps = sorted(_listify(config["p"]))
    jobs = [
        (p, t, derive_seed(config["seed"], t))
        for p in ps
        for t in range(config["trials"])
    ]

    def row(job):
        p, trial, seed = job
        sub = lovasz.sparsify_vertices(parent, p, seed, parent=parent_name)
        res = lovasz.lovasz_theta(sub, tol=tol)
        return (p, trial, sub.n_vertices, res.theta, res.converged)

    outcomes = pool_map(_guarded(row), jobs)
    rows, failures = [], []
    for job, outcome in zip(jobs, outcomes):
        if isinstance(outcome, Exception):
            failures.append(("row", f"p={job[0]},trial={job[1]}", str(outcome)))
        else:
            rows.append(outcome)
    rows.sort(key=lambda r: (r[0], r[1]))
    serialize.write_csv(out_dir / "fig1.csv",
                        ["p", "trial", "vertices", "theta", "converged"], rows)
    dropped = sum(1 for r in rows if not r[4])
    if dropped:
        failures.append(("fit", "non-converged rows",
                         f"{dropped} rows excluded from the fit"))
    points = []
    for p in ps:
        thetas = [r[3] for r in rows if r[0] == p and r[4]]
        if thetas:
            points.append((p, float(np.mean(thetas)), float(np.std(thetas)),
                           len(thetas)))
    fit = lovasz.sqrt_scaling_fit(points)
    serialize.save_json(
        {
            "c1": fit.c1,
            "c2": fit.c2,
            "residual_sqrt": fit.residual_sqrt,
            "residual_linear": fit.residual_linear,
            "points": [
                {"p": p, "theta_mean": m, "theta_std": s, "trials": k}
                for p, m, s, k in fit.points
            ],
        },
        out_dir / "fit.json",
    )
    grid = np.linspace(min(ps), max(ps), 100)
    curve = [(float(p), fit.c1 * math.sqrt(p) + fit.c2) for p in grid]
    svgplot.scatter_plot(
        out_dir / "plot.svg",
        [(p, m, s) for p, m, s, _ in fit.points],
        curves=[(f"{fit.c1:.3g} sqrt(p) + {fit.c2:.3g}", curve)],
        title="Lovasz theta of sparsified commutation graphs",
        xlabel="sparsity p",
        ylabel="theta",
    )
    _write_failures(out_dir, failures)
    _write_manifest(out_dir, config, [j[2] for j in jobs],
                    {"rows": time.perf_counter() - t0})
    return RunResult(
        out_dir,
        {"table": out_dir / "fig1.csv", "fit": out_dir / "fit.json",
         "plot": out_dir / "plot.svg"},
        failures,
    )


_RUNNERS = {
    "universality": run_universality,
    "gap": run_gap,
    "witness": run_witness,
    "lovasz-scaling": run_lovasz_scaling,
}


def run_experiment(config_data, out_dir):
    """Validate and dispatch; accepts a raw config dict or a manifest dict
    (reruns of a manifest reproduce its data files byte for byte)."""
    if "config" in config_data and "experiment" in config_data:
        config_data = config_data["config"]
    config = ExperimentConfig.from_dict(config_data)
    return _RUNNERS[config.experiment](config, out_dir)

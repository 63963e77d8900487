"""syklab command line: sampling, spectra, Gaussian optimization, variational
sweeps, theta scans, and full experiments.

Exit codes: 0 success, 2 config error, 3 partial failure (some rows failed),
4 solver failure.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__, ensembles, gaussian, ho, lovasz, serialize, spectral
from .harness import ConfigError, run_experiment
from .majorana import apply_monomial, materialize, monomial, multiply, weyl_brauer_matrix
from .rng import stream

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3
EXIT_SOLVER = 4


def _parse_p_grid(text):
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        values = []
        p = start
        while p <= stop + 1e-12:
            values.append(round(p, 12))
            p += step
        return values
    return [float(x) for x in text.split(",")]


def cmd_algebra_check(args):
    """Compare the fast symplectic algebra against Kronecker-product matrices."""
    n, trials = args.n, args.trials
    gen = stream(args.seed, "algebra-check")
    gammas = [weyl_brauer_matrix(i, n) for i in range(1, 2 * n + 1)]

    def dense_of(m):
        out = np.eye(1 << n, dtype=complex) * (1j ** m.phase_quarter)
        for i in m.indices:
            out = out @ gammas[i - 1]
        return out

    def rand_monomial():
        q = int(gen.integers(0, 2 * n + 1))
        idx = np.sort(gen.choice(2 * n, size=q, replace=False) + 1)
        return monomial(idx, n, int(gen.integers(0, 4)))

    checks = {"product": 0, "anticommute": 0, "apply": 0}
    failures = {k: 0 for k in checks}
    for _ in range(trials):
        a, b = rand_monomial(), rand_monomial()
        prod = multiply(a, b)
        checks["product"] += 1
        if not np.array_equal(dense_of(a) @ dense_of(b), materialize(prod)):
            failures["product"] += 1
        checks["anticommute"] += 1
        acomm = dense_of(a) @ dense_of(b) + dense_of(b) @ dense_of(a)
        from .majorana import anticommutes

        if anticommutes(a, b) != bool(np.allclose(acomm, 0)):
            failures["anticommute"] += 1
        checks["apply"] += 1
        vec = gen.standard_normal(1 << n) + 1j * gen.standard_normal(1 << n)
        got = apply_monomial(a, vec, scale=1.0)
        if np.max(np.abs(got - dense_of(a) @ vec)) > 1e-12:
            failures["apply"] += 1

    print(f"{'check':<14}{'trials':>8}{'failures':>10}  status")
    ok = True
    for name in checks:
        status = "pass" if failures[name] == 0 else "FAIL"
        ok = ok and failures[name] == 0
        print(f"{name:<14}{checks[name]:>8}{failures[name]:>10}  {status}")
    return EXIT_OK if ok else EXIT_SOLVER


def cmd_sample(args):
    if args.model in ("syk", "ssyk"):
        if args.n is None:
            print("--n is required for the syk/ssyk models", file=sys.stderr)
            return EXIT_CONFIG
        p = 1.0 if args.model == "syk" else args.p
        inst = ensembles.sample_syk(args.n, args.q, p, args.seed)
    else:
        if args.n1 is None or args.n2 is None:
            print("--n1 and --n2 are required for the two-color model",
                  file=sys.stderr)
            return EXIT_CONFIG
        inst = ensembles.sample_two_color(args.n1, args.n2, args.p, args.seed)
    serialize.save_json(inst.to_dict(), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_spectrum(args):
    inst = serialize.load_instance(args.inp)
    result = spectral.lambda_max(inst, method=args.method, tol=args.tol,
                                 seed=args.seed)
    print(json.dumps({
        "lambda_max": result.lambda_max,
        "residual": result.residual,
        "iterations": result.iterations,
        "method": result.method,
        "converged": result.converged,
    }, indent=2))
    return EXIT_OK if result.converged else EXIT_SOLVER


def cmd_scan_universality(args):
    data = serialize.load_json(args.config)
    try:
        spec = ensembles.EnsembleSpec(
            model=data.get("model", "ssyk"),
            p_grid=tuple(data["p"]),
            trials=data["trials"],
            base_seed=data["seed"],
            n=tuple(data["n"]) if isinstance(data["n"], list) else data["n"],
            q=data.get("q", 4),
            method=data.get("method", "auto"),
            tol=data.get("tol", 1e-8),
        ).validate()
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    from .harness import pool_map

    table = spectral.universality_scan(spec, pool_map=pool_map)
    serialize.write_csv(
        args.out,
        ["n", "p", "seed", "lambda_max", "lambda_over_sqrt_n", "residual",
         "iterations"],
        table.rows,
    )
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    for n, p, mean, std, count in table.cells:
        print(f"  n={n} p={p}: mean lambda/sqrt(n) = {mean:.6f} "
              f"(std {std:.6f}, {count} trials)")
    if table.failures:
        print(f"{len(table.failures)} rows failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_gaussian_opt(args):
    inst = serialize.load_instance(args.inp)
    result = gaussian.gaussian_maximize(inst, restarts=args.restarts)
    payload = {
        "energy": result.energy,
        "gamma": [float(x) for x in result.gamma_star.ravel()],
        "iterations": result.iterations,
        "method": "gradient-ascent",
    }
    serialize.save_json(payload, args.out)
    print(f"lambda_gauss = {result.energy!r} -> {args.out}")
    return EXIT_OK


def cmd_gaussian_witness(args):
    inst = serialize.load_instance(args.inp)
    sigma, energy = gaussian.explicit_witness(inst)
    print(f"witness energy = {energy!r}")
    if args.out:
        serialize.save_json({
            "energy": energy,
            "gamma": [float(x) for x in sigma.ravel()],
            "iterations": 0,
            "method": "explicit-witness",
        }, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_ho_sweep(args):
    inst = serialize.load_instance(args.inp)
    grid = np.arange(0.0, args.theta_max + 1e-12, args.step)
    sweep = ho.theta_sweep(inst, grid)
    serialize.write_csv(args.out, ["theta", "energy"],
                        list(zip(sweep.thetas, sweep.energies)))
    print(f"wrote {args.out}")
    print(f"best theta = {sweep.best_theta!r}, energy = {sweep.best_energy!r}")
    print(f"S = {sweep.single_commutator!r}, D = {sweep.double_commutator_norm!r}")
    return EXIT_OK


def cmd_ho_commutators(args):
    inst = serialize.load_instance(args.inp)
    route_a, route_b = ho.single_commutator_value(inst)
    norm = ho.double_commutator_norm(inst)
    print(f"single commutator, matrix route   = {route_a!r}")
    print(f"single commutator, coupling route = {route_b!r}")
    print(f"double commutator operator norm   = {norm!r}")
    return EXIT_OK


def cmd_theta_graph(args):
    parent = lovasz.build_graph(lovasz.degree_q_monomials(args.n, args.q))
    print(f"parent graph: {parent.n_vertices} vertices, {parent.n_edges} edges")
    rows = []
    from .rng import derive_seed

    for p in _parse_p_grid(args.p_grid):
        for trial in range(args.trials):
            sub = lovasz.sparsify_vertices(
                parent, p, derive_seed(args.seed, trial),
                parent=f"degree-{args.q} graph on 2n={2 * args.n}",
            )
            res = lovasz.lovasz_theta(sub, tol=args.tol)
            rows.append((p, trial, sub.n_vertices, res.theta, res.converged))
    serialize.write_csv(args.out,
                        ["p", "trial", "vertices", "theta", "converged"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    if any(not r[4] for r in rows):
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_theta_fit(args):
    header, raw = serialize.read_csv(args.inp)
    idx = {name: k for k, name in enumerate(header)}
    by_p = {}
    for row in raw:
        if row[idx["converged"]] != "true":
            continue
        by_p.setdefault(float(row[idx["p"]]), []).append(float(row[idx["theta"]]))
    points = [(p, float(np.mean(v)), float(np.std(v)), len(v))
              for p, v in sorted(by_p.items())]
    fit = lovasz.sqrt_scaling_fit(points)
    print(f"c1 = {fit.c1!r}")
    print(f"c2 = {fit.c2!r}")
    print(f"residual_sqrt = {fit.residual_sqrt!r}")
    print(f"residual_linear = {fit.residual_linear!r}")
    if args.plot:
        import math

        from . import svgplot

        ps = [p for p, *_ in points]
        grid = np.linspace(min(ps), max(ps), 100)
        curve = [(float(p), fit.c1 * math.sqrt(p) + fit.c2) for p in grid]
        svgplot.scatter_plot(
            args.plot,
            [(p, m, s) for p, m, s, _ in points],
            curves=[(f"{fit.c1:.3g} sqrt(p) + {fit.c2:.3g}", curve)],
            title="Lovasz theta of sparsified commutation graphs",
            xlabel="sparsity p",
            ylabel="theta",
        )
        print(f"wrote {args.plot}")
    return EXIT_OK


def cmd_experiment_run(args):
    data = serialize.load_json(args.config)
    try:
        result = run_experiment(data, args.out)
    except ConfigError as exc:
        print("config errors:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_CONFIG
    for name, path in result.files.items():
        print(f"{name}: {path}")
    if result.failures:
        print(f"{len(result.failures)} rows failed "
              f"(see {result.out_dir / 'failures.csv'})", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="syklab",
        description="Numerical laboratory for sparse SYK Hamiltonians",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    algebra = sub.add_parser("algebra", help="algebra self-checks")
    algebra_sub = algebra.add_subparsers(dest="subcommand", required=True)
    check = algebra_sub.add_parser("check", help="compare against dense oracles")
    check.add_argument("--n", type=int, default=4)
    check.add_argument("--trials", type=int, default=100)
    check.add_argument("--seed", type=int, default=0)
    check.set_defaults(func=cmd_algebra_check)

    sample = sub.add_parser("sample", help="sample a seeded instance")
    sample.add_argument("--model", choices=["syk", "ssyk", "two-color"],
                        required=True)
    sample.add_argument("--n", type=int)
    sample.add_argument("--n1", type=int)
    sample.add_argument("--n2", type=int)
    sample.add_argument("--q", type=int, default=4)
    sample.add_argument("--p", type=float, default=1.0)
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--out", required=True)
    sample.set_defaults(func=cmd_sample)

    spectrum = sub.add_parser("spectrum", help="extremal eigenvalue")
    spectrum.add_argument("--in", dest="inp", required=True)
    spectrum.add_argument("--method", choices=["dense", "lanczos", "auto"],
                          default="lanczos")
    spectrum.add_argument("--tol", type=float, default=1e-8)
    spectrum.add_argument("--seed", type=int, default=0)
    spectrum.set_defaults(func=cmd_spectrum)

    scan = sub.add_parser("scan", help="ensemble scans")
    scan_sub = scan.add_subparsers(dest="subcommand", required=True)
    uni = scan_sub.add_parser("universality", help="lambda_max across (n, p)")
    uni.add_argument("--config", required=True)
    uni.add_argument("--out", required=True)
    uni.set_defaults(func=cmd_scan_universality)

    gauss = sub.add_parser("gaussian", help="Gaussian-state tools")
    gauss_sub = gauss.add_subparsers(dest="subcommand", required=True)
    opt = gauss_sub.add_parser("opt", help="maximize energy over Gaussian states")
    opt.add_argument("--in", dest="inp", required=True)
    opt.add_argument("--restarts", type=int, default=8)
    opt.add_argument("--out", required=True)
    opt.set_defaults(func=cmd_gaussian_opt)
    wit = gauss_sub.add_parser("witness", help="explicit constant-energy state")
    wit.add_argument("--in", dest="inp", required=True)
    wit.add_argument("--out")
    wit.set_defaults(func=cmd_gaussian_witness)

    ho_cmd = sub.add_parser("ho", help="variational rotation tools")
    ho_sub = ho_cmd.add_subparsers(dest="subcommand", required=True)
    sweep = ho_sub.add_parser("sweep", help="energy across a theta grid")
    sweep.add_argument("--in", dest="inp", required=True)
    sweep.add_argument("--theta-max", type=float, default=1.0)
    sweep.add_argument("--step", type=float, default=0.01)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_ho_sweep)
    comm = ho_sub.add_parser("commutators", help="single/double commutator values")
    comm.add_argument("--in", dest="inp", required=True)
    comm.set_defaults(func=cmd_ho_commutators)

    theta = sub.add_parser("theta", help="Lovasz theta tools")
    theta_sub = theta.add_subparsers(dest="subcommand", required=True)
    graph = theta_sub.add_parser("graph", help="theta across sparsifications")
    graph.add_argument("--n", type=int, default=5)
    graph.add_argument("--q", type=int, default=4)
    graph.add_argument("--p-grid", default="0.1:1.0:0.1")
    graph.add_argument("--trials", type=int, default=10)
    graph.add_argument("--seed", type=int, default=9)
    graph.add_argument("--tol", type=float, default=1e-7)
    graph.add_argument("--out", required=True)
    graph.set_defaults(func=cmd_theta_graph)
    fit = theta_sub.add_parser("fit", help="sqrt(p) vs linear scaling fit")
    fit.add_argument("--in", dest="inp", required=True)
    fit.add_argument("--plot")
    fit.set_defaults(func=cmd_theta_fit)

    exp = sub.add_parser("experiment", help="end-to-end studies")
    exp_sub = exp.add_subparsers(dest="subcommand", required=True)
    run = exp_sub.add_parser("run", help="run a config, emit artifacts + manifest")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_experiment_run)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

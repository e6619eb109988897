"""Command-line surface.

Subcommands
-----------
simulate     run a Monte Carlo scenario and write the curve CSV (+ figure)
estimate     estimate the degree of noncircularity of a dataset CSV
linear-demo  one random linear-model instance with its evidence breakdown
paradox      signal-scale and prior-spread sweeps contrasting the tilted
             evidence with the conjugate-prior Bayes factor
converge     record-length sweep reporting when each criterion reaches a
             target probability of correct order

Every command that writes files also writes a manifest.json, last, listing
them; its presence signals a completed run. Exit codes: 0 success, 2 config
error, 3 numerical failure, 4 IO error. The MOSEL_SEED environment variable
supplies the default seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .criteria import Criterion
from .dataio import load_dataset_csv, save_dataset_csv
from .errors import ConfigError, FormatError, MoselError, NumericalError
from .linear_eef import (
    LinearModel,
    bayes_factor_g_prior,
    eef_llr,
    estimate_eta,
    projection_statistic,
)
from .noncircularity import estimate_degree
from .numerics import stream
from .simulation import (
    builtin_scenario,
    convergence_sweep,
    run_trial,
    run_scenario,
    scenario_config_from_mapping,
    scenario_config_to_mapping,
    synthesize_record,
    write_pc_curve_csv,
)

_SCENARIO_NAMES = ("sim1", "sim2", "sim3", "sim4")


def _default_seed() -> int:
    raw = os.environ.get("MOSEL_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"MOSEL_SEED must be an integer, got {raw!r}") from None


def _resolve_seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _parse_criteria(text: str) -> tuple[Criterion, ...]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ConfigError("criteria list is empty")
    try:
        crits = tuple(Criterion(name) for name in names)
    except ValueError:
        valid = ", ".join(c.value for c in Criterion)
        raise ConfigError(f"unknown criterion in {text!r}; valid: {valid}") from None
    if len(set(crits)) != len(crits):
        raise ConfigError(f"criteria must be distinct, got {text!r}")
    return crits


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{flag} must be a comma-separated integer list, got {text!r}") from None
    if not values:
        raise ConfigError(f"{flag} list is empty")
    return values


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(
    out: Path,
    command: str,
    config: dict,
    master_seed: int,
    outputs: list[str],
    started: float,
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "master_seed": master_seed,
        "version": __version__,
        "outputs": outputs,
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print(f"wrote {out / 'manifest.json'}")


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    if args.scenario == "custom":
        if args.config is None:
            raise ConfigError("--scenario custom requires --config file.json")
        try:
            with open(args.config) as f:
                mapping = json.load(f)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad JSON in {args.config}: {exc}") from None
        cfg = scenario_config_from_mapping(mapping)
        if args.trials is not None:
            cfg = dataclasses.replace(cfg, n_trials=args.trials)
        if args.seed is not None or "MOSEL_SEED" in os.environ:
            cfg = dataclasses.replace(cfg, master_seed=seed)
    else:
        cfg = builtin_scenario(
            args.scenario,
            n_trials=args.trials if args.trials is not None else 200,
            master_seed=seed,
        )

    out = _out_dir(args)
    outputs: list[str] = []

    curve = run_scenario(cfg, n_workers=args.threads)
    curve_path = out / "pc_curve.csv"
    write_pc_curve_csv(curve, curve_path)
    outputs.append(curve_path.name)
    print(f"wrote {curve_path}")

    for criterion in cfg.criteria:
        mean_pc = sum(curve.p_c[criterion].values()) / len(cfg.true_orders)
        print(f"  {criterion.value:5s} mean p_c over true orders: {mean_pc:.4f}")

    if not args.no_plot:
        from .report import plot_pc_curve

        fig_path = plot_pc_curve(curve, out / "pc_curve.png")
        outputs.append(fig_path.name)
        print(f"wrote {fig_path}")

    if args.gnuplot:
        from .report import gnuplot_script

        script_path = out / "pc_curve.plt"
        script_path.write_text(gnuplot_script(curve_path.name, cfg.criteria))
        outputs.append(script_path.name)
        print(f"wrote {script_path}")

    if args.dump_data:
        selections: dict[str, dict[str, int]] = {}
        for true_k in sorted(cfg.true_orders):
            record = synthesize_record(cfg, true_k, stream(cfg.master_seed, true_k, 0))
            data_path = out / f"dataset_k{true_k}_trial0.csv"
            save_dataset_csv(record, data_path)
            outputs.append(data_path.name)
            chosen = run_trial(cfg, true_k, 0)
            selections[str(true_k)] = {c.value: int(v) for c, v in chosen.items()}
        sel_path = out / "dump_selections.json"
        with open(sel_path, "w") as f:
            json.dump(selections, f, indent=2)
            f.write("\n")
        outputs.append(sel_path.name)
        print(f"wrote trial-0 datasets and {sel_path}")

    _write_manifest(
        out, "simulate", scenario_config_to_mapping(cfg), cfg.master_seed, outputs, started
    )
    return 0


def cmd_estimate(args) -> int:
    started = time.perf_counter()
    criteria = _parse_criteria(args.criteria)
    dataset = load_dataset_csv(args.input)
    result = estimate_degree(dataset, criteria=criteria, include_null=args.include_null)

    report = {
        "input": str(args.input),
        "n_dim": dataset.n_dim,
        "n_samples": dataset.n_samples,
        "spectrum": [float(v) for v in result.spectrum.coefficients],
        "evidence": [
            {"k": k, "llr": llr, "dim": dim}
            for k, (llr, dim) in enumerate(result.evidence, start=1)
        ],
        "criteria": {
            criterion.value: {
                "selected": scores.selected,
                "scores": {str(k): v for k, v in sorted(scores.scores.items())},
                "excluded": list(scores.excluded),
            }
            for criterion, scores in result.per_criterion.items()
        },
    }

    print(f"dataset: {dataset.n_samples} samples of dimension {dataset.n_dim}")
    print("circularity coefficients: " + ", ".join(f"{v:.4f}" for v in result.spectrum.coefficients))
    for criterion in criteria:
        scores = result.per_criterion[criterion]
        print(f"  {criterion.value:5s} selected degree {scores.selected}")

    out = _out_dir(args)
    outputs = []
    json_path = out / "estimate.json"
    with open(json_path, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    outputs.append(json_path.name)
    print(f"wrote {json_path}")

    if not args.no_plot:
        from .report import plot_spectrum

        fig_path = plot_spectrum(result.spectrum.coefficients, out / "spectrum.png")
        outputs.append(fig_path.name)
        print(f"wrote {fig_path}")

    config = {
        "input": str(args.input),
        "criteria": [c.value for c in criteria],
        "include_null": args.include_null,
    }
    _write_manifest(out, "estimate", config, 0, outputs, started)
    return 0


def cmd_linear_demo(args) -> int:
    if args.sigma2 <= 0:
        raise ConfigError(f"--sigma2 must be > 0, got {args.sigma2}")
    if not (1 <= args.k <= args.n):
        raise ConfigError(f"need 1 <= k <= n, got k={args.k}, n={args.n}")
    seed = _resolve_seed(args)
    rng = stream(seed, 101)
    h = rng.standard_normal((args.n, args.k))
    theta = rng.standard_normal(args.k)
    x = h @ theta + math.sqrt(args.sigma2) * rng.standard_normal(args.n)

    model = LinearModel(h=h, sigma2=args.sigma2)
    l_g = projection_statistic(x, model)
    eta_hat = estimate_eta(x, model)
    breakdown = eef_llr(x, model)

    # Grid oracle: maximize the tilted log-density over a 1e-4-spaced grid.
    qtx = model.basis.T @ x
    t = float(qtx @ qtx)
    xx = float(x @ x)
    etas = np.arange(10000) * 1e-4
    curve = (
        -0.5 * args.n * math.log(2.0 * math.pi * args.sigma2)
        + 0.5 * args.k * np.log1p(-etas)
        - (xx - etas * t) / (2.0 * args.sigma2)
    )
    eta_grid = float(etas[int(np.argmax(curve))])
    delta = abs(eta_hat - eta_grid)

    print(f"n={args.n} k={args.k} sigma2={args.sigma2} seed={seed}")
    print(f"l_g       = {l_g:.6f}")
    print(f"eta_hat   = {eta_hat:.6f}")
    print(f"snr_hat   = {breakdown.snr_hat:.6f}")
    print(f"mi_hat    = {breakdown.mi_hat:.6f}")
    print(f"evidence  = {breakdown.eef:.6f}")
    print(f"grid eta  = {eta_grid:.6f}  |delta| = {delta:.2e}")
    if breakdown.active:
        print(f"identity: evidence - (snr_hat - mi_hat) = "
              f"{breakdown.eef - (breakdown.snr_hat - breakdown.mi_hat):.3e}")
    if delta > 1e-4 + 1e-12:
        raise NumericalError(
            f"closed-form tilt {eta_hat} disagrees with grid maximizer "
            f"{eta_grid} beyond the grid resolution"
        )
    print("closed-form tilt matches the grid maximizer within 1e-4")
    return 0


def cmd_paradox(args) -> int:
    started = time.perf_counter()
    if args.g <= 0:
        raise ConfigError(f"--g must be > 0, got {args.g}")
    if args.n <= args.k + 1:
        raise ConfigError(f"need n > k + 1, got n={args.n}, k={args.k}")
    scales = _parse_int_list(args.scales, "--scales")
    if any(s <= 0 for s in scales) or any(
        b <= a for a, b in zip(scales, scales[1:])
    ):
        raise ConfigError(f"--scales must be strictly increasing positives, got {args.scales}")

    seed = _resolve_seed(args)
    rng = stream(seed, 211)
    h = rng.standard_normal((args.n, args.k))
    model = LinearModel(h=h, sigma2=1.0)
    theta = rng.standard_normal(args.k)
    v = h @ theta
    v *= math.sqrt(8.0 * args.k) / float(np.linalg.norm(v))
    w = rng.standard_normal(args.n)
    if float(v @ w) < 0.0:
        w = -w

    bound = math.exp(0.5 * (args.n - 1 - args.k) * math.log1p(args.g))
    scale_rows = []
    for s in scales:
        x = s * v + w
        breakdown = eef_llr(x, model)
        qtx = model.basis.T @ x
        r2 = float(qtx @ qtx) / float(x @ x)
        bf = bayes_factor_g_prior(r2, args.n, args.k, args.g)
        scale_rows.append(
            {"scale": s, "eef": breakdown.eef, "bayes_factor": bf, "r_squared": r2}
        )

    out = _out_dir(args)
    outputs = []
    sweep_path = out / "paradox.csv"
    with open(sweep_path, "w", newline="") as f:
        f.write("scale,eef,bayes_factor\n")
        for row in scale_rows:
            f.write(f"{row['scale']},{repr(row['eef'])},{repr(row['bayes_factor'])}\n")
    outputs.append(sweep_path.name)

    print(f"Bayes-factor ceiling (1+g)^((n-1-k)/2) = {bound:.6g}")
    print("scale sweep (evidence grows, Bayes factor saturates):")
    for row in scale_rows:
        print(
            f"  scale {row['scale']:>4d}  r2 {row['r_squared']:.6f}  "
            f"evidence {row['eef']:12.4f}  bayes_factor {row['bayes_factor']:.6g}"
        )

    x_fixed = scales[len(scales) // 2] * v + w
    fixed_breakdown = eef_llr(x_fixed, model)
    qtx = model.basis.T @ x_fixed
    r2_fixed = float(qtx @ qtx) / float(x_fixed @ x_fixed)
    g_rows = []
    for exponent in range(0, 25, 3):
        g = 10.0 ** exponent
        g_rows.append(
            {
                "g": g,
                "bayes_factor": bayes_factor_g_prior(r2_fixed, args.n, args.k, g),
                "eef": fixed_breakdown.eef,
            }
        )
    g_path = out / "paradox_g_sweep.csv"
    with open(g_path, "w", newline="") as f:
        f.write("g,bayes_factor,eef\n")
        for row in g_rows:
            f.write(f"{repr(row['g'])},{repr(row['bayes_factor'])},{repr(row['eef'])}\n")
    outputs.append(g_path.name)

    print("prior-spread sweep at fixed data (Bayes factor collapses, evidence fixed):")
    for row in g_rows:
        print(
            f"  g {row['g']:>10.3g}  bayes_factor {row['bayes_factor']:.6g}  "
            f"evidence {row['eef']:.4f}"
        )

    if not args.no_plot:
        from .report import plot_paradox

        fig_path = plot_paradox(scale_rows, g_rows, bound, out / "paradox.png")
        outputs.append(Path(fig_path).name)
        print(f"wrote {fig_path}")

    config = {
        "g": args.g,
        "n": args.n,
        "k": args.k,
        "scales": scales,
        "seed": seed,
    }
    _write_manifest(out, "paradox", config, seed, outputs, started)
    return 0


def cmd_converge(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    m_grid = _parse_int_list(args.m_grid, "--m-grid")
    cfg = builtin_scenario(
        "sim1",
        n_trials=args.trials if args.trials is not None else 50,
        master_seed=seed,
    )
    points = convergence_sweep(
        cfg, args.true_k, m_grid, args.pc_target, n_workers=args.threads
    )

    out = _out_dir(args)
    outputs = []
    csv_path = out / "convergence.csv"
    with open(csv_path, "w", newline="") as f:
        f.write("criterion,true_k,m,p_c\n")
        for criterion in cfg.criteria:
            point = points[criterion]
            for m in point.m_grid:
                f.write(f"{criterion.value},{args.true_k},{m},{repr(point.pc_by_m[m])}\n")
    outputs.append(csv_path.name)
    print(f"wrote {csv_path}")

    summary = {
        criterion.value: points[criterion].m_c for criterion in cfg.criteria
    }
    json_path = out / "convergence.json"
    with open(json_path, "w") as f:
        json.dump(
            {
                "true_k": args.true_k,
                "pc_target": args.pc_target,
                "m_grid": list(points[cfg.criteria[0]].m_grid),
                "m_c": summary,
            },
            f,
            indent=2,
        )
        f.write("\n")
    outputs.append(json_path.name)

    for criterion in cfg.criteria:
        m_c = points[criterion].m_c
        label = str(m_c) if m_c is not None else "not reached"
        print(f"  {criterion.value:5s} smallest M with p_c >= {args.pc_target}: {label}")

    if not args.no_plot:
        from .report import plot_convergence

        fig_path = plot_convergence(points, args.pc_target, out / "convergence.png")
        outputs.append(Path(fig_path).name)
        print(f"wrote {fig_path}")

    config = {
        "true_k": args.true_k,
        "m_grid": m_grid,
        "pc_target": args.pc_target,
        "trials": cfg.n_trials,
        "seed": seed,
    }
    _write_manifest(out, "converge", config, seed, outputs, started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosel",
        description="Model order selection via tilted evidence, with classical baselines.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo scenario")
    p_sim.add_argument(
        "--scenario", required=True, choices=_SCENARIO_NAMES + ("custom",)
    )
    p_sim.add_argument("--config", help="scenario JSON for --scenario custom")
    p_sim.add_argument("--trials", type=int, default=None, help="trials per true order (default 200)")
    p_sim.add_argument("--seed", type=int, default=None, help="master seed (default $MOSEL_SEED or 0)")
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.add_argument("--threads", type=int, default=1, help="worker threads (result-invariant)")
    p_sim.add_argument("--dump-data", action="store_true", help="save each true order's trial-0 dataset")
    p_sim.add_argument("--gnuplot", action="store_true", help="emit a gnuplot script for the curve CSV")
    p_sim.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_sim.set_defaults(func=cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate degree of noncircularity from a dataset CSV")
    p_est.add_argument("--input", required=True, help="dataset CSV (re_0,im_0,...)")
    p_est.add_argument("--criteria", default="beef,mdl,aic,aicc")
    p_est.add_argument("--include-null", action="store_true", help="allow degree 0 as an outcome")
    p_est.add_argument("--out", default=".", help="output directory")
    p_est.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_est.set_defaults(func=cmd_estimate)

    p_lin = sub.add_parser("linear-demo", help="one random linear-model evidence breakdown")
    p_lin.add_argument("--n", type=int, default=30, help="observation dimension")
    p_lin.add_argument("--k", type=int, default=4, help="parameter count")
    p_lin.add_argument("--sigma2", type=float, default=1.0, help="noise variance (> 0)")
    p_lin.add_argument("--seed", type=int, default=None)
    p_lin.set_defaults(func=cmd_linear_demo)

    p_par = sub.add_parser("paradox", help="evidence versus Bayes-factor failure modes")
    p_par.add_argument("--g", type=float, default=100.0, help="prior spread for the scale sweep")
    p_par.add_argument("--n", type=int, default=50, help="observation dimension")
    p_par.add_argument("--k", type=int, default=3, help="parameter count")
    p_par.add_argument("--scales", default="1,2,4,8,16", help="signal scales, strictly increasing")
    p_par.add_argument("--seed", type=int, default=None)
    p_par.add_argument("--out", default=".", help="output directory")
    p_par.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_par.set_defaults(func=cmd_paradox)

    p_con = sub.add_parser("converge", help="record-length sweep to a target p_c")
    p_con.add_argument("--true-k", type=int, default=3)
    p_con.add_argument("--m-grid", default="500,1000,2000,3000,4000")
    p_con.add_argument("--pc-target", type=float, default=1.0)
    p_con.add_argument("--trials", type=int, default=None, help="trials per grid point (default 50)")
    p_con.add_argument("--seed", type=int, default=None)
    p_con.add_argument("--threads", type=int, default=1)
    p_con.add_argument("--out", default=".", help="output directory")
    p_con.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_con.set_defaults(func=cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MoselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

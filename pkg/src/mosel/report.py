"""Figure rendering and plot-script emission for CLI outputs.

Figures are rendered headless (Agg backend) straight to files next to the
delimited data they depict; the data files stay the primary artifact and a
gnuplot script for the curve CSV can be emitted for users who plot outside
Python.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .criteria import Criterion
from .simulation import ConvergencePoint, PcCurve

_CRITERION_STYLE = {
    Criterion.BEEF: dict(color="tab:blue", marker="o"),
    Criterion.MDL: dict(color="tab:orange", marker="s"),
    Criterion.AIC: dict(color="tab:green", marker="^"),
    Criterion.AICC: dict(color="tab:red", marker="v"),
}


def _style(criterion: Criterion) -> dict:
    return _CRITERION_STYLE.get(criterion, dict(marker="."))


def plot_pc_curve(curve: PcCurve, path: str | Path) -> Path:
    """Render probability-of-correct-order and mean selected order versus
    the true order, one line per criterion."""
    path = Path(path)
    orders = sorted(curve.config.true_orders)
    fig, (ax_pc, ax_mean) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    for criterion in curve.config.criteria:
        ax_pc.plot(
            orders,
            [curve.p_c[criterion][k] for k in orders],
            label=criterion.value,
            **_style(criterion),
        )
        ax_mean.plot(
            orders,
            [curve.mean_selected[criterion][k] for k in orders],
            label=criterion.value,
            **_style(criterion),
        )
    ax_pc.set_ylabel("probability of correct order")
    ax_pc.set_ylim(-0.02, 1.02)
    ax_pc.grid(True, alpha=0.3)
    ax_pc.legend()
    ax_mean.plot(orders, orders, color="gray", linestyle="--", label="truth")
    ax_mean.set_xlabel("true order")
    ax_mean.set_ylabel("mean selected order")
    ax_mean.grid(True, alpha=0.3)
    ax_mean.legend()
    ax_pc.set_title(
        f"N={curve.config.n_dim}, M={curve.config.n_samples}, "
        f"coefficients U({curve.config.coeff_low}, {curve.config.coeff_high}), "
        f"{curve.config.n_trials} trials"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_convergence(
    points: dict[Criterion, ConvergencePoint], pc_target: float, path: str | Path
) -> Path:
    """Render p_c versus record length per criterion with the target level."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    for criterion, point in points.items():
        grid = list(point.m_grid)
        ax.plot(
            grid,
            [point.pc_by_m[m] for m in grid],
            label=f"{criterion.value}"
            + (f" (reaches target at M={point.m_c})" if point.m_c else " (not reached)"),
            **_style(criterion),
        )
    ax.axhline(pc_target, color="gray", linestyle="--", label=f"target {pc_target}")
    ax.set_xlabel("record length M")
    ax.set_ylabel("probability of correct order")
    ax.set_ylim(-0.02, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_paradox(
    scale_rows: list[dict],
    g_rows: list[dict],
    bf_bound: float,
    path: str | Path,
) -> Path:
    """Render the two Bayes-factor failure modes next to the tilted evidence.

    Top: evidence grows without bound along the signal-scale sweep while the
    Bayes factor saturates at its ceiling. Bottom: at fixed data the Bayes
    factor collapses toward zero as the prior spread g grows, while the
    evidence does not move.
    """
    path = Path(path)
    fig, (ax_scale, ax_g) = plt.subplots(2, 1, figsize=(7, 8))

    scales = [row["scale"] for row in scale_rows]
    ax_scale.plot(
        scales, [row["eef"] for row in scale_rows], color="tab:blue", marker="o",
        label="tilted evidence",
    )
    ax_scale.plot(
        scales, [row["bayes_factor"] for row in scale_rows], color="tab:red",
        marker="s", label="Bayes factor",
    )
    ax_scale.axhline(
        bf_bound, color="tab:red", linestyle="--", alpha=0.6,
        label="Bayes-factor ceiling",
    )
    ax_scale.set_xscale("log", base=2)
    ax_scale.set_yscale("log")
    ax_scale.set_xlabel("signal scale")
    ax_scale.set_ylabel("value (log)")
    ax_scale.grid(True, alpha=0.3)
    ax_scale.legend()
    ax_scale.set_title("growing evidence: Bayes factor saturates")

    gs = [row["g"] for row in g_rows]
    ax_g.plot(
        gs, [row["bayes_factor"] for row in g_rows], color="tab:red", marker="s",
        label="Bayes factor",
    )
    ax_g.plot(
        gs, [row["eef"] for row in g_rows], color="tab:blue", linestyle="--",
        label="tilted evidence (unchanged)",
    )
    ax_g.set_xscale("log")
    ax_g.set_yscale("log")
    ax_g.set_xlabel("prior spread g")
    ax_g.set_ylabel("value (log)")
    ax_g.grid(True, alpha=0.3)
    ax_g.legend()
    ax_g.set_title("fixed data: vague prior drives the Bayes factor to zero")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_spectrum(coefficients, path: str | Path) -> Path:
    """Render the circularity coefficients as a bar chart."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = range(1, len(coefficients) + 1)
    ax.bar(ks, coefficients, color="tab:blue")
    ax.set_xlabel("coefficient index")
    ax.set_ylabel("circularity coefficient")
    ax.set_ylim(0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def gnuplot_script(
    csv_name: str, criteria: tuple[Criterion, ...], png_name: str = "pc_curve_gnuplot.png"
) -> str:
    """A ready-to-run gnuplot script plotting p_c against the true order for
    each criterion from the long-format curve CSV."""
    plots = ", \\\n    ".join(
        f"'{csv_name}' skip 1 using 2:(strcol(1) eq \"{c.value}\" ? $3 : 1/0) "
        f"with linespoints title \"{c.value}\""
        for c in criteria
    )
    return (
        "set datafile separator ','\n"
        f"set output '{png_name}'\n"
        "set terminal pngcairo size 800,600\n"
        "set key bottom left\n"
        "set xlabel 'true order'\n"
        "set ylabel 'probability of correct order'\n"
        "set yrange [-0.02:1.02]\n"
        "set grid\n"
        f"plot {plots}\n"
    )

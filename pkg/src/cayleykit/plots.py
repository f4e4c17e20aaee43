"""Matplotlib renderers for the report path.

Figures are written to files next to the delimited output; the CSV/JSON
stay canonical.  Uses the Agg backend so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .growth import GrowthTable

_KIND_LABEL = {
    "end_depth": "V0(r)",
    "sci": "V(r)",
    "semistability": "S(r)",
    "delta": "delta",
    "cp": "L(M)",
}


def plot_growth_table(table: GrowthTable, path: str, reference_2r: bool = None):
    """r against value; intervals as vertical bars, exact samples as dots.

    For end-depth tables the 2r bound and the identity line are drawn for
    comparison.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    rs_exact = [s.r for s in table.samples if s.mode == "exact"]
    vs_exact = [s.value for s in table.samples if s.mode == "exact"]
    rs_lb = [s.r for s in table.samples if s.mode == "lower_bound"]
    vs_lb = [s.value for s in table.samples if s.mode == "lower_bound"]
    if rs_exact:
        ax.plot(rs_exact, vs_exact, "o-", color="tab:blue", label="exact")
    if rs_lb:
        ax.plot(rs_lb, vs_lb, "^", color="tab:orange", label="lower bound")
    for s in table.samples:
        if s.mode == "interval":
            lo = s.lo if s.lo is not None else 0
            if s.hi is not None:
                ax.plot([s.r, s.r], [lo, s.hi], color="tab:green", lw=3, alpha=0.6)
                ax.plot([s.r], [s.hi], "v", color="tab:green")
            else:
                top = max(lo + 1, *(v for v in vs_exact or [lo + 1])) + 1
                ax.plot([s.r, s.r], [lo, top], color="tab:red", lw=3, alpha=0.4)
    if reference_2r is None:
        reference_2r = table.kind == "end_depth"
    rs_all = [s.r for s in table.samples]
    if reference_2r and rs_all:
        xs = sorted(set(rs_all))
        ax.plot(xs, [2 * x for x in xs], "--", color="gray", label="2r bound")
        ax.plot(xs, xs, ":", color="gray", label="r")
    ax.set_xlabel("r")
    ax.set_ylabel(_KIND_LABEL.get(table.kind, "value"))
    title = table.meta.get("model", "")
    ax.set_title(f"{table.kind} growth, {title}".strip(", "))
    if rs_exact or rs_lb or reference_2r:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cp_report(report, path: str):
    """Histogram of complement path lengths with the L-hat marker."""
    fig, ax = plt.subplots(figsize=(6, 4))
    lengths = [comp for (_, _, _, comp) in report.pairs]
    if lengths:
        ax.hist(lengths, bins=range(0, max(lengths) + 2), color="tab:blue", alpha=0.8)
        ax.axvline(report.L_hat, color="tab:red", ls="--", label=f"L = {report.L_hat}")
        ax.legend()
    ax.set_xlabel("complement path length")
    ax.set_ylabel("pairs")
    ax.set_title(
        f"CP(M={report.M}) at sphere {report.level}, c={report.c}"
        + (f", {len(report.failures)} failures" if report.failures else "")
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_dead_ends(ball, dead, path: str):
    """Depth against distance for reported dead ends."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if dead:
        xs = [ball.dist[v] for v, _ in dead]
        ys = [d for _, d in dead]
        ax.scatter(xs, ys, color="tab:red")
    ax.set_xlabel("dist from identity")
    ax.set_ylabel("escape depth")
    ax.set_title(f"dead ends, {ball.model.name}, R={ball.radius} ({len(dead)} found)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sphere_growth(ball, path: str):
    """Sphere sizes by radius, log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    rs = list(range(ball.radius + 1))
    sizes = [len(ball.sphere_ids(r)) for r in rs]
    ax.semilogy(rs, sizes, "o-")
    ax.set_xlabel("r")
    ax.set_ylabel("|S(r)|")
    ax.set_title(f"sphere growth, {ball.model.name}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

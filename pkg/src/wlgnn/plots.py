"""Figure rendering for runs and verification reports.

All functions write a PNG to the given path and return the path; the
Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .wl import WlRun  # noqa: E402


def plot_refinement_curve(runs: list[tuple[str, WlRun]], path: str,
                          title: str = "classes per refinement round") -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, run in runs:
        xs = list(range(run.last_round + 1))
        ys = [run.colouring_at(t).num_classes() for t in xs]
        ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel("round")
    ax.set_ylabel("colour classes")
    ax.set_title(title)
    if len(runs) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_margin_histogram(values: list[float], path: str,
                          title: str = "per-vertex output values") -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=20, range=(0.0, 1.0), color="tab:blue", alpha=0.8)
    ax.set_xlabel("output value")
    ax.set_ylabel("vertices")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_success_frequencies(freqs: list[float], path: str,
                             title: str = "per-vertex success frequency") -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(freqs)), freqs, color="tab:green", alpha=0.8)
    ax.axhline(0.95, color="tab:red", linestyle="--", label="0.95")
    ax.set_xlabel("vertex")
    ax.set_ylabel("frequency")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_suite_summary(reports, path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 0.4 * max(len(reports), 4) + 1.5))
    names = [r.suite for r in reports]
    passed = [sum(1 for c in r.checks if c.status == "pass") for r in reports]
    failed = [sum(1 for c in r.checks if c.status == "fail") for r in reports]
    skipped = [sum(1 for c in r.checks if c.status == "skip") for r in reports]
    ys = range(len(reports))
    ax.barh(ys, passed, color="tab:green", label="pass")
    ax.barh(ys, failed, left=passed, color="tab:red", label="fail")
    ax.barh(ys, skipped, left=[p + f for p, f in zip(passed, failed)],
            color="tab:orange", label="skip")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names)
    ax.set_xlabel("checks")
    ax.set_title("verification suites")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

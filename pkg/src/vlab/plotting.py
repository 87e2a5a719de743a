"""Figures for verification reports, rendered to files with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .report import CHECKS  # noqa: E402

STATUS_CODES = {"pass": 0, "vacuous": 1, "expected": 2, "fail": 3, "missing": 4}
STATUS_COLORS = ["#4c9a2a", "#c9c9c9", "#e0a030", "#c0392b", "#ffffff"]

# no timestamps or version strings in the files, so reruns are byte-stable
_PNG_META = {"Software": None}


def _status(rec, name):
    v = rec["verdicts"].get(name)
    if v is None:
        return "missing"
    if v["status"] == "fail" and name in rec.get("expected_failures", []):
        return "expected"
    return v["status"]


def verdict_grid(report, path) -> Path:
    """One row per (algebra, prime), one column per check, colored by verdict."""
    recs = report["records"]
    grid = [[STATUS_CODES[_status(r, c)] for c in CHECKS] for r in recs]
    fig, ax = plt.subplots(figsize=(1.2 * len(CHECKS) + 2.5, 0.28 * len(recs) + 1.5))
    ax.imshow(grid, cmap=ListedColormap(STATUS_COLORS), vmin=0, vmax=len(STATUS_COLORS) - 1,
              aspect="auto", interpolation="nearest")
    ax.set_xticks(range(len(CHECKS)), labels=CHECKS, rotation=30, ha="right", fontsize=8)
    ax.set_yticks(range(len(recs)), labels=[f"{r['algebra']} @ {r['p']}" for r in recs], fontsize=7)
    for y, row in enumerate(grid):
        for x, code in enumerate(row):
            ax.text(x, y, "PVEF-"[code], ha="center", va="center", fontsize=6)
    ax.set_title("verdicts (P pass, V vacuous, E expected failure, F failure)", fontsize=9)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def window_dimensions(report, path) -> Path:
    """Center-window dimension against the span of ``xi^beta g^alpha`` for each record."""
    recs = [r for r in report["records"] if "center_window" in r]
    labels = [f"{r['algebra']}@{r['p']}" for r in recs]
    center = [r["center_window"]["dimension"] for r in recs]
    cand = [r["verdicts"]["veldkamp"].get("data", {}).get("dims", [0, 0])[1] for r in recs]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(recs) + 2), 3.6))
    xs = range(len(recs))
    ax.bar([x - 0.2 for x in xs], center, width=0.4, label="center window", color="#34699a")
    ax.bar([x + 0.2 for x in xs], cand, width=0.4, label="Z_p Z_HC span", color="#e0a030")
    ax.set_xticks(list(xs), labels=labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("dimension")
    ax.legend(fontsize=8, frameon=False)
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_report_figures(report, outdir, prefix: str = "") -> list[Path]:
    """Write ``<prefix>verdicts.png`` and ``<prefix>window_dimensions.png`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [verdict_grid(report, outdir / f"{prefix}verdicts.png"),
            window_dimensions(report, outdir / f"{prefix}window_dimensions.png")]

"""Report rendering: delimited profile dumps and the matplotlib figures that
accompany them.

Profiles are tidy rows (criterion, series, x, y).  Figures are rendered
headless to SVG next to the CSV; date metadata and hash salts are pinned so
reruns with the same seed produce identical bytes.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "coarsegeom"


def _num(value):
    # numpy scalars repr as np.float64(...); shed them for portable CSV
    return repr(float(value))


def write_profiles_csv(rows, path):
    """Write profile rows as CSV with a fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["criterion", "series", "x", "y"])
        for row in rows:
            writer.writerow([row["criterion"], row["series"],
                             _num(row["x"]), _num(row["y"])])
    return path


def render_figures(rows, out_dir):
    """One SVG per criterion group, line-plotting each series over x."""
    os.makedirs(out_dir, exist_ok=True)
    grouped = defaultdict(lambda: defaultdict(list))
    for row in rows:
        grouped[row["criterion"]][row["series"]].append((row["x"], row["y"]))
    written = []
    for crit in sorted(grouped):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        for series in sorted(grouped[crit]):
            pts = sorted(grouped[crit][series])
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            if len(pts) > 1:
                ax.plot(xs, ys, marker=".", markersize=3, linewidth=1.0,
                        label=series)
            else:
                ax.plot(xs, ys, marker="o", linestyle="none", label=series)
        ax.set_title(crit)
        ax.set_xlabel("x")
        ax.set_ylabel("value")
        if len(grouped[crit]) <= 12:
            ax.legend(fontsize=7, frameon=False)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{crit}.svg")
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written

"""Matplotlib figures and CSV tables for command reports."""

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .render import body_outline, translate_outlines  # noqa: E402


def write_csv(path, rows, fields=None):
    """Write dict rows; the column order follows ``fields`` or the first row."""
    fields = fields or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def _closed(P):
    return np.vstack([P, P[:1]])


def plot_cover(K, cfg, path, witness=None, z=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    B = _closed(body_outline(K, z))
    ax.fill(B[:, 0], B[:, 1], color="0.92")
    ax.plot(B[:, 0], B[:, 1], "k-", lw=1.5)
    for T in translate_outlines(K, cfg, z):
        T = _closed(T)
        ax.plot(T[:, 0], T[:, 1], lw=1.0)
    if witness is not None:
        ax.plot([witness[0]], [witness[1]], "o", color="red")
    ax.set_aspect("equal")
    ax.set_title(f"m = {cfg.m}, r = {cfg.r:.5f}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_bounds(rows, path, label="r_upper", target="target", name="entry"):
    """Bar chart of verified upper bounds with their targets as markers."""
    fig, ax = plt.subplots(figsize=(max(5, 0.5 * len(rows)), 4))
    x = np.arange(len(rows))
    vals = [float(r[label]) for r in rows]
    ax.bar(x, vals, color="#1f77b4", label="verified upper bound")
    tg = [r.get(target) for r in rows]
    xs = [i for i, t in enumerate(tg) if t not in (None, "", "open")]
    if xs:
        ax.plot(xs, [float(tg[i]) for i in xs], "r_", ms=18, mew=2, label="target")
    ax.set_xticks(x)
    ax.set_xticklabels([str(r[name]) for r in rows], rotation=60, ha="right", fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

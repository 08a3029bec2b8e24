"""Deterministic report files: delimited tables, JSON documents, and
rendered figures.

Every writer is a pure function of its inputs; reruns with the same
config and seed produce byte-identical files (figures carry a fixed
Software tag instead of the renderer's version string).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "config_hash",
    "json_document",
    "write_json",
    "csv_text",
    "write_csv",
    "save_figure",
    "plot_scan",
    "plot_tv_curve",
    "plot_coldspot",
    "plot_constants",
    "plot_nonconvexity",
    "plot_statistic_hist",
]

_PNG_METADATA = {"Software": "riffle"}


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def json_document(config: dict, results, seed: int, version: str) -> dict:
    return {
        "config": config,
        "results": results,
        "meta": {
            "version": version,
            "config_sha256": config_hash(config),
            "seed": seed,
        },
    }


def write_json(path, config: dict, results, seed: int, version: str):
    doc = json_document(config, results, seed, version)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def csv_text(rows: list, fieldnames=None) -> str:
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in fieldnames})
    return buf.getvalue()


def write_csv(path, rows: list, fieldnames=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(rows, fieldnames))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".10g")
    return v


def save_figure(fig, path):
    fig.savefig(path, format="png", dpi=110, metadata=_PNG_METADATA)
    plt.close(fig)


def plot_scan(rows, path, cbar=None):
    """TV-lower-bound profile against K/log N, one line per deck size."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for N in sorted({r["N"] for r in rows}):
        sub = sorted((r for r in rows if r["N"] == N), key=lambda r: r["coefficient"])
        xs = [r["coefficient"] for r in sub]
        ax.plot(xs, [r["estimate"] for r in sub], marker="o", label=f"N = {N}")
        ax.fill_between(
            xs, [r["ci_lo"] for r in sub], [r["ci_hi"] for r in sub], alpha=0.2
        )
    if cbar is not None:
        ax.axvline(cbar, color="k", linestyle="--", linewidth=1, label="cutoff")
    ax.set_xlabel("K / log N")
    ax.set_ylabel("TV lower bound")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    save_figure(fig, path)


def plot_tv_curve(rows, path):
    """TV (exact or bound) against K for a fixed deck size."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [r["K"] for r in rows]
    ax.plot(xs, [r["tv"] for r in rows], marker="o")
    ax.set_xlabel("K")
    ax.set_ylabel("total variation to uniform")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    save_figure(fig, path)


def plot_coldspot(intervals, N, path, stats_uniform=None, stats_shuffled=None):
    """Cold-spot intervals along the deck, plus ascent-count histograms
    when replicate statistics are given."""
    two = stats_uniform is not None or stats_shuffled is not None
    fig, axes = plt.subplots(2 if two else 1, 1, figsize=(7, 5.5 if two else 2.5))
    ax0 = axes[0] if two else axes
    for lo, hi in intervals:
        ax0.axvspan(lo, hi + 1, color="tab:blue", alpha=0.6)
    ax0.set_xlim(1, N + 1)
    ax0.set_yticks([])
    ax0.set_xlabel("deck position")
    ax0.set_title("cold-spot intervals")
    if two:
        ax1 = axes[1]
        if stats_uniform is not None:
            ax1.hist(stats_uniform, bins=40, alpha=0.6, label="uniform decks")
        if stats_shuffled is not None:
            ax1.hist(stats_shuffled, bins=40, alpha=0.6, label="shuffled decks")
        ax1.set_xlabel("ascents inside H")
        ax1.legend()
    fig.tight_layout()
    save_figure(fig, path)


def plot_constants(rows, path):
    """Grouped bars of C and C-tilde per measure row."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    names = [r["measure"] for r in rows]
    y = range(len(rows))
    h = 0.38
    ax.barh([i + h / 2 for i in y], [r["C"] for r in rows], height=h, label="C")
    ax.barh(
        [i - h / 2 for i in y], [r["C_tilde"] for r in rows], height=h, label="C-tilde"
    )
    ax.set_yticks(list(y))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("cutoff constant")
    ax.legend()
    fig.tight_layout()
    save_figure(fig, path)


def plot_nonconvexity(curves, path):
    """The piecewise functions behind each eta verdict, one panel per eta."""
    n = len(curves)
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 3.5), squeeze=False)
    for ax, (eta, xs, f_vals, breve_vals, hat_vals) in zip(axes[0], curves):
        ax.plot(xs, f_vals, label="f")
        ax.plot(xs, breve_vals, label="f-breve")
        ax.plot(xs, hat_vals, label="average", linestyle="--")
        ax.set_title(f"eta = {eta}")
        ax.set_xlabel("x")
        ax.legend(fontsize=8)
    fig.tight_layout()
    save_figure(fig, path)


def plot_statistic_hist(values, name, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=min(40, max(5, len(set(values)))))
    ax.set_xlabel(name)
    ax.set_ylabel("count")
    fig.tight_layout()
    save_figure(fig, path)

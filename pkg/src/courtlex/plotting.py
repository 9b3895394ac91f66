"""Report figures: WER per system and entity capture ratios.

Figures are built on ``matplotlib.figure.Figure`` directly (no pyplot state)
and rendered to PNG bytes with fixed metadata, so identical inputs give
identical files.
"""

from __future__ import annotations

import io
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure

from .entities import CATEGORIES

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _figure(width=6.0):
    import matplotlib

    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(width, width * GOLDEN))
        ax = fig.add_subplot(111)
    return fig, ax


def _grouped_bars(ax, groups: Sequence[str], series: dict[str, Sequence[float]]):
    x = np.arange(len(groups))
    width = 0.8 / max(len(series), 1)
    for k, (label, values) in enumerate(series.items()):
        ax.bar(x + (k - (len(series) - 1) / 2) * width, values, width, label=label)
    ax.set_xticks(x)
    ax.set_xticklabels(groups)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    ax.legend(frameon=False)


def wer_figure(reports) -> Figure:
    fig, ax = _figure()
    groups = [f.name for f in reports[0].files] + ["macro", "micro"]
    series = {}
    for rep in reports:
        series[rep.system] = [100 * f.wer.wer for f in rep.files] + [100 * rep.macro_wer, 100 * rep.micro_wer]
    _grouped_bars(ax, groups, series)
    ax.set_ylabel("WER (%)")
    ax.set_title("Word error rate by file")
    fig.tight_layout()
    return fig


def entity_figure(reports) -> Figure:
    fig, ax = _figure()
    cats = [c for c in CATEGORIES if any(c in r.entity_counts() for r in reports)]
    series = {r.system: [r.entity_ratios().get(c, 0.0) for c in cats] for r in reports}
    _grouped_bars(ax, cats, series)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("captured / total")
    ax.set_title("Correctly captured entities")
    fig.tight_layout()
    return fig


def png_bytes(fig: Figure) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=120, metadata={"Software": None})
    return buf.getvalue()


def report_figures(reports) -> dict[str, bytes]:
    """PNG files keyed by file name."""
    return {"wer.png": png_bytes(wer_figure(reports)), "entities.png": png_bytes(entity_figure(reports))}

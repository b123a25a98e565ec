"""Turn result CSVs into figures: one line per algorithm label with a shaded
95% confidence band, for either cumulative regret or optimal-action rate."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figplots"  # stable element ids

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = ["experiment", "label", "t", "mean_regret", "regret_ci", "opt_rate", "opt_ci"]

_METRICS = {
    "regret": ("mean_regret", "regret_ci", "mean cumulative regret"),
    "opt_rate": ("opt_rate", "opt_ci", "optimal action selection rate"),
}

VECTOR_FORMATS = ("svg", "pdf")
RASTER_FORMATS = ("png",)


class CsvFormatError(ValueError):
    """CSV does not conform to the result-table schema; carries the row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class PlotSpec:
    csv_path: Path
    metric: str  # "regret" | "opt_rate"
    out_path: Path
    title: Optional[str] = None
    styles: dict = field(default_factory=dict)  # label -> kwargs for plt.plot
    dpi: int = 150

    def __post_init__(self):
        if self.metric not in _METRICS:
            raise ValueError(f"metric must be one of {sorted(_METRICS)}, got {self.metric!r}")


@dataclass(frozen=True)
class Series:
    label: str
    t: np.ndarray
    mean_regret: np.ndarray
    regret_ci: np.ndarray
    opt_rate: np.ndarray
    opt_ci: np.ndarray


@dataclass(frozen=True)
class RenderResult:
    out_path: Path
    labels: tuple[str, ...]
    num_series: int
    num_nonzero_bands: int
    experiment: str


def load_series(csv_path) -> tuple[str, list[Series]]:
    """Parse a result CSV into per-label series, validating as we go."""
    import csv as csv_mod

    path = Path(csv_path)
    with open(path, newline="") as fh:
        reader = csv_mod.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(1, "file is empty") from None
        if header != EXPECTED_HEADER:
            raise CsvFormatError(1, f"unexpected header {header!r}")

        experiment = None
        per_label: dict[str, list[tuple]] = {}
        row_no = 1
        for row in reader:
            row_no += 1
            if len(row) != 7:
                raise CsvFormatError(row_no, f"expected 7 columns, found {len(row)}")
            exp, label = row[0], row[1]
            try:
                t = int(row[2])
                values = [float(v) for v in row[3:]]
            except ValueError as exc:
                raise CsvFormatError(row_no, f"non-numeric value: {exc}") from None
            if experiment is None:
                experiment = exp
            per_label.setdefault(label, []).append((t, *values))

    if not per_label:
        raise CsvFormatError(2, "no data rows")

    series = []
    for label, rows in per_label.items():
        rows.sort(key=lambda r: r[0])
        arr = np.asarray(rows, dtype=float)
        series.append(
            Series(
                label=label,
                t=arr[:, 0],
                mean_regret=arr[:, 1],
                regret_ci=arr[:, 2],
                opt_rate=arr[:, 3],
                opt_ci=arr[:, 4],
            )
        )
    return experiment, series


def render(spec: PlotSpec) -> RenderResult:
    """Render one metric of a result CSV to an image file.

    The output format follows the file suffix (svg and pdf are vector, png is
    raster). Timestamps are stripped from vector metadata so identical inputs
    produce identical files.
    """
    experiment, series = load_series(spec.csv_path)
    value_col, ci_col, ylabel = _METRICS[spec.metric]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    nonzero_bands = 0
    for s in series:
        value = getattr(s, value_col)
        ci = getattr(s, ci_col)
        style = dict(spec.styles.get(s.label, {}))
        (line,) = ax.plot(s.t, value, label=s.label, linewidth=1.6, **style)
        ax.fill_between(s.t, value - ci, value + ci, color=line.get_color(), alpha=0.18, linewidth=0)
        if np.any(ci > 0):
            nonzero_bands += 1
    ax.set_xlabel("round")
    ax.set_ylabel(ylabel)
    if spec.metric == "opt_rate":
        ax.set_ylim(-0.02, 1.02)
    ax.set_title(spec.title or f"{experiment}: {ylabel}")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()

    out = Path(spec.out_path)
    suffix = out.suffix.lstrip(".").lower()
    if suffix not in VECTOR_FORMATS + RASTER_FORMATS:
        raise ValueError(f"unsupported output format {suffix!r} (use one of {VECTOR_FORMATS + RASTER_FORMATS})")
    metadata = {"Date": None} if suffix == "svg" else ({"CreationDate": None} if suffix == "pdf" else None)
    fig.savefig(out, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)

    return RenderResult(
        out_path=out,
        labels=tuple(s.label for s in series),
        num_series=len(series),
        num_nonzero_bands=nonzero_bands,
        experiment=experiment,
    )

"""Render sensitivity figures from sqmzi sweep CSVs.

Rendering is strictly read-only over the CSV: no physics is recomputed here.
Output bytes are deterministic for a given (csv, spec) pair: fixed style, a
pinned SVG hash salt, and no timestamp metadata.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURE_KINDS = ("r_sweep", "q_sweep", "loss_bars", "depletion", "phase_fringe")
REQUIRED_COLUMNS = {"axis_value", "signal_variant", "delta_phi", "stderr",
                    "phi_opt", "q_achieved", "n_t", "engine"}

AXIS_LABELS = {
    "r_sweep": "squeezing parameter r",
    "q_sweep": "transfer efficiency Q",
    "depletion": "detected atoms N_t",
    "phase_fringe": "interferometer phase (rad)",
}

VARIANT_STYLE = {
    "atomic": dict(color="#1f6fb4", label="bare atomic signal"),
    "recycled": dict(color="#c23b22", label="information recycled"),
    "partial": dict(color="#3c9d4e", label="idler-only recycling"),
    "full": dict(color="#c23b22", label="information recycled"),
}


class RenderError(ValueError):
    pass


@dataclass
class FigureSpec:
    kind: str
    out: str
    csv: str | None = None
    csvs: dict[str, str] = field(default_factory=dict)  # loss_bars: label -> path
    sql_line: bool = True
    heisenberg_line: bool = False
    n34_line: bool = False
    title: str = ""
    n_t: float | None = None  # reference-line scale override

    @classmethod
    def from_dict(cls, data: dict) -> "FigureSpec":
        known = {f for f in cls.__dataclass_fields__}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise RenderError(f"unknown figure-spec fields: {sorted(unknown)}")
        spec = cls(**data)
        if spec.kind not in FIGURE_KINDS:
            raise RenderError(f"unknown figure kind {spec.kind!r}; expected one of {FIGURE_KINDS}")
        if spec.kind == "loss_bars":
            if not spec.csvs:
                raise RenderError("loss_bars needs csvs: {site label -> csv path}")
        elif not spec.csv:
            raise RenderError(f"{spec.kind} needs a csv path")
        return spec


def load_rows(path: str) -> list[dict]:
    p = Path(path)
    if not p.exists():
        raise RenderError(f"CSV not found: {path}")
    with open(p, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"empty CSV: {path}")
        missing = REQUIRED_COLUMNS - set(reader.fieldnames)
        if missing:
            raise RenderError(f"CSV {path} missing columns: {sorted(missing)}")
        rows = []
        for raw in reader:
            rows.append({
                "axis_value": float(raw["axis_value"]),
                "signal_variant": raw["signal_variant"],
                "delta_phi": float(raw["delta_phi"]),
                "stderr": float(raw["stderr"]),
                "n_t": float(raw["n_t"]),
                "engine": raw["engine"],
            })
    if not rows:
        raise RenderError(f"CSV {path} has a header but no data rows")
    return rows


def _deterministic_style():
    plt.rcParams.update({
        "figure.figsize": (6.0, 4.0),
        "figure.dpi": 100,
        "savefig.dpi": 150,
        "font.size": 10,
        "svg.hashsalt": "sqmzi-plots",
        "axes.grid": True,
        "grid.alpha": 0.3,
    })


def _reference_lines(ax, spec: FigureSpec, rows):
    n_t = spec.n_t if spec.n_t is not None else rows[0]["n_t"]
    if spec.sql_line:
        ax.axhline(1 / math.sqrt(n_t), color="k", ls=":", lw=1,
                   label="SQL 1/sqrt(N_t)")
    if spec.heisenberg_line:
        ax.axhline(1 / n_t, color="k", ls="--", lw=1, label="Heisenberg 1/N_t")
    if spec.n34_line:
        ax.axhline(n_t**-0.75, color="0.4", ls="-.", lw=1, label="1/N_t^(3/4)")


def _series(rows):
    groups: dict[tuple[str, str], list] = {}
    for row in rows:
        groups.setdefault((row["signal_variant"], row["engine"]), []).append(row)
    for key in groups:
        groups[key].sort(key=lambda r: r["axis_value"])
    return groups


def _plot_sweep(ax, spec: FigureSpec, rows):
    for (variant, engine), series in sorted(_series(rows).items()):
        x = [r["axis_value"] for r in series]
        y = [r["delta_phi"] for r in series]
        err = [r["stderr"] for r in series]
        style = dict(VARIANT_STYLE.get(variant, dict(color="0.3", label=variant)))
        label = f"{style.pop('label')} ({engine})"
        if engine == "tw":
            ax.errorbar(x, y, yerr=err, fmt="o", ms=4, capsize=2, label=label, **style)
        else:
            ax.plot(x, y, "-", lw=1.5, label=label, **style)
    ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS[spec.kind])
    ax.set_ylabel("phase sensitivity")


def _plot_depletion(ax, spec: FigureSpec, rows):
    # normalized to the complete-transfer limit 1/sqrt(Nt(Nt+2))
    for (variant, engine), series in sorted(_series(rows).items()):
        x = [r["n_t"] for r in series]
        ref = [1 / math.sqrt(r["n_t"] * (r["n_t"] + 2)) for r in series]
        y = [r["delta_phi"] / rr for r, rr in zip(series, ref)]
        style = dict(VARIANT_STYLE.get(variant, dict(color="0.3", label=variant)))
        label = f"{style.pop('label')} ({engine})"
        ax.plot(x, y, "o-", ms=4, lw=1.2, label=label, **style)
    ax.axhline(1.0, color="k", ls=":", lw=1, label="complete-transfer limit")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS[spec.kind])
    ax.set_ylabel("sensitivity / ideal")


def _plot_loss_bars(ax, spec: FigureSpec):
    labels, bare, recycled = [], [], []
    n_t_ref = None
    for label, path in spec.csvs.items():
        rows = load_rows(path)
        by_variant = {}
        for row in rows:
            by_variant.setdefault(row["signal_variant"], row)
        labels.append(label)
        bare.append(by_variant.get("atomic", {}).get("delta_phi", math.nan))
        rec_row = by_variant.get("recycled") or by_variant.get("full") or {}
        recycled.append(rec_row.get("delta_phi", math.nan))
        n_t_ref = rows[0]["n_t"] if n_t_ref is None else n_t_ref
    xs = range(len(labels))
    width = 0.38
    ax.bar([x - width / 2 for x in xs], bare, width,
           color=VARIANT_STYLE["atomic"]["color"], label="bare atomic signal")
    ax.bar([x + width / 2 for x in xs], recycled, width,
           color=VARIANT_STYLE["recycled"]["color"], label="information recycled")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([lab.replace("_", "\n") for lab in labels], fontsize=8)
    ax.set_yscale("log")
    ax.set_ylabel("phase sensitivity")
    if spec.sql_line and n_t_ref:
        n_t = spec.n_t if spec.n_t is not None else n_t_ref
        ax.axhline(1 / math.sqrt(n_t), color="k", ls=":", lw=1, label="SQL 1/sqrt(N_t)")


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it; returns the output path."""
    _deterministic_style()
    fig, ax = plt.subplots()
    try:
        if spec.kind == "loss_bars":
            _plot_loss_bars(ax, spec)
        else:
            rows = load_rows(spec.csv)
            if spec.kind == "depletion":
                _plot_depletion(ax, spec, rows)
            else:
                _plot_sweep(ax, spec, rows)
                _reference_lines(ax, spec, rows)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(fontsize=8, loc="best")
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, metadata=_clean_metadata(out.suffix))
        return out
    finally:
        plt.close(fig)


def _clean_metadata(suffix: str) -> dict:
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return {}

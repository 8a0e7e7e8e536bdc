"""CSV loaders and the two figure renderers.

Two input schemas are understood:

* chain observable tables: header ``period,S_tot,pop_avg,coh_avg``
  followed by one float row per recorded period;
* Husimi grids: one JSON metadata line holding theta_res, phi_res, spin
  and period, then theta_res CSV rows of phi_res values each.

Timeseries figures draw one curve per input file and one panel per
observable column.  Husimi figures tile azimuthal disks, one row per
spin and one column per period, with the highest value in red and the
lowest in blue.  Rendering never writes to its inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CHAIN_COLUMNS = ["period", "S_tot", "pop_avg", "coh_avg"]

# panel layout for timeseries figures: (column, axis label)
SERIES_PANELS = [("S_tot", "average-spin entropy"),
                 ("pop_avg", "average population of |up>"),
                 ("coh_avg", "average coherence")]

HUSIMI_META_KEYS = ("theta_res", "phi_res", "spin", "period")

KINDS = ("timeseries", "husimi_tiles")

COLORMAP = "jet"


@dataclass(frozen=True)
class FigureSpec:
    """One figure: inputs, kind, and presentation knobs."""

    inputs: tuple[str, ...]
    kind: str
    out: str
    labels: tuple[str, ...] = ()
    xlabel: str = "period"
    shared_scale: bool = False
    dpi: int = 110

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, "
                             f"expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("figure needs at least one input CSV")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError(f"{len(self.labels)} labels for "
                             f"{len(self.inputs)} inputs")
        for p in self.inputs:
            if not Path(p).is_file():
                raise ValueError(f"input {p} does not exist")


@dataclass(frozen=True)
class HusimiTile:
    """One parsed Husimi grid plus its (spin, period) tile address."""

    values: np.ndarray
    spin: int
    period: int


def load_chain_csv(path) -> dict[str, np.ndarray]:
    """Parse a chain observable table into column arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty input") from None
        for column in CHAIN_COLUMNS:
            if column not in header:
                raise ValueError(
                    f"{path}: schema mismatch, missing column {column!r}")
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: empty input")
    table = np.array([[float(c) for c in row] for row in rows])
    if table.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return {name: table[:, i] for i, name in enumerate(header)}


def load_husimi_csv(path) -> HusimiTile:
    """Parse a Husimi grid file: JSON metadata line, then value rows."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.strip():
            raise ValueError(f"{path}: empty input")
        try:
            meta = json.loads(first)
        except json.JSONDecodeError:
            raise ValueError(
                f"{path}: schema mismatch, first line is not JSON "
                f"metadata") from None
        for key in HUSIMI_META_KEYS:
            if key not in meta:
                raise ValueError(
                    f"{path}: schema mismatch, missing column {key!r}")
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    values = np.array(rows)
    expected = (int(meta["theta_res"]), int(meta["phi_res"]))
    if values.size == 0:
        raise ValueError(f"{path}: empty input")
    if values.shape != expected:
        raise ValueError(f"{path}: value grid {values.shape}, "
                         f"metadata says {expected}")
    return HusimiTile(values=values, spin=int(meta["spin"]),
                      period=int(meta["period"]))


def default_label(path) -> str:
    """Legend label for an input: nearest sweep-style ancestor, else stem."""
    p = Path(path)
    for ancestor in p.parents:
        if "=" in ancestor.name:
            return ancestor.name
    return p.stem


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written image path."""
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if spec.kind == "timeseries":
        _render_timeseries(spec, out)
    else:
        _render_husimi_tiles(spec, out)
    return out


def _render_timeseries(spec: FigureSpec, out: Path) -> None:
    tables = [load_chain_csv(p) for p in spec.inputs]
    labels = spec.labels or tuple(default_label(p) for p in spec.inputs)
    fig, axes = plt.subplots(len(SERIES_PANELS), 1, sharex=True,
                             figsize=(6.4, 7.2))
    for ax, (column, ylabel) in zip(axes, SERIES_PANELS):
        for table, label in zip(tables, labels):
            ax.plot(table["period"], table[column], label=label, lw=1.2)
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel(spec.xlabel)
    axes[0].legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)


def _tile_limits(tile: HusimiTile, spec: FigureSpec,
                 grids: list[HusimiTile]) -> tuple[float, float]:
    if spec.shared_scale:
        lo = min(float(g.values.min()) for g in grids)
        hi = max(float(g.values.max()) for g in grids)
    else:
        lo, hi = float(tile.values.min()), float(tile.values.max())
    if hi - lo < 1e-12:
        # flat tile: pin it to the middle of the colormap
        return lo - 0.5, hi + 0.5
    return lo, hi


def _render_husimi_tiles(spec: FigureSpec, out: Path) -> None:
    grids = [load_husimi_csv(p) for p in spec.inputs]
    spins = sorted({g.spin for g in grids})
    periods = sorted({g.period for g in grids})
    by_cell = {(g.spin, g.period): g for g in grids}
    fig, axes = plt.subplots(len(spins), len(periods), squeeze=False,
                             figsize=(2.4 * len(periods), 2.4 * len(spins)))
    for i, spin in enumerate(spins):
        for j, period in enumerate(periods):
            ax = axes[i][j]
            ax.set_axis_off()
            tile = by_cell.get((spin, period))
            if tile is None:
                continue
            _draw_disk(ax, tile, *_tile_limits(tile, spec, grids))
            ax.set_title(f"spin {tile.spin}, period {tile.period}",
                         fontsize="small")
    fig.tight_layout()
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)


def _draw_disk(ax, tile: HusimiTile, vmin: float, vmax: float) -> None:
    """Azimuthal equidistant disk: |up> pole at the center, rim at pi."""
    n_theta, n_phi = tile.values.shape
    centers = np.linspace(0.0, np.pi, n_theta)
    theta_edges = np.concatenate(
        ([0.0], 0.5 * (centers[1:] + centers[:-1]), [np.pi]))
    # phi cells wrap: edge j sits half a step before center j
    d_phi = 2.0 * np.pi / n_phi
    phi_edges = (np.arange(n_phi + 1) - 0.5) * d_phi
    x = theta_edges[:, None] * np.cos(phi_edges)[None, :]
    y = theta_edges[:, None] * np.sin(phi_edges)[None, :]
    ax.pcolormesh(x, y, tile.values, cmap=COLORMAP, vmin=vmin, vmax=vmax,
                  shading="flat", antialiased=False)
    ax.set_xlim(-np.pi, np.pi)
    ax.set_ylim(-np.pi, np.pi)
    ax.set_aspect("equal")

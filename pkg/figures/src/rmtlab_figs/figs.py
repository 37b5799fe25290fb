"""Render overlay figures from rmtlab CSV/JSON artifacts.

Two figure families: radial-density histograms with the closed-form
density overlay, and log-log convergence curves with fitted slopes.  Both
are pure functions of the input files: no statistics are recomputed from
raw samples beyond binning and straight-line fitting of what the
artifacts already contain, and the rendered content carries no clock
except the optional caption flag.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

# text stays text in SVG output (searchable annotations) and the id salt
# is pinned so identical inputs render to identical bytes
plt.rcParams["svg.fonttype"] = "none"
plt.rcParams["svg.hashsalt"] = "rmtlab-figs"

KINDS = ("radial-density", "convergence")
IMAGE_SUFFIXES = (".png", ".svg")

RADIAL_HEADER = ("replica", "re", "im")


class SchemaError(ValueError):
    """Input files absent or not shaped like rmtlab artifacts."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request.

    Parameters
    ----------
    summary_path : path
        The experiment's summary.json.
    out_path : path
        Output image; suffix selects the format (.png or .svg).
    kind : str
        One of KINDS.
    csv_path : path or None
        The experiment's replicas.csv; required for "radial-density".
    bins : int
        Histogram bin count for radial densities.
    dpi : int
        Raster resolution for .png output.
    caption : bool
        Append a render-time caption line (the only clock use).
    """

    summary_path: str
    out_path: str
    kind: str = "radial-density"
    csv_path: str = None
    bins: int = 60
    dpi: int = 150
    caption: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if Path(self.out_path).suffix.lower() not in IMAGE_SUFFIXES:
            raise SchemaError(
                f"output must end in one of {IMAGE_SUFFIXES}, got {self.out_path!r}"
            )
        if not Path(self.summary_path).is_file():
            raise SchemaError(f"missing summary file {self.summary_path!r}")
        if self.kind == "radial-density":
            if self.csv_path is None or not Path(self.csv_path).is_file():
                raise SchemaError(
                    f"radial-density needs a replicas CSV, got {self.csv_path!r}"
                )
        elif self.csv_path is not None and not Path(self.csv_path).is_file():
            raise SchemaError(f"missing CSV file {self.csv_path!r}")
        if self.bins < 1:
            raise SchemaError("bins must be positive")
        if self.dpi < 10:
            raise SchemaError("dpi must be at least 10")


def load_summary(path):
    """Parse a summary.json and check the envelope keys."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot parse summary {path!r}: {exc}") from exc
    if not isinstance(data, dict) or "config" not in data or "metrics" not in data:
        raise SchemaError(f"summary {path!r} lacks config/metrics sections")
    return data


def load_radii(path):
    """Radii |re + i im| from a circular-law replicas.csv."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != RADIAL_HEADER:
                raise SchemaError(
                    f"CSV {path!r} header {header!r} is not {RADIAL_HEADER}"
                )
            radii = [math.hypot(float(row[1]), float(row[2])) for row in reader]
    except OSError as exc:
        raise SchemaError(f"cannot read CSV {path!r}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"CSV {path!r} has a malformed row: {exc}") from exc
    return np.asarray(radii, dtype=np.float64)


def circular_radial_density(r, m_factors):
    """Radial density (2/M) r^{2/M-1} of the M-fold circular law."""
    r = np.asarray(r, dtype=np.float64)
    return (2.0 / m_factors) * r ** (2.0 / m_factors - 1.0)


def trunc_radial_density(r, tau, m_factors):
    """Radial density of the truncated limit law, zero beyond its edge."""
    r = np.asarray(r, dtype=np.float64)
    u = r ** (2.0 / m_factors)
    edge_u = 1.0 / (1.0 + tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = tau * (2.0 / m_factors) * r ** (2.0 / m_factors - 1.0) / (1.0 - u) ** 2
    return np.where(u < edge_u, dens, 0.0)


def fit_loglog_slope(ns, values):
    """Least-squares slope of log(values) against log(ns)."""
    ns = np.asarray(ns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


def _finish(fig, spec):
    if spec.caption:
        import datetime

        stamp = datetime.datetime.now().isoformat(timespec="seconds")
        fig.text(0.99, 0.01, f"rendered {stamp}", ha="right", fontsize=6)
    suffix = Path(spec.out_path).suffix.lower()
    Path(spec.out_path).parent.mkdir(parents=True, exist_ok=True)
    if suffix == ".svg":
        # strip the embedded creation date so renders are reproducible
        fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(
            spec.out_path, format="png", dpi=spec.dpi,
            metadata={"Software": "rmtlab-figs"},
        )
    plt.close(fig)


def plot_radial_density(spec):
    """Histogram of eigenvalue radii with the closed-form density overlay.

    Reads a circular-law experiment's replicas.csv and summary.json; the
    overlay law (M-fold circular or truncated) and its parameters come
    from the summary.  Returns a dict describing what was drawn.
    """
    if spec.kind != "radial-density":
        raise SchemaError(f"spec kind is {spec.kind!r}, not 'radial-density'")
    summary = load_summary(spec.summary_path)
    cfg = summary["config"]
    metrics = summary["metrics"]
    radii = load_radii(spec.csv_path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_xlabel("|eigenvalue|")
    ax.set_ylabel("radial density")

    if len(radii) == 0:
        ax.text(
            0.5, 0.5, "warning: no eigenvalue data in CSV",
            ha="center", va="center", transform=ax.transAxes, color="firebrick",
        )
        ax.set_title("radial density (empty input)")
        _finish(fig, spec)
        return {
            "out_path": spec.out_path, "n_points": 0,
            "law": None, "ks_distance": None,
        }

    m = int(cfg.get("m", 1))
    tau = cfg.get("tau")
    law = metrics.get("law", "circular")
    ks = metrics.get("ks_distance")

    ax.hist(
        radii, bins=spec.bins, density=True, color="steelblue", alpha=0.6,
        label=f"{len(radii)} pooled radii",
    )
    if tau is not None and "trunc" in str(law):
        edge = (1.0 + float(tau)) ** (-m / 2.0)
        grid = np.linspace(1e-4, edge, 400)
        ax.plot(
            grid, trunc_radial_density(grid, float(tau), m), "k-", lw=1.5,
            label=f"truncated limit law (edge {edge:.3f})",
        )
        ax.axvline(edge, color="gray", ls=":", lw=1.0)
        title = f"truncated-unitary radial law, M={m}, tau={tau}"
    else:
        grid = np.linspace(1e-4, 1.0, 400)
        ax.plot(
            grid, circular_radial_density(grid, m), "k-", lw=1.5,
            label=f"(2/{m}) r^(2/{m}-1) on [0,1]",
        )
        title = f"{m}-fold circular radial law"
    if ks is not None:
        ax.text(
            0.02, 0.95, f"KS={float(ks):.6g}",
            transform=ax.transAxes, va="top", fontsize=9,
        )
    ax.set_title(title)
    ax.legend(loc="upper left", fontsize=8, framealpha=0.8)
    _finish(fig, spec)
    return {
        "out_path": spec.out_path, "n_points": int(len(radii)),
        "law": str(law), "ks_distance": None if ks is None else float(ks),
    }


def _convergence_series(summary):
    """Extract (label, ns, values) series from a multi-size summary."""
    cfg = summary["config"]
    metrics = summary["metrics"]
    experiment = cfg.get("experiment")
    series = []
    if experiment == "cumulants":
        ns = [int(v) for v in metrics.get("n_grid", [])]
        decay = metrics.get("decay", {})
        for order in sorted(decay):
            values = [abs(float(v)) for v in decay[order].get("values", [])]
            if len(values) != len(ns):
                raise SchemaError(
                    f"decay order {order} has {len(values)} values for {len(ns)} sizes"
                )
            series.append((f"|C{order}|", ns, values))
    elif experiment == "least-sv":
        per_n = metrics.get("per_n", [])
        ns = [int(e["n"]) for e in per_n]
        tails = [float(e["tail_fraction"]) for e in per_n]
        medians = [float(e["median_scaled"]) for e in per_n]
        series.append(("tail fraction", ns, tails))
        series.append(("median sigma_1 sqrt(n)", ns, medians))
    else:
        raise SchemaError(
            f"convergence plots need a cumulants or least-sv summary, "
            f"got experiment {experiment!r}"
        )
    return series


def plot_convergence(spec):
    """Log-log convergence curves with fitted slopes annotated.

    Reads a cumulants or least-sv summary.json, plots each positive
    series against matrix size, fits a straight line in log-log scale and
    writes the slope into the figure.  Series with fewer than 3 positive
    points are skipped with a note; the whole figure is rejected when no
    series survives.
    """
    if spec.kind != "convergence":
        raise SchemaError(f"spec kind is {spec.kind!r}, not 'convergence'")
    summary = load_summary(spec.summary_path)
    raw_series = _convergence_series(summary)

    fitted = {}
    skipped = []
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ns, values in raw_series:
        pairs = [(n, v) for n, v in zip(ns, values) if v > 0]
        if len(pairs) < 3:
            skipped.append(label)
            continue
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        slope = fit_loglog_slope(xs, ys)
        fitted[label] = {"slope": slope, "n_points": len(pairs)}
        ax.loglog(xs, ys, "o-", label=f"{label}: slope={slope:.6g}")
    if not fitted:
        plt.close(fig)
        raise SchemaError(
            "need at least 3 sizes with positive values for a convergence plot"
        )
    ax.set_xlabel("matrix size n")
    ax.set_ylabel("value")
    ax.set_title(f"{summary['config'].get('experiment')} convergence")
    if skipped:
        ax.text(
            0.02, 0.02, "skipped (under 3 positive points): " + ", ".join(skipped),
            transform=ax.transAxes, fontsize=7, color="gray",
        )
    ax.legend(fontsize=8, framealpha=0.8)
    ax.grid(True, which="both", ls=":", lw=0.4)
    _finish(fig, spec)
    return {"out_path": spec.out_path, "series": fitted, "skipped": skipped}

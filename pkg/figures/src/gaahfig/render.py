"""Turn a FigureSpec into an image file.

Rendering is read-only with respect to its inputs and validates every file
against the figure kind's required columns before the output file is
created, so a schema error never leaves a partial image behind.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import read_fit, read_table  # noqa: E402
from .spec import REQUIRED_COLUMNS  # noqa: E402


def _grid(table, value_col):
    """Pivot (mu, V, value) rows onto a full rectangular grid."""
    mu, V, val = table["mu"], table["V"], table[value_col]
    mus, mu_idx = np.unique(mu, return_inverse=True)
    Vs, V_idx = np.unique(V, return_inverse=True)
    Z = np.full((len(Vs), len(mus)), np.nan)
    Z[V_idx, mu_idx] = val
    if np.isnan(Z).any():
        raise ValueError(
            f"{table.path.name}: (mu, V) points do not fill a "
            f"{len(mus)}x{len(Vs)} rectangular grid")
    return mus, Vs, Z


def _heatmap(ax, spec, mus, Vs, Z):
    vmin, vmax = spec.clim if spec.clim else (None, None)
    mesh = ax.pcolormesh(mus, Vs, Z, cmap=spec.cmap, shading="nearest",
                         vmin=vmin, vmax=vmax)
    ax.figure.colorbar(mesh, ax=ax)
    return "mu", "V"


def _render_phase_map(ax, spec, _labels):
    table = read_table(spec.inputs[0]).require(
        REQUIRED_COLUMNS["phase-map"], "phase-map")
    xl, yl = _heatmap(ax, spec, *_grid(table, "mean_neg_ln_ipr"))
    return xl, yl, None


def _render_sweep_plane(ax, spec, _labels):
    table = read_table(spec.inputs[0]).require(
        REQUIRED_COLUMNS["sweep-plane"], "sweep-plane")
    xl, yl = _heatmap(ax, spec, *_grid(table, "mean"))
    return xl, yl, None


def _observable_rows(table, tag):
    keep = np.array([str(o) == tag for o in table["observable"]])
    if not keep.any():
        raise ValueError(
            f"{table.path.name} has no '{tag}' rows in its observable "
            "column")
    return keep


def _render_lightcone(ax, spec, _labels):
    table = read_table(spec.inputs[0]).require(
        REQUIRED_COLUMNS["lightcone"], "lightcone")
    keep = _observable_rows(table, "P")
    t = table["t_ns"][keep]
    site = table["index"][keep].astype(int)
    mean = table["mean"][keep]
    times = np.unique(t)
    sites = np.unique(site)
    P = np.full((len(sites), len(times)), np.nan)
    P[np.searchsorted(sites, site), np.searchsorted(times, t)] = mean
    if np.isnan(P).any():
        raise ValueError(
            f"{table.path.name}: occupancy rows do not cover every "
            "(site, time) pair")
    vmin, vmax = spec.clim if spec.clim else (0.0, 1.0)
    mesh = ax.pcolormesh(times, sites, P, cmap=spec.cmap, shading="nearest",
                         vmin=vmin, vmax=vmax)
    ax.figure.colorbar(mesh, ax=ax)
    ax.set_yticks(sites)
    return "t (ns)", "site", None


def _render_pe_series(ax, spec, labels):
    q_seen = set()
    for path, label in zip(spec.inputs, labels):
        table = read_table(path).require(
            REQUIRED_COLUMNS["pe-series"], "pe-series")
        keep = _observable_rows(table, "S_PE")
        t = table["t_ns"][keep]
        mean = table["mean"][keep]
        err = table["stderr"][keep]
        order = np.argsort(t)
        t, mean, err = t[order], mean[order], err[order]
        q_seen.update(table["index"][keep].astype(int).tolist())
        line, = ax.plot(t, mean, label=label)
        ax.fill_between(t, mean - err, mean + err,
                        color=line.get_color(), alpha=0.25, linewidth=0)
    ax.legend()
    q = q_seen.pop() if len(q_seen) == 1 else "q"
    return "t (ns)", f"S_{q}", None


def _render_path_cut(ax, spec, labels):
    xname = None
    for path, label in zip(spec.inputs, labels):
        table = read_table(path).require(
            REQUIRED_COLUMNS["path-cut"], "path-cut")
        mu, V = table["mu"], table["V"]
        if len(np.unique(mu)) > 1 and len(np.unique(V)) == 1:
            x, this = mu, "mu"
        elif len(np.unique(V)) > 1 and len(np.unique(mu)) == 1:
            x, this = V, "V"
        else:
            raise ValueError(
                f"{table.path.name}: path varies both mu and V; use the "
                "'sweep-plane' kind for plane sweeps")
        if xname is not None and this != xname:
            raise ValueError("inputs mix mu-cuts and V-cuts in one figure")
        xname = this
        order = np.argsort(x)
        ax.errorbar(x[order], table["mean"][order],
                    yerr=table["stderr"][order], marker="o", capsize=3,
                    label=label)
    if len(spec.inputs) > 1:
        ax.legend()
    return xname, "late-time S_q", None


def _render_scaling(ax, spec, labels):
    for path, label in zip(spec.inputs, labels):
        fit = read_fit(path)
        lnN = np.array([math.log(math.comb(int(L), int(L) // 2))
                        for L in fit["sizes"]])
        xs = np.linspace(lnN.min(), lnN.max(), 50)
        a, b = float(fit["a"]), float(fit["b"])
        line, = ax.plot(xs, a * xs + b,
                        label=f"{label} (a={a:.3f})")
        ax.plot(lnN, a * lnN + b, "o", color=line.get_color())
    ax.legend()
    return "ln N", "late-time S_q", None


_RENDERERS = {
    "phase-map": _render_phase_map,
    "sweep-plane": _render_sweep_plane,
    "lightcone": _render_lightcone,
    "pe-series": _render_pe_series,
    "path-cut": _render_path_cut,
    "scaling": _render_scaling,
}

_SINGLE_INPUT = ("phase-map", "sweep-plane", "lightcone")


def render(spec):
    """Render one figure, returning the written path."""
    if spec.kind in _SINGLE_INPUT and len(spec.inputs) != 1:
        raise ValueError(
            f"kind '{spec.kind}' takes exactly one input file, got "
            f"{len(spec.inputs)}")
    labels = spec.labels if spec.labels is not None else \
        [Path(p).stem for p in spec.inputs]
    fig, ax = plt.subplots(figsize=spec.figsize)
    try:
        xl, yl, _ = _RENDERERS[spec.kind](ax, spec, labels)
        ax.set_xlabel(spec.xlabel if spec.xlabel is not None else xl)
        ax.set_ylabel(spec.ylabel if spec.ylabel is not None else yl)
        if spec.title:
            ax.set_title(spec.title)
        if spec.xlim:
            ax.set_xlim(spec.xlim)
        if spec.ylim:
            ax.set_ylim(spec.ylim)
        fig.tight_layout()
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return out

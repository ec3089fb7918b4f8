"""Figure recipes.

Each renderer reads the qst CSVs found in a data directory and writes one
static PNG.  All validation happens before anything is drawn, so a schema
error never leaves a partial image behind.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schema import (SchemaError, load_fits, load_optimum, load_scan,
                     load_sweeps, load_timeseries)

DPI = 150
plt.rcParams.update({
    "figure.dpi": DPI,
    "savefig.dpi": DPI,
    "font.size": 9,
    "axes.titlesize": 9,
    "image.cmap": "viridis",
})


def _save(fig, out_path: str):
    out_dir = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(out_dir, exist_ok=True)
    tmp = out_path + ".tmp"
    fig.savefig(tmp, format="png")
    plt.close(fig)
    os.replace(tmp, out_path)


def _populations_panel(ax, ts):
    ax.plot(ts["t"], ts["P_A"], label="$P_A$")
    if np.any(ts["P_B"] > 0.0):
        ax.plot(ts["t"], ts["P_B"], label="$P_B$")
    if "P_vac" in ts:
        ax.plot(ts["t"], ts["P_vac"], label="$P_{vac}$", ls="--")
    ax.set_xlabel(r"$t\,\nu_{fsr}$")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="center right", frameon=False)


def _mode_heatmap(ax, ts, fig):
    modes = ts["modes"].T  # rows = mode index, columns = time
    im = ax.imshow(modes, aspect="auto", origin="lower",
                   extent=(ts["t"][0], ts["t"][-1],
                           -0.5, modes.shape[0] - 0.5))
    ax.set_xlabel(r"$t\,\nu_{fsr}$")
    ax.set_ylabel("mode index $k$")
    fig.colorbar(im, ax=ax, label="$P_k$")


def render_fig2(data_dir: str, out_path: str):
    """Qubit populations over time plus the mode-resolved heatmap."""
    ts = load_timeseries(os.path.join(data_dir, "timeseries.csv"))
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(4.8, 5.4),
                                   constrained_layout=True)
    _populations_panel(ax0, ts)
    _mode_heatmap(ax1, ts, fig)
    _save(fig, out_path)


def render_fig3(data_dir: str, out_path: str):
    """Infidelity landscape with the optimum marked; when a fits.csv is
    present, two extra panels show the optimal-parameter trends."""
    kappa, tau_d, grid = load_scan(os.path.join(data_dir, "scan.csv"))
    opt = load_optimum(os.path.join(data_dir, "optimum.csv"))
    fits_path = os.path.join(data_dir, "fits.csv")
    fits = load_fits(fits_path) if os.path.isfile(fits_path) else None
    if fits is not None and opt["g_ratio"].size < 3:
        raise SchemaError(f"{fits_path}: trend panels need at least 3 "
                          "optimum.csv rows")

    n_panels = 1 if fits is None else 3
    fig, axes = plt.subplots(1, n_panels, figsize=(3.4 * n_panels, 3.2),
                             constrained_layout=True)
    axes = np.atleast_1d(axes)

    ax = axes[0]
    with np.errstate(divide="ignore"):
        logi = np.log10(np.clip(grid, 1e-12, None))
    im = ax.pcolormesh(kappa, tau_d, logi.T, shading="nearest")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\kappa/\nu_{fsr}$")
    ax.set_ylabel(r"$\tau_d\,\nu_{fsr}$")
    ax.plot(opt["kappa_opt"], opt["tau_d_opt"], "r*", ms=10, mec="white",
            mew=0.5)
    fig.colorbar(im, ax=ax, label=r"$\log_{10}(1-F)$")

    if fits is not None:
        g = opt["g_ratio"]
        gs = np.linspace(g.min(), g.max(), 200)
        ax = axes[1]
        ax.plot(g, opt["kappa_opt"], "o", label=r"$\kappa_{opt}$")
        a, b = fits["kappa_opt_exponential"]
        ax.plot(gs, a * np.exp(b * gs), "-", lw=1)
        ax.plot(g, opt["t_cycle"], "s", label=r"$t_{cycle}$")
        a, b = fits["t_cycle_exponential"]
        ax.plot(gs, a * np.exp(b * gs), "-", lw=1)
        ax.set_yscale("log")
        ax.set_xlabel(r"$g/\nu_{fsr}$")
        ax.legend(frameon=False)

        ax = axes[2]
        ax.plot(g, opt["tau_d_opt"], "o", label=r"$\tau_{d,opt}$")
        c, d = fits["tau_d_opt_logarithmic"]
        ax.plot(gs, c * np.log(gs) + d, "-", lw=1)
        ax.set_xlabel(r"$g/\nu_{fsr}$")
        ax.legend(frameon=False)

    _save(fig, out_path)


def _sweep_panel(ax, rows, xlabel, logx=True):
    for g in np.unique(rows["g_ratio"]):
        sel = rows["g_ratio"] == g
        x, y = rows["param_value"][sel], rows["infidelity"][sel]
        err = rows["stderr"][sel]
        if np.any(err > 0.0):
            ax.errorbar(x, y, yerr=err, marker="o", ms=3, capsize=2,
                        label=f"$g={g:g}$")
        else:
            ax.plot(x, y, marker="o", ms=3, label=f"$g={g:g}$")
    if logx:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("$1-F$")
    ax.legend(frameon=False, fontsize=7)


def render_fig4(data_dir: str, out_path: str):
    """Four robustness panels: qubit loss, channel loss, mode-frequency
    disorder and qubit-qubit detuning, one curve per coupling ratio."""
    groups = load_sweeps(data_dir)
    panels = [("gamma", r"$\gamma/\nu_{fsr}$", True),
              ("kappa_c", r"$\kappa_c/\nu_{fsr}$", True),
              ("disorder_delta", r"$\delta$", False),
              ("delta_omega", r"$\Delta\omega/\nu_{fsr}$", False)]
    missing = [name for name, _, _ in panels if name not in groups]
    if missing:
        raise SchemaError(f"{data_dir}: no sweep.csv rows with param_name "
                          + ", ".join(f"'{m}'" for m in missing))
    fig, axes = plt.subplots(2, 2, figsize=(6.8, 5.6),
                             constrained_layout=True)
    for ax, (name, xlabel, logx) in zip(axes.flat, panels):
        rows = groups[name]
        if logx:  # drop the zero-loss anchor point on log axes
            keep = rows["param_value"] > 0.0
            rows = {k: v[keep] for k, v in rows.items()}
        _sweep_panel(ax, rows, xlabel, logx)
    _save(fig, out_path)


def render_fig5(data_dir: str, out_path: str):
    """Imperfect-initial-state panels: qubit leakage (one curve per
    anharmonicity) and a stray channel photon."""
    groups = load_sweeps(data_dir)
    leak = {name: rows for name, rows in groups.items()
            if name.startswith("epsilon_f")}
    if not leak:
        raise SchemaError(f"{data_dir}: no sweep.csv rows with param_name "
                          "'epsilon_f[...]'")
    if "epsilon_p" not in groups:
        raise SchemaError(f"{data_dir}: no sweep.csv rows with param_name "
                          "'epsilon_p'")
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(6.8, 3.0),
                                   constrained_layout=True)
    for name in sorted(leak):
        rows = leak[name]
        keep = rows["param_value"] > 0.0
        label = name.removeprefix("epsilon_f").strip("[]") or "leakage"
        ax0.plot(rows["param_value"][keep], rows["infidelity"][keep],
                 marker="o", ms=3, label=f"${label}$")
    ax0.set_xscale("log")
    ax0.set_yscale("log")
    ax0.set_xlabel(r"$\epsilon_f$")
    ax0.set_ylabel("$1-F$")
    ax0.legend(frameon=False, fontsize=7)

    rows = groups["epsilon_p"]
    keep = rows["param_value"] > 0.0
    ax1.plot(rows["param_value"][keep], rows["infidelity"][keep],
             marker="o", ms=3)
    ax1.set_xscale("log")
    ax1.set_yscale("log")
    ax1.set_xlabel(r"$\epsilon_p$")
    ax1.set_ylabel("$1-F$")
    _save(fig, out_path)


RECIPES = {
    "fig2": render_fig2,
    "fig3": render_fig3,
    "fig4": render_fig4,
    "fig5": render_fig5,
}


def render(fig_id: str, data_dir: str, out_path: str):
    if fig_id not in RECIPES:
        raise SchemaError(f"unknown figure id '{fig_id}'; expected one of "
                          + ", ".join(sorted(RECIPES)))
    RECIPES[fig_id](data_dir, out_path)

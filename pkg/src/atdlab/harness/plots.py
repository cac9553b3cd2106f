"""Static SVG figures for sweep and extraction reports.

Pure output: every number shown comes from the JSON/CSV artifacts.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_sweep(result, path) -> None:
    """d_H against the double-log modulus with the fitted curve."""
    recs = [r for r in result.records]
    eps = np.array([r.eps for r in recs])
    dH = np.array([r.d_hausdorff for r in recs])
    inc = np.array([r.included_in_fit for r in recs], dtype=bool)
    x = np.log(np.abs(np.log(1.0 / eps)))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    ax1.plot(x[inc], dH[inc], "o", color="tab:blue", label="levels (fitted)")
    if (~inc).any():
        ax1.plot(x[~inc], dH[~inc], "x", color="tab:gray", label="below noise floor")
    if np.isfinite(result.kappa_fit):
        xx = np.linspace(x.min() * 0.95, x.max() * 1.05, 100)
        ax1.plot(
            xx,
            result.C_kappa_fit * xx ** (-result.kappa_fit),
            "-",
            color="tab:orange",
            label=rf"fit: $C x^{{-\kappa}}$, $\kappa$={result.kappa_fit:.3f}",
        )
    ax1.set_xlabel(r"$\log|\log(1/\varepsilon)|$")
    ax1.set_ylabel(r"$d_H$")
    ax1.set_xscale("log")
    ax1.set_yscale("log")
    ax1.legend(fontsize=8)
    ax1.set_title("distance vs far-field modulus")

    lhs = np.array([r.relation_lhs for r in recs])
    rhs = np.array([r.relation_rhs for r in recs])
    ax2.plot(np.arange(len(recs)), lhs, "o-", label="lhs $|C_A| d_H^p$")
    ax2.plot(
        np.arange(len(recs)),
        result.C_relation * rhs,
        "s--",
        label=rf"fitted $C \cdot$ rhs (C={result.C_relation:.3g})",
    )
    ax2.set_xlabel("level")
    ax2.set_yscale("log")
    ax2.legend(fontsize=8)
    ax2.set_title("relation check per level")
    fig.suptitle(f"regime {result.regime}, seed {result.seed}")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_farfield(pattern, path, label="far field") -> None:
    fig, ax = plt.subplots(figsize=(5.2, 4.0), subplot_kw={"projection": "polar"})
    ax.plot(pattern.theta, np.abs(pattern.values), lw=1.4)
    ax.set_title(f"|u_inf|, k={pattern.k:g} ({label})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_tau_sweep(taus, values, path, C_A=None) -> None:
    taus = np.asarray(taus, dtype=float)
    vals = np.asarray(values, dtype=complex)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(taus, np.abs(vals), "o-", label=r"$|F(\tau)|$")
    if C_A is not None and abs(C_A) > 0:
        ax.loglog(taus, abs(C_A) / taus**2, "--", label=r"$|C_A|/\tau^2$")
    ax.set_xlabel(r"$\tau$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)

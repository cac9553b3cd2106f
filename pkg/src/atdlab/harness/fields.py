"""Synthetic Helmholtz fields for the probe and hyperplane-check commands."""

from __future__ import annotations

import numpy as np


def synthetic_field(cfg: dict):
    """Build (field, k) from a config dict.

    Kinds: "sin" (sin(k x2): Dirichlet line field), "cos" (Neumann line
    field), "robin" (cos(k x2) - (eta/k) sin(k x2), Robin line field with
    the +x2 normal), "plane_wave" (sum of plane waves).
    """
    kind = cfg["kind"]
    k = float(cfg["k"])
    if kind == "sin":
        return (lambda p: np.sin(k * np.atleast_2d(p)[:, 1]).astype(complex)), k
    if kind == "cos":
        return (lambda p: np.cos(k * np.atleast_2d(p)[:, 1]).astype(complex)), k
    if kind == "robin":
        eta = complex(cfg.get("eta", 1.0))

        def f(p):
            x2 = np.atleast_2d(p)[:, 1]
            return np.cos(k * x2) - (eta / k) * np.sin(k * x2)

        return f, k
    if kind == "plane_wave":
        angles = np.asarray(cfg.get("angles", [0.0]), dtype=float)
        amps = np.asarray(cfg.get("amps", np.ones(len(angles))), dtype=complex)
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])

        def f(p):
            p = np.atleast_2d(p)
            return (amps[None, :] * np.exp(1j * k * p @ dirs.T)).sum(axis=1)

        return f, k
    raise ValueError(f"unknown synthetic field kind {kind!r}")

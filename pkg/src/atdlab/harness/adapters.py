"""Frame-local evaluator adapters around solver fields.

The boundary-identity audit wants local-frame evaluators with .eval and
.grad. For the anchor-owning solution the gradient trace on the flat anchor
comes from a one-sided stencil on the exterior side (the interior side is
inside that obstacle); everywhere else central differences of the layer
representation apply.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LocalFieldAdapter", "AnchorOwnerAdapter"]


class LocalFieldAdapter:
    """Field analytic near the whole wedge (the non-anchored solution)."""

    def __init__(self, sol, frame):
        self.sol = sol
        self.frame = frame
        self.R = frame.frame.rotation

    def eval(self, pts_local):
        return np.atleast_1d(self.sol.eval_total_field(self.frame.to_world(pts_local)))

    def grad(self, pts_local):
        gw = self.sol.eval_total_gradient(self.frame.to_world(pts_local))
        return gw @ self.R.T  # chain rule: local gradient = R grad_world


class AnchorOwnerAdapter:
    """The solution whose obstacle hosts the anchor segment.

    Only its trace and gradient ON the anchor (x2 = 0, exterior side
    x2 < 0 locally) are ever requested by the audit.
    """

    def __init__(self, sol, frame, fd_step_frac: float = 0.02):
        # the stencil offset must sit above the layer-evaluation noise floor
        # near the boundary; 2 percent of the wedge size is comfortably there
        self.sol = sol
        self.frame = frame
        self.R = frame.frame.rotation
        self.step = fd_step_frac * frame.h

    def eval(self, pts_local):
        pts_local = np.atleast_2d(np.asarray(pts_local, dtype=float))
        return np.atleast_1d(
            self.sol.boundary_trace_at(self.frame.to_world(pts_local))
        )

    def grad(self, pts_local):
        """One-sided second-order stencil into the exterior (local -x2)."""
        pts_local = np.atleast_2d(np.asarray(pts_local, dtype=float))
        h = self.step
        tr = self.eval(pts_local)
        out = np.empty((len(pts_local), 2), dtype=complex)
        # tangential derivative along the anchor from the trace itself
        tp = self.eval(pts_local + np.array([h, 0.0])[None, :])
        tm = self.eval(pts_local - np.array([h, 0.0])[None, :])
        out[:, 0] = (tp - tm) / (2 * h)
        # normal derivative: values at x2 = -h, -2h plus the trace
        w1 = np.atleast_1d(
            self.sol.eval_total_field(
                self.frame.to_world(pts_local + np.array([0.0, -h])[None, :])
            )
        )
        w2 = np.atleast_1d(
            self.sol.eval_total_field(
                self.frame.to_world(pts_local + np.array([0.0, -2 * h])[None, :])
            )
        )
        out[:, 1] = (3 * tr - 4 * w1 + w2) / (2 * h)
        return out

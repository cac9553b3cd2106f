"""Generalized impedance boundary data: per-edge regimes and mixed partitions.

The boundary condition is d_nu u + eta u = 0 with the obstacle's exterior
normal. eta may be bounded (variable or constant), identically zero
(sound-hard), formally infinite (sound-soft, imposed as u = 0 with its own
formulation rather than a large-eta limit), or mixed along a partition of an
edge. The nowhere-analytic class is represented by a truncated lacunary
cosine series; floating point cannot hold a genuinely nowhere-analytic
function, so the surrogate parameters and truncation order are part of the
spec and are recorded in outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

__all__ = [
    "SoundSoft",
    "SoundHard",
    "ConstantPositive",
    "Bounded",
    "NowhereAnalyticSurrogate",
    "MixedEdge",
    "ImpedanceSpec",
]


class _BC:
    is_dirichlet = False

    def eta(self, t):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


class SoundSoft(_BC):
    """u = 0; eta = +infinity understood formally."""

    is_dirichlet = True

    def eta(self, t):
        raise RuntimeError("sound-soft pieces carry no finite impedance")


class SoundHard(_BC):
    def eta(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros_like(t, dtype=complex)


@dataclass
class ConstantPositive(_BC):
    """eta = lambda > 0 constant (the planar constant-impedance class)."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("constant impedance must be positive")

    def eta(self, t):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, complex(self.lam))

    def describe(self):
        return {"kind": "ConstantPositive", "lambda": self.lam}


@dataclass
class Bounded(_BC):
    """eta given by a callable of normalized arclength, |eta| <= M0, Im eta >= 0."""

    eta_fn: Callable[[np.ndarray], np.ndarray]
    M0: float

    def eta(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.eta_fn(t), dtype=complex)

    def validate(self, n=257):
        t = np.linspace(0, 1, n)
        v = self.eta(t)
        if np.any(v.imag < -1e-12):
            raise ValueError("Bounded impedance must satisfy Im eta >= 0")
        if np.any(np.abs(v) > self.M0 * (1 + 1e-12)):
            raise ValueError("Bounded impedance exceeds its bound M0")

    def describe(self):
        return {"kind": "Bounded", "M0": self.M0}


@dataclass
class NowhereAnalyticSurrogate(_BC):
    """Truncated lacunary series eta(t) = eta_base + c sum_{n<=M} a^n cos(b^n pi t).

    Requires 0 < a < 1 and a*b > 1 + 3*pi/2 (the classical non-differentiability
    threshold for the full series). The truncation order M is recorded.
    """

    eta_base: complex = 1.0
    c: float = 0.25
    a: float = 0.5
    b: float = 13.0
    M: int = 12
    M0: float = 10.0

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError("need 0 < a < 1")
        if self.a * self.b <= 1 + 3 * np.pi / 2:
            raise ValueError("need a*b > 1 + 3*pi/2")
        if complex(self.eta_base).imag < 0:
            raise ValueError("Im eta must be >= 0")

    def eta(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, complex(self.eta_base))
        for n in range(self.M + 1):
            out += self.c * self.a**n * np.cos(self.b**n * np.pi * t)
        return out

    def describe(self):
        return {
            "kind": "NowhereAnalyticSurrogate",
            "eta_base": [complex(self.eta_base).real, complex(self.eta_base).imag],
            "c": self.c,
            "a": self.a,
            "b": self.b,
            "truncation_M": self.M,
            "M0": self.M0,
        }


@dataclass
class MixedEdge(_BC):
    """Partition of one edge into sub-pieces [(t0, t1, bc), ...] covering [0,1]."""

    pieces: List[Tuple[float, float, _BC]]

    def __post_init__(self):
        ts = sorted((p[0], p[1]) for p in self.pieces)
        if abs(ts[0][0]) > 1e-12 or abs(ts[-1][1] - 1.0) > 1e-12:
            raise ValueError("mixed partition must cover [0, 1]")
        for (a0, a1), (b0, b1) in zip(ts, ts[1:]):
            if abs(a1 - b0) > 1e-12:
                raise ValueError("mixed partition pieces must be contiguous")

    def eta(self, t):
        raise RuntimeError("query the sub-pieces of a mixed edge")


@dataclass
class ImpedanceSpec:
    """Per-edge boundary regimes: a default plus optional per-edge overrides."""

    default: _BC
    per_edge: Dict[Tuple[int, int], _BC] = field(default_factory=dict)
    eta0_bound: Optional[float] = None  # Xi3 lower bound, when applicable

    def bc_for(self, component: int, edge: int) -> _BC:
        return self.per_edge.get((component, edge), self.default)

    def validate(self):
        for bc in [self.default, *self.per_edge.values()]:
            pieces = bc.pieces if isinstance(bc, MixedEdge) else [(0.0, 1.0, bc)]
            for _, _, sub in pieces:
                if isinstance(sub, Bounded):
                    sub.validate()
                if self.eta0_bound is not None and not sub.is_dirichlet:
                    t = np.linspace(0, 1, 65)
                    v = sub.eta(t)
                    if np.any(v.real < self.eta0_bound - 1e-12):
                        raise ValueError("Xi3 requires eta >= eta0 on the impedance part")

    def regime_tag(self) -> str:
        kinds = {type(self.default).__name__}
        kinds |= {type(b).__name__ for b in self.per_edge.values()}
        if kinds == {"SoundSoft"}:
            return "soft"
        if kinds == {"SoundHard"}:
            return "hard"
        if kinds == {"ConstantPositive"}:
            return "xi4"
        if kinds == {"NowhereAnalyticSurrogate"}:
            return "xi2"
        if "MixedEdge" in kinds or ("SoundSoft" in kinds and len(kinds) > 1):
            return "xi3"
        return "xi1"

    def describe(self) -> dict:
        return {
            "default": self.default.describe(),
            "overrides": {f"{k}": v.describe() for k, v in self.per_edge.items()},
            "regime": self.regime_tag(),
        }

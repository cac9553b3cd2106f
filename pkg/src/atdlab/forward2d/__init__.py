from .impedance import (
    Bounded,
    ConstantPositive,
    ImpedanceSpec,
    MixedEdge,
    NowhereAnalyticSurrogate,
    SoundHard,
    SoundSoft,
)
from .solver import (
    IllConditionedError,
    IncidentWave,
    PlaneWave,
    PointSource,
    ScatterSolution,
    solve_circle,
    solve_exterior,
)
from .farfield import FarFieldPattern, eval_far_field, far_field_error

__all__ = [
    "Bounded",
    "ConstantPositive",
    "ImpedanceSpec",
    "MixedEdge",
    "NowhereAnalyticSurrogate",
    "SoundHard",
    "SoundSoft",
    "IllConditionedError",
    "IncidentWave",
    "PlaneWave",
    "PointSource",
    "ScatterSolution",
    "solve_circle",
    "solve_exterior",
    "FarFieldPattern",
    "eval_far_field",
    "far_field_error",
]

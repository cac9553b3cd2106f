from .scene import (
    AprioriParams,
    PolytopeScene,
    RigidFrame,
    SceneError,
    load_scene,
    save_scene,
    validate_admissible,
)
from .distances import (
    DistanceWitness,
    ExteriorDecomposition,
    boundary_hausdorff,
    exterior_decomposition,
    hausdorff_distance,
    modified_distance,
)
from .paths import NoPathError, visibility_path
from .frames import AtdFrame2D, AtdFrame3D, FrameError, build_atd_2d, build_atd_3d

__all__ = [
    "AprioriParams",
    "PolytopeScene",
    "RigidFrame",
    "SceneError",
    "load_scene",
    "save_scene",
    "validate_admissible",
    "DistanceWitness",
    "ExteriorDecomposition",
    "boundary_hausdorff",
    "exterior_decomposition",
    "hausdorff_distance",
    "modified_distance",
    "NoPathError",
    "visibility_path",
    "AtdFrame2D",
    "AtdFrame3D",
    "FrameError",
    "build_atd_2d",
    "build_atd_3d",
]

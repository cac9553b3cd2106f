from .config import build_impedance, build_incident, load_config
from .records import SWEEP_CSV_VERSION, SweepRecord, write_sweep_csv
from .sweep import SweepResult, perturb_scene, stability_sweep

__all__ = [
    "build_impedance",
    "build_incident",
    "load_config",
    "SWEEP_CSV_VERSION",
    "SweepRecord",
    "write_sweep_csv",
    "SweepResult",
    "perturb_scene",
    "stability_sweep",
]

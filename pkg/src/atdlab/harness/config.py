"""JSON configuration loading for the CLI and the sweep driver."""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from ..forward2d import (
    Bounded,
    ConstantPositive,
    ImpedanceSpec,
    MixedEdge,
    NowhereAnalyticSurrogate,
    PlaneWave,
    PointSource,
    SoundHard,
    SoundSoft,
)
from ..geometry import PolytopeScene, load_scene


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e}")


def _bc_from_dict(d: dict):
    kind = d.get("kind", "constant")
    if kind == "soft":
        return SoundSoft()
    if kind == "hard":
        return SoundHard()
    if kind == "constant":
        return ConstantPositive(float(d.get("lambda", 1.0)))
    if kind == "nowhere_analytic":
        return NowhereAnalyticSurrogate(
            eta_base=complex(*d.get("eta_base", [1.0, 0.0]))
            if isinstance(d.get("eta_base", 1.0), list)
            else complex(d.get("eta_base", 1.0)),
            c=float(d.get("c", 0.25)),
            a=float(d.get("a", 0.5)),
            b=float(d.get("b", 13.0)),
            M=int(d.get("M", 12)),
            M0=float(d.get("M0", 10.0)),
        )
    if kind == "mixed":
        pieces = [
            (float(p["t0"]), float(p["t1"]), _bc_from_dict(p["bc"])) for p in d["pieces"]
        ]
        return MixedEdge(pieces)
    raise ConfigError(f"unknown impedance kind {kind!r}")


def build_impedance(d: Optional[dict]) -> ImpedanceSpec:
    if d is None:
        return ImpedanceSpec(SoundSoft())
    per_edge = {}
    for key, sub in d.get("per_edge", {}).items():
        ci, ei = (int(v) for v in key.split(","))
        per_edge[(ci, ei)] = _bc_from_dict(sub)
    spec = ImpedanceSpec(_bc_from_dict(d), per_edge=per_edge)
    spec.validate()
    return spec


def build_incident(d: dict):
    k = float(d["k"])
    if d.get("type", "plane") == "plane":
        return PlaneWave(np.asarray(d.get("p", [1.0, 0.0]), dtype=float), k)
    if d["type"] == "point":
        return PointSource(np.asarray(d["z0"], dtype=float), k)
    raise ConfigError(f"unknown incident type {d.get('type')!r}")


def build_scene(cfg: dict) -> PolytopeScene:
    if "scene_file" in cfg:
        return load_scene(cfg["scene_file"])
    if "scene" in cfg:
        return load_scene(cfg["scene"])
    raise ConfigError("config needs 'scene_file' or an inline 'scene'")

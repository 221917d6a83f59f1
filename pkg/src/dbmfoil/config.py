"""Run configuration: one declarative YAML/JSON tree with named presets."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .aero.polar import FlowCondition, ScanSchedule
from .errors import ConfigurationError
from .evo.ga import GaConfig
from .geometry import CollocationGrid
from .morph import MODES

_BASE: dict[str, Any] = {
    "seed": None,
    "output_dir": "runs/default",
    "baselines": None,  # manifest path; None means the bundled set
    "grid_F": 400,
    "mode": "dbm",
    "workers": 1,
    "repair": {"enabled": True, "neighborhood": 5, "smooth_window": 7, "max_passes": 20},
    "evaluator": {"kind": "synthetic", "xfoil_path": None, "panels": [200, 250], "timeout": 10.0},
    "flow": {"re": 1e6, "mach": 0.0, "n_crit": 9.0},
    "scan": {"rough_step": 1.0, "fine_step": 0.25, "alpha_lo": -5.0, "alpha_hi": 25.0, "fine_margin": 2.0},
    "reconstruct": {"population": 40, "max_generations": 100, "early_stop": 1.44e-3, "hicks_henne_q": 3.0,
                    "tolerance": 5e-3},
    "optimize": {"population": 40, "max_generations": 100, "seed_generations": None},
    "zdt": {"population": 100, "max_generations": 500, "n_vars": 25, "seed_generations": None, "problems": ["zdt1", "zdt2", "zdt4", "zdt6"]},
    "cluster": {"k": 3, "restarts": 10},
}

PRESETS: dict[str, dict[str, Any]] = {
    "desk": {"grid_F": 400, "reconstruct": {"population": 40, "max_generations": 100},
             "optimize": {"population": 40, "max_generations": 100}},
    "paper-recon": {"grid_F": 4000, "reconstruct": {"population": 100, "max_generations": 500}},
}

_GA_KEYS = {f for f in GaConfig.__dataclass_fields__}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _set_path(tree: dict, dotted: str, value):
    keys = dotted.split(".")
    node = tree
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


@dataclass
class RunConfig:
    tree: dict

    # -- construction -----------------------------------------------------
    @classmethod
    def build(cls, preset: str | None = None, path=None, overrides: dict | None = None) -> RunConfig:
        tree = copy.deepcopy(_BASE)
        if preset:
            if preset not in PRESETS:
                raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
            tree = _merge(tree, PRESETS[preset])
        if path:
            tree = _merge(tree, load_tree(path))
            if tree.get("baselines") and not Path(tree["baselines"]).is_absolute():
                tree["baselines"] = str(Path(path).parent / tree["baselines"])
        for k, v in (overrides or {}).items():
            if v is not None:
                _set_path(tree, k, v)
        cfg = cls(tree)
        cfg.validate()
        return cfg

    def __getitem__(self, key):
        return self.tree[key]

    # -- validation -------------------------------------------------------
    def validate(self) -> None:
        t = self.tree
        if t.get("seed") is None:
            raise ConfigurationError("an explicit integer seed is required (config 'seed' or --seed)")
        if not isinstance(t["seed"], int):
            raise ConfigurationError("seed must be an integer")
        if t["mode"] not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}")
        F = t["grid_F"]
        if not isinstance(F, int) or F < 4 or F % 2:
            raise ConfigurationError("grid_F must be an even integer >= 4")
        if t["baselines"] and not Path(t["baselines"]).is_file():
            raise ConfigurationError(f"baseline manifest {t['baselines']} does not exist")
        r = t["repair"]
        if r["neighborhood"] < 1 or r["smooth_window"] < 1 or r["max_passes"] < 1:
            raise ConfigurationError("repair knobs must be positive")
        if r["smooth_window"] % 2 == 0:
            raise ConfigurationError("repair.smooth_window must be odd")
        if t["evaluator"]["kind"] not in ("synthetic", "xfoil"):
            raise ConfigurationError("evaluator.kind must be 'synthetic' or 'xfoil'")
        if t["workers"] < 1:
            raise ConfigurationError("workers must be >= 1")
        # constructing these runs their own range checks
        self.flow(), self.scan()
        for task in ("reconstruct", "optimize", "zdt"):
            self.ga(task)

    # -- typed views ------------------------------------------------------
    def grid(self) -> CollocationGrid:
        return CollocationGrid(self.tree["grid_F"])

    def flow(self) -> FlowCondition:
        return FlowCondition(**self.tree["flow"])

    def scan(self) -> ScanSchedule:
        return ScanSchedule(**self.tree["scan"])

    def ga(self, task: str, seed: int | None = None) -> GaConfig:
        sub = {k: v for k, v in self.tree[task].items() if k in _GA_KEYS}
        sub.setdefault("seed", self.tree["seed"] if seed is None else seed)
        if seed is not None:
            sub["seed"] = seed
        sub.setdefault("workers", self.tree["workers"])
        return GaConfig(**sub)

    def baselines(self):
        from . import morph

        grid = self.grid()
        if self.tree["baselines"]:
            return morph.load_manifest(self.tree["baselines"], grid)
        return morph.builtin_baselines(grid)

    def evaluator(self):
        e = self.tree["evaluator"]
        if e["kind"] == "synthetic":
            from .aero.synthetic import SyntheticEvaluator

            return SyntheticEvaluator()
        from .aero.xfoil import XfoilEvaluator

        return XfoilEvaluator(e.get("xfoil_path"), tuple(e.get("panels", (200, 250))), float(e.get("timeout", 10.0)))

    def dump(self) -> str:
        return yaml.safe_dump(self.tree, sort_keys=True)


def load_tree(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return data

"""Bi-objective airfoil optimization over the morphing weights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, morph
from .aero.polar import FlowCondition, ObjectivePair, PolarEvaluator, ScanSchedule, objectives
from .errors import DbmError
from .evo.ga import GaConfig
from .evo.nsga2 import NsgaResult, nsga2, seeded_init

OBJECTIVE_NAMES = ("cld_max", "delta_alpha")


@dataclass
class AirfoilProblem:
    """Weights -> (CLD_max, delta_alpha); any failure scores (0, 0).

    Instances are picklable so generations can be evaluated in worker
    processes.
    """

    baselines: morph.BaselineSet
    evaluator: PolarEvaluator
    flow: FlowCondition = field(default_factory=FlowCondition)
    sched: ScanSchedule = field(default_factory=ScanSchedule)
    mode: str = "dbm"
    repair: bool = True
    neighborhood: int = geometry.DEFAULT_NEIGHBORHOOD
    smooth_window: int = geometry.DEFAULT_SMOOTH_WINDOW

    def shape(self, w, name: str = "morph"):
        return morph.morph(self.baselines, w, repair=self.repair, neighborhood=self.neighborhood,
                           smooth_window=self.smooth_window, name=name)

    def evaluate(self, w) -> ObjectivePair:
        w = np.asarray(w, dtype=float)
        if any(v.kind != "degenerate_sum" for v in morph.validate(w, self.mode)):
            return ObjectivePair.failure("weights outside the design space")
        try:
            shape = self.shape(w)
        except DbmError as exc:
            return ObjectivePair.failure(str(exc))
        if geometry.find_intersections(shape):
            return ObjectivePair.failure("self-intersecting shape")
        return objectives(shape, self.flow, self.sched, self.evaluator)

    def __call__(self, w) -> np.ndarray:
        return np.array(self.evaluate(w).as_tuple())

    @property
    def bounds(self) -> np.ndarray:
        return morph.bounds(len(self.baselines), self.mode)


def run(problem: AirfoilProblem, cfg: GaConfig, seed_generations: int | None = None,
        ref_point=(0.0, 0.0), callback=None) -> NsgaResult:
    """NSGA-II seeded with the single-objective optimum of each objective.

    ``seed_generations`` caps the single-objective runs (default: a quarter
    of the main budget, at least one generation).
    """
    if seed_generations is None:
        seed_generations = max(1, cfg.max_generations // 4)
    init = None
    if seed_generations > 0:
        sub = GaConfig(**{**cfg.to_dict(), "max_generations": seed_generations})
        init = seeded_init(problem, problem.bounds, sub, k=2, sense="max")
    return nsga2(problem, problem.bounds, cfg, init=init, sense="max", ref_point=ref_point, callback=callback)

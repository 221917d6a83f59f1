"""Polars, scan schedules and the two aerodynamic objectives.

The objectives of a shape are its maximum lift-to-drag ratio and the stall
margin ``delta_alpha = max(0, alpha_s - alpha(CLD_max))``, where ``alpha_s``
is the first local maximum of C_l at or above zero incidence.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple, Protocol

import numpy as np

from ..errors import ConfigurationError, DbmError, EvaluationFailure
from ..geometry import CollocatedAirfoil

_ALPHA_DECIMALS = 9


@dataclass(frozen=True)
class FlowCondition:
    re: float = 1e6
    mach: float = 0.0
    n_crit: float = 9.0

    def __post_init__(self):
        if not self.re > 0:
            raise ConfigurationError(f"Reynolds number must be positive, got {self.re}")
        if self.mach < 0:
            raise ConfigurationError("Mach number must be non-negative")
        if self.n_crit <= 0:
            raise ConfigurationError("n_crit must be positive")


@dataclass(frozen=True)
class ScanSchedule:
    rough_step: float = 1.0
    fine_step: float = 0.25
    alpha_lo: float = -5.0
    alpha_hi: float = 25.0
    fine_margin: float = 2.0

    def __post_init__(self):
        if not 0 < self.fine_step <= self.rough_step:
            raise ConfigurationError("need 0 < fine_step <= rough_step")
        if not self.alpha_lo < self.alpha_hi:
            raise ConfigurationError("alpha_lo must be below alpha_hi")
        if self.fine_margin < 0:
            raise ConfigurationError("fine_margin must be non-negative")

    def rough_alphas(self) -> np.ndarray:
        return _grid(self.alpha_lo, self.alpha_hi, self.rough_step)

    def fine_alphas(self, centers) -> np.ndarray:
        """Fine-step angles within ``fine_margin`` of each center, on multiples of ``fine_step``."""
        parts = []
        for c in centers:
            lo = max(self.alpha_lo, c - self.fine_margin)
            hi = min(self.alpha_hi, c + self.fine_margin)
            k0 = np.ceil(round(lo / self.fine_step, _ALPHA_DECIMALS))
            k1 = np.floor(round(hi / self.fine_step, _ALPHA_DECIMALS))
            if k1 >= k0:
                parts.append(np.arange(k0, k1 + 1) * self.fine_step)
        if not parts:
            return np.empty(0)
        return np.unique(np.round(np.concatenate(parts), _ALPHA_DECIMALS))


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(np.floor(round((hi - lo) / step, _ALPHA_DECIMALS)))
    return np.round(lo + step * np.arange(n + 1), _ALPHA_DECIMALS)


class Polar:
    """Rows of (alpha [deg], C_l, C_d, converged), strictly increasing in alpha."""

    def __init__(self, alpha, cl, cd, converged=None):
        alpha = np.asarray(alpha, dtype=float).ravel()
        cl = np.asarray(cl, dtype=float).ravel()
        cd = np.asarray(cd, dtype=float).ravel()
        conv = np.ones(len(alpha), bool) if converged is None else np.asarray(converged, bool).ravel()
        if not len(alpha) == len(cl) == len(cd) == len(conv):
            raise ValueError("polar columns differ in length")
        if np.any(np.diff(alpha) <= 0):
            raise ValueError("polar alphas must be strictly increasing")
        # a converged row needs finite coefficients and positive drag
        conv = conv & np.isfinite(cl) & np.isfinite(cd) & (cd > 0)
        self.alpha, self.cl, self.cd, self.converged = alpha, cl, cd, conv
        for a in (self.alpha, self.cl, self.cd, self.converged):
            a.setflags(write=False)

    @classmethod
    def from_rows(cls, rows) -> Polar:
        rows = sorted(rows, key=lambda r: r[0])
        if not rows:
            return cls([], [], [], [])
        a, cl, cd, ok = zip(*rows)
        return cls(a, cl, cd, ok)

    def rows(self):
        return list(zip(self.alpha.tolist(), self.cl.tolist(), self.cd.tolist(), self.converged.tolist()))

    def __len__(self):
        return len(self.alpha)

    def merge(self, other: Polar) -> Polar:
        """Union by alpha; rows already present in ``self`` win."""
        have = {round(a, _ALPHA_DECIMALS): r for a, r in zip(self.alpha.tolist(), self.rows())}
        for a, r in zip(other.alpha.tolist(), other.rows()):
            key = round(a, _ALPHA_DECIMALS)
            if key not in have or (not have[key][3] and r[3]):
                have[key] = r
        return Polar.from_rows(list(have.values()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "cl", "cd", "converged"])
        for a, cl, cd, ok in self.rows():
            w.writerow([repr(a), repr(cl), repr(cd), int(ok)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> Polar:
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls.from_rows([(float(r["alpha"]), float(r["cl"]), float(r["cd"]), bool(int(r["converged"])))
                              for r in rows])


class PolarEvaluator(Protocol):
    def __call__(self, shape: CollocatedAirfoil, flow: FlowCondition, alphas: np.ndarray) -> Polar: ...


class StallAngle(NamedTuple):
    alpha: float
    censored: bool


@dataclass(frozen=True)
class ObjectivePair:
    cld_max: float = 0.0
    delta_alpha: float = 0.0
    alpha_at_cld_max: float = float("nan")
    alpha_s: float = float("nan")
    failed: bool = False
    censored: bool = False
    reason: str = ""

    @classmethod
    def failure(cls, reason: str = "") -> ObjectivePair:
        return cls(0.0, 0.0, float("nan"), float("nan"), True, False, reason)

    def as_tuple(self) -> tuple[float, float]:
        return (self.cld_max, self.delta_alpha)


def cld_max(p: Polar) -> tuple[float, float]:
    """Largest C_l/C_d over converged rows and its alpha; ties go to the smaller alpha."""
    ok = p.converged
    if not np.any(ok):
        raise EvaluationFailure("polar has no converged rows")
    cld = p.cl[ok] / p.cd[ok]
    i = int(np.argmax(cld))  # first occurrence, and rows are sorted by alpha
    return float(cld[i]), float(p.alpha[ok][i])


def stall_angle(p: Polar) -> StallAngle:
    """First discrete local maximum of C_l at alpha >= 0 among converged rows.

    A row qualifies when its C_l is >= both converged neighbours; a plateau
    therefore resolves to its first row. A missing left neighbour (the first
    converged row) is ignored. When C_l never turns over, the last converged
    alpha is returned with ``censored=True``.
    """
    ok = p.converged
    a, cl = p.alpha[ok], p.cl[ok]
    start = np.nonzero(a >= 0)[0]
    if len(start) == 0:
        raise EvaluationFailure("no converged rows at alpha >= 0")
    n = len(a)
    for i in range(start[0], n - 1):
        left_ok = i == 0 or cl[i] >= cl[i - 1]
        if left_ok and cl[i] >= cl[i + 1]:
            return StallAngle(float(a[i]), False)
    return StallAngle(float(a[-1]), True)


def objectives_from_polar(p: Polar) -> ObjectivePair:
    value, a_star = cld_max(p)
    stall = stall_angle(p)
    return ObjectivePair(value, max(0.0, stall.alpha - a_star), a_star, stall.alpha, False, stall.censored)


def evaluate_polar(shape: CollocatedAirfoil, flow: FlowCondition, sched: ScanSchedule,
                   evaluator: PolarEvaluator) -> Polar:
    """Rough scan over the schedule, then fine scans around the CLD_max and stall estimates."""
    rough = evaluator(shape, flow, sched.rough_alphas())
    if not np.any(rough.converged):
        raise EvaluationFailure("rough scan did not converge at any angle")
    centers = [cld_max(rough)[1]]
    try:
        centers.append(stall_angle(rough).alpha)
    except EvaluationFailure:
        pass
    fine_a = sched.fine_alphas(centers)
    fine_a = fine_a[~np.isin(np.round(fine_a, _ALPHA_DECIMALS), np.round(rough.alpha, _ALPHA_DECIMALS))]
    if len(fine_a) == 0:
        return rough
    return rough.merge(evaluator(shape, flow, fine_a))


def objectives(shape, flow: FlowCondition, sched: ScanSchedule, evaluator: PolarEvaluator) -> ObjectivePair:
    """Both objectives of a shape; every failure becomes ``ObjectivePair.failure``."""
    if shape is None:
        return ObjectivePair.failure("no shape")
    try:
        return objectives_from_polar(evaluate_polar(shape, flow, sched, evaluator))
    except ConfigurationError:
        raise
    except (DbmError, ValueError, FloatingPointError) as exc:
        return ObjectivePair.failure(str(exc))

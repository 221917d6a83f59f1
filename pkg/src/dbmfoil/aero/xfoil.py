"""Subprocess adapter around an external XFOIL binary.

Each call runs in its own temporary directory. The contour is repaneled here
(curvature-weighted) rather than with XFOIL's own paneling. Angles that fail
to converge go through a recovery ladder: a fresh-start run of the single
angle, a run with more panels, and finally an approach from the nearest
converged neighbour in small steps. A row whose pressure drag is not below
its total drag is treated as unconverged.
"""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import ConfigurationError
from ..geometry import CollocatedAirfoil
from .polar import FlowCondition, Polar

ENV_VAR = "DBMFOIL_XFOIL"
log = logging.getLogger(__name__)


def find_binary(path: str | None = None) -> str:
    """Resolve the XFOIL executable from ``path``, ``$DBMFOIL_XFOIL`` or ``PATH``."""
    cand = path or os.environ.get(ENV_VAR) or shutil.which("xfoil")
    if not cand or not (Path(cand).is_file() and os.access(cand, os.X_OK)):
        raise ConfigurationError(
            f"XFOIL binary not found; set {ENV_VAR} to the executable path"
            + (f" (tried {cand!r})" if cand else "")
        )
    return str(cand)


def repanel(shape: CollocatedAirfoil, n_panels: int = 200, curvature_weight: float = 2.0) -> np.ndarray:
    """Contour points (TE upper -> LE -> TE lower) spaced by curvature-weighted arc length."""
    pts = shape.to_points()
    seg = np.hypot(*np.diff(pts, axis=0).T)
    keep = np.append(True, seg > 1e-12)
    pts = pts[keep]
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    sx, sy = CubicSpline(s, pts[:, 0]), CubicSpline(s, pts[:, 1])
    fine = np.linspace(0.0, s[-1], 20 * n_panels + 1)
    dx, dy = sx(fine, 1), sy(fine, 1)
    ddx, ddy = sx(fine, 2), sy(fine, 2)
    kappa = np.abs(dx * ddy - dy * ddx) / np.maximum((dx * dx + dy * dy) ** 1.5, 1e-12)
    kappa = np.convolve(kappa, np.ones(21) / 21, mode="same")
    dens = 1.0 + curvature_weight * kappa / max(np.mean(kappa), 1e-12)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(fine))])
    targets = np.linspace(0.0, cum[-1], n_panels + 1)
    s_new = np.interp(targets, cum, fine)
    out = np.column_stack([sx(s_new), sy(s_new)])
    out[0], out[-1] = pts[0], pts[-1]
    return out


def parse_polar_file(text: str) -> list[tuple[float, float, float, float]]:
    """(alpha, CL, CD, CDp) rows of an XFOIL polar save file."""
    rows = []
    started = False
    for line in text.splitlines():
        if line.strip().startswith("-----"):
            started = True
            continue
        if not started:
            continue
        parts = line.split()
        if len(parts) < 4:
            continue
        try:
            rows.append(tuple(float(v) for v in parts[:4]))
        except ValueError:
            continue
    return rows


def accept_row(cl: float, cd: float, cdp: float) -> bool:
    """Sanity check on a parsed row: finite, positive drag and pressure drag below total drag."""
    return bool(np.isfinite(cl) and np.isfinite(cd) and cd > 0 and cdp < cd)


@dataclass
class XfoilEvaluator:
    path: str | None = None
    panels: tuple[int, ...] = (200, 250)
    timeout_per_alpha: float = 10.0
    iterations: int = 100
    probe_steps: int = 4
    name: str = "xfoil"

    def __post_init__(self):
        self.binary = find_binary(self.path)

    # -- one XFOIL process ------------------------------------------------
    def _script(self, flow: FlowCondition, alphas, fresh: bool) -> str:
        cmds = ["PLOP", "G F", "", "LOAD foil.dat", "OPER", f"VISC {flow.re:.6g}", f"MACH {flow.mach:.6g}",
                "VPAR", f"N {flow.n_crit:.6g}", "", f"ITER {self.iterations}", "PACC", "polar.txt", ""]
        for a in alphas:
            if fresh:
                cmds.append("INIT")
            cmds.append(f"ALFA {a:.6f}")
        cmds += ["PACC", "", "QUIT"]
        return "\n".join(cmds) + "\n"

    def _run(self, shape, flow, alphas, n_panels: int, fresh: bool = False) -> dict[float, tuple]:
        with tempfile.TemporaryDirectory(prefix="dbmfoil-xfoil-") as tmp:
            tmp = Path(tmp)
            pts = repanel(shape, n_panels)
            body = "\n".join(f"{x:.8f} {y:.8f}" for x, y in pts)
            (tmp / "foil.dat").write_text(f"{shape.name or 'foil'}\n{body}\n")
            try:
                subprocess.run([self.binary], input=self._script(flow, alphas, fresh), text=True, cwd=tmp,
                               capture_output=True, timeout=self.timeout_per_alpha * max(1, len(alphas)))
            except subprocess.TimeoutExpired:
                log.debug("xfoil timed out on %d angles", len(alphas))
            polar = tmp / "polar.txt"
            text = polar.read_text() if polar.exists() else ""
        got = {}
        for a, cl, cd, cdp in parse_polar_file(text):
            if accept_row(cl, cd, cdp):
                got[round(a, 6)] = (cl, cd)
        return got

    # -- public interface -------------------------------------------------
    def __call__(self, shape: CollocatedAirfoil, flow: FlowCondition, alphas) -> Polar:
        alphas = np.round(np.asarray(alphas, dtype=float), 6)
        got = self._run(shape, flow, alphas, self.panels[0])
        for a in alphas:
            if a in got:
                continue
            # fresh start, then more panels
            for n, fresh in [(self.panels[0], True)] + [(n, True) for n in self.panels[1:]]:
                got.update(self._run(shape, flow, [a], n, fresh))
                if a in got:
                    break
            if a not in got:
                got.update(self._probe(shape, flow, a, got))
        cl = [got[a][0] if a in got else np.nan for a in alphas]
        cd = [got[a][1] if a in got else np.nan for a in alphas]
        return Polar(alphas, cl, cd, [a in got for a in alphas])

    def _probe(self, shape, flow, a, got) -> dict:
        """Walk towards ``a`` from the nearest converged angle."""
        if not got:
            return {}
        near = min(got, key=lambda b: (abs(b - a), b))
        path = np.round(np.linspace(near, a, self.probe_steps + 1)[1:], 6)
        res = self._run(shape, flow, path, self.panels[-1])
        return {a: res[a]} if a in res else {}

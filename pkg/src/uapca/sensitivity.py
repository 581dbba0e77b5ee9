"""Sensitivity of the PCA basis to the uncertainty scaling factor s.

A sweep samples s on a hyperbolic grid s = t / (1 - t) with t uniform in
[0, 1], so the whole range [0, inf) fits a finite schedule; t = 1 stands
for the limit where only the expected item covariance matters.  Factor
traces record where each original axis lands in component space at every
step, giving a compact picture of how the projection reacts to s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cov import CovOptions, global_cov
from .eigen import PcaModel, eig_sym, select_components
from .model import UncertainDataset, _readonly


@dataclass(frozen=True)
class SweepSchedule:
    """Uniform t-grid over [0, 1] mapped through s = t / (1 - t)."""

    steps: int = 64

    def __post_init__(self):
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))

    def t_values(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.steps)

    def s_values(self) -> np.ndarray:
        """Strictly increasing s per step; the final entry is the inf limit."""
        t = self.t_values()
        s = np.empty(self.steps)
        s[:-1] = t[:-1] / (1.0 - t[:-1])
        s[-1] = math.inf
        return s

    @property
    def region_split(self) -> int:
        """Index of the first step with s > 1 (start of the extrapolation side)."""
        s = self.s_values()
        return int(np.argmax(s > 1.0))


@dataclass
class EigenCurves:
    """Per-step sorted eigenvalues of the swept covariance.

    values has one row per step (descending eigenvalues).  Flags mark
    suspected avoided crossings as (step, pair) with pair i meaning the gap
    between eigenvalue curves i and i+1.
    """

    s_values: np.ndarray
    values: np.ndarray
    avoided_crossing_flags: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class FactorTrace:
    """Path of one original axis through component space over the sweep.

    points holds the aligned orientation, one q-vector per step; the
    mirrored orientation is its negation, and both belong to the trace since
    component signs are arbitrary.  region_split is the first step index
    with s > 1.
    """

    axis_index: int
    points: np.ndarray
    region_split: int

    def orientations(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points, -self.points


def sweep(
    ds: UncertainDataset,
    q: int,
    schedule: SweepSchedule = SweepSchedule(),
    use_weights: bool = True,
) -> tuple[list[PcaModel], EigenCurves]:
    """Fit one PCA model per schedule step.

    The dataset is accumulated once; per step the covariance is formed from
    the stored terms via the scaling law K(s) = term_means +
    s^2 * term_uncertainty, with the final step using term_uncertainty
    alone.  Eigenvalue curves across all steps are returned alongside the
    models, with avoided-crossing flags filled in for schedules of at least
    three steps.
    """
    g = global_cov(ds, CovOptions(scale_s=1.0, use_weights=use_weights))
    s_values = schedule.s_values()
    models: list[PcaModel] = []
    curves_rows = np.empty((schedule.steps, ds.dim))
    for k, s in enumerate(s_values):
        if math.isinf(s):
            matrix = g.term_uncertainty
        else:
            matrix = g.term_means + (s * s) * g.term_uncertainty
        pairs = eig_sym(matrix)
        models.append(select_components(pairs, g.mean, q))
        curves_rows[k] = pairs.values
    curves = EigenCurves(s_values=_readonly(s_values), values=_readonly(curves_rows))
    if schedule.steps >= 3:
        curves.avoided_crossing_flags = detect_avoided_crossings(curves)
    return models, curves


def factor_traces(models: list[PcaModel], schedule: SweepSchedule) -> list[FactorTrace]:
    """Trace each original axis through the swept component bases.

    The trace point for axis i at step k is A_k^T e_i, i.e. row i of the
    component matrix.  Because eigenvector signs are arbitrary per step, a
    sequential alignment pass flips whole component columns: at each step a
    column is negated when that raises the summed dot products between the
    step's trace points and the previous step's.  Flips never change any
    spanned subspace.
    """
    if not models:
        raise ValueError("no models to trace")
    if len(models) != schedule.steps:
        raise ValueError(
            f"got {len(models)} models for a {schedule.steps}-step schedule"
        )
    d, q = models[0].components.shape
    aligned = np.empty((len(models), d, q))
    aligned[0] = models[0].components
    for k in range(1, len(models)):
        a = models[k].components.copy()
        # Sum_i <p_i(k), p_i(k-1)> splits into one dot product per column,
        # so each column flips independently.
        for j in range(q):
            if float(aligned[k - 1][:, j] @ a[:, j]) < 0.0:
                a[:, j] = -a[:, j]
        aligned[k] = a
    split = schedule.region_split
    return [
        FactorTrace(axis_index=i, points=_readonly(aligned[:, i, :].copy()), region_split=split)
        for i in range(d)
    ]


def detect_avoided_crossings(curves: EigenCurves) -> list[tuple[int, int]]:
    """Flag interior gap minima that look like avoided crossings.

    For each adjacent eigenvalue pair the gap curve g_k = lambda_i(k) -
    lambda_{i+1}(k) is scanned for interior local minima that stay positive
    but dip below a quarter of the pair's median gap.  Exact crossings
    (zero gap) are real degeneracies, not avoided crossings, and are never
    flagged.
    """
    vals = np.asarray(curves.values, dtype=float)
    if vals.ndim != 2 or vals.shape[0] < 3:
        raise ValueError("avoided-crossing detection needs at least 3 sweep steps")
    n_steps, d = vals.shape
    flags: list[tuple[int, int]] = []
    for i in range(d - 1):
        gap = vals[:, i] - vals[:, i + 1]
        cutoff = 0.25 * float(np.median(gap))
        for k in range(1, n_steps - 1):
            if gap[k] <= 0.0 or gap[k] >= cutoff:
                continue
            if gap[k] < gap[k - 1] and gap[k] <= gap[k + 1]:
                flags.append((k, i))
    return flags

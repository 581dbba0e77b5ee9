"""Distance between PCA inputs and a Monte-Carlo validation harness.

A PCA fit is fully determined by its mean vector and covariance matrix, so
two fits are compared by interpreting those moments as multivariate normals
and measuring the Hellinger distance between them:

    BC(p, q) = integral sqrt(p(x) q(x)) dx          (Bhattacharyya coefficient)
    H(p, q)  = sqrt(1 - BC(p, q))                   in [0, 1]

For normals BC has a closed form, exp(-D_B) with

    D_B = 1/8 dmu^T S^-1 dmu + 1/2 ln(det S / sqrt(det Sp det Sq)),
    S   = (Sp + Sq) / 2.

The sampling harness draws from every item, pools the samples, and fits
plain PCA moments to them; driving the sample count up makes the pooled
moments converge to the closed-form global covariance, which is the
correctness argument for the accumulation scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cov import CovOptions, GlobalCov, global_cov
from .model import Gaussian, UncertainDataset, _as_vector, _readonly

_REG_EPS = 1e-12
_TARGET_H = 0.1
DEFAULT_SAMPLE_COUNTS = (16, 64, 256, 1024, 4096)


@dataclass(frozen=True)
class PcaSummary:
    """Mean and covariance of a PCA input, read as a multivariate normal."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        m = _as_vector(self.mean, "mean")
        k = np.asarray(self.cov, dtype=float)
        if k.shape != (m.size, m.size):
            raise ValueError(f"covariance shape {k.shape} does not match mean length {m.size}")
        if not np.all(np.isfinite(k)):
            raise ValueError("covariance contains non-finite entries")
        object.__setattr__(self, "mean", _readonly(m))
        object.__setattr__(self, "cov", _readonly((k + k.T) / 2.0))


def summary_of(g: GlobalCov) -> PcaSummary:
    """The closed-form summary of a global covariance result."""
    return PcaSummary(mean=g.mean, cov=g.matrix)


def _logdets(sp: np.ndarray, sq: np.ndarray, sbar: np.ndarray):
    out = []
    for m in (sp, sq, sbar):
        sign, logdet = np.linalg.slogdet(m)
        if sign <= 0.0 or not np.isfinite(logdet):
            return None
        out.append(logdet)
    return out


def bhattacharyya_coeff(p: PcaSummary, q: PcaSummary) -> float:
    """Bhattacharyya coefficient of two Gaussian summaries, in [0, 1].

    Singular covariances are regularized by adding 1e-12 * I to both inputs
    symmetrically; if that still leaves a singular matrix the inputs are
    rejected.
    """
    if p.mean.size != q.mean.size:
        raise ValueError(
            f"summaries have different dimensions: {p.mean.size} vs {q.mean.size}"
        )
    sp, sq = p.cov, q.cov
    sbar = (sp + sq) / 2.0
    dets = _logdets(sp, sq, sbar)
    if dets is None:
        eye = _REG_EPS * np.eye(sp.shape[0])
        sp = sp + eye
        sq = sq + eye
        sbar = (sp + sq) / 2.0
        dets = _logdets(sp, sq, sbar)
        if dets is None:
            raise ValueError("covariances are irrecoverably singular")
    ld_p, ld_q, ld_bar = dets
    dmu = p.mean - q.mean
    maha = float(dmu @ np.linalg.solve(sbar, dmu))
    d_b = 0.125 * maha + 0.5 * (ld_bar - 0.5 * (ld_p + ld_q))
    return float(np.clip(np.exp(-d_b), 0.0, 1.0))


def hellinger(p: PcaSummary, q: PcaSummary) -> float:
    """Hellinger distance sqrt(1 - BC), clamped into [0, 1]."""
    return float(np.sqrt(np.clip(1.0 - bhattacharyya_coeff(p, q), 0.0, 1.0)))


def sampled_pca(
    ds: UncertainDataset, samples_per_item: int, rng: np.random.Generator
) -> PcaSummary:
    """Monte-Carlo counterpart of the closed-form global covariance.

    Draws ``samples_per_item`` samples from every item in order, pools them,
    and returns the pooled mean and population (1/M) covariance.  Weights
    are ignored: every item contributes the same number of draws.
    Deterministic for a seeded generator.
    """
    if not isinstance(samples_per_item, (int, np.integer)) or samples_per_item < 1:
        raise ValueError(f"samples_per_item must be a positive integer, got {samples_per_item!r}")
    pooled = np.vstack([item.sample(int(samples_per_item), rng) for item in ds.items])
    mean = pooled.mean(axis=0)
    centered = pooled - mean
    cov = centered.T @ centered / pooled.shape[0]
    return PcaSummary(mean=mean, cov=cov)


# ---------------------------------------------------------------------------
# Convergence experiment.


@dataclass(frozen=True)
class ExperimentConfig:
    """Setup for the sampling-convergence experiment.

    Per dimension D a synthetic dataset of ``n_items`` Gaussians is built:
    a base covariance Sigma = Q diag(u) Q^T with u uniform in [0.5, 2] and Q
    a seeded random rotation, item means drawn from N(0, Sigma), and one
    shared item covariance Psi obtained by reversing the elements of Sigma
    (row-major flatten, reverse, reshape), then symmetrizing and projecting
    onto the PSD cone.
    """

    dims: tuple[int, ...] = tuple(range(2, 13))
    sample_counts: tuple[int, ...] = DEFAULT_SAMPLE_COUNTS
    n_items: int = 10
    runs: int = 40
    rng_seed: int = 0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"dims must be positive integers, got {self.dims!r}")
        counts = tuple(int(c) for c in self.sample_counts)
        if not counts or any(c < 1 for c in counts):
            raise ValueError(f"sample_counts must be positive, got {self.sample_counts!r}")
        if any(b <= a for a, b in zip(counts, counts[1:])):
            raise ValueError("sample_counts must be strictly increasing")
        if int(self.runs) < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs!r}")
        if int(self.n_items) < 2:
            raise ValueError(f"n_items must be >= 2, got {self.n_items!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "sample_counts", counts)
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "n_items", int(self.n_items))
        object.__setattr__(self, "rng_seed", int(self.rng_seed))


@dataclass(frozen=True)
class ExperimentRow:
    dim: int
    samples: int
    median_hellinger: float
    runs: int
    seed: int


def _psd_projection(m: np.ndarray) -> np.ndarray:
    sym = (m + m.T) / 2.0
    evals, evecs = np.linalg.eigh(sym)
    out = (evecs * np.clip(evals, 0.0, None)) @ evecs.T
    return (out + out.T) / 2.0


def _experiment_dataset(dim: int, n_items: int, seed: int) -> UncertainDataset:
    rng = np.random.default_rng([seed, dim])
    gauss = rng.standard_normal((dim, dim))
    q_mat, r_mat = np.linalg.qr(gauss)
    q_mat = q_mat * np.sign(np.diag(r_mat))  # canonical rotation, sign-fixed
    spectrum = rng.uniform(0.5, 2.0, size=dim)
    sigma = (q_mat * spectrum) @ q_mat.T
    sigma = (sigma + sigma.T) / 2.0

    evals, evecs = np.linalg.eigh(sigma)
    factor = evecs * np.sqrt(np.clip(evals, 0.0, None))
    means = rng.standard_normal((n_items, dim)) @ factor.T

    psi = _psd_projection(sigma.ravel()[::-1].reshape(dim, dim))
    return UncertainDataset(tuple(Gaussian(mu, psi) for mu in means))


def run_convergence_experiment(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """Median Hellinger between sampled and closed-form PCA summaries.

    For every (dim, sample count) cell the experiment runs ``cfg.runs``
    independent sampling passes with derived seeds and reports the median
    Hellinger distance to the closed-form summary at s = 1.  Rows come out
    ordered by dim, then sample count.  Fully deterministic given the
    config.
    """
    rows: list[ExperimentRow] = []
    for dim in cfg.dims:
        ds = _experiment_dataset(dim, cfg.n_items, cfg.rng_seed)
        closed = summary_of(global_cov(ds, CovOptions(scale_s=1.0)))
        for count in cfg.sample_counts:
            dists = [
                hellinger(
                    sampled_pca(
                        ds, count, np.random.default_rng([cfg.rng_seed, dim, count, run])
                    ),
                    closed,
                )
                for run in range(cfg.runs)
            ]
            rows.append(
                ExperimentRow(
                    dim=dim,
                    samples=count,
                    median_hellinger=float(np.median(dists)),
                    runs=cfg.runs,
                    seed=cfg.rng_seed,
                )
            )
    return rows


def samples_to_reach(rows: list[ExperimentRow], dim: int, target: float = _TARGET_H) -> int | None:
    """Smallest sample count whose median Hellinger is below target."""
    for row in rows:
        if row.dim == dim and row.median_hellinger < target:
            return row.samples
    return None

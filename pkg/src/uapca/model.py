"""Distribution model for uncertainty-aware PCA.

Every input item is a probability distribution over R^D, reduced to its
first two moments: ``mean()`` returns E[x] and ``cov()`` the covariance
matrix Cov(x, x).  The second moment follows as E[x x^T] = mean mean^T + cov.
All covariance bookkeeping uses population (1/N) normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Relative floor for eigenvalues of a valid covariance matrix.
PSD_RTOL = 1e-9
# Relative symmetry slack accepted before symmetrization.
SYM_RTOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def cov_matrix(entries, name: str = "covariance") -> np.ndarray:
    """Validate a covariance matrix and return its symmetrized copy.

    The input must be square, finite, symmetric within ``SYM_RTOL`` relative
    tolerance, and positive semi-definite up to numerical noise (eigenvalues
    no lower than ``-PSD_RTOL`` times the largest eigenvalue magnitude).
    The returned array is read-only.
    """
    k = np.asarray(entries, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] == 0:
        raise ValueError(f"{name} must be a square matrix, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError(f"{name} contains non-finite entries")
    scale = float(np.abs(k).max())
    if float(np.abs(k - k.T).max()) > SYM_RTOL * max(1.0, scale):
        raise ValueError(f"{name} is not symmetric")
    k = (k + k.T) / 2.0
    evals = np.linalg.eigvalsh(k)
    lam_scale = float(np.abs(evals).max())
    if evals[0] < -PSD_RTOL * lam_scale:
        raise ValueError(
            f"{name} is not positive semi-definite "
            f"(min eigenvalue {evals[0]:.3e}, scale {lam_scale:.3e})"
        )
    return _readonly(k)


def affine_mean(a: np.ndarray, b: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Mean of A x + b for x with mean m: A m + b."""
    a = np.asarray(a, dtype=float)
    b = _as_vector(b, "offset")
    m = _as_vector(m, "mean")
    if a.ndim != 2 or a.shape != (b.size, m.size):
        raise ValueError(
            f"matrix shape {a.shape} incompatible with offset {b.size} and mean {m.size}"
        )
    return a @ m + b


def affine_cov(a: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Covariance of A x + b for x with covariance K: A K A^T."""
    a = np.asarray(a, dtype=float)
    k = np.asarray(k, dtype=float)
    if a.ndim != 2 or k.ndim != 2 or a.shape[1] != k.shape[0] or k.shape[0] != k.shape[1]:
        raise ValueError(f"incompatible shapes {a.shape} and {k.shape}")
    out = a @ k @ a.T
    return (out + out.T) / 2.0


# ---------------------------------------------------------------------------
# Scalar (1-d) building blocks for independent-marginal items.


class Scalar1D:
    """One-dimensional distribution summarized by mean and variance."""

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Scalar1D):
    """A known exact value."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("number value must be finite")

    def mean(self) -> float:
        return float(self.value)

    def variance(self) -> float:
        return 0.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.full(n, float(self.value))


@dataclass(frozen=True)
class Interval(Scalar1D):
    """Uniform distribution on [lo, hi]; lo == hi collapses to a point."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"interval bounds must satisfy lo <= hi, got [{self.lo}, {self.hi}]")

    def mean(self) -> float:
        return (self.lo + self.hi) / 2.0

    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.hi == self.lo:
            return np.full(n, self.lo)
        return rng.uniform(self.lo, self.hi, size=n)


@dataclass(frozen=True)
class Trapezoid(Scalar1D):
    """Trapezoidal distribution with support [a, d] and plateau [b, c].

    Density rises linearly on [a, b], is constant on [b, c], and falls
    linearly on [c, d].  Requires a <= b <= c <= d; a == d collapses to a
    point.  Moments come from piecewise polynomial integration:

        E[X]   = (d^2 + c d + c^2 - b^2 - a b - a^2) / (3 (d + c - b - a))
        E[X^2] = (d^3 + d^2 c + d c^2 + c^3
                  - b^3 - b^2 a - b a^2 - a^3) / (6 (d + c - b - a))
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("trapezoid parameters must be finite")
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(
                f"trapezoid parameters must satisfy a <= b <= c <= d, got {vals}"
            )

    def _span(self) -> float:
        return self.d + self.c - self.b - self.a

    def mean(self) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        s = self._span()
        if s == 0.0:
            return a
        return (d * d + c * d + c * c - b * b - a * b - a * a) / (3.0 * s)

    def variance(self) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        s = self._span()
        if s == 0.0:
            return 0.0
        second = (
            d**3 + d**2 * c + d * c**2 + c**3 - b**3 - b**2 * a - b * a**2 - a**3
        ) / (6.0 * s)
        m = self.mean()
        return max(second - m * m, 0.0)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        a, b, c, d = self.a, self.b, self.c, self.d
        s = self._span()
        if s == 0.0:
            return np.full(n, a)
        u = rng.uniform(0.0, 1.0, size=n)
        # Piecewise inverse CDF; the plateau branch is linear, the ramps are
        # square roots of the accumulated area.
        f_b = (b - a) / s
        f_c = f_b + 2.0 * (c - b) / s
        out = np.empty(n)
        rise = u < f_b
        flat = (~rise) & (u <= f_c)
        fall = ~(rise | flat)
        out[rise] = a + np.sqrt(u[rise] * s * (b - a))
        out[flat] = b + (u[flat] - f_b) * s / 2.0
        out[fall] = d - np.sqrt((1.0 - u[fall]) * s * (d - c))
        return out


@dataclass(frozen=True)
class Normal1D(Scalar1D):
    """Univariate normal with mean ``loc`` and standard deviation ``sd``."""

    loc: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.loc) and math.isfinite(self.sd)):
            raise ValueError("normal parameters must be finite")
        if self.sd < 0.0:
            raise ValueError(f"normal sd must be non-negative, got {self.sd}")

    def mean(self) -> float:
        return float(self.loc)

    def variance(self) -> float:
        return float(self.sd) ** 2

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.loc, self.sd, size=n)


# ---------------------------------------------------------------------------
# Multivariate distributions.


class Distribution:
    """A distribution over R^D exposing first and second moments."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def mean(self) -> np.ndarray:
        raise NotImplementedError

    def cov(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n samples, returned as an (n, D) array."""
        raise NotImplementedError

    def rescale(self, scale: np.ndarray, offset: np.ndarray) -> "Distribution":
        """Apply the per-axis map x -> scale * x + offset (scale > 0)."""
        raise NotImplementedError


def _check_rescale_args(scale, offset, dim: int) -> tuple[np.ndarray, np.ndarray]:
    s = _as_vector(scale, "scale")
    o = _as_vector(offset, "offset")
    if s.size != dim or o.size != dim:
        raise ValueError(f"scale/offset length must be {dim}")
    if np.any(s <= 0.0):
        raise ValueError("scale entries must be positive")
    return s, o


class Point(Distribution):
    """A point mass: zero covariance, exact location."""

    def __init__(self, x):
        self._x = _readonly(_as_vector(x, "point"))

    @property
    def dim(self) -> int:
        return self._x.size

    def mean(self) -> np.ndarray:
        return self._x

    def cov(self) -> np.ndarray:
        return np.zeros((self.dim, self.dim))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.tile(self._x, (n, 1))

    def rescale(self, scale, offset) -> "Point":
        s, o = _check_rescale_args(scale, offset, self.dim)
        return Point(s * self._x + o)

    def __repr__(self) -> str:
        return f"Point({self._x.tolist()})"


class Gaussian(Distribution):
    """Multivariate normal given by mean vector and covariance matrix."""

    def __init__(self, mean, cov):
        m = _as_vector(mean, "mean")
        k = cov_matrix(cov, "Gaussian covariance")
        if k.shape[0] != m.size:
            raise ValueError(
                f"covariance shape {k.shape} does not match mean length {m.size}"
            )
        self._mean = _readonly(m)
        self._cov = k
        self._factor: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self._mean.size

    def mean(self) -> np.ndarray:
        return self._mean

    def cov(self) -> np.ndarray:
        return self._cov

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self._factor is None:
            # Eigen factor handles rank-deficient covariances; tiny negative
            # eigenvalues from round-off are clamped to zero.
            evals, evecs = np.linalg.eigh(self._cov)
            self._factor = evecs * np.sqrt(np.clip(evals, 0.0, None))
        z = rng.standard_normal((n, self.dim))
        return self._mean + z @ self._factor.T

    def rescale(self, scale, offset) -> "Gaussian":
        s, o = _check_rescale_args(scale, offset, self.dim)
        return Gaussian(s * self._mean + o, self._cov * np.outer(s, s))

    def __repr__(self) -> str:
        return f"Gaussian(mean={self._mean.tolist()}, dim={self.dim})"


class ProductOf1D(Distribution):
    """Independent per-axis marginals; covariance is diagonal."""

    def __init__(self, cells):
        cells = tuple(cells)
        if not cells:
            raise ValueError("product distribution needs at least one cell")
        for i, cell in enumerate(cells):
            if not isinstance(cell, Scalar1D):
                raise ValueError(f"cell {i} is not a scalar distribution: {cell!r}")
        self.cells = cells

    @property
    def dim(self) -> int:
        return len(self.cells)

    def mean(self) -> np.ndarray:
        return np.array([c.mean() for c in self.cells])

    def cov(self) -> np.ndarray:
        return np.diag([c.variance() for c in self.cells])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.column_stack([c.sample(n, rng) for c in self.cells])

    def rescale(self, scale, offset) -> "ProductOf1D":
        s, o = _check_rescale_args(scale, offset, self.dim)
        out: list[Scalar1D] = []
        for cell, si, oi in zip(self.cells, s, o):
            if isinstance(cell, Number):
                out.append(Number(si * cell.value + oi))
            elif isinstance(cell, Interval):
                out.append(Interval(si * cell.lo + oi, si * cell.hi + oi))
            elif isinstance(cell, Trapezoid):
                out.append(
                    Trapezoid(
                        si * cell.a + oi, si * cell.b + oi,
                        si * cell.c + oi, si * cell.d + oi,
                    )
                )
            elif isinstance(cell, Normal1D):
                out.append(Normal1D(si * cell.loc + oi, si * cell.sd))
            else:  # pragma: no cover - sealed by the constructor check
                raise TypeError(f"cannot rescale cell {cell!r}")
        return ProductOf1D(out)

    def __repr__(self) -> str:
        return f"ProductOf1D({list(self.cells)!r})"


class EmpiricalCluster(Distribution):
    """A cluster of observed points treated as an empirical distribution.

    Moments are the sample mean and the population (1/n) covariance of the
    stored points; sampling resamples the points uniformly with replacement.
    """

    def __init__(self, points):
        p = np.asarray(points, dtype=float)
        if p.ndim != 2 or p.shape[0] == 0 or p.shape[1] == 0:
            raise ValueError(f"points must be a non-empty (n, D) array, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("points contain non-finite entries")
        self.points = _readonly(p.copy())

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def mean(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def cov(self) -> np.ndarray:
        centered = self.points - self.points.mean(axis=0)
        k = centered.T @ centered / self.points.shape[0]
        return (k + k.T) / 2.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.integers(0, self.points.shape[0], size=n)
        return self.points[idx]

    def rescale(self, scale, offset) -> "EmpiricalCluster":
        s, o = _check_rescale_args(scale, offset, self.dim)
        return EmpiricalCluster(self.points * s + o)

    def __repr__(self) -> str:
        return f"EmpiricalCluster(n={self.points.shape[0]}, dim={self.dim})"


# ---------------------------------------------------------------------------
# Dataset container.


@dataclass(frozen=True)
class UncertainDataset:
    """An ordered collection of distribution items over a shared R^D.

    Weights are non-negative with a positive total and default to ones;
    they enter all dataset-level expectations after normalization.  Labels
    are optional display names carried through aggregation and rendering.
    """

    items: tuple[Distribution, ...]
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]
    dim_names: tuple[str, ...] = field(default=None)  # type: ignore[assignment]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("empty dataset")
        d = items[0].dim
        for i, it in enumerate(items):
            if not isinstance(it, Distribution):
                raise ValueError(f"item {i} is not a Distribution: {it!r}")
            if it.dim != d:
                raise ValueError(f"item {i} has dimension {it.dim}, expected {d}")
        object.__setattr__(self, "items", items)

        w = self.weights
        w = np.ones(len(items)) if w is None else np.asarray(w, dtype=float)
        if w.shape != (len(items),):
            raise ValueError(f"weights must have shape ({len(items)},), got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("weights must be finite and non-negative")
        if w.sum() <= 0.0:
            raise ValueError("weights must have a positive total")
        object.__setattr__(self, "weights", _readonly(w))

        names = self.dim_names
        names = tuple(f"x{i + 1}" for i in range(d)) if names is None else tuple(names)
        if len(names) != d:
            raise ValueError(f"dim_names length {len(names)} does not match dimension {d}")
        object.__setattr__(self, "dim_names", names)

        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != len(items):
                raise ValueError("labels length does not match item count")
            object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.items[0].dim

    def __len__(self) -> int:
        return len(self.items)

    def means(self) -> np.ndarray:
        """Item means stacked into an (N, D) array."""
        return np.stack([it.mean() for it in self.items])

    def rescale(self, scale, offset) -> "UncertainDataset":
        return UncertainDataset(
            tuple(it.rescale(scale, offset) for it in self.items),
            weights=self.weights.copy(),
            dim_names=self.dim_names,
            labels=self.labels,
        )

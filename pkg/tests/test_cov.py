import math

import numpy as np
import pytest

from uapca.cov import CovOptions, dataset_mean, global_cov, global_cov_from_points
from uapca.model import Gaussian, Point, ProductOf1D, Interval, Trapezoid, UncertainDataset

from conftest import random_psd


def random_gaussian_dataset(rng, n_items, dim, weighted=False):
    items = tuple(
        Gaussian(rng.normal(0, 2, dim), random_psd(rng, dim)) for _ in range(n_items)
    )
    weights = rng.uniform(0.5, 3.0, n_items) if weighted else None
    return UncertainDataset(items, weights=weights)


def test_scale_zero_reduces_to_point_pca():
    rng = np.random.default_rng(0)
    ds = random_gaussian_dataset(rng, 12, 4)
    g0 = global_cov(ds, CovOptions(scale_s=0.0))
    gp = global_cov_from_points(ds.means())
    assert np.linalg.norm(g0.matrix - gp.matrix) <= 1e-12
    assert np.abs(g0.mean - gp.mean).max() <= 1e-12


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 2.0, 10.0])
def test_scaling_law(s):
    rng = np.random.default_rng(3)
    ds = random_gaussian_dataset(rng, 8, 5, weighted=True)
    g = global_cov(ds, CovOptions(scale_s=s))
    rebuilt = g.term_means + s * s * g.term_uncertainty
    scale = max(1.0, np.abs(g.matrix).max())
    assert np.abs(g.matrix - rebuilt).max() <= 1e-12 * scale


def test_infinity_limit_is_uncertainty_term():
    rng = np.random.default_rng(4)
    ds = random_gaussian_dataset(rng, 6, 3)
    g = global_cov(ds, CovOptions(scale_s=math.inf))
    assert np.array_equal(g.matrix, g.term_uncertainty)
    g1 = global_cov(ds, CovOptions(scale_s=1.0))
    assert np.allclose(g.term_means, g1.term_means, atol=1e-15)


def test_matrix_matches_paper_decomposition():
    # K = E_w[m m^T] + s^2 E_w[Psi] - mean mean^T, assembled independently.
    rng = np.random.default_rng(5)
    ds = random_gaussian_dataset(rng, 9, 4, weighted=True)
    s = 1.3
    w = ds.weights / ds.weights.sum()
    means = ds.means()
    e_mm = sum(wi * np.outer(m, m) for wi, m in zip(w, means))
    e_psi = sum(wi * item.cov() for wi, item in zip(w, ds.items))
    x_bar = (w[:, None] * means).sum(axis=0)
    expected = e_mm + s * s * e_psi - np.outer(x_bar, x_bar)
    g = global_cov(ds, CovOptions(scale_s=s))
    assert np.abs(g.matrix - expected).max() <= 1e-12
    assert np.abs(g.mean - x_bar).max() <= 1e-14


def test_weight_duplication_equivalence():
    # One item with weight 2 acts like the same item listed twice.
    rng = np.random.default_rng(6)
    a = Gaussian(rng.normal(0, 1, 3), random_psd(rng, 3))
    b = Gaussian(rng.normal(0, 1, 3), random_psd(rng, 3))
    doubled = UncertainDataset((a, b), weights=np.array([2.0, 1.0]))
    listed = UncertainDataset((a, a, b))
    gd = global_cov(doubled)
    gl = global_cov(listed)
    assert np.abs(gd.matrix - gl.matrix).max() <= 1e-12
    assert np.abs(gd.mean - gl.mean).max() <= 1e-14


def test_use_weights_false_ignores_weights():
    rng = np.random.default_rng(7)
    ds = random_gaussian_dataset(rng, 5, 3, weighted=True)
    unweighted = UncertainDataset(ds.items)
    g_off = global_cov(ds, CovOptions(use_weights=False))
    g_plain = global_cov(unweighted)
    assert np.array_equal(g_off.matrix, g_plain.matrix)


def test_dataset_mean_weighted():
    items = (Point([0.0, 0.0]), Point([4.0, 8.0]))
    ds = UncertainDataset(items, weights=np.array([3.0, 1.0]))
    assert np.allclose(dataset_mean(ds), [1.0, 2.0], atol=1e-15)


def test_mixed_items_uncertainty_term():
    # Product cells contribute their variances on the diagonal.
    items = (
        ProductOf1D([Interval(0.0, 2.0), Trapezoid(0.0, 1.0, 3.0, 4.0)]),
        Point([1.0, 1.0]),
    )
    ds = UncertainDataset(items)
    g = global_cov(ds)
    expected = (items[0].cov() + np.zeros((2, 2))) / 2.0
    assert np.allclose(g.term_uncertainty, expected, atol=1e-15)


def test_global_cov_matrix_is_symmetric_and_psd():
    rng = np.random.default_rng(8)
    for _ in range(20):
        ds = random_gaussian_dataset(rng, int(rng.integers(2, 10)), int(rng.integers(2, 7)),
                                     weighted=True)
        g = global_cov(ds, CovOptions(scale_s=float(rng.uniform(0, 3))))
        assert np.array_equal(g.matrix, g.matrix.T)
        evals = np.linalg.eigvalsh(g.matrix)
        assert evals.min() >= -1e-9 * max(evals.max(), 0.0)


def test_two_gaussian_crossing_matrix():
    psi = np.diag([0.0, 4.0])
    ds = UncertainDataset((Gaussian([-1.0, 0.0], psi), Gaussian([1.0, 0.0], psi)))
    for s in (0.0, 0.3, 0.5, 1.0):
        g = global_cov(ds, CovOptions(scale_s=s))
        assert np.allclose(g.matrix, np.diag([1.0, 4.0 * s * s]), atol=1e-15)


def test_from_points_iris_textbook_covariance(iris_path):
    from uapca.io import load_points

    pts = load_points(iris_path).points
    # Brute-force population covariance as the oracle.
    n, d = pts.shape
    mean = pts.sum(axis=0) / n
    oracle = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            oracle[i, j] = float(((pts[:, i] - mean[i]) * (pts[:, j] - mean[j])).sum() / n)
    g = global_cov_from_points(pts)
    assert np.abs(g.matrix - oracle).max() <= 1e-12
    assert np.array_equal(g.term_uncertainty, np.zeros((d, d)))


def test_cov_options_validation():
    with pytest.raises(ValueError):
        CovOptions(scale_s=-1.0)
    with pytest.raises(ValueError):
        CovOptions(scale_s=float("nan"))
    assert CovOptions(scale_s=math.inf).scale_s == math.inf


def test_from_points_validation():
    with pytest.raises(ValueError):
        global_cov_from_points(np.empty((0, 3)))
    with pytest.raises(ValueError):
        global_cov_from_points(np.array([[1.0, np.nan]]))

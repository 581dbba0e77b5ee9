import json

import numpy as np
import pytest

from uapca.io import (
    DatasetFormatError,
    LABEL_COLUMN,
    PointsData,
    aggregate_by_label,
    dataset_to_json,
    load_dataset,
    load_points,
    points_dataset,
    save_dataset,
    standardize_dataset,
    standardize_points,
    write_eigencurves_csv,
    write_projection_csv,
    write_traces_csv,
)
from uapca.cov import global_cov
from uapca.model import (
    EmpiricalCluster,
    Gaussian,
    Interval,
    Normal1D,
    Number,
    ProductOf1D,
    Trapezoid,
    UncertainDataset,
)
from uapca.sensitivity import SweepSchedule, factor_traces, sweep


def test_bundled_students_dataset_loads(students_path):
    ds = load_dataset(students_path)
    assert ds.dim == 4
    assert ds.dim_names == ("M1", "M2", "P1", "P2")
    assert len(ds) == 6
    assert ds.labels is not None and ds.labels[0] == "Tom"
    assert all(isinstance(it, ProductOf1D) for it in ds.items)
    tom = ds.items[0]
    assert isinstance(tom.cells[0], Number)
    assert isinstance(tom.cells[1], Interval)
    assert isinstance(tom.cells[2], Normal1D)
    assert isinstance(tom.cells[3], Trapezoid)


def test_save_load_roundtrip_preserves_moments(tmp_path, students_path):
    ds = load_dataset(students_path)
    out = tmp_path / "copy.json"
    save_dataset(ds, out)
    back = load_dataset(out)
    assert back.dim_names == ds.dim_names
    assert back.labels == ds.labels
    assert np.array_equal(back.weights, ds.weights)
    for a, b in zip(ds.items, back.items):
        assert np.array_equal(a.mean(), b.mean())
        assert np.array_equal(a.cov(), b.cov())


def test_cluster_items_serialize_as_gaussians(tmp_path):
    cluster = EmpiricalCluster([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]])
    ds = UncertainDataset(items=(cluster, Gaussian([0.0, 1.0], np.eye(2))))
    doc = dataset_to_json(ds)
    assert "mvn" in doc["items"][0]
    out = tmp_path / "clusters.json"
    save_dataset(ds, out)
    back = load_dataset(out)
    assert isinstance(back.items[0], Gaussian)
    assert np.abs(back.items[0].mean() - cluster.mean()).max() <= 1e-15
    assert np.abs(back.items[0].cov() - cluster.cov()).max() <= 1e-15


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_dataset_parse_errors_carry_context(tmp_path):
    cases = [
        ("not json {", "invalid JSON"),
        ('{"dims": [], "items": []}', "'dims'"),
        ('{"dims": ["a"], "items": {}}', "'items'"),
        ('{"dims": ["a"], "items": []}', "empty dataset"),
        ('{"dims": ["a"], "items": [{"values": [{"number": 1}], "mvn": {}}]}',
         "exactly one of 'values' or 'mvn'"),
        ('{"dims": ["a"], "items": [{}]}', "exactly one of 'values' or 'mvn'"),
        ('{"dims": ["a", "b"], "items": [{"values": [{"number": 1}]}]}',
         "must list 2 entries"),
        ('{"dims": ["a"], "items": [{"values": [{"wavelet": 1}]}]}',
         "item 0, value 0"),
        ('{"dims": ["a"], "items": [{"values": [{"interval": [2, 1]}]}]}',
         "lo <= hi"),
        ('{"dims": ["a"], "items": [{"values": [{"number": 1}], "weight": "x"}]}',
         "weight must be a number"),
        ('{"dims": ["a"], "items": [{"mvn": {"mean": [0, 0], "cov": [[1, 0], [0, 1]]}}]}',
         "does not match 'dims'"),
        ('{"dims": ["a"], "items": [{"values": [{"number": 1}], "weight": -1}]}',
         "weights"),
    ]
    for i, (text, fragment) in enumerate(cases):
        path = _write(tmp_path, f"bad{i}.json", text)
        with pytest.raises(DatasetFormatError) as err:
            load_dataset(path)
        assert fragment in str(err.value)


def test_missing_labels_get_positional_names(tmp_path):
    text = json.dumps(
        {
            "dims": ["a"],
            "items": [
                {"values": [{"number": 1}]},
                {"label": "named", "values": [{"number": 2}]},
            ],
        }
    )
    ds = load_dataset(_write(tmp_path, "mixed.json", text))
    assert ds.labels == ("item1", "named")

    text = json.dumps({"dims": ["a"], "items": [{"values": [{"number": 1}]}]})
    ds = load_dataset(_write(tmp_path, "bare.json", text))
    assert ds.labels is None


def test_load_points_with_and_without_labels(tmp_path):
    p = _write(tmp_path, "pts.csv", "x,y,label\n1,2,red\n3,4,blue\n5,6,red\n")
    pts = load_points(p)
    assert pts.dim_names == ("x", "y")
    assert pts.labels == ("red", "blue", "red")
    assert np.array_equal(pts.points, [[1, 2], [3, 4], [5, 6]])

    p = _write(tmp_path, "plain.csv", "x,y\n1,2\n3,4\n")
    pts = load_points(p)
    assert pts.labels is None
    assert pts.points.shape == (2, 2)


def test_load_points_errors(tmp_path):
    with pytest.raises(DatasetFormatError, match="header row"):
        load_points(_write(tmp_path, "empty.csv", "x,y\n"))
    with pytest.raises(DatasetFormatError, match="row 3"):
        load_points(_write(tmp_path, "ragged.csv", "x,y\n1,2\n1\n"))
    with pytest.raises(DatasetFormatError, match="could not parse"):
        load_points(_write(tmp_path, "text.csv", "x,y\n1,apple\n"))
    with pytest.raises(DatasetFormatError, match="non-finite"):
        load_points(_write(tmp_path, "inf.csv", "x,y\n1,inf\n"))
    with pytest.raises(DatasetFormatError, match="no numeric columns"):
        load_points(_write(tmp_path, "onlylabel.csv", "label\na\nb\n"))


def test_points_dataset_items_are_point_masses(tmp_path):
    p = _write(tmp_path, "pts.csv", "x,y,label\n1,2,red\n3,4,blue\n")
    ds = points_dataset(load_points(p))
    assert len(ds) == 2
    assert ds.labels == ("red", "blue")
    assert np.array_equal(ds.items[0].cov(), np.zeros((2, 2)))


def test_aggregate_gaussian_matches_class_moments(iris_path):
    pts = load_points(iris_path)
    ds = aggregate_by_label(pts, kind="gaussian")
    assert len(ds) == 3
    assert ds.labels == ("setosa", "versicolor", "virginica")
    assert np.array_equal(ds.weights, [50.0, 50.0, 50.0])
    rows = pts.points[np.array(pts.labels) == "setosa"]
    assert np.abs(ds.items[0].mean() - rows.mean(axis=0)).max() <= 1e-12
    expect = np.cov(rows.T, bias=True)
    assert np.abs(ds.items[0].cov() - expect).max() <= 1e-12


def test_aggregate_empirical_keeps_points(iris_path):
    pts = load_points(iris_path)
    ds = aggregate_by_label(pts, kind="empirical")
    assert all(isinstance(it, EmpiricalCluster) for it in ds.items)
    assert sum(it.points.shape[0] for it in ds.items) == 150
    # Moments agree with the gaussian aggregation exactly.
    gds = aggregate_by_label(pts, kind="gaussian")
    for e, g in zip(ds.items, gds.items):
        assert np.abs(e.mean() - g.mean()).max() <= 1e-12
        assert np.abs(e.cov() - g.cov()).max() <= 1e-12


def test_aggregate_errors(tmp_path):
    p = _write(tmp_path, "few.csv", "x,y,label\n1,2,a\n3,4,a\n5,6,b\n")
    pts = load_points(p)
    with pytest.raises(DatasetFormatError, match="fewer than 2"):
        aggregate_by_label(pts, kind="gaussian")
    # Empirical aggregation accepts singleton classes.
    ds = aggregate_by_label(pts, kind="empirical")
    assert np.array_equal(ds.weights, [2.0, 1.0])
    with pytest.raises(ValueError, match="kind"):
        aggregate_by_label(pts, kind="median")
    unlabeled = PointsData(points=pts.points, dim_names=pts.dim_names)
    with pytest.raises(DatasetFormatError, match="no label column"):
        aggregate_by_label(unlabeled)


def test_standardize_points():
    rng = np.random.default_rng(3)
    pts = rng.normal(2.0, 5.0, (40, 3))
    z = standardize_points(pts)
    assert np.abs(z.mean(axis=0)).max() <= 1e-12
    assert np.abs(z.std(axis=0) - 1.0).max() <= 1e-12
    with pytest.raises(DatasetFormatError, match="zero variance"):
        standardize_points(np.array([[1.0, 2.0], [1.0, 3.0]]))


def test_standardize_dataset_gives_unit_axis_variances(students_path):
    ds = standardize_dataset(load_dataset(students_path))
    g = global_cov(ds)
    assert np.abs(np.diag(g.matrix) - 1.0).max() <= 1e-12
    assert np.abs(g.mean).max() <= 1e-12


def test_standardize_dataset_rejects_flat_axis():
    ds = UncertainDataset(
        items=(ProductOf1D([Number(1.0), Number(0.0)]),
               ProductOf1D([Number(1.0), Number(2.0)]))
    )
    with pytest.raises(DatasetFormatError, match="zero variance"):
        standardize_dataset(ds)


def test_traces_csv_layout(tmp_path, students_path):
    ds = load_dataset(students_path)
    sched = SweepSchedule(steps=4)
    models, curves = sweep(ds, q=2, schedule=sched)
    traces = factor_traces(models, sched)
    path = tmp_path / "t.csv"
    write_traces_csv(path, traces, sched, ds.dim_names)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "step,s,axis,orientation,x,y"
    assert len(lines) == 1 + 4 * 4 * 2  # dims * steps * orientations
    plus = lines[1].split(",")
    minus = lines[2].split(",")
    assert plus[:4] == ["0", "0.0", "M1", "+"]
    assert minus[:4] == ["0", "0.0", "M1", "-"]
    assert float(plus[4]) == -float(minus[4])
    # The limit step serializes as inf.
    assert any(row.split(",")[1] == "inf" for row in lines[1:])

    epath = tmp_path / "e.csv"
    write_eigencurves_csv(epath, curves)
    elines = epath.read_text(encoding="utf-8").splitlines()
    assert elines[0] == "step,s,index,lambda"
    assert len(elines) == 1 + 4 * 4  # steps * dims


def test_traces_csv_requires_two_components(tmp_path, students_path):
    ds = load_dataset(students_path)
    sched = SweepSchedule(steps=3)
    models, _ = sweep(ds, q=3, schedule=sched)
    traces = factor_traces(models, sched)
    with pytest.raises(ValueError, match="q = 2"):
        write_traces_csv(tmp_path / "t.csv", traces, sched, ds.dim_names)


def test_projection_csv_layout(tmp_path):
    projected = [
        Gaussian([1.0, 2.0], np.array([[1.0, 0.25], [0.25, 2.0]])),
        Gaussian([0.0, 0.0], np.zeros((2, 2))),
    ]
    path = tmp_path / "p.csv"
    write_projection_csv(path, ["a", "b"], projected)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "label,mean_1,mean_2,cov_1_1,cov_1_2,cov_2_1,cov_2_2"
    assert lines[1] == "a,1.0,2.0,1.0,0.25,0.25,2.0"
    assert lines[2] == "b,0.0,0.0,0.0,0.0,0.0,0.0"
    with pytest.raises(ValueError, match="nothing to write"):
        write_projection_csv(tmp_path / "n.csv", [], [])


def test_csv_numbers_fold_negative_zero(tmp_path):
    g = Gaussian([0.0, -0.0], np.zeros((2, 2)))
    path = tmp_path / "z.csv"
    write_projection_csv(path, ["z"], [g])
    text = path.read_text(encoding="utf-8")
    assert "-0.0" not in text


def test_label_column_name():
    assert LABEL_COLUMN == "label"

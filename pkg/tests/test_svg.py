import numpy as np
import pytest

from uapca.io import load_dataset
from uapca.model import Gaussian, Point, UncertainDataset
from uapca.sensitivity import EigenCurves, SweepSchedule, factor_traces, sweep
from uapca.svg import PALETTE, SIZE, render_eigencurves_svg, render_projection_svg, render_traces_svg


def _students_traces(students_path, steps=8):
    ds = load_dataset(students_path)
    sched = SweepSchedule(steps=steps)
    models, curves = sweep(ds, q=2, schedule=sched)
    return factor_traces(models, sched), curves, ds.dim_names


def test_traces_svg_is_deterministic(students_path):
    traces, _, names = _students_traces(students_path)
    a = render_traces_svg(traces, names)
    b = render_traces_svg(traces, names)
    assert a == b
    assert a.startswith('<?xml version="1.0"')
    assert f'viewBox="0 0 {SIZE} {SIZE}"' in a
    assert a.endswith("</svg>\n")


def test_traces_svg_draws_both_orientations(students_path):
    traces, _, names = _students_traces(students_path)
    doc = render_traces_svg(traces, names)
    polylines = doc.count("<polyline")
    # One solid and one dashed polyline per moving axis.
    assert polylines == 2 * len(traces)
    assert doc.count('stroke-dasharray="5 4"') == len(traces)
    for name in names:
        assert f">{name}</text>" in doc
    # Unit circle guide.
    assert f'r="320.000"' in doc


def test_traces_svg_shades_the_interpolation_fan(students_path):
    traces, _, names = _students_traces(students_path)
    doc = render_traces_svg(traces, names)
    assert doc.count('fill-opacity="0.150"') == 2 * len(traces)


def test_static_trace_collapses_to_dot():
    pts = [np.array(p) for p in ([2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0])]
    ds = UncertainDataset(items=tuple(Point(p) for p in pts))
    sched = SweepSchedule(steps=8)
    models, _ = sweep(ds, q=2, schedule=sched)
    traces = factor_traces(models, sched)
    doc = render_traces_svg(traces, ds.dim_names)
    assert "<polyline" not in doc
    assert doc.count('r="4.000"') == 2 * len(traces)  # one dot per orientation


def test_traces_svg_validation(students_path):
    with pytest.raises(ValueError, match="no traces"):
        render_traces_svg([], ())
    ds = load_dataset(students_path)
    sched = SweepSchedule(steps=4)
    models, _ = sweep(ds, q=3, schedule=sched)
    traces = factor_traces(models, sched)
    with pytest.raises(ValueError, match="q = 2"):
        render_traces_svg(traces, ds.dim_names)


def test_eigencurves_svg_layout(students_path):
    _, curves, _ = _students_traces(students_path, steps=12)
    doc = render_eigencurves_svg(curves)
    assert doc == render_eigencurves_svg(curves)
    assert doc.count("<polyline") == curves.values.shape[1]
    for tick in ("s=0", "s=1", "s=inf"):
        assert f">{tick}</text>" in doc
    assert "share of total variance" in doc


def test_eigencurves_svg_marks_flags():
    lam = np.array([[4.0, 1.0], [2.0, 1.9], [4.0, 1.0], [5.0, 1.0]])
    curves = EigenCurves(
        s_values=np.array([0.0, 0.5, 1.0, np.inf]),
        values=lam,
        avoided_crossing_flags=[(1, 0)],
    )
    doc = render_eigencurves_svg(curves)
    assert doc.count('stroke-dasharray="4 4"') == 1
    no_flags = render_eigencurves_svg(
        EigenCurves(s_values=curves.s_values, values=lam)
    )
    assert 'stroke-dasharray="4 4"' not in no_flags


def test_eigencurves_svg_handles_zero_total_step():
    lam = np.array([[1.0, 0.5], [0.0, 0.0], [2.0, 1.0]])
    curves = EigenCurves(s_values=np.array([0.0, 1.0, np.inf]), values=lam)
    doc = render_eigencurves_svg(curves)
    assert "nan" not in doc


def test_projection_svg_layout():
    entries = [
        (Gaussian([0.0, 0.0], np.eye(2)), "a"),
        (Gaussian([3.0, 1.0], np.diag([2.0, 0.5])), "b"),
        (Gaussian([1.0, 4.0], np.eye(2) * 0.2), "a"),
    ]
    doc = render_projection_svg(entries)
    assert doc == render_projection_svg(entries)
    # 1 and 2 sigma outlines per item.
    assert doc.count("<polyline") == 2 * len(entries)
    assert doc.count('stroke-opacity="0.450"') == len(entries)
    # Item dots plus one legend dot per distinct label.
    assert doc.count("<circle") == len(entries) + 2
    assert ">a</text>" in doc and ">b</text>" in doc
    # Shared label means shared color, assigned in first-appearance order.
    assert doc.count(PALETTE[0]) > doc.count(PALETTE[1])


def test_projection_svg_zero_covariance_is_a_dot():
    entries = [
        (Gaussian([0.0, 0.0], np.zeros((2, 2))), "p"),
        (Gaussian([1.0, 1.0], np.eye(2)), "q"),
    ]
    doc = render_projection_svg(entries)
    assert doc.count("<polyline") == 2  # only the nonzero item gets outlines


def test_projection_svg_validation():
    with pytest.raises(ValueError, match="nothing to render"):
        render_projection_svg([])
    with pytest.raises(ValueError, match="q = 2"):
        render_projection_svg([(Gaussian(np.zeros(3), np.eye(3)), "x")])


def test_negative_zero_never_appears(students_path):
    traces, curves, names = _students_traces(students_path)
    for doc in (render_traces_svg(traces, names), render_eigencurves_svg(curves)):
        assert "-0.000" not in doc

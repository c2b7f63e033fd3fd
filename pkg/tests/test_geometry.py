import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polybundle.geometry import (
    Bundle,
    BundleError,
    Metric,
    frechet_distance,
    frechet_ok,
    hausdorff_distance,
    hausdorff_ok,
    point_segment_distance,
    segment_chords,
    shortcut_ok,
)
from oracles import frechet_decide, seg_dist

SEG = ((0.0, 0.0), (10.0, 0.0))
BACKTRACK = [(0, 0), (6, 0.1), (4, -0.1), (10, 0)]


@pytest.mark.parametrize("p, expected", [((5, 3), 3.0), ((-3, 4), 5.0), ((5, 0), 0.0)])
def test_point_segment_distance(p, expected):
    assert point_segment_distance(p, *SEG) == pytest.approx(expected)


def test_degenerate_segment_distance():
    assert point_segment_distance((3, 4), (0, 0), (0, 0)) == pytest.approx(5.0)


def test_hausdorff_examples():
    assert hausdorff_ok(SEG, [(0, 0), (5, 3), (10, 0)], 3.0)
    assert not hausdorff_ok(SEG, [(0, 0), (5, 3), (10, 0)], 2.9)
    assert hausdorff_ok(SEG, BACKTRACK, 0.2)


def test_frechet_examples():
    assert frechet_ok(SEG, [(0, 0), (5, 3), (10, 0)], 3.0)
    assert frechet_decide(list(SEG), [(0, 0), (5, 3), (10, 0)], 3.0)
    # the chords around x=6 and x=4 can only be visited backwards
    assert not frechet_ok(SEG, BACKTRACK, 0.2)
    assert not frechet_decide(list(SEG), BACKTRACK, 0.2)
    assert frechet_ok(SEG, list(SEG), 0.0)


def test_backtracking_chords():
    lo, hi, ok = segment_chords(SEG[0], SEG[1], np.array(BACKTRACK[1:3], dtype=float), 0.2)
    assert ok.all()
    assert lo * 10 == pytest.approx([6 - math.sqrt(0.03), 4 - math.sqrt(0.03)])
    assert hi * 10 == pytest.approx([6 + math.sqrt(0.03), 4 + math.sqrt(0.03)])


def test_malformed_query():
    with pytest.raises(ValueError, match="malformed"):
        frechet_ok(SEG, [(1, 0), (10, 0)], 1.0)
    with pytest.raises(ValueError):
        hausdorff_ok(SEG, [(0, 0)], 1.0)


def test_metric_parse():
    assert Metric.parse("Frechet") is Metric.FRECHET
    assert Metric.parse(Metric.HAUSDORFF) is Metric.HAUSDORFF
    with pytest.raises(ValueError):
        Metric.parse("manhattan")


def test_bundle_validation():
    with pytest.raises(BundleError, match="not simple"):
        Bundle([(0, 0), (1, 0)], [[0, 1, 0]])
    with pytest.raises(BundleError, match="out of range"):
        Bundle([(0, 0), (1, 0)], [[0, 2]])
    with pytest.raises(BundleError, match="fewer than 2"):
        Bundle([(0, 0)], [[0]])
    with pytest.raises(BundleError, match="finite"):
        Bundle([(0, math.nan), (1, 0)], [[0, 1]])


def test_bundle_immutable_and_picklable():
    b = Bundle([(0, 0), (1, 0), (2, 1)], [[0, 1, 2], [2, 1]])
    with pytest.raises(AttributeError):
        b.lines = ()
    with pytest.raises(ValueError):
        b.coords[0, 0] = 5
    assert pickle.loads(pickle.dumps(b)) == b
    assert b.endpoints() == {0, 1, 2}
    assert b.line_degree() == [1, 2, 2]


coord = st.floats(-5, 5, allow_nan=False, width=32)
pt = st.tuples(coord, coord)


@st.composite
def queries(draw):
    inner = draw(st.lists(pt, min_size=0, max_size=6))
    a, b = draw(pt), draw(pt)
    delta = draw(st.floats(0.01, 4))
    return (a, b), [a] + inner + [b], delta


@settings(max_examples=400, deadline=None)
@given(queries())
def test_frechet_implies_hausdorff(q):
    seg, sub, delta = q
    if frechet_ok(seg, sub, delta):
        assert hausdorff_ok(seg, sub, delta)


@settings(max_examples=400, deadline=None)
@given(queries())
def test_frechet_matches_free_space(q):
    seg, sub, delta = q
    ours = frechet_ok(seg, sub, delta)
    # decisions may differ only on a knife edge
    if ours:
        assert frechet_decide(list(seg), sub, delta * (1 + 1e-9) + 1e-12)
    else:
        assert not frechet_decide(list(seg), sub, delta * (1 - 1e-9))


@settings(max_examples=300, deadline=None)
@given(queries())
def test_hausdorff_matches_vertex_distances(q):
    seg, sub, delta = q
    worst = max(seg_dist(x, *seg) for x in sub)
    assert hausdorff_distance(seg, sub) == pytest.approx(worst, abs=1e-12)
    if worst < delta * (1 - 1e-9):
        assert hausdorff_ok(seg, sub, delta)
    if worst > delta * (1 + 1e-9):
        assert not hausdorff_ok(seg, sub, delta)


@settings(max_examples=200, deadline=None)
@given(queries(), st.floats(1.0, 3.0))
def test_decisions_monotone_in_delta(q, factor):
    seg, sub, delta = q
    for metric in Metric:
        if shortcut_ok(seg, sub, delta, metric):
            assert shortcut_ok(seg, sub, delta * factor, metric)


@settings(max_examples=150, deadline=None)
@given(queries())
def test_frechet_distance_is_decision_threshold(q):
    seg, sub, _ = q
    d = frechet_distance(seg, sub)
    assert d >= hausdorff_distance(seg, sub) - 1e-12
    assert frechet_decide(list(seg), sub, d * (1 + 1e-7) + 1e-12)
    if d > 1e-9:
        assert not frechet_decide(list(seg), sub, d * (1 - 1e-7))


def test_frechet_distance_backtracking_value():
    # going back from x=6 to x=4 forces a leash of half the gap
    assert frechet_distance(SEG, BACKTRACK) == pytest.approx(math.hypot(1.0, 0.1), rel=1e-8)

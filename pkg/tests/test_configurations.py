import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import equilib as eq

TAU = 2.0 * math.pi


def line(window, left=None, right=None, c=None, C=None):
    window = tuple(float(p) for p in window)
    g = np.diff(window)
    lo = min(g) if len(g) else 1.0
    hi = max(g) if len(g) else 1.0
    return eq.LineConfig(
        window=window,
        left_tail=left or eq.TailModel.none(),
        right_tail=right or eq.TailModel.none(),
        c=c if c is not None else min(lo, 1.0),
        C=C if C is not None else max(hi, 1.0),
    )


def test_line_gaps_are_differences():
    assert eq.gaps(line([0, 1, 2])) == (1.0, 1.0)


def test_circle_gaps_equal_spacing():
    cfg = eq.CircleConfig(angles=(0.0, math.pi / 2, math.pi, 3 * math.pi / 2))
    assert eq.gaps(cfg) == pytest.approx((math.pi / 2,) * 4)


def test_circle_gaps_include_wrap_arc():
    cfg = eq.CircleConfig(angles=(0.0, 1.0, 4.0))
    assert eq.gaps(cfg) == pytest.approx((1.0, 3.0, TAU - 4.0))


def test_extremal_gaps_unique_max():
    ex = eq.extremal_gaps(line([0, 1, 3, 4]))
    assert ex.max_value == 2.0
    assert ex.max_indices == (1,)
    assert ex.max_strict
    assert ex.min_value == 1.0
    # Strictness is local: each shortest gap sits next to a longer one.
    assert ex.min_indices == (0, 2)
    assert ex.min_strict


def test_extremal_gaps_trivial_all_tied():
    ex = eq.extremal_gaps(line([0, 1, 2, 3]))
    assert ex.max_value == ex.min_value == 1.0
    assert not ex.max_strict
    assert not ex.min_strict


def test_extremal_gaps_circle_wrap_arc_wins():
    ex = eq.extremal_gaps(eq.CircleConfig(angles=(0.0, 1.0, 2.0, 4.0)))
    assert ex.max_value == pytest.approx(TAU - 4.0)
    assert ex.max_indices == (3,)
    assert ex.max_strict


def test_extremal_gaps_see_tail_gaps():
    # A tail gap larger than anything in the window must be reported.
    cfg = line([0, 1, 2], right=eq.TailModel.arithmetic(first=5.0, gap=3.0), C=3.0)
    ex = eq.extremal_gaps(cfg)
    assert ex.max_value == 3.0
    assert ex.max_in_tail


def test_canonicalize_antipodal_pair():
    cfg = eq.canonicalize_circle(eq.CircleConfig(angles=(0.3, 0.3 + math.pi)))
    assert cfg.angles == pytest.approx((0.0, math.pi))


def test_canonicalize_rotation():
    cfg = eq.canonicalize_circle(eq.CircleConfig(angles=(1.0, 2.0, 3.0)))
    assert cfg.angles == pytest.approx((0.0, 1.0, 2.0))


def test_canonicalize_idempotent():
    cfg = eq.canonicalize_circle(eq.CircleConfig(angles=(0.5, 1.7, 4.0)))
    again = eq.canonicalize_circle(cfg)
    assert again.angles == pytest.approx(cfg.angles, abs=1e-15)


def test_line_window_must_increase():
    with pytest.raises(eq.InvalidInput):
        line([0.0, 2.0, 1.0])


def test_line_gap_bounds_enforced():
    with pytest.raises(eq.InvalidInput):
        eq.LineConfig(
            window=(0.0, 1.0, 3.0),
            left_tail=eq.TailModel.none(),
            right_tail=eq.TailModel.none(),
            c=1.0,
            C=1.5,
        )


def test_tail_positions_march_outward():
    left = eq.TailModel.arithmetic(first=-1.0, gap=1.0)
    assert left.positions("left", 4) == pytest.approx([-1.0, -2.0, -3.0, -4.0])
    right = eq.TailModel.arithmetic(first=5.0, gap=2.0)
    assert right.positions("right", 4) == pytest.approx([5.0, 7.0, 9.0, 11.0])


def test_periodic_tail_pattern_repeats():
    tail = eq.TailModel.periodic(anchor=-1.0, pattern=(1.0, 2.0))
    assert tail.positions("left", 5) == pytest.approx([-1.0, -2.0, -4.0, -5.0, -7.0])
    assert tail.gap_values() == (1.0, 2.0)


def test_tail_json_round_trip():
    for tail in (
        eq.TailModel.none(),
        eq.TailModel.arithmetic(first=3.0, gap=0.5),
        eq.TailModel.periodic(anchor=-2.0, pattern=(1.0, 0.25, 0.5)),
    ):
        again = eq.TailModel.from_json_dict(tail.to_json_dict())
        assert again == tail


def test_config_json_round_trip():
    cfg = line(
        [0, 1, 3],
        left=eq.TailModel.arithmetic(first=-1.0, gap=1.0),
        right=eq.TailModel.periodic(anchor=4.0, pattern=(1.0, 2.0)),
        c=1.0,
        C=2.0,
    )
    again = eq.config_from_json(eq.config_to_json(cfg))
    assert isinstance(again, eq.LineConfig)
    assert again == cfg

    circ = eq.CircleConfig(angles=(0.0, 1.0, 4.0))
    again = eq.config_from_json(eq.config_to_json(circ))
    assert isinstance(again, eq.CircleConfig)
    assert again.angles == pytest.approx(circ.angles)


def test_config_csv_lists_positions_and_gaps():
    text = eq.config_to_csv(line([0, 1, 3]))
    rows = text.strip().splitlines()
    assert rows[0].startswith("index,position")
    assert len(rows) == 4


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.floats(0.05, 2.0, allow_nan=False), min_size=2, max_size=9),
    st.floats(0.0, TAU, allow_nan=False),
)
def test_circle_gaps_sum_to_full_turn(arcs, rot):
    angles = np.cumsum([0.0] + arcs[:-1])
    total = angles[-1] + arcs[-1]
    angles = (angles / total * TAU + rot) % TAU
    cfg = eq.CircleConfig(angles=tuple(sorted(angles)))
    assert math.fsum(eq.gaps(cfg)) == pytest.approx(TAU, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.05, 2.0, allow_nan=False), min_size=2, max_size=9))
def test_canonicalize_preserves_gap_multiset(arcs):
    angles = np.cumsum([0.0] + arcs[:-1])
    total = angles[-1] + arcs[-1]
    cfg = eq.CircleConfig(angles=tuple(angles / total * TAU))
    canon = eq.canonicalize_circle(cfg)
    assert canon.angles[0] == pytest.approx(0.0, abs=1e-12)
    assert sorted(eq.gaps(canon)) == pytest.approx(sorted(eq.gaps(cfg)), abs=1e-9)

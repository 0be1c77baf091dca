import math

import numpy as np
import pytest

import equilib as eq

COULOMB = eq.InversePowerLaw(2)
TAU = 2.0 * math.pi


def finite_line(window):
    window = tuple(float(p) for p in window)
    g = np.diff(window)
    return eq.LineConfig(
        window=window,
        left_tail=eq.TailModel.none(),
        right_tail=eq.TailModel.none(),
        c=float(min(g)) if len(g) else 1.0,
        C=float(max(g)) if len(g) else 1.0,
    )


def trivial_line(n=9, gap=1.0):
    window = tuple(i * gap for i in range(n))
    return eq.LineConfig(
        window=window,
        left_tail=eq.TailModel.arithmetic(first=-gap, gap=gap),
        right_tail=eq.TailModel.arithmetic(first=window[-1] + gap, gap=gap),
        c=gap,
        C=gap,
    )


def widest_gap_line():
    # Unique widest gap [0, 3] inside a periodic surround; every other gap is
    # 1 or 2 on both sides out to infinity.
    return eq.LineConfig(
        window=(-2.0, -1.0, 0.0, 3.0, 5.0, 6.0),
        left_tail=eq.TailModel.periodic(anchor=-3.0, pattern=(1.0, 2.0)),
        right_tail=eq.TailModel.periodic(anchor=7.0, pattern=(1.0, 2.0)),
        c=1.0,
        C=3.0,
    )


def test_widest_gap_yields_pass():
    cert = eq.certify_extremal_gap(widest_gap_line(), COULOMB, 2)
    assert cert.kind == "extremal_gap_line"
    assert cert.verdict == "pass"
    assert cert.details["variant"] == "max"
    assert cert.details["gap_index"] == 2
    assert all(row.satisfied for row in cert.evidence)
    assert any(row.relation == "<" for row in cert.evidence)


def test_widest_gap_pass_agrees_with_side_sums():
    # The chain's conclusion restated directly: the right endpoint of the
    # widest gap feels strictly less from the left than the left endpoint.
    cfg = widest_gap_line()
    f_minus_x = eq.side_forces(cfg, 2, COULOMB)[0]
    f_minus_y = eq.side_forces(cfg, 3, COULOMB)[0]
    assert f_minus_y < f_minus_x


def test_narrowest_gap_yields_pass():
    cfg = eq.LineConfig(
        window=(-2.0, -1.0, 0.0, 0.4, 1.4, 2.4),
        left_tail=eq.TailModel.arithmetic(first=-3.0, gap=1.0),
        right_tail=eq.TailModel.arithmetic(first=3.4, gap=1.0),
        c=0.4,
        C=1.0,
    )
    cert = eq.certify_extremal_gap(cfg, COULOMB, 2)
    assert cert.verdict == "pass"
    assert cert.details["variant"] == "min"


def test_trivial_configuration_is_inapplicable():
    with pytest.raises(eq.Inapplicable):
        eq.certify_extremal_gap(trivial_line(), COULOMB, 3)


def test_non_extremal_index_is_inapplicable():
    with pytest.raises(eq.Inapplicable):
        eq.certify_extremal_gap(widest_gap_line(), COULOMB, 0)


def test_missing_tail_is_inapplicable():
    cfg = eq.LineConfig(
        window=(-2.0, -1.0, 0.0, 3.0, 5.0, 6.0),
        left_tail=eq.TailModel.periodic(anchor=-3.0, pattern=(1.0, 2.0)),
        right_tail=eq.TailModel.none(),
        c=1.0,
        C=3.0,
    )
    with pytest.raises(eq.Inapplicable):
        eq.certify_extremal_gap(cfg, COULOMB, 2)


def test_circle_wrap_arc_yields_pass():
    cfg = eq.CircleConfig(angles=(0.0, 1.0, 2.0, 4.0))
    cert = eq.certify_extremal_gap(cfg, COULOMB, 3)
    assert cert.kind == "extremal_gap_circle"
    assert cert.verdict == "pass"
    assert cert.details["variant"] == "max"
    assert all(row.satisfied for row in cert.evidence)
    # Cross-check: this circle really is out of equilibrium.
    report = eq.circle_residual_report(cfg, COULOMB)
    assert report.max_abs_net > report.max_error_bound


def test_circle_narrowest_arc_yields_pass():
    cfg = eq.CircleConfig(angles=(0.0, 1.0, 2.0, 2.5))
    cert = eq.certify_extremal_gap(cfg, COULOMB, 2)
    assert cert.verdict == "pass"
    assert cert.details["variant"] == "min"


def test_circle_equal_spacing_is_inapplicable():
    cfg = eq.CircleConfig(angles=(0.0, math.pi / 2, math.pi, 3 * math.pi / 2))
    with pytest.raises(eq.Inapplicable):
        eq.certify_extremal_gap(cfg, COULOMB, 0)


def test_certificate_round_trips_to_json():
    cert = eq.certify_extremal_gap(widest_gap_line(), COULOMB, 2)
    data = cert.to_json_dict()
    assert data["verdict"] == "pass"
    assert data["kind"] == "extremal_gap_line"
    assert len(data["evidence"]) == len(cert.evidence)
    assert {"chain", "lhs", "rhs", "relation", "satisfied"} <= set(data["evidence"][0])


def build_planted_line(rng, variant):
    pattern = tuple(float(g) for g in rng.uniform(0.5, 1.5, size=int(rng.integers(1, 4))))
    reps = int(rng.integers(2, 4))
    side = list(pattern) * reps
    if variant == "max":
        planted = max(pattern) * float(rng.uniform(1.3, 2.5))
    else:
        planted = min(pattern) * float(rng.uniform(0.3, 0.7))
    all_gaps = side + [planted] + side
    window = tuple(np.concatenate([[0.0], np.cumsum(all_gaps)]))
    values = list(pattern) + [planted]
    cfg = eq.LineConfig(
        window=window,
        left_tail=eq.TailModel.periodic(anchor=window[0] - pattern[0], pattern=pattern),
        right_tail=eq.TailModel.periodic(anchor=window[-1] + pattern[0], pattern=pattern),
        c=min(values),
        C=max(values),
    )
    return cfg, len(side)


def build_planted_circle(rng, variant):
    n = int(rng.integers(3, 9))
    arcs = rng.uniform(0.5, 1.5, size=n)
    j = int(rng.integers(0, n))
    if variant == "max":
        arcs[j] = arcs.max() * float(rng.uniform(1.4, 2.0))
    else:
        arcs[j] = arcs.min() * float(rng.uniform(0.3, 0.7))
    arcs *= TAU / arcs.sum()
    angles = tuple(np.concatenate([[0.0], np.cumsum(arcs[:-1])]))
    return eq.CircleConfig(angles=angles), j


def test_planted_extremal_gaps_always_certify():
    """Configurations built around a strictly extremal gap must never come
    back inconclusive: the chain argument applies whenever its hypotheses
    hold, and a pass always coincides with a measurable imbalance."""
    rng = np.random.default_rng(20260814)
    for trial in range(30):
        variant = "max" if trial % 2 == 0 else "min"
        cfg, gap_index = build_planted_line(rng, variant)
        cert = eq.certify_extremal_gap(cfg, COULOMB, gap_index)
        assert cert.verdict == "pass", (trial, cert.conclusion)
        assert all(row.satisfied for row in cert.evidence)
        report = eq.residual_report(cfg, COULOMB)
        assert report.max_abs_net > report.max_error_bound

        circle, arc_index = build_planted_circle(rng, variant)
        cert = eq.certify_extremal_gap(circle, COULOMB, arc_index)
        assert cert.verdict == "pass", (trial, cert.conclusion)
        report = eq.circle_residual_report(circle, COULOMB)
        assert report.max_abs_net > report.max_error_bound


def test_monotone_internal_forces_even_triple():
    cert = eq.check_internal_force_monotonicity(finite_line([0, 1, 2]), COULOMB, (0, 3))
    assert cert.kind == "monotone_internal_forces"
    assert cert.verdict == "pass"
    assert cert.details["forces"] == pytest.approx([-1.25, 0.0, 1.25])
    assert cert.details["first_violation"] is None


def test_monotone_internal_forces_distant_third():
    # Oracle by direct summation: (-(1 + 1/100), 1 - 1/81, 1/100 + 1/81).
    cert = eq.check_internal_force_monotonicity(finite_line([0, 1, 10]), COULOMB, (0, 3))
    assert cert.verdict == "fail"
    assert cert.details["forces"] == pytest.approx(
        [-(1.0 + 0.01), 1.0 - 1.0 / 81.0, 0.01 + 1.0 / 81.0]
    )
    assert cert.details["first_violation"] == [1, 2]


def test_monotone_internal_forces_pair_passes():
    cert = eq.check_internal_force_monotonicity(finite_line([0, 1]), COULOMB, (0, 2))
    assert cert.verdict == "pass"


def test_monotone_window_forms_agree():
    cfg = finite_line([0, 1, 10])
    by_range = eq.check_internal_force_monotonicity(cfg, COULOMB, (0, 3))
    by_list = eq.check_internal_force_monotonicity(cfg, COULOMB, [0, 1, 2])
    assert by_range.verdict == by_list.verdict == "fail"
    sub = eq.check_internal_force_monotonicity(cfg, COULOMB, (1, 3))
    assert sub.verdict == "pass"


def test_monotone_window_must_be_consecutive():
    with pytest.raises(eq.InvalidInput):
        eq.check_internal_force_monotonicity(finite_line([0, 1, 10]), COULOMB, [0, 2])


def test_gap_ratio_values():
    assert eq.gap_ratio_report(trivial_line()).details["max_ratio"] == 1.0
    assert eq.gap_ratio_report(finite_line([0, 1, 3])).details["max_ratio"] == 2.0
    cert = eq.gap_ratio_report(finite_line([0, 2, 3, 9]))
    assert cert.kind == "gap_ratio"
    assert cert.verdict == "pass"
    assert cert.details["max_ratio"] == 6.0
    assert sorted(cert.details["pair"]) == [1, 2]


def test_gap_ratio_circle_uses_cyclic_pairs():
    cert = eq.gap_ratio_report(eq.CircleConfig(angles=(0.0, 1.0, 2.0, 4.0)))
    # The wrap arc sits next to an arc of length 1.
    assert cert.details["max_ratio"] == pytest.approx(TAU - 4.0)


def test_gap_ratio_needs_three_particles():
    with pytest.raises(eq.InvalidInput):
        eq.gap_ratio_report(finite_line([0, 1]))


def test_detect_periodic_tail_trivial():
    found = eq.detect_periodic_tail(trivial_line(14))
    assert found is not None
    assert found.period == 1
    assert found.pattern == pytest.approx((1.0,))


def test_detect_periodic_tail_alternating():
    gaps = [1.0, 2.0] * 7
    window = tuple(np.concatenate([[0.0], np.cumsum(gaps)]))
    cfg = eq.LineConfig(
        window=window,
        left_tail=eq.TailModel.none(),
        right_tail=eq.TailModel.none(),
        c=1.0,
        C=2.0,
    )
    found = eq.detect_periodic_tail(cfg, side="right")
    assert found is not None
    assert found.period == 2
    assert sorted(found.pattern) == pytest.approx([1.0, 2.0])
    data = found.to_json_dict()
    assert data["kind"] == "periodic_tail"
    assert data["period"] == 2


def test_detect_periodic_tail_aperiodic_is_none():
    gaps = [1.0 + 0.1 / (k + 1) for k in range(14)]
    window = tuple(np.concatenate([[0.0], np.cumsum(gaps)]))
    cfg = eq.LineConfig(
        window=window,
        left_tail=eq.TailModel.none(),
        right_tail=eq.TailModel.none(),
        c=1.0,
        C=1.2,
    )
    assert eq.detect_periodic_tail(cfg) is None

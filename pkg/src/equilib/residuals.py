"""Equilibrium residuals: net forces with certified error bounds.

For a line configuration the force on a particle splits into the side sums
F_minus (from particles to its left) and F_plus (from the right).  Window
contributions are summed directly in increasing-distance order with
compensated summation; tail contributions are closed-form or truncated
sums whose certified remainder is folded into the reported error bound.
The bound covers everything separating the reported float from the exact
infinite sum: truncation, closed-form evaluation error and rounding.

Reported line `net` is F_plus - F_minus (the wire-format convention; the
physical rightward force is the negation).  Circle reports use the
tangential force with counterclockwise positive, which is finite, so the
error bound is zero there; a particle exactly antipodal to the target has
no well-defined push direction and contributes zero, applied within a
small angular band so the rule is reachable in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .configurations import TWO_PI, CircleConfig, LineConfig, TailModel
from .errors import DomainError, InvalidInput
from .force_laws import ForceLaw, KahanSum, force_sum_arithmetic

__all__ = [
    "ANTIPODAL_BAND",
    "ParticleResidual",
    "ResidualReport",
    "side_forces",
    "residual_report",
    "circle_residual_report",
    "side_force_components",
    "net_rightward_at",
]

# Pairs within this arc distance of exact antipodality are treated as
# antipodal (zero tangential contribution).  Solvers place symmetric pairs
# far more accurately than this, and random configurations essentially
# never land inside the band.
ANTIPODAL_BAND = 5e-9

_EPS = math.ulp(1.0) / 2


@dataclass(frozen=True)
class ParticleResidual:
    """Side forces and net residual for one particle.

    `net` is f_plus - f_minus on the line and the counterclockwise-positive
    tangential force on the circle.  `error_bound` bounds |net - exact|.
    """

    index: int
    f_minus: float
    f_plus: float
    net: float
    error_bound: float

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "f_minus": self.f_minus,
            "f_plus": self.f_plus,
            "net": self.net,
            "error_bound": self.error_bound,
        }


@dataclass(frozen=True)
class ResidualReport:
    """Per-particle residual rows plus their maxima."""

    rows: tuple[ParticleResidual, ...]
    max_abs_net: float
    max_error_bound: float
    tolerance: float
    geometry: str

    def in_equilibrium(self, tol: float | None = None) -> bool:
        """True when max |net| <= tol + max error bound."""
        if tol is None:
            tol = self.tolerance
        return self.max_abs_net <= tol + self.max_error_bound

    def to_json_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "tolerance": self.tolerance,
            "max_abs_net": self.max_abs_net,
            "max_error_bound": self.max_error_bound,
            "in_equilibrium": self.in_equilibrium(),
            "rows": [r.to_json_dict() for r in self.rows],
        }

    def to_csv(self) -> str:
        lines = ["index,f_minus,f_plus,net,error_bound"]
        for r in self.rows:
            lines.append(
                f"{r.index},{r.f_minus!r},{r.f_plus!r},{r.net!r},{r.error_bound!r}"
            )
        return "\n".join(lines) + "\n"


def _one_side(
    law: ForceLaw,
    distances: np.ndarray,
    progressions: Sequence[tuple[float, float]],
    tol: float,
    certified: bool,
) -> tuple[float, float]:
    """Sum F over explicit distances (ascending) plus arithmetic tail runs."""
    if distances.size and distances[0] <= 0.0:
        raise DomainError("coincident particles: zero pair distance")
    if not certified:
        total = float(np.sum(law.force_array(distances))) if distances.size else 0.0
        for start, stride in progressions:
            value, _ = force_sum_arithmetic(law, start, stride, tol)
            total += value
        return total, 0.0
    acc = KahanSum()
    for d in distances:
        acc.add(law.force(float(d)))
    err = acc.fp_error() + 2 * _EPS * acc.abs_total  # + per-evaluation rounding
    total = acc.total
    share = tol / max(1, len(progressions))
    for start, stride in progressions:
        value, tail_err = force_sum_arithmetic(law, start, stride, share)
        total += value
        err += tail_err + _EPS * abs(value)
    return total, err


def side_force_components(
    law: ForceLaw,
    x: float,
    others: Sequence[float] | np.ndarray,
    left_tail: TailModel | None = None,
    right_tail: TailModel | None = None,
    tolerance: float = 1e-12,
    certified: bool = True,
) -> tuple[float, float, float]:
    """(F_minus, F_plus, error_bound) felt at position x from `others` + tails.

    `others` are explicit particle positions (any order, excluding x's own
    entry); tails must lie beyond the window on their side of x.
    """
    arr = np.asarray(others, dtype=float)
    if np.any(arr == x):
        raise DomainError(f"coincident particles at {x!r}")
    left = np.sort(x - arr[arr < x])
    right = np.sort(arr[arr > x] - x)
    left_prog = left_tail.progressions(x, "left") if left_tail is not None else []
    right_prog = right_tail.progressions(x, "right") if right_tail is not None else []
    f_minus, err_minus = _one_side(law, left, left_prog, tolerance, certified)
    f_plus, err_plus = _one_side(law, right, right_prog, tolerance, certified)
    return f_minus, f_plus, err_minus + err_plus


def net_rightward_at(
    law: ForceLaw,
    x: float,
    others: Sequence[float] | np.ndarray,
    left_tail: TailModel | None = None,
    right_tail: TailModel | None = None,
    tolerance: float = 1e-12,
) -> float:
    """Physical rightward net force at x: F_minus - F_plus (fast path).

    Strictly decreasing in x while x stays between its neighbors, which is
    what the 1-d placement root-finders rely on.
    """
    f_minus, f_plus, _ = side_force_components(
        law, x, others, left_tail, right_tail, tolerance, certified=False
    )
    return f_minus - f_plus


def side_forces(
    config: LineConfig,
    index: int,
    law: ForceLaw,
    tolerance: float = 1e-12,
) -> tuple[float, float, float]:
    """Side sums (F_minus, F_plus, error_bound) for window particle `index`."""
    if not isinstance(config, LineConfig):
        raise InvalidInput("side_forces expects a line configuration")
    if not 0 <= index < config.n:
        raise InvalidInput(f"index {index} out of range for window of {config.n}")
    x = config.window[index]
    others = [p for i, p in enumerate(config.window) if i != index]
    return side_force_components(
        law, x, others, config.left_tail, config.right_tail, tolerance, certified=True
    )


def residual_report(
    config: LineConfig,
    law: ForceLaw,
    tolerance: float = 1e-12,
) -> ResidualReport:
    """Residual rows for every window particle of a line configuration."""
    rows = []
    for i in range(config.n):
        f_minus, f_plus, err = side_forces(config, i, law, tolerance)
        rows.append(ParticleResidual(i, f_minus, f_plus, f_plus - f_minus, err))
    return ResidualReport(
        rows=tuple(rows),
        max_abs_net=max(abs(r.net) for r in rows),
        max_error_bound=max(r.error_bound for r in rows),
        tolerance=tolerance,
        geometry="line",
    )


def circle_pair_contribution(law: ForceLaw, delta: float) -> float:
    """Tangential push on a particle from one at angular offset delta.

    delta is the counterclockwise angle from target to source in (0, 2*pi).
    Positive result pushes counterclockwise.  Exactly antipodal sources
    (within ANTIPODAL_BAND of arc pi) contribute zero.
    """
    u = min(delta, TWO_PI - delta)
    if abs(u - math.pi) <= ANTIPODAL_BAND:
        return 0.0
    if delta < math.pi:
        return -law.force(u)  # source ahead: pushed back, clockwise
    return law.force(u)


def circle_residual_report(config: CircleConfig, law: ForceLaw) -> ResidualReport:
    """Tangential net force per particle, counterclockwise positive.

    All sums are finite, so error bounds are zero.  f_minus collects the
    counterclockwise-pushing magnitudes (sources behind the particle),
    f_plus the clockwise-pushing ones; net = f_minus - f_plus.
    """
    if not isinstance(config, CircleConfig):
        raise InvalidInput("circle_residual_report expects a circle configuration")
    angles = config.angles
    rows = []
    for i, a in enumerate(angles):
        behind = KahanSum()
        ahead = KahanSum()
        for j, b in enumerate(angles):
            if j == i:
                continue
            delta = (b - a) % TWO_PI
            push = circle_pair_contribution(law, delta)
            if push > 0.0:
                behind.add(push)
            elif push < 0.0:
                ahead.add(-push)
        rows.append(
            ParticleResidual(i, behind.total, ahead.total, behind.total - ahead.total, 0.0)
        )
    return ResidualReport(
        rows=tuple(rows),
        max_abs_net=max(abs(r.net) for r in rows),
        max_error_bound=0.0,
        tolerance=0.0,
        geometry="circle",
    )

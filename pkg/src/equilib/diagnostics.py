"""Difference force fields, the Blaschke divergence diagnostic, and
multi-start reconstruction of unknown left particles.

These operations probe the rigidity of one-sided equilibrium data
numerically.  The difference field measures how distinguishable two left
configurations are from the right half line; the Blaschke partial sum is
the divergence criterion that underpins uniqueness; the reconstruction
runs the inverse problem directly and reports how many distinct answers
multi-start optimization actually finds.  Every finite run of these
diagnostics is a truncation of an infinite statement, so reports carry
the truncation level (terms used, equations used) next to the numbers.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .configurations import LineConfig, TailModel
from .errors import (
    DomainError,
    InsufficientEquations,
    InvalidInput,
    PostconditionViolation,
)
from .force_laws import ForceLaw, force_sum_arithmetic
from .residuals import net_rightward_at
from .solvers import SolverOptions

__all__ = [
    "BlaschkeReport",
    "ReconstructionCluster",
    "ReconstructionProblem",
    "ReconstructionReport",
    "blaschke_partial_sum",
    "eval_difference_field",
    "mobius_map",
    "mobius_inverse",
    "reconstruct_left_tail",
]

_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Difference force field
# ---------------------------------------------------------------------------


def eval_difference_field(
    x_positions,
    y_positions,
    w: float,
    law: ForceLaw,
    x_tail: TailModel | None = None,
    y_tail: TailModel | None = None,
) -> tuple[float, float]:
    """Signed field of the symmetric difference of two source sets at w.

    Returns (value, error_bound) with value = sum over p in X minus sum
    over p in Y of F(|p - w|).  Shared positions cancel exactly before any
    force is evaluated (multiset cancellation), so X == Y gives 0.0 with a
    zero bound, and swapping X and Y flips the sign exactly.  Equal tail
    models cancel the same way; differing tails are summed with certified
    remainder bounds folded into the error bound.  Raises DomainError when
    w coincides with a surviving source.
    """
    x_tail = TailModel.none() if x_tail is None else x_tail
    y_tail = TailModel.none() if y_tail is None else y_tail
    w = float(w)
    counts: Counter = Counter(float(p) for p in x_positions)
    counts.subtract(float(p) for p in y_positions)

    terms: list[float] = []
    err = 0.0
    for p, mult in sorted(counts.items()):
        if mult == 0:
            continue
        d = abs(w - p)
        if d == 0.0:
            raise DomainError(f"evaluation point {w!r} coincides with a source")
        f = law.force(d)
        terms.append(mult * f)
        err += abs(mult) * 4.0 * _EPS * f

    if x_tail != y_tail:
        for tail, sign in ((x_tail, 1.0), (y_tail, -1.0)):
            if tail.is_none:
                continue
            for start, stride in tail.progressions(w, "left"):
                if start <= 0.0:
                    raise DomainError(
                        f"evaluation point {w!r} is not on the window side of a tail"
                    )
                value, bound = force_sum_arithmetic(law, start, stride, tol=1e-14)
                terms.append(sign * value)
                err += bound

    value = math.fsum(terms)
    return value, err + 2.0 * _EPS * abs(value)


# ---------------------------------------------------------------------------
# Half-plane to disc transform and the divergence diagnostic
# ---------------------------------------------------------------------------


def mobius_map(w: float) -> float:
    """(w - 1) / (w + 1): sends [0, inf) increasingly onto [-1, 1)."""
    return (w - 1.0) / (w + 1.0)


def mobius_inverse(z: float) -> float:
    """(1 + z) / (1 - z): inverse of mobius_map on [-1, 1)."""
    return (1.0 + z) / (1.0 - z)


@dataclass(frozen=True)
class BlaschkeReport:
    """Termwise data behind a partial sum of 1 - z_n.

    `indices`, `w`, `z`, `one_minus_z`, `cumulative` and `lower_curve` are
    aligned arrays over n = 0..N; `partial_sum` is cumulative[-1] and
    `lower_bound_sum` the sum of the curve.  partial_sum >= lower_bound_sum
    holds whenever the growth validation passed.
    """

    indices: np.ndarray
    w: np.ndarray
    z: np.ndarray
    one_minus_z: np.ndarray
    cumulative: np.ndarray
    lower_curve: np.ndarray
    partial_sum: float
    lower_bound_sum: float
    growth_constant: float

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        """(n, w_n, z_n, 1 - z_n, cumulative) rows, CSV-ready."""
        return [
            (int(n), float(wn), float(zn), float(omz), float(cum))
            for n, wn, zn, omz, cum in zip(
                self.indices, self.w, self.z, self.one_minus_z, self.cumulative
            )
        ]


def _blaschke_points(W, N: int, growth_constant: float | None) -> tuple[np.ndarray, float]:
    if isinstance(W, LineConfig):
        pts = list(W.window[: N + 1])
        if len(pts) < N + 1:
            if W.right_tail.is_none:
                raise InvalidInput(
                    f"configuration provides {len(pts)} positions; need {N + 1}"
                )
            pts.extend(W.right_tail.positions("right", N + 1 - len(pts)).tolist())
        C = W.C if growth_constant is None else float(growth_constant)
        return np.asarray(pts, dtype=float), C
    if growth_constant is None:
        raise InvalidInput(
            "growth constant required: pass growth_constant or a configuration "
            "carrying one"
        )
    pts = np.asarray([float(p) for p in W], dtype=float)
    if pts.size < N + 1:
        raise InvalidInput(f"W provides {pts.size} positions; need {N + 1}")
    return pts[: N + 1], float(growth_constant)


def blaschke_partial_sum(
    W,
    N: int,
    growth_constant: float | None = None,
) -> BlaschkeReport:
    """Partial sum of 1 - z_n over n = 0..N against its lower-bound curve.

    W is a nondecreasing sequence of nonnegative positions (or a line
    configuration whose window plus right tail provides them).  Each w_n
    must satisfy w_n <= C n for the growth constant C; then each term
    1 - z_n = 2 / (1 + w_n) dominates 2 / (1 + C n), so the partial sum
    dominates the curve sum, and both diverge like a harmonic series.  A
    large margin means the divergence (hence the uniqueness regime it
    signals) is comfortably active for this W.
    """
    N = int(N)
    if N < 1:
        raise InvalidInput(f"N must be at least 1, got {N}")
    w, C = _blaschke_points(W, N, growth_constant)
    if not math.isfinite(C) or C <= 0.0:
        raise InvalidInput(f"growth constant must be positive, got {C!r}")
    if w[0] < 0.0:
        raise InvalidInput("positions must be nonnegative")
    if np.any(np.diff(w) < 0.0):
        raise InvalidInput("positions must be nondecreasing")
    n = np.arange(N + 1, dtype=float)
    slack = 1e-12 * np.maximum(1.0, C * n)
    bad = np.nonzero(w > C * n + slack)[0]
    if bad.size:
        k = int(bad[0])
        raise InvalidInput(
            f"growth bound violated: w_{k} = {float(w[k])!r} exceeds "
            f"C*n = {float(C * n[k])!r}"
        )
    z = (w - 1.0) / (w + 1.0)
    one_minus_z = 1.0 - z
    cumulative = np.cumsum(one_minus_z)
    lower_curve = 2.0 / (1.0 + C * n)
    partial_sum = float(cumulative[-1])
    lower_bound_sum = float(np.sum(lower_curve))
    if partial_sum < lower_bound_sum - 1e-9 * (N + 1):
        raise PostconditionViolation(
            "partial sum fell below its lower-bound curve despite the growth "
            "validation"
        )
    return BlaschkeReport(
        indices=np.arange(N + 1),
        w=w,
        z=z,
        one_minus_z=one_minus_z,
        cumulative=cumulative,
        lower_curve=lower_curve,
        partial_sum=partial_sum,
        lower_bound_sum=lower_bound_sum,
        growth_constant=C,
    )


# ---------------------------------------------------------------------------
# Left-tail reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReconstructionProblem:
    """Observed right data with m unknown particles to its left.

    `w_window` lists the observed positions (sorted increasing, first one
    at or right of 0), continued rightwards by `right_tail` when present.
    The m unknowns live strictly between `far_left_tail` (the assumed
    known continuation further left) and the first observed particle.
    `multi_start` and `rng_seed` override the solver options when set.

    A problem built by `mirrored` probes the converse direction (right
    side unknown); it is the same computation on reflected data and the
    report is reflected back, with no uniqueness claim either way.
    """

    w_window: tuple[float, ...]
    m: int
    law: ForceLaw
    right_tail: TailModel = TailModel.none()
    far_left_tail: TailModel = TailModel.none()
    multi_start: int | None = None
    rng_seed: int | None = None
    mirrored: bool = False

    def __post_init__(self) -> None:
        window = tuple(float(p) for p in self.w_window)
        object.__setattr__(self, "w_window", window)
        if not window:
            raise InvalidInput("w_window must hold at least one observed position")
        if any(b <= a for a, b in zip(window, window[1:])):
            raise InvalidInput("w_window must be strictly increasing")
        if window[0] < 0.0:
            raise InvalidInput("observed positions must be nonnegative")
        if int(self.m) < 1:
            raise InvalidInput(f"m must be at least 1, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if not self.right_tail.is_none and self.right_tail.first <= window[-1]:
            raise InvalidInput("right tail must start right of the window")
        if not self.far_left_tail.is_none and self.far_left_tail.first >= window[0]:
            raise InvalidInput("far left tail must lie left of the window")

    @classmethod
    def mirrored_problem(
        cls,
        observed,
        m: int,
        law: ForceLaw,
        observed_tail: TailModel = TailModel.none(),
        far_tail: TailModel = TailModel.none(),
        multi_start: int | None = None,
        rng_seed: int | None = None,
    ) -> "ReconstructionProblem":
        """Converse experiment: observed nonpositive data, unknowns to the right.

        Reflects through the origin into the canonical form; the report's
        clusters are reflected back by reconstruct_left_tail.
        """
        window = tuple(sorted(-float(p) for p in observed))
        return cls(
            w_window=window,
            m=m,
            law=law,
            right_tail=_reflect_tail(observed_tail),
            far_left_tail=_reflect_tail(far_tail),
            multi_start=multi_start,
            rng_seed=rng_seed,
            mirrored=True,
        )


def _reflect_tail(tail: TailModel) -> TailModel:
    if tail.is_none:
        return tail
    if tail.kind == "arithmetic":
        return TailModel.arithmetic(-tail.first, tail.gap)
    return TailModel.periodic(-tail.first, tail.pattern)


@dataclass(frozen=True)
class ReconstructionCluster:
    center: tuple[float, ...]
    members: int
    residual: float

    def to_json_dict(self) -> dict:
        return {
            "center": list(self.center),
            "members": self.members,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class ReconstructionReport:
    """Clustered multi-start outcomes; one cluster means one empirical answer.

    `equations_used` records the truncation level: how many observed
    equilibrium equations constrained the fit.
    """

    clusters: tuple[ReconstructionCluster, ...]
    starts: int
    converged_count: int
    equations_used: int
    mirrored: bool = False

    def to_json_dict(self) -> dict:
        return {
            "clusters": [c.to_json_dict() for c in self.clusters],
            "starts": self.starts,
            "converged_count": self.converged_count,
            "equations_used": self.equations_used,
        }


def _gap_bounds(problem: ReconstructionProblem) -> tuple[float, float]:
    gaps: list[float] = list(np.diff(problem.w_window)) if len(problem.w_window) > 1 else []
    gaps.extend(problem.far_left_tail.gap_values())
    gaps.extend(problem.right_tail.gap_values())
    if not gaps:
        return 0.5, 1.5
    return float(min(gaps)), float(max(gaps))


def _residual_fn(problem: ReconstructionProblem, k: int):
    window = problem.w_window
    law = problem.law
    far = None if problem.far_left_tail.is_none else problem.far_left_tail
    right = None if problem.right_tail.is_none else problem.right_tail
    far_first = problem.far_left_tail.first if far is not None else -math.inf
    floor = window[0]
    guard = np.full(k, 1e6)

    def residuals(q: np.ndarray) -> np.ndarray:
        # q: candidate unknown positions, increasing, left of the window.
        if not np.all(np.isfinite(q)):
            return guard
        if np.any(np.diff(q) <= 0.0) or q[-1] >= floor or q[0] <= far_first:
            return guard
        out = np.empty(k)
        q_list = q.tolist()
        for j in range(k):
            others = q_list + [p for i, p in enumerate(window) if i != j]
            out[j] = net_rightward_at(law, window[j], others, far, right)
        return out

    return residuals


def _cluster_solutions(
    solutions: list[tuple[np.ndarray, float]], radius: float
) -> tuple[ReconstructionCluster, ...]:
    clusters: list[dict] = []
    for q, res in sorted(solutions, key=lambda s: (s[1], tuple(s[0]))):
        for cl in clusters:
            if np.max(np.abs(q - cl["center"])) <= radius:
                cl["members"] += 1
                break
        else:
            clusters.append({"center": q, "members": 1, "residual": res})
    clusters.sort(key=lambda cl: (-cl["members"], cl["residual"], tuple(cl["center"])))
    return tuple(
        ReconstructionCluster(
            center=tuple(float(v) for v in cl["center"]),
            members=cl["members"],
            residual=float(cl["residual"]),
        )
        for cl in clusters
    )


def reconstruct_left_tail(
    problem: ReconstructionProblem,
    opts: SolverOptions | None = None,
) -> ReconstructionReport:
    """Fit the m unknown left positions to the observed equilibrium equations.

    Equations are "net force vanishes" at the first k observed particles,
    k = min(m + 2, usable observations); the last observation is unusable
    when no right tail continues the data (nothing can balance its push).
    Raises InsufficientEquations when k < m.  Each start runs trust-region
    least squares from a truth-free arithmetic initialization (gaps drawn
    between the smallest and largest observed gap), then a short
    Gauss-Newton polish so that converged starts agree to cluster radius.
    Starts that fail to reach the residual threshold are counted, not
    fatal.
    """
    opts = opts or SolverOptions()
    m = problem.m
    available = len(problem.w_window) - (1 if problem.right_tail.is_none else 0)
    k = min(m + 2, available)
    if k < m:
        raise InsufficientEquations(
            f"{available} usable equilibrium equations cannot pin {m} unknowns"
        )
    starts = problem.multi_start if problem.multi_start is not None else opts.multi_start
    starts = max(1, int(starts))
    seed = problem.rng_seed if problem.rng_seed is not None else opts.rng_seed
    rng = np.random.default_rng(seed)
    lo, hi = _gap_bounds(problem)
    residuals = _residual_fn(problem, k)
    threshold = max(opts.residual_tol, 1e-12) * 100.0

    solutions: list[tuple[np.ndarray, float]] = []
    converged = 0
    for s in range(starts):
        if s == 0:
            gs = np.full(m, 0.5 * (lo + hi))
        else:
            gs = rng.uniform(lo, hi, size=m)
        q0 = problem.w_window[0] - np.cumsum(gs)[::-1]
        fit = least_squares(residuals, q0, method="trf", xtol=1e-14, ftol=1e-14)
        q = np.asarray(fit.x, dtype=float)
        for _ in range(3):
            r = residuals(q)
            if np.max(np.abs(r)) < 1e-14:
                break
            jac = np.empty((k, m))
            for c in range(m):
                h = 1e-7 * max(1.0, abs(q[c]))
                qp = q.copy()
                qp[c] += h
                qm = q.copy()
                qm[c] -= h
                jac[:, c] = (residuals(qp) - residuals(qm)) / (2.0 * h)
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            trial = q + step
            if np.max(np.abs(residuals(trial))) < np.max(np.abs(r)):
                q = trial
            else:
                break
        res = float(np.max(np.abs(residuals(q))))
        if res <= threshold:
            converged += 1
            solutions.append((q, res))

    radius = max(opts.position_tol, 1e-11)
    clusters = _cluster_solutions(solutions, radius)
    if problem.mirrored:
        clusters = tuple(
            ReconstructionCluster(
                center=tuple(sorted(-v for v in cl.center)),
                members=cl.members,
                residual=cl.residual,
            )
            for cl in clusters
        )
    return ReconstructionReport(
        clusters=clusters,
        starts=starts,
        converged_count=converged,
        equations_used=k,
        mirrored=problem.mirrored,
    )

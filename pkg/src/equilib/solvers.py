"""Constructive solvers: circle equilibria, pinned segments, sweeps,
zero-centered configurations and right extensions.

Design choices shared by every routine here:

* 1-d placement is always bracketed bisection on the particle's own net
  force, never Newton: the net force is strictly decreasing in the
  particle's own coordinate (strict monotonicity of the law), so bisection
  is unconditionally convergent.  Brackets are the open interval between
  the current neighbors, shrunk by a 1e-9 relative margin, with a
  200-iteration cap.
* Solvers never certify their own output: every result is re-checked
  through the residuals module before it is returned, and a failed check
  raises NoConvergence with the offending residual attached.
* All randomness flows through ``SolverOptions.rng_seed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .configurations import TWO_PI, CircleConfig, LineConfig, TailModel
from .errors import (
    InfeasibleBracket,
    InvalidInput,
    InvalidPins,
    NoConvergence,
    PostconditionViolation,
)
from .force_laws import ForceLaw
from .residuals import (
    ANTIPODAL_BAND,
    circle_residual_report,
    residual_report,
    side_force_components,
)

__all__ = [
    "SolverOptions",
    "ZeroCenteredProblem",
    "SweepStats",
    "SegmentStats",
    "CircleStats",
    "ZeroCenteredStats",
    "ExtendStats",
    "solve_circle_equilibrium",
    "solve_pinned_segment",
    "sweep_relax",
    "solve_zero_centered",
    "extend_right",
]


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and budgets shared by the solvers.

    position_tol governs outer agreement criteria (shooting targets,
    truncation-level agreement, solution clustering); 1-d placements use
    the tighter of position_tol and 1e-12 so residual tolerances stay
    reachable.  The truncation fields apply to extend_right: the output
    has extension_points+1 particles, levels solve extension_points +
    guard_band * level unknowns, and the last guard_band outputs are not
    residual-certified.
    """

    residual_tol: float = 1e-10
    position_tol: float = 1e-10
    max_sweeps: int = 400
    max_outer_iters: int = 200
    rng_seed: int = 0
    extension_points: int = 16
    guard_band: int = 4
    truncation_levels: tuple[int, ...] = (1, 2, 4)
    multi_start: int = 1
    track_energy: bool = False

    def placement_tol(self) -> float:
        return min(self.position_tol, 1e-12)


@dataclass(frozen=True)
class ZeroCenteredProblem:
    """Particles x_{-n} < ... < x_{-1} ~ a < 0 < x_1 ~ b < ... < x_n.

    Every particle except the two extremes and the one pinned at 0 must be
    in equilibrium; a and b are the required positions of x_{-1} and x_1.
    """

    a: float
    b: float
    n: int
    law: ForceLaw

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInput("a and b must be finite")
        if not self.a < 0.0 < self.b:
            raise InvalidInput(f"need a < 0 < b, got a={self.a!r} b={self.b!r}")
        if self.n < 1:
            raise InvalidInput("n must be at least 1")


@dataclass
class SweepStats:
    direction: str
    moved: int
    max_displacement: float
    displacements: tuple[float, ...]
    endpoint_flags: tuple[int, ...]


@dataclass
class SegmentStats:
    sweeps: int
    residual: float
    converged: bool
    config: LineConfig
    energy_trace: tuple[float, ...] = ()


@dataclass
class CircleStats:
    sweeps: int
    newton_iters: int
    residual: float
    converged: bool


@dataclass
class ZeroCenteredStats:
    outer_iters: int
    inner_sweeps: int
    target_errors: tuple[float, float]
    residual: float
    converged: bool


@dataclass
class ExtendStats:
    levels_used: int
    level_disagreement: float
    sweeps: int
    continuation_gap: float
    residual: float
    converged: bool
    config: LineConfig | None = None
    clusters: tuple[tuple[float, ...], ...] = ()


# ---------------------------------------------------------------------------
# 1-d placement
# ---------------------------------------------------------------------------

_BISECT_CAP = 200
_BRACKET_MARGIN = 1e-9


def _bisect_place(
    net: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
) -> tuple[float, bool]:
    """Root of a decreasing net-force function on (lo, hi).

    Returns (position, endpoint_flagged).  If the force has constant sign
    on the bracket the particle is parked within tol of the endpoint it is
    pushed toward and flagged.
    """
    width = hi - lo
    a = lo + _BRACKET_MARGIN * width
    b = hi - _BRACKET_MARGIN * width
    ga = net(a)
    if ga <= 0.0:  # pushed left everywhere (net decreasing)
        return (max(a, lo + min(tol, width * 0.25)) if ga < 0.0 else a), ga < 0.0
    gb = net(b)
    if gb >= 0.0:  # pushed right everywhere
        return (min(b, hi - min(tol, width * 0.25)) if gb > 0.0 else b), gb > 0.0
    for _ in range(_BISECT_CAP):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        g = net(mid)
        if g > 0.0:
            a = mid
        elif g < 0.0:
            b = mid
        else:
            return mid, False
    return 0.5 * (a + b), False


def _net_finite(law: ForceLaw, x: float, others: np.ndarray) -> float:
    """Rightward net force at x from explicit particles only."""
    d = others - x
    if np.any(d == 0.0):
        raise InvalidInput(f"coincident particles at {x!r}")
    left = -d[d < 0.0]
    right = d[d > 0.0]
    total = 0.0
    if left.size:
        total += float(np.sum(law.force_array(left)))
    if right.size:
        total -= float(np.sum(law.force_array(right)))
    return total


def _net_with_tails(
    law: ForceLaw,
    x: float,
    others: np.ndarray,
    left_tail: TailModel,
    right_tail: TailModel,
    tol: float,
) -> float:
    f_minus, f_plus, _ = side_force_components(
        law, x, others, left_tail, right_tail, tol, certified=False
    )
    return f_minus - f_plus


# ---------------------------------------------------------------------------
# Sweep relaxation
# ---------------------------------------------------------------------------


def _sweep_once(
    law: ForceLaw,
    positions: list[float],
    free_indices: Sequence[int],
    left_tail: TailModel,
    right_tail: TailModel,
    placement_tol: float,
    direction: str,
    force_tol: float,
    energy_trace: list[float] | None = None,
    pins_for_energy: tuple[float, ...] = (),
) -> SweepStats:
    """One Gauss-Seidel pass; mutates `positions` in place."""
    order = list(free_indices)
    if direction == "rtl":
        order.reverse()
    elif direction != "ltr":
        raise InvalidInput(f"direction must be 'ltr' or 'rtl', got {direction!r}")
    tails = not (left_tail.is_none and right_tail.is_none)
    displacements = [0.0] * len(positions)
    flags: list[int] = []
    moved = 0
    for i in order:
        lo, hi = positions[i - 1], positions[i + 1]
        others = np.array(positions[:i] + positions[i + 1 :])
        if tails:
            net = lambda x: _net_with_tails(law, x, others, left_tail, right_tail, force_tol)
        else:
            net = lambda x: _net_finite(law, x, others)
        new_x, flagged = _bisect_place(net, lo, hi, placement_tol)
        displacements[i] = new_x - positions[i]
        if new_x != positions[i]:
            moved += 1
        positions[i] = new_x
        if flagged:
            flags.append(i)
        if energy_trace is not None:
            energy_trace.append(
                _segment_energy(law, pins_for_energy, [positions[j] for j in free_indices])
            )
    return SweepStats(
        direction=direction,
        moved=moved,
        max_displacement=max(abs(d) for d in displacements) if displacements else 0.0,
        displacements=tuple(displacements),
        endpoint_flags=tuple(flags),
    )


def _max_free_net(
    law: ForceLaw,
    positions: list[float],
    free_indices: Sequence[int],
    left_tail: TailModel,
    right_tail: TailModel,
    force_tol: float,
) -> float:
    tails = not (left_tail.is_none and right_tail.is_none)
    worst = 0.0
    for i in free_indices:
        others = np.array(positions[:i] + positions[i + 1 :])
        if tails:
            g = _net_with_tails(law, positions[i], others, left_tail, right_tail, force_tol)
        else:
            g = _net_finite(law, positions[i], others)
        worst = max(worst, abs(g))
    return worst


def sweep_relax(
    config: LineConfig,
    fixed: Sequence[int],
    law: ForceLaw,
    direction: str = "ltr",
    opts: SolverOptions | None = None,
) -> tuple[LineConfig, SweepStats]:
    """One relaxation pass: move every non-fixed window particle to the
    root of its net force, visiting in the given direction.

    The two extreme window particles must be fixed.  The output window is
    revalidated; its gap bounds are widened if the sweep moved a gap
    outside the declared [c, C].
    """
    opts = opts or SolverOptions()
    fixed_set = set(int(i) for i in fixed)
    n = config.n
    if any(i < 0 or i >= n for i in fixed_set):
        raise InvalidInput("fixed index out of range")
    if 0 not in fixed_set or (n - 1) not in fixed_set:
        raise InvalidInput("both extreme window particles must be fixed")
    free = [i for i in range(n) if i not in fixed_set]
    positions = list(config.window)
    stats = _sweep_once(
        law,
        positions,
        free,
        config.left_tail,
        config.right_tail,
        opts.placement_tol(),
        direction,
        force_tol=min(opts.residual_tol * 1e-2, 1e-12),
    )
    diffs = [b - a for a, b in zip(positions, positions[1:])]
    c = min([config.c] + diffs)
    C = max([config.C] + diffs)
    out = LineConfig(tuple(positions), config.left_tail, config.right_tail, c, C)
    return out, stats


# ---------------------------------------------------------------------------
# Pinned segment
# ---------------------------------------------------------------------------


def _segment_energy(
    law: ForceLaw, pins: Sequence[float], interior: Sequence[float]
) -> float:
    """Interaction energy of the interior particles (mutual + with pins)."""
    total = 0.0
    for i, x in enumerate(interior):
        for p in pins:
            total += law.potential(abs(x - p))
        for y in interior[i + 1 :]:
            total += law.potential(abs(x - y))
    return total


def solve_pinned_segment(
    fixed_left: Sequence[float],
    fixed_right: Sequence[float],
    n_interior: int,
    law: ForceLaw,
    opts: SolverOptions | None = None,
) -> tuple[tuple[float, ...], SegmentStats]:
    """Equilibrate n_interior particles between two groups of pinned ones.

    Coordinate descent with exact 1-d placement; each placement is the
    unique minimizer of the (strictly convex) single-coordinate energy
    slice, so the total energy decreases weakly at every step.  Stops on
    the net-force criterion: every interior particle's residual at most
    residual_tol.
    """
    opts = opts or SolverOptions()
    left = [float(x) for x in fixed_left]
    right = [float(x) for x in fixed_right]
    if not left or not right:
        raise InvalidPins("both pin groups must be nonempty")
    if any(b <= a for a, b in zip(left, left[1:])) or any(
        b <= a for a, b in zip(right, right[1:])
    ):
        raise InvalidPins("pins must be strictly increasing")
    if n_interior < 1:
        raise InvalidPins("need at least one interior particle")
    gap_lo, gap_hi = left[-1], right[0]
    if gap_lo >= gap_hi:
        raise InvalidPins("left pins must lie strictly below right pins")
    interior = list(np.linspace(gap_lo, gap_hi, n_interior + 2)[1:-1])
    positions = left + interior + right
    free = list(range(len(left), len(left) + n_interior))
    none_tail = TailModel.none()
    pins = tuple(left + right)
    trace: list[float] = [] if opts.track_energy else None
    sweeps = 0
    residual = math.inf
    while sweeps < opts.max_sweeps:
        _sweep_once(
            law,
            positions,
            free,
            none_tail,
            none_tail,
            opts.placement_tol(),
            "ltr",
            force_tol=1e-13,
            energy_trace=trace,
            pins_for_energy=pins,
        )
        sweeps += 1
        residual = _max_free_net(law, positions, free, none_tail, none_tail, 1e-13)
        if residual <= opts.residual_tol:
            break
    interior_out = tuple(positions[i] for i in free)
    cfg = LineConfig.finite(positions)
    stats = SegmentStats(
        sweeps=sweeps,
        residual=residual,
        converged=residual <= opts.residual_tol,
        config=cfg,
        energy_trace=tuple(trace) if trace is not None else (),
    )
    if not stats.converged:
        raise NoConvergence(
            f"pinned segment residual {residual:.3e} above {opts.residual_tol:.3e} "
            f"after {sweeps} sweeps",
            last=interior_out,
            residual=residual,
            iterations=sweeps,
        )
    # Independent check through the residuals module.
    rep = residual_report(cfg, law, tolerance=min(opts.residual_tol * 1e-2, 1e-12))
    worst = max(abs(rep.rows[i].net) for i in free)
    if worst > opts.residual_tol + rep.max_error_bound:
        raise NoConvergence(
            f"independent residual check failed: {worst:.3e}",
            last=interior_out,
            residual=worst,
            iterations=sweeps,
        )
    return interior_out, stats


# ---------------------------------------------------------------------------
# Circle equilibrium
# ---------------------------------------------------------------------------


def _circle_geometry(
    theta: np.ndarray, smooth_w: float = 0.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pairwise geodesic distances u, direction signs s and ramp weights.

    s[i, j] is +1 when increasing theta_i shortens the geodesic to j
    (source ahead counterclockwise), -1 when it lengthens it, and 0 on the
    diagonal.  With smooth_w == 0 the exact antipodal rule applies: pairs
    inside the antipodal band get s = 0 and ramp 1.  With smooth_w > 0 the
    force is instead tapered linearly to zero over the last smooth_w of
    geodesic distance before pi (ramp r, derivative dr), which removes the
    antipodal jump while keeping the same equilibria: a configuration in
    which opposite contributions cancel pairwise does so under any ramp.
    """
    delta = (theta[None, :] - theta[:, None]) % TWO_PI
    u = np.minimum(delta, TWO_PI - delta)
    s = np.where(delta < math.pi, 1.0, -1.0)
    np.fill_diagonal(s, 0.0)
    if smooth_w > 0.0:
        shell = np.clip((math.pi - u) / smooth_w, 0.0, 1.0)
        r = shell
        dr = np.where((u > math.pi - smooth_w) & (u < math.pi), -1.0 / smooth_w, 0.0)
    else:
        s[np.abs(u - math.pi) <= ANTIPODAL_BAND] = 0.0
        r = np.ones_like(u)
        dr = np.zeros_like(u)
    return u, s, r, dr


def _circle_grad(law: ForceLaw, theta: np.ndarray, smooth_w: float = 0.0) -> np.ndarray:
    """Gradient of the total energy; the tangential net force is -grad."""
    u, s, r, _ = _circle_geometry(theta, smooth_w)
    np.fill_diagonal(u, 1.0)
    F = law.force_array(u) * r
    return np.sum(F * s, axis=1)


def _circle_jacobian(law: ForceLaw, theta: np.ndarray, smooth_w: float = 0.0) -> np.ndarray:
    """Jacobian of the gradient: J_ij = Ftilde'(u_ij) s_ij^2 off diagonal."""
    u, s, r, dr = _circle_geometry(theta, smooth_w)
    np.fill_diagonal(u, 1.0)
    dF = (law.force_derivative_array(u) * r + law.force_array(u) * dr) * (s * s)
    np.fill_diagonal(dF, 0.0)
    J = dF.copy()
    np.fill_diagonal(J, -np.sum(dF, axis=1))
    return J


def _circle_sweep(law: ForceLaw, t: np.ndarray, tol: float, smooth_w: float) -> None:
    """One coordinate pass over sorted angles (particle 0 pinned at 0).

    Each free particle moves to the root of its own tangential net force,
    which is strictly decreasing in its angle between the two neighbors,
    so the pass preserves ordering.  Mutates t.
    """
    n = len(t)
    for i in range(1, n):
        lo = t[i - 1]
        hi = t[i + 1] if i + 1 < n else t[0] + TWO_PI
        others = np.delete(t, i)

        def net(x: float) -> float:
            dlt = (others - x) % TWO_PI
            u = np.minimum(dlt, TWO_PI - dlt)
            sgn = np.where(dlt < math.pi, -1.0, 1.0)
            if smooth_w > 0.0:
                ramp = np.clip((math.pi - u) / smooth_w, 0.0, 1.0)
            else:
                ramp = 1.0
                sgn[np.abs(u - math.pi) <= ANTIPODAL_BAND] = 0.0
            return float(np.sum(law.force_array(u) * ramp * sgn))

        t[i], _ = _bisect_place(net, lo, hi, tol)


def solve_circle_equilibrium(
    n: int,
    law: ForceLaw,
    init: Sequence[float] | None = None,
    opts: SolverOptions | None = None,
) -> tuple[CircleConfig, CircleStats]:
    """Find the equilibrium of n particles on the circle, particle 0 pinned
    at angle 0.

    The antipodal jump in the exact force field (a pair at geodesic
    distance exactly pi contributes nothing, slightly off contributes
    F(pi)) defeats plain descent for even n, so the solver works on a
    smoothed field that tapers the force to zero over a shell of width w
    below pi.  Any configuration whose opposite contributions cancel
    pairwise is an equilibrium of every smoothed field as well, so the
    smoothing moves no roots; it only removes the jump and gives the pair
    alignment mode a finite stiffness F(pi)/w.  Coordinate bisection
    sweeps (each particle's tangential force is strictly decreasing in its
    own angle) locate the basin, Newton on the smoothed field polishes to
    machine precision, and the result is independently re-checked with the
    exact-rule circle_residual_report before returning.
    """
    opts = opts or SolverOptions()
    if n < 2:
        raise InvalidInput("need at least two particles on the circle")
    rng = np.random.default_rng(opts.rng_seed)

    def draw() -> np.ndarray:
        for _ in range(1000):
            theta = rng.uniform(0.0, TWO_PI, size=n)
            arcs = np.diff(np.sort(np.concatenate([theta, [np.min(theta) + TWO_PI]])))
            if np.min(arcs) >= 1e-6:
                return theta
        raise NoConvergence("could not draw well-separated initial angles")

    if init is not None:
        theta = np.mod(np.asarray(list(init), dtype=float), TWO_PI)
        if len(theta) != n:
            raise InvalidInput("init must provide one angle per particle")
    else:
        theta = draw()
    t = np.sort(theta % TWO_PI)
    t -= t[0]

    smooth_w = 0.35
    sweep_exit = 1e-6
    newton_exit = min(1e-13, opts.residual_tol / max(4 * n, 40))
    sweeps = 0
    newton_iters = 0

    for round_idx in range(6):
        # Phase 1: bisection sweeps on the smoothed field.
        prev_gmax = math.inf
        while sweeps < opts.max_sweeps:
            _circle_sweep(law, t, opts.placement_tol(), smooth_w)
            sweeps += 1
            gm = float(np.max(np.abs(_circle_grad(law, t, smooth_w)[1:])))
            if gm <= sweep_exit or gm > 0.5 * prev_gmax:
                break
            prev_gmax = gm
        # Phase 2: Newton on the smoothed field, free angles only.
        g = _circle_grad(law, t, smooth_w)
        for _ in range(80):
            gmax = float(np.max(np.abs(g[1:])))
            if gmax <= newton_exit:
                break
            try:
                delta = np.linalg.solve(
                    _circle_jacobian(law, t, smooth_w)[1:, 1:], -g[1:]
                )
            except np.linalg.LinAlgError:
                break
            scale = 1.0
            improved = False
            for _ in range(30):
                trial = t.copy()
                trial[1:] += scale * delta
                trial -= trial[0]
                g_trial = _circle_grad(law, trial, smooth_w)
                if np.max(np.abs(g_trial[1:])) < gmax:
                    t, g = trial, g_trial
                    improved = True
                    break
                scale *= 0.5
            newton_iters += 1
            if not improved:
                break
        # Exact-rule check; a smoothed solution with aligned pairs passes.
        if float(np.max(np.abs(_circle_grad(law, t)[1:]))) <= max(newton_exit, 1e-13):
            break
        t = np.sort(draw() % TWO_PI)
        t -= t[0]

    t = np.sort(t % TWO_PI)
    t -= t[0]
    try:
        config = CircleConfig(tuple(float(a) for a in t))
    except InvalidInput as exc:
        raise NoConvergence(
            f"iteration collapsed to an invalid configuration: {exc}",
            last=tuple(float(a) for a in t),
        ) from exc
    report = circle_residual_report(config, law)
    stats = CircleStats(
        sweeps=sweeps,
        newton_iters=newton_iters,
        residual=report.max_abs_net,
        converged=report.max_abs_net <= opts.residual_tol,
    )
    if not stats.converged:
        raise NoConvergence(
            f"circle residual {report.max_abs_net:.3e} above "
            f"{opts.residual_tol:.3e}",
            last=config,
            residual=report.max_abs_net,
            iterations=sweeps + newton_iters,
        )
    return config, stats


# ---------------------------------------------------------------------------
# Zero-centered configurations
# ---------------------------------------------------------------------------


def _force_inverse(law: ForceLaw, y: float) -> float:
    """Distance d with F(d) = y (F strictly decreasing)."""
    if y <= 0.0:
        raise InvalidInput("force level must be positive")
    lo = hi = 1.0
    for _ in range(200):
        if law.force(lo) > y:
            break
        lo *= 0.5
    for _ in range(200):
        if law.force(hi) < y:
            break
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if law.force(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _endpoint_chain_bound(law: ForceLaw, edge: float, n: int) -> float:
    """Upper bound on |x_n| given |x_1| <= edge, from force balancing.

    The particle at distance <= edge from the origin feels at least
    F(edge) from the pinned particle alone; the n-j particles beyond the
    j-th must supply that much, which caps each successive gap.
    """
    cur = edge
    for j in range(1, n):
        remaining = n - j
        cur += _force_inverse(law, law.force(cur) / remaining)
    return cur


class _ZeroCenteredEngine:
    """Inner relaxation with warm starts for the outer 2-d shooting."""

    _PLACEMENT_TOL = 1e-13

    def __init__(self, problem: ZeroCenteredProblem, opts: SolverOptions):
        self.problem = problem
        self.opts = opts
        self.none_tail = TailModel.none()
        self.state: list[float] | None = None
        self.state_LR: tuple[float, float] | None = None
        self.sweeps_total = 0
        self.last_residual = math.inf
        self.last_flags: tuple[int, ...] = ()

    def relax(self, L: float, R: float, inner_tol: float) -> list[float]:
        n = self.problem.n
        if self.state is not None:
            positions = list(self.state)
            # Rescale each side toward the new endpoints; this preserves
            # ordering and gives the sweeps a good warm start.
            L_old, R_old = self.state_LR
            for i in range(1, n):
                positions[i] = positions[i] * (L / L_old)
            for i in range(n + 1, 2 * n):
                positions[i] = positions[i] * (R / R_old)
            positions[0], positions[2 * n] = L, R
        else:
            left = list(np.linspace(L, 0.0, n + 1)[:-1])
            right = list(np.linspace(0.0, R, n + 1)[1:])
            positions = left + [0.0] + right
        free = [i for i in range(1, 2 * n) if i != n]
        if not free:
            self.state, self.state_LR = positions, (L, R)
            self.last_residual = 0.0
            self.last_flags = ()
            return positions
        opts = self.opts
        prev_worst = math.inf
        for _ in range(opts.max_sweeps):
            stats = _sweep_once(
                self.problem.law,
                positions,
                free,
                self.none_tail,
                self.none_tail,
                self._PLACEMENT_TOL,
                "ltr",
                force_tol=1e-13,
            )
            self.sweeps_total += 1
            worst = _max_free_net(
                self.problem.law, positions, free, self.none_tail, self.none_tail, 1e-13
            )
            if worst <= inner_tol:
                break
            # Placement quantization floor: displacements are dead and the
            # residual has stopped improving, so more sweeps do nothing.
            if (
                stats.max_displacement <= 4.0 * self._PLACEMENT_TOL
                and worst > 0.7 * prev_worst
            ):
                break
            prev_worst = worst
        self.state, self.state_LR = list(positions), (L, R)
        self.last_residual = worst
        self.last_flags = stats.endpoint_flags
        return positions


def solve_zero_centered(
    problem: ZeroCenteredProblem,
    opts: SolverOptions | None = None,
) -> tuple[LineConfig, ZeroCenteredStats]:
    """Nested shooting for a zero-centered configuration.

    Outer loop: adjust the two endpoint positions (x_{-n}, x_n) by
    alternating bisection so that the relaxed x_{-1} and x_1 hit a and b;
    when both are off, the endpoint with the larger target error moves.
    Inner loop: repeated sweep relaxation of all non-pinned particles with
    the endpoints and the origin fixed.  The monotone dependence of
    (x_{-1}, x_1) on the endpoints makes the bisection safe; brackets come
    from the force-balancing chain bound.
    """
    opts = opts or SolverOptions()
    n, a, b, law = problem.n, problem.a, problem.b, problem.law
    if n == 1:
        window = (a, 0.0, b)
        cfg = LineConfig.finite(window)
        return cfg, ZeroCenteredStats(0, 0, (0.0, 0.0), 0.0, True)

    engine = _ZeroCenteredEngine(problem, opts)
    strict_tol = opts.residual_tol * 0.5

    def targets(L: float, R: float, inner_tol: float) -> tuple[float, float]:
        pos = engine.relax(L, R, inner_tol)
        return pos[n - 1] - a, pos[n + 1] - b

    probe_tol = max(strict_tol, 1e-8)
    # Bracket the right endpoint: x_1 is increasing in R.
    R_hi = _endpoint_chain_bound(law, b, n) * 1.5
    R_lo = b * (1.0 + 1e-3)
    L_lo = -_endpoint_chain_bound(law, -a, n) * 1.5
    L_hi = a * (1.0 + 1e-3)
    L = 0.5 * (L_lo + L_hi)
    R = 0.5 * (R_lo + R_hi)
    for _ in range(80):
        _, e = targets(L, R_lo, probe_tol)
        if e < 0.0:
            break
        if R_lo - b <= 1e-12 * max(1.0, abs(b)):
            # x_1 stays parked above b however tightly R squeezes: the
            # bounded force of this law cannot balance the left crowd.
            raise InfeasibleBracket(
                "x_1 cannot be brought below b by any right endpoint"
            )
        R_lo = b + (R_lo - b) * 0.25
    else:
        raise InfeasibleBracket("could not find a lower bracket for the right endpoint")
    for _ in range(80):
        _, e = targets(L, R_hi, probe_tol)
        if e > 0.0:
            break
        R_hi *= 2.0
    else:
        raise InfeasibleBracket("could not find an upper bracket for the right endpoint")
    for _ in range(80):
        e, _ = targets(L_hi, R, probe_tol)
        if e > 0.0:
            break
        if a - L_hi <= 1e-12 * max(1.0, abs(a)):
            raise InfeasibleBracket(
                "x_{-1} cannot be brought above a by any left endpoint"
            )
        L_hi = a + (L_hi - a) * 0.25
    else:
        raise InfeasibleBracket("could not find an upper bracket for the left endpoint")
    for _ in range(80):
        e, _ = targets(L_lo, R, probe_tol)
        if e < 0.0:
            break
        L_lo *= 2.0
    else:
        raise InfeasibleBracket("could not find a lower bracket for the left endpoint")

    outer = 0
    tol = opts.position_tol
    eL, eR = targets(L, R, probe_tol)
    while outer < opts.max_outer_iters:
        if abs(eL) <= tol and abs(eR) <= tol:
            break
        if abs(eR) >= abs(eL):
            if eR > 0.0:
                R_hi = R
            else:
                R_lo = R
            R = 0.5 * (R_lo + R_hi)
            if R_hi - R_lo < 1e-15 * max(1.0, abs(R)):
                R_lo, R_hi = R - 1.0, R + 1.0  # stale bracket; re-expand
        else:
            if eL > 0.0:
                L_hi = L
            else:
                L_lo = L
            L = 0.5 * (L_lo + L_hi)
            if L_hi - L_lo < 1e-15 * max(1.0, abs(L)):
                L_lo, L_hi = L - 1.0, L + 1.0
        # Tighten the inner tolerance as the targets converge.
        err = max(abs(eL), abs(eR))
        inner_tol = max(strict_tol, min(1e-8, 0.02 * err))
        eL, eR = targets(L, R, inner_tol)
        outer += 1

    converged = abs(eL) <= tol and abs(eR) <= tol
    positions = engine.relax(L, R, strict_tol)
    cfg = LineConfig.finite(positions)
    free = [i for i in range(1, 2 * n) if i != n]
    rep = residual_report(cfg, law, tolerance=min(opts.residual_tol * 1e-2, 1e-12))
    worst = max(abs(rep.rows[i].net) for i in free)
    stats = ZeroCenteredStats(
        outer_iters=outer,
        inner_sweeps=engine.sweeps_total,
        target_errors=(eL, eR),
        residual=worst,
        converged=converged and worst <= opts.residual_tol + rep.max_error_bound,
    )
    if not stats.converged:
        if engine.last_flags:
            # A free particle sat parked against an endpoint through the
            # final sweep: its net force has constant sign on its whole
            # interval, so no interior equilibrium meets these targets.
            raise InfeasibleBracket(
                "no interior equilibrium: a free particle is pushed against "
                f"an endpoint (residual {worst:.3e})"
            )
        raise NoConvergence(
            f"zero-centered shooting: target errors ({eL:.3e}, {eR:.3e}), "
            f"residual {worst:.3e}",
            last=cfg,
            residual=worst,
            iterations=outer,
        )
    return cfg, stats


# ---------------------------------------------------------------------------
# Right extension
# ---------------------------------------------------------------------------


def _as_left_config(s_minus: LineConfig | Sequence[float]) -> LineConfig:
    if isinstance(s_minus, LineConfig):
        cfg = s_minus
    else:
        cfg = LineConfig.finite(list(s_minus))
    if not cfg.right_tail.is_none:
        raise InvalidInput("the left configuration must not have a right tail")
    if cfg.window[-1] >= 0.0:
        raise InvalidInput("left configuration positions must all be negative")
    return cfg


_TAIL_JACOBIAN_TERMS = 400


def _extension_nets(
    law: ForceLaw,
    context: np.ndarray,
    left_tail: TailModel,
    x0: float,
    ys: Sequence[float],
    anchor: float,
    gap_a: float,
    force_tol: float,
) -> np.ndarray:
    """Rightward net force at x0 and at each extension particle.

    The pinned particle x0 must also end up in equilibrium; the extra
    equation is matched by the extra unknown `anchor`, the start of the
    attached arithmetic continuation (the far pin the construction slides
    to bring the first particle to the requested spot).
    """
    m = len(ys)
    nets = np.empty(m + 1)
    base = np.concatenate([context, [x0], ys])
    nfix = len(context)
    tail = TailModel.arithmetic(anchor, gap_a)
    for i in range(m + 1):
        others = np.delete(base, nfix + i)
        nets[i] = _net_with_tails(law, base[nfix + i], others, left_tail, tail, force_tol)
    return nets


def _extension_jacobian(
    law: ForceLaw,
    context: np.ndarray,
    left_tail: TailModel,
    x0: float,
    ys: np.ndarray,
    anchor: float,
    gap_a: float,
) -> np.ndarray:
    """d(net_r)/d(unknown_c) for the extension system.

    Rows: equations at x0, y_1..y_m.  Columns: y_1..y_m, then the
    continuation anchor.  Tail derivative sums are truncated; the Jacobian
    only steers Newton and the final residual check does not rely on it.
    """
    m = len(ys)
    pts = np.concatenate([[x0], ys])
    J = np.zeros((m + 1, m + 1))
    diff = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(diff, 1.0)
    fp = law.force_derivative_array(diff)
    np.fill_diagonal(fp, 0.0)
    J[:, :m] = -fp[:, 1:]
    tail_pos = anchor + gap_a * np.arange(_TAIL_JACOBIAN_TERMS)
    ltail_pos = np.array(left_tail.positions("left", _TAIL_JACOBIAN_TERMS))
    for r in range(1, m + 1):
        diag = fp[r].sum()
        diag += float(np.sum(law.force_derivative_array(np.abs(pts[r] - context))))
        if ltail_pos.size:
            diag += float(np.sum(law.force_derivative_array(pts[r] - ltail_pos)))
        diag += float(np.sum(law.force_derivative_array(tail_pos - pts[r])))
        J[r, r - 1] = diag
    J[:, m] = -np.array([
        float(np.sum(law.force_derivative_array(tail_pos - p))) for p in pts
    ])
    return J


def _relax_extension(
    law: ForceLaw,
    context: np.ndarray,
    left_tail: TailModel,
    x0: float,
    ys: list[float],
    anchor_box: list[float],
    gap_a: float,
    opts: SolverOptions,
) -> int:
    """Drive the extension system to equilibrium; returns passes used.

    `ys` and `anchor_box` (a single-element list holding the continuation
    anchor) are mutated.  Ordered bisection sweeps rough the configuration
    in, then Newton on the full coupled system finishes (plain sweeps
    converge too slowly on chains of more than a dozen particles).
    """
    m = len(ys)
    force_tol = min(opts.residual_tol * 1e-2, 1e-12)
    exit_tol = opts.residual_tol * 0.5
    sweep_exit = max(1e-6, exit_tol)
    passes = 0

    def max_net() -> float:
        return float(np.max(np.abs(_extension_nets(
            law, context, left_tail, x0, ys, anchor_box[0], gap_a, force_tol
        ))))

    def sweep_once() -> None:
        base = list(context) + [x0] + ys
        off = len(context) + 1
        tail = TailModel.arithmetic(anchor_box[0], gap_a)
        for idx in range(m):
            others = np.array(base[:off + idx] + base[off + idx + 1 :])
            net = lambda x: _net_with_tails(law, x, others, left_tail, tail, force_tol)
            lo = base[off + idx - 1]
            hi = base[off + idx + 1] if idx < m - 1 else anchor_box[0]
            new_x, _ = _bisect_place(net, lo, hi, opts.placement_tol())
            ys[idx] = new_x
            base[off + idx] = new_x
        # Slide the anchor to bring x0 toward equilibrium: its rightward
        # net is strictly increasing in the anchor position.
        others = np.array(base[:off - 1] + base[off:])
        net0 = lambda t: _net_with_tails(
            law, x0, others, left_tail, TailModel.arithmetic(t, gap_a), force_tol
        )
        lo = ys[-1] + 0.05 * gap_a
        hi = ys[-1] + 50.0 * gap_a
        if net0(lo) >= 0.0:
            anchor_box[0] = lo
        elif net0(hi) <= 0.0:
            anchor_box[0] = hi
        else:
            anchor_box[0], _ = _bisect_place(lambda t: -net0(t), lo, hi, opts.placement_tol())

    for round_ in range(4):
        budget = 40 if round_ == 0 else 10
        for _ in range(budget):
            if passes >= opts.max_sweeps:
                break
            sweep_once()
            passes += 1
            if max_net() <= sweep_exit:
                break
        worst = max_net()
        if worst <= exit_tol:
            return passes
        # Newton on the coupled system (unknowns: positions + anchor).
        for _ in range(60):
            if passes >= opts.max_sweeps:
                break
            y = np.array(ys)
            anchor = anchor_box[0]
            nets = _extension_nets(
                law, context, left_tail, x0, ys, anchor, gap_a, force_tol
            )
            J = _extension_jacobian(law, context, left_tail, x0, y, anchor, gap_a)
            try:
                delta = np.linalg.solve(J, -nets)
            except np.linalg.LinAlgError:
                break
            step = 1.0
            improved = False
            for _ in range(40):
                trial = y + step * delta[:m]
                trial_anchor = anchor + step * delta[m]
                if (
                    trial[0] > x0
                    and np.all(np.diff(trial) > 0.0)
                    and trial_anchor > trial[-1]
                ):
                    ys[:] = trial.tolist()
                    anchor_box[0] = trial_anchor
                    trial_worst = max_net()
                    if trial_worst < worst:
                        worst = trial_worst
                        improved = True
                        break
                    ys[:] = y.tolist()
                    anchor_box[0] = anchor
                step *= 0.5
            passes += 1
            if not improved:
                break
            if worst <= exit_tol:
                return passes
        if worst <= exit_tol:
            return passes
    raise NoConvergence(
        f"extension relaxation did not reach {exit_tol:.3e} "
        f"within {passes} passes",
        last=tuple(ys),
        residual=max_net(),
        iterations=passes,
    )


def extend_right(
    s_minus: LineConfig | Sequence[float],
    x0: float,
    law: ForceLaw,
    opts: SolverOptions | None = None,
) -> tuple[tuple[float, ...], ExtendStats]:
    """Extend a negative configuration to the right of a pinned first
    particle at x0, so that the extension (x0 included) is in equilibrium.

    Beyond the solved particles an arithmetic continuation with the gap
    halfway between the left configuration's gap bounds is attached; its
    start is a solved unknown matching the equilibrium equation at x0.
    The truncation level (number of solved particles) grows until two
    successive levels agree within position_tol; the last guard_band
    output particles are not residual-certified.  Output gaps must lie in
    [min(c, x0 - x_last), max(C, x0 - x_last)]; a violation raises
    PostconditionViolation.
    """
    opts = opts or SolverOptions()
    cfg = _as_left_config(s_minus)
    x0 = float(x0)
    if x0 <= cfg.window[-1]:
        raise InvalidInput("x0 must lie to the right of the left configuration")
    N = opts.extension_points
    K = opts.guard_band
    if N < 1 or K < 0 or N <= K:
        raise InvalidInput("need extension_points > guard_band >= 0")
    b_gap, B_gap = cfg.c, cfg.C
    gap_a = 0.5 * (b_gap + B_gap)
    context = np.array(cfg.window, dtype=float)

    prev: list[float] | None = None
    ys: list[float] = []
    anchor_box = [0.0]
    sweeps_total = 0
    disagreement = math.inf
    levels_used = 0
    for level in opts.truncation_levels:
        m = N + K * level
        if prev is None:
            ys = [x0 + gap_a * (j + 1) for j in range(m)]
        else:
            ys = list(prev) + [prev[-1] + gap_a * (j + 1) for j in range(m - len(prev))]
        anchor_box[0] = ys[-1] + gap_a
        sweeps_total += _relax_extension(
            law, context, cfg.left_tail, x0, ys, anchor_box, gap_a, opts
        )
        levels_used += 1
        if prev is not None:
            disagreement = max(
                abs(p - y) for p, y in zip(prev[: N + 1], ys[: N + 1])
            )
            if disagreement <= opts.position_tol:
                break
        prev = list(ys)
    else:
        if len(opts.truncation_levels) > 1 and disagreement > opts.position_tol:
            raise NoConvergence(
                f"truncation levels disagree by {disagreement:.3e} "
                f"(position_tol {opts.position_tol:.3e})",
                last=tuple([x0] + ys[:N]),
                residual=disagreement,
                iterations=levels_used,
            )

    out = [x0] + ys[:N]
    # Assemble the full configuration for independent verification.
    window = list(cfg.window) + [x0] + ys
    right_tail = TailModel.arithmetic(anchor_box[0], gap_a)
    diffs = [q - p for p, q in zip(window, window[1:])]
    all_gaps = (
        diffs
        + [gap_a, anchor_box[0] - ys[-1]]
        + list(cfg.left_tail.gap_values() or [min(diffs)])
    )
    full = LineConfig(
        tuple(window),
        cfg.left_tail,
        right_tail,
        min(all_gaps),
        max(all_gaps),
    )
    rep = residual_report(full, law, tolerance=min(opts.residual_tol * 1e-2, 1e-12))
    offset = len(cfg.window)
    certified = range(offset, offset + (N - K) + 1)
    worst = max(abs(rep.rows[i].net) for i in certified)
    if worst > opts.residual_tol + rep.max_error_bound:
        raise NoConvergence(
            f"extension residual {worst:.3e} above {opts.residual_tol:.3e}",
            last=tuple(out),
            residual=worst,
            iterations=levels_used,
        )
    lo_bound = min(b_gap, x0 - cfg.window[-1])
    hi_bound = max(B_gap, x0 - cfg.window[-1])
    slack = 1e-9 * max(1.0, hi_bound)
    out_gaps = [q - p for p, q in zip(out, out[1:])]
    for g in out_gaps:
        if g < lo_bound - slack or g > hi_bound + slack:
            raise PostconditionViolation(
                f"extension gap {g!r} outside [{lo_bound!r}, {hi_bound!r}]"
            )

    clusters: tuple[tuple[float, ...], ...] = ()
    if opts.multi_start > 1:
        rng = np.random.default_rng(opts.rng_seed)
        found: list[list[float]] = []
        m = N + K * opts.truncation_levels[-1]
        for _ in range(opts.multi_start):
            gs = rng.uniform(b_gap, B_gap, size=m) if B_gap > b_gap else np.full(m, gap_a)
            trial = list(x0 + np.cumsum(gs))
            box = [trial[-1] + gap_a]
            try:
                _relax_extension(
                    law, context, cfg.left_tail, x0, trial, box, gap_a, opts
                )
            except NoConvergence:
                continue
            found.append([x0] + trial[:N])
        radius = max(opts.position_tol * 10.0, 1e-9)
        centers: list[list[float]] = []
        for sol in found:
            for ctr in centers:
                if max(abs(p - q) for p, q in zip(sol, ctr)) <= radius:
                    break
            else:
                centers.append(sol)
        clusters = tuple(tuple(cc) for cc in centers)

    stats = ExtendStats(
        levels_used=levels_used,
        level_disagreement=disagreement if levels_used > 1 else 0.0,
        sweeps=sweeps_total,
        continuation_gap=gap_a,
        residual=worst,
        converged=True,
        config=full,
        clusters=clusters,
    )
    return tuple(out), stats

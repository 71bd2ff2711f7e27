"""Zeros of the denominator: single solves, grid seeding, field continuation
and detection of stabilization (deep minima of the decay width).
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy import optimize

from .errors import (
    BranchLost,
    DomainError,
    EmptyWindow,
    IllConditioned,
    LeftDomain,
    NoConvergence,
    NotDecaying,
    NumericalError,
)
from .resolvent_kernel import DEFAULT_CONTOUR, ContourSpec, _j_derivative, _j_integral, evaluate, evaluate_grid
from .scaling import ScaledParams, landau_level_scaled

__all__ = [
    "RootResult",
    "LOOSE_CONDITION_ERROR",
    "WIDTH_REL_ACCURACY",
    "TrajectoryPoint",
    "Trajectory",
    "StabilizationEvent",
    "newton_solve",
    "solve_zero_field",
    "seed_window",
    "seed_candidates",
    "select_branch_seed",
    "field_nodes",
    "default_field_nodes",
    "trace_trajectory",
    "seed_ground",
    "trace_branch",
    "detect_stabilization",
    "lifetime_curve",
]

log = logging.getLogger(__name__)

RESOLUTION_FLOOR = {"double": 1e-13, "extended": 1e-28}

# conditioning bound for intermediate Newton iterates; only the final root is
# held to the contour's own bound
LOOSE_CONDITION_ERROR = 1e-8

_ULP = np.finfo(float).eps

# a wide resonance only needs its width to this relative accuracy, so the
# absolute bound above is waived when the pole is already this well known
WIDTH_REL_ACCURACY = 1e-8


@dataclass
class RootResult:
    """A converged zero of the denominator.

    ``uncertainty`` is the estimated absolute error of ``pole`` (quadrature
    plus rounding error of D divided by ``|dD/dE|``).
    """

    pole: complex
    residual: float
    iterations: int
    derivative: complex
    uncertainty: float
    precision: str = "double"
    method: str = "newton"
    contour: dict = field(default_factory=dict)
    rounding: float = 0.0

    @property
    def floor(self):
        return max(RESOLUTION_FLOOR[self.precision], self.uncertainty)

    @property
    def below_resolution(self):
        """True when ``|Im pole|`` cannot be told apart from zero."""
        return abs(self.pole.imag) < self.floor

    @property
    def im_resolved(self):
        """Imaginary part, clamped to ``-floor`` when below resolution."""
        if self.below_resolution:
            return -self.floor
        return self.pole.imag


@dataclass
class TrajectoryPoint:
    efield: float
    root: RootResult

    @property
    def pole(self):
        return self.root.pole


@dataclass
class Trajectory:
    """Poles along a field sweep, stored in increasing field order."""

    binding_tilde: float
    points: list
    branch_label: str = ""
    direction: int = 1

    @property
    def efields(self):
        return np.array([p.efield for p in self.points])

    @property
    def poles(self):
        return np.array([p.pole for p in self.points], dtype=complex)

    def __len__(self):
        return len(self.points)


@dataclass
class StabilizationEvent:
    efield_star: float
    pole_star: complex
    tau_scaled: float
    dip_depth_decades: float
    below_resolution: bool = False


# ----------------------------------------------------------------------------
# single roots


def _in_domain(e):
    return math.isfinite(e.real) and math.isfinite(e.imag) and 1e-8 < abs(e) < 1e3 and e.imag < 1.0


def _evaluate(e, params, contour, escalate):
    """``evaluate`` with automatic switch to extended precision when needed."""
    try:
        return evaluate(e, params, contour), contour
    except IllConditioned:
        if not escalate or contour.precision == "extended":
            raise
        ext = contour.replace(precision="extended")
        log.debug("switching to extended precision at E=%s F=%s", e, params.efield_tilde)
        return evaluate(e, params, ext), ext


def _muller(func, x0, x1, x2, tol, max_iter):
    f0, f1, f2 = func(x0), func(x1), func(x2)
    for it in range(1, max_iter + 1):
        h1, h2 = x1 - x0, x2 - x1
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(complex(b * b - 4 * f2 * a))
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0:
            raise NoConvergence("Muller iteration stalled")
        dx = -2 * f2 / den
        x0, x1, x2 = x1, x2, x2 + dx
        f0, f1, f2 = f1, f2, func(x2)
        if abs(dx) < tol(x2):
            return x2, it
    raise NoConvergence("Muller iteration did not converge")


def newton_solve(
    params,
    contour=DEFAULT_CONTOUR,
    guess=None,
    *,
    step_abs=1e-13,
    step_rel=1e-12,
    residual_tol=1e-11,
    max_iter=50,
    max_halvings=8,
    escalate=True,
):
    """Damped Newton iteration for ``D(E) = 0`` near ``guess``.

    The step is halved (up to ``max_halvings`` times) while ``|D|`` does not
    decrease; if that fails, Muller's method takes over from the last three
    iterates. At zero field the guess is ignored and the real root below the
    first Landau level is returned (see :func:`solve_zero_field`).

    With ``escalate`` the iterates are computed under the looser conditioning
    bound ``LOOSE_CONDITION_ERROR`` and only the converged root has to meet
    ``contour.max_condition_error``; if it does not, the root is polished in
    extended precision. Without ``escalate`` every evaluation must meet the
    contour's bound. The residual test is relaxed to ``4 ulp |E| |dD/dE|``
    where that exceeds ``residual_tol``, the best a double-precision pole can
    reach on steep parts of a branch.
    """
    if params.efield_tilde == 0:
        return solve_zero_field(params.binding_tilde)
    if guess is None:
        raise DomainError("a starting guess is required for nonzero field")
    e = complex(guess)
    if not _in_domain(e):
        raise LeftDomain(f"initial guess {e} outside the search domain")
    opts = dict(step_abs=step_abs, step_rel=step_rel, residual_tol=residual_tol, max_iter=max_iter, max_halvings=max_halvings)
    if escalate and contour.precision == "double" and contour.max_condition_error < LOOSE_CONDITION_ERROR:
        loose = contour.replace(max_condition_error=LOOSE_CONDITION_ERROR)
        root = _iterate(params, loose, e, True, True, **opts)
        if root.precision == "extended":
            root.contour = contour.replace(precision="extended").summary()
            return root
        if root.rounding <= contour.max_condition_error or root.uncertainty <= WIDTH_REL_ACCURACY * abs(root.pole.imag):
            root.contour = contour.summary()
            return root
        strict = contour.replace(precision="extended")
        log.debug("polishing root %s in extended precision (F=%s)", root.pole, params.efield_tilde)
        polished = newton_solve(params, strict, root.pole, escalate=False, **opts)
        polished.iterations += root.iterations
        return polished

    return _iterate(params, contour, e, escalate, False, **opts)


def _iterate(params, contour, e, escalate, noise_stop, *, step_abs, step_rel, residual_tol, max_iter, max_halvings):
    """Newton loop behind :func:`newton_solve`.

    With ``noise_stop`` the iteration also ends once step and residual reach
    the rounding noise of the evaluation.
    """
    def tol(z):
        return step_abs + step_rel * abs(z)

    def floor(z, dz):
        # smallest residual a double-precision pole can reach
        return max(residual_tol, 4 * _ULP * abs(z) * abs(dz))

    (d, dd, kv), used = _evaluate(e, params, contour, escalate)
    history = [e]
    for it in range(1, max_iter + 1):
        if dd == 0 or not np.isfinite(dd):
            break
        step = d / dd
        if abs(step) < 10 * tol(e):
            # tiny steps are taken undamped: |D| is at the noise level here
            e_new = e - step
            if not _in_domain(e_new):
                raise LeftDomain(f"Newton iterate {e_new} left the search domain")
            (d_new, dd_new, kv_new), used = _evaluate(e_new, params, used, escalate)
            taken = abs(step)
        else:
            t = 1.0
            for _ in range(max_halvings + 1):
                e_new = e - t * step
                if _in_domain(e_new):
                    (d_new, dd_new, kv_new), used = _evaluate(e_new, params, used, escalate)
                    if abs(d_new) < abs(d):
                        break
                t *= 0.5
            else:
                if not _in_domain(e - step):
                    raise LeftDomain(f"Newton iterate {e - step} left the search domain")
                break
            taken = t * abs(step)
        e, d, dd, kv = e_new, d_new, dd_new, kv_new
        history.append(e)
        if taken < tol(e) and abs(d) <= floor(e, dd):
            return _root(e, d, dd, kv, it, used, "newton")
        if noise_stop:
            # converged as far as this precision allows; the caller polishes
            noise = 8 * (kv.error + kv.rounding)
            if abs(d) <= noise and taken <= max(tol(e), noise / abs(dd)):
                return _root(e, d, dd, kv, it, used, "newton")
    else:
        raise NoConvergence(f"Newton did not converge in {max_iter} iterations (|D|={abs(d):.2e})")

    # derivative stagnation or no descent: Muller from the last iterates
    if len(history) < 3:
        history = [e - 1e-3, e + 1e-3j, e]

    def func(z):
        if not _in_domain(z):
            raise LeftDomain(f"Muller iterate {z} left the search domain")
        return _evaluate(z, params, used, escalate)[0][0]

    root, n_mul = _muller(func, history[-3], history[-2], history[-1], tol, max_iter)
    (d, dd, kv), used = _evaluate(root, params, used, escalate)
    if abs(d) > floor(root, dd):
        raise NoConvergence(f"Muller fallback ended with |D|={abs(d):.2e}")
    return _root(root, d, dd, kv, len(history) + n_mul, used, "muller")


def _root(e, d, dd, kv, iterations, contour, method):
    err = (kv.error + kv.rounding) if kv is not None else 1e-15
    return RootResult(
        pole=complex(e),
        residual=float(abs(d)),
        iterations=iterations,
        derivative=complex(dd),
        uncertainty=float(err / abs(dd)) if dd else math.inf,
        precision=contour.precision,
        method=method,
        contour=contour.summary(),
        rounding=float(kv.rounding) if kv is not None else 0.0,
    )


def solve_zero_field(binding_tilde):
    """Real root below the first Landau level at zero electric field.

    Bracketing (Brent) followed by one Newton polish on
    ``ln(-E_B) + J(E)``, where ``J`` is the rotated zero-field integral
    without its logarithm.
    """

    def d0(x):
        return math.log(-binding_tilde) + _j_integral(x)[0]

    lo = min(binding_tilde, -1.0) - 1.0
    while d0(lo) > 0:
        lo *= 2
    gap = 1e-3
    while d0(1 - gap) < 0:
        gap *= 0.1
        if gap < 1e-12:
            raise NoConvergence("could not bracket the zero-field root")
    x, res = optimize.brentq(d0, lo, 1 - gap, xtol=1e-15, rtol=4 * np.finfo(float).eps, full_output=True)
    dx = _j_derivative(x)
    x -= d0(x) / dx
    resid = abs(d0(x))
    return RootResult(
        pole=complex(x, 0.0),
        residual=resid,
        iterations=res.iterations + 1,
        derivative=complex(dx),
        uncertainty=1e-15 * max(1.0, abs(x)),
        method="bisection",
    )


# ----------------------------------------------------------------------------
# seeding


def seed_window(landau_index, efield=None, depth=DEFAULT_CONTOUR.depth):
    """Default seeding rectangle ``(re_lo, re_hi, im_lo, im_hi)`` near level ``2n+1``.

    The lower edge is raised at small fields where the contour integral
    cannot be evaluated far below the real axis (cancellation grows like
    ``exp(Im(E)^2 / (4 F^2 tanh h))``).
    """
    center = landau_level_scaled(landau_index)
    im_lo = -0.3
    if efield is not None and efield > 0:
        im_lo = max(im_lo, -4.0 * efield * math.sqrt(math.tanh(depth)))
    return (center - 0.6, center + 0.3, im_lo, 0.0)


def seed_candidates(params, contour=DEFAULT_CONTOUR, window=None, grid=(60, 30), landau_index=2, chunk=64):
    """Local minima of ``|D|`` on a rectangular grid, best first.

    Grid points on the upper edge (the real axis) count, since long-lived
    resonances sit within a grid spacing of it. Ties in ``|D|`` go to the
    point nearer the window center.
    """
    if params.efield_tilde <= 0:
        raise DomainError("seeding needs a nonzero field")
    if window is None:
        window = seed_window(landau_index, params.efield_tilde, contour.depth)
    re_lo, re_hi, im_lo, im_hi = window
    nx, ny = grid
    if not (re_hi > re_lo and im_hi > im_lo) or nx < 3 or ny < 2:
        raise EmptyWindow(f"degenerate seeding window {window}")
    re = np.linspace(re_lo, re_hi, nx)
    im = np.linspace(im_lo, im_hi, ny)
    energies = re[None, :] + 1j * im[:, None]
    relaxed = contour.replace(max_condition_error=1e-3)
    flat = energies.ravel()
    vals = np.empty(flat.size)
    for i in range(0, flat.size, chunk):
        vals[i : i + chunk] = np.abs(evaluate_grid(flat[i : i + chunk], params, relaxed))
    mag = vals.reshape(energies.shape)

    padded = np.pad(mag, 1, constant_values=np.inf)
    neigh = np.stack(
        [padded[1 + di : 1 + di + ny, 1 + dj : 1 + dj + nx] for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj]
    )
    is_min = np.all(mag[None] < neigh, axis=0)
    is_min[:, 0] = is_min[:, -1] = False
    is_min[0, :] = False
    iy, ix = np.nonzero(is_min)
    if iy.size == 0:
        raise EmptyWindow(f"no interior local minimum of |D| in {window}")
    center = 0.5 * (re_lo + re_hi) + 0.5j * (im_lo + im_hi)
    cands = energies[iy, ix]
    order = np.lexsort((np.abs(cands - center), mag[iy, ix]))
    return [complex(c) for c in cands[order]]


def select_branch_seed(params, contour=DEFAULT_CONTOUR, window=None, landau_index=2, grid=(60, 30)):
    """Converged pole of the longest-lived resonance seeded in ``window``.

    Every grid candidate is polished with :func:`newton_solve`; duplicates
    are merged and the pole with the smallest ``|Im E|`` inside the window
    wins. Candidates that fail to converge are skipped.
    """
    if window is None:
        window = seed_window(landau_index, params.efield_tilde, contour.depth)
    re_lo, re_hi, im_lo, _ = window
    roots = []
    for guess in seed_candidates(params, contour, window, grid, landau_index):
        try:
            root = newton_solve(params, contour, guess)
        except (NumericalError, DomainError) as exc:
            log.debug("candidate %s dropped: %s", guess, exc)
            continue
        z = root.pole
        inside = re_lo <= z.real <= re_hi and im_lo - 1e-9 <= z.imag <= 1e-12
        if inside and all(abs(z - other.pole) > 1e-8 * (1 + abs(z)) for other in roots):
            roots.append(root)
    if not roots:
        raise EmptyWindow(f"no candidate in {window} converged to a pole inside it")
    return min(roots, key=lambda r: abs(r.pole.imag))


# ----------------------------------------------------------------------------
# continuation


def field_nodes(start, stop, max_step):
    """Equally spaced nodes from ``start`` to ``stop`` with spacing <= ``max_step``.

    The node set of a reversed sweep is the same (in reverse order).
    """
    lo, hi = min(start, stop), max(start, stop)
    n = max(1, math.ceil((hi - lo) / max_step - 1e-9))
    nodes = np.linspace(lo, hi, n + 1)
    return nodes if stop >= start else nodes[::-1]


def default_field_nodes(start, stop, fine=0.002, coarse=0.02, switch=0.5):
    """Nodes with spacing ``fine`` below ``switch`` and ``coarse`` above."""
    lo, hi = min(start, stop), max(start, stop)
    parts = []
    if lo < switch:
        parts.append(field_nodes(lo, min(hi, switch), fine))
    if hi > switch:
        seg = field_nodes(max(lo, switch), hi, coarse)
        parts.append(seg[1:] if parts else seg)
    nodes = np.concatenate(parts)
    return nodes if stop >= start else nodes[::-1]


def trace_trajectory(
    binding_tilde,
    field_grid,
    seed,
    contour=DEFAULT_CONTOUR,
    *,
    max_jump=0.2,
    min_step=1e-5,
    branch_label="",
    escalate=True,
    newton_opts=None,
):
    """Follow one pole across a field sweep.

    Parameters
    ----------
    binding_tilde : float
    field_grid : tuple or array
        ``(start, stop, max_step)`` or an explicit sequence of field values;
        the first value must be the field at which ``seed`` was solved.
    seed : RootResult or complex
    contour : ContourSpec

    The predictor extrapolates linearly from the last two accepted poles;
    the corrector is :func:`newton_solve`. A step is halved when the solve
    fails, the pole moves by more than ``max_jump``, or the corrector lands
    far from the prediction. All grid nodes are visited; extra points are
    inserted where steps were halved.

    Raises
    ------
    BranchLost
        When the step falls below ``min_step``; ``exc.partial`` holds the
        trajectory up to that point.
    """
    if isinstance(field_grid, tuple) and len(field_grid) == 3:
        nodes = field_nodes(*field_grid)
    else:
        nodes = np.asarray(field_grid, dtype=float)
    if nodes.size < 2:
        raise DomainError("field grid needs at least two values")
    direction = 1 if nodes[-1] > nodes[0] else -1
    opts = dict(newton_opts or {})
    opts.setdefault("escalate", escalate)
    base_step = float(np.max(np.abs(np.diff(nodes))))

    if not isinstance(seed, RootResult):
        seed = newton_solve(ScaledParams(float(nodes[0]), binding_tilde), contour, seed, **opts)
    points = [TrajectoryPoint(float(nodes[0]), seed)]
    f_cur, e_cur = float(nodes[0]), seed.pole
    prev = None  # (field, pole) before the current one
    step = base_step

    def make_traj():
        pts = sorted(points, key=lambda p: p.efield)
        return Trajectory(binding_tilde, pts, branch_label, direction)

    for target in nodes[1:]:
        target = float(target)
        while abs(target - f_cur) > 1e-13:
            h = min(step, abs(target - f_cur))
            f_try = target if abs(target - f_cur) - h < 1e-13 else f_cur + direction * h
            if prev is not None:
                slope = (e_cur - prev[1]) / (f_cur - prev[0])
                e_pred = e_cur + slope * (f_try - f_cur)
            else:
                e_pred = e_cur
            try:
                root = newton_solve(ScaledParams(f_try, binding_tilde), contour, e_pred, **opts)
                move = abs(root.pole - e_cur)
                dev = abs(root.pole - e_pred)
                if move > max_jump:
                    raise NoConvergence(f"pole jumped by {move:.3g}")
                if prev is not None and dev > max(0.5 * abs(e_pred - e_cur), 1e-6 * (1 + abs(e_cur))):
                    raise NoConvergence(f"corrector strayed {dev:.3g} from the predictor")
            except (NumericalError, DomainError) as exc:
                step *= 0.5
                log.debug("F=%.6g: %s; step -> %.3g", f_try, exc, step)
                if step < min_step:
                    raise BranchLost(f"continuation lost at F={f_cur:.6g}: {exc}", make_traj()) from exc
                continue
            prev = (f_cur, e_cur)
            f_cur, e_cur = f_try, root.pole
            points.append(TrajectoryPoint(f_try, root))
            step = min(base_step, 2 * step)
    return make_traj()


def seed_ground(params, contour=DEFAULT_CONTOUR):
    """Pole of the branch that continues the zero-field bound state."""
    zero = solve_zero_field(params.binding_tilde)
    if params.efield_tilde == 0:
        return zero
    return newton_solve(params, contour, zero.pole)


SEED_MIN_FIELD = 0.05


def trace_branch(
    binding_tilde,
    start,
    stop,
    landau_index=None,
    contour=DEFAULT_CONTOUR,
    *,
    max_step=None,
    seed=None,
    seed_field=None,
    **opts,
):
    """Seed one branch and follow it over ``[start, stop]``.

    The seed is placed at ``seed_field`` (default: the sweep node nearest to
    ``max(start, 0.05)``; grid seeding gets expensive at smaller fields) and
    the branch is continued in both directions from there. ``landau_index``
    ``None`` or 0 selects the branch descending from the bound state;
    ``n >= 1`` seeds near the Landau level ``2n+1``. An explicit ``seed``
    guess skips the grid search.

    Returns
    -------
    Trajectory
        Points in increasing field order. On :class:`BranchLost` the
        exception's ``partial`` holds everything traced so far.
    """
    lo, hi = min(start, stop), max(start, stop)
    if max_step is None:
        nodes = default_field_nodes(lo, hi)
    else:
        nodes = field_nodes(lo, hi, max_step)
    target = max(lo, SEED_MIN_FIELD) if seed_field is None else seed_field
    i0 = int(np.argmin(np.abs(nodes - target)))
    f0 = float(nodes[i0])
    params = ScaledParams(f0, binding_tilde)
    if seed is not None:
        root = newton_solve(params, contour, seed)
    elif not landau_index:
        root = seed_ground(params, contour)
    else:
        root = select_branch_seed(params, contour, landau_index=landau_index)
    label = f"L{landau_index or 0}"

    parts = []
    lost = None
    for seg in (nodes[i0:], nodes[: i0 + 1][::-1]):
        if seg.size < 2:
            continue
        try:
            parts.append(trace_trajectory(binding_tilde, seg, root, contour, branch_label=label, **opts))
        except BranchLost as exc:
            lost = exc
            if exc.partial is not None:
                parts.append(exc.partial)
    points = {}
    for part in parts:
        for p in part.points:
            points.setdefault(p.efield, p)
    if not points:
        points[f0] = TrajectoryPoint(f0, root)
    traj = Trajectory(binding_tilde, [points[f] for f in sorted(points)], label, 1)
    if lost is not None:
        raise BranchLost(str(lost), traj) from lost
    return traj


# ----------------------------------------------------------------------------
# stabilization


def _log_width(traj):
    vals = []
    for p in traj.points:
        vals.append(math.log10(max(abs(p.pole.imag), p.root.floor)))
    return np.array(vals)


def detect_stabilization(traj, contour=DEFAULT_CONTOUR, min_depth_decades=2.0, refine=True, f_tol=1e-4):
    """Interior minima of ``|Im E|`` at least ``min_depth_decades`` below both
    neighbouring maxima of ``log10 |Im E|``.

    With ``refine`` the field of each minimum is located by bounded Brent
    minimization of ``|Im E(F)|`` with a Newton solve per trial field.
    """
    if len(traj) < 5:
        return []
    y = _log_width(traj)
    fs = traj.efields
    events = []
    n = len(y)
    for i in range(1, n - 1):
        if not (y[i] <= y[i - 1] and y[i] <= y[i + 1] and (y[i] < y[i - 1] or y[i] < y[i + 1])):
            continue
        left = i
        while left > 0 and y[left - 1] >= y[left]:
            left -= 1
        right = i
        while right < n - 1 and y[right + 1] >= y[right]:
            right += 1
        if left == i or right == i:
            continue
        depth = min(y[left], y[right]) - y[i]
        if depth < min_depth_decades:
            continue
        # skip the second point of a flat-bottomed dip
        if events and events[-1][0] >= left and y[i] == y[events[-1][1]]:
            continue
        events.append((left, i, right, depth))

    out = []
    for left, i, right, depth in events:
        root = traj.points[i].root
        f_star = fs[i]
        if refine:
            f_star, root = _refine_minimum(traj, i, contour, f_tol)
        im = root.im_resolved
        out.append(
            StabilizationEvent(
                efield_star=float(f_star),
                pole_star=complex(root.pole.real, im),
                tau_scaled=-1.0 / im,
                dip_depth_decades=float(max(y[left], y[right]) - math.log10(abs(im))),
                below_resolution=root.below_resolution,
            )
        )
    return out


def _refine_minimum(traj, i, contour, f_tol):
    pts = traj.points
    lo = pts[max(i - 1, 0)]
    hi = pts[min(i + 1, len(pts) - 1)]
    cache = {}

    def solve(f):
        # interpolate the guess between the bracketing points
        mid = pts[i]
        if f <= mid.efield:
            w2 = (f - lo.efield) / (mid.efield - lo.efield) if mid.efield != lo.efield else 1.0
            guess = lo.pole + w2 * (mid.pole - lo.pole)
        else:
            w2 = (f - mid.efield) / (hi.efield - mid.efield) if hi.efield != mid.efield else 0.0
            guess = mid.pole + w2 * (hi.pole - mid.pole)
        root = newton_solve(ScaledParams(float(f), traj.binding_tilde), contour, guess)
        cache[f] = root
        return abs(root.pole.imag)

    res = optimize.minimize_scalar(
        solve, bounds=(lo.efield, hi.efield), method="bounded", options={"xatol": 0.1 * f_tol}
    )
    f_star = float(res.x)
    root = cache.get(res.x) or newton_solve(ScaledParams(f_star, traj.binding_tilde), contour, pts[i].pole)
    best = pts[i].root
    if abs(best.pole.imag) < abs(root.pole.imag):
        return pts[i].efield, best
    return f_star, root


def lifetime_curve(traj):
    """``(efield, tau_scaled, re_e)`` arrays with ``tau = -1/Im E``.

    Points whose width is below resolution are reported at the resolution
    floor (a lower bound on the lifetime).
    """
    fs, taus, res = [], [], []
    for p in traj.points:
        r = p.root
        if r.pole.imag > 0 and not r.below_resolution:
            raise NotDecaying(f"Im E = {r.pole.imag:.3g} > 0 at F = {p.efield}")
        fs.append(p.efield)
        taus.append(-1.0 / r.im_resolved)
        res.append(r.pole.real)
    return np.array(fs), np.array(taus), np.array(res)

"""Panel-wise adaptive Gauss-Legendre quadrature for vector-valued integrands.

Each panel is integrated with a 16- and a 32-point Gauss-Legendre rule; the
difference is the (conservative) error estimate of the 32-point value.
Panels that miss their share of the tolerance are bisected.

Two arithmetic backends share the same code path: ``double`` (complex128
numpy arrays) and ``extended`` (numpy object arrays of mpmath numbers at 32
significant digits, about the precision of double-double arithmetic).
"""
from functools import lru_cache

import mpmath
import numpy as np

from .errors import NoConvergence

__all__ = ["Backend", "get_backend", "integrate_panels", "QuadResult"]

EXTENDED_DPS = 32
LOW_ORDER = 16
HIGH_ORDER = 32


class Backend:
    """Elementwise math for one arithmetic precision."""

    def __init__(self, name):
        self.name = name
        if name == "double":
            self.ctx = None
            self.eps = float(np.finfo(float).eps)
            self.exp = np.exp
            self.sin = np.sin
            self.cos = np.cos
            self.tan = np.tan
            self.sinh = np.sinh
            self.cosh = np.cosh
            self.tanh = np.tanh
            self.pi = np.pi
            self.dtype = complex
        elif name == "extended":
            ctx = mpmath.MPContext()
            ctx.dps = EXTENDED_DPS
            self.ctx = ctx
            self.eps = 10.0 ** (-EXTENDED_DPS)
            self.exp = np.frompyfunc(ctx.exp, 1, 1)
            self.sin = np.frompyfunc(ctx.sin, 1, 1)
            self.cos = np.frompyfunc(ctx.cos, 1, 1)
            self.tan = np.frompyfunc(ctx.tan, 1, 1)
            self.sinh = np.frompyfunc(ctx.sinh, 1, 1)
            self.cosh = np.frompyfunc(ctx.cosh, 1, 1)
            self.tanh = np.frompyfunc(ctx.tanh, 1, 1)
            self.pi = ctx.pi
            self.dtype = object
        else:
            raise ValueError(f"unknown precision {name!r}")
        self.rules = {n: self._gauss_legendre(n) for n in (LOW_ORDER, HIGH_ORDER)}

    def num(self, x):
        """Convert a python scalar (or array) to this backend's number type."""
        if self.ctx is None:
            return np.asarray(x, dtype=complex) if np.ndim(x) else complex(x)
        if np.ndim(x):
            return np.array([self.ctx.mpc(complex(v)) for v in np.ravel(x)], dtype=object).reshape(np.shape(x))
        return self.ctx.mpc(x) if not isinstance(x, (self.ctx.mpf, self.ctx.mpc)) else x

    def real(self, x):
        if self.ctx is None:
            return float(x)
        return self.ctx.mpf(x)

    def to_complex(self, x):
        if self.ctx is None:
            return np.asarray(x, dtype=complex)
        return np.array([complex(v) for v in np.ravel(x)], dtype=complex).reshape(np.shape(x))

    def abs(self, x):
        if self.ctx is None:
            return np.abs(x)
        return np.array([float(abs(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def expm1(self, z):
        """Complex ``exp(z) - 1`` without cancellation for small ``|z|``."""
        if self.ctx is None:
            z = np.asarray(z, dtype=complex)
            x, y = z.real, z.imag
            re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
            im = np.exp(x) * np.sin(y)
            return re + 1j * im
        return np.frompyfunc(self.ctx.expm1, 1, 1)(z)

    def _gauss_legendre(self, n):
        x, w = np.polynomial.legendre.leggauss(n)
        if self.ctx is None:
            return x, w
        ctx = self.ctx
        xs, ws = [], []
        for x0 in x:
            t = ctx.mpf(x0)
            for _ in range(4):
                p, dp = _legendre_and_derivative(ctx, n, t)
                t -= p / dp
            p, dp = _legendre_and_derivative(ctx, n, t)
            xs.append(t)
            ws.append(2 / ((1 - t * t) * dp * dp))
        return np.array(xs, dtype=object), np.array(ws, dtype=object)


def _legendre_and_derivative(ctx, n, t):
    p0, p1 = ctx.mpf(1), t
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
    dp = n * (t * p1 - p0) / (t * t - 1)
    return p1, dp


@lru_cache(maxsize=None)
def get_backend(name):
    return Backend(name)


def _panel_rules(func, mid, half, xs, w16, w32, backend, noise, max_block=2_000_000):
    """Both rules on every panel; evaluates ``func`` in blocks to bound memory."""
    out = []
    n = mid.size
    start = 0
    block = 1
    while start < n:
        stop = min(n, start + block)
        t = (mid[start:stop, None] + half[start:stop, None] * xs[None, :]).ravel()
        f = func(t)
        k = f.shape[0]
        if start == 0:
            # the first panel tells how many components there are
            block = max(1, max_block // (k * xs.size))
        f = f.reshape(k, stop - start, xs.size)
        hb = half[start:stop]
        q16 = np.sum(f[:, :, :LOW_ORDER] * w16, axis=2) * hb
        q32 = np.sum(f[:, :, LOW_ORDER:] * w32, axis=2) * hb
        err = backend.abs(q32 - q16)
        absf = backend.abs(f[:, :, LOW_ORDER:])
        wf = np.asarray(w32, dtype=float) * np.asarray(hb, dtype=float)[:, None]
        l1 = np.sum(absf * wf, axis=2)
        if noise is None:
            rel = np.full((1, 1, 1), 64 * backend.eps)
        else:
            rel = np.asarray(noise(t), dtype=float).reshape(-1, stop - start, xs.size)[:, :, LOW_ORDER:]
        terms = absf * rel * wf
        # worst case per panel, and the sum of squares for a statistical estimate
        out.append((q16, q32, err, l1, np.sum(terms, axis=2), np.sum(terms * terms, axis=2)))
        start = stop
    return tuple(np.concatenate(parts, axis=1) for parts in zip(*out))


class QuadResult:
    """Integral values, error estimates, L1 norms and rounding estimates per
    output component."""

    __slots__ = ("value", "error", "l1", "rounding", "n_eval", "n_panels")

    def __init__(self, value, error, l1, rounding, n_eval, n_panels):
        self.value = value
        self.error = error
        self.l1 = l1
        self.rounding = rounding
        self.n_eval = n_eval
        self.n_panels = n_panels


def integrate_panels(func, edges, backend, abs_tol, rel_tol, noise=None, max_rounds=30, max_panels=200_000):
    """Integrate ``func`` over consecutive real panels given by ``edges``.

    Parameters
    ----------
    func : callable
        ``func(t)`` for a 1-D array of parameter values returns an array of
        shape ``(k, len(t))`` in the backend's number type.
    edges : sequence of float
        Increasing panel boundaries; adjacent panels share an edge.
    backend : Backend
    abs_tol, rel_tol : float
        Target for the summed error estimate of every component.
    noise : callable, optional
        ``noise(t)`` gives the relative rounding error of each sample, shape
        ``(len(t),)`` or ``(k, len(t))``. Panels whose error estimate is
        within twice the propagated noise are accepted as they are. The
        default is ``64 * eps``.

    Returns
    -------
    QuadResult
        ``value`` is a length-``k`` array in the backend number type;
        ``error``, ``l1`` and ``rounding`` are float arrays.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    total_len = float(hi[-1] - lo[0])
    x16, w16 = backend.rules[LOW_ORDER]
    x32, w32 = backend.rules[HIGH_ORDER]
    xs = np.concatenate([x16, x32])

    value = None
    error = None
    l1 = None
    n_eval = 0
    n_done = 0
    for _ in range(max_rounds):
        if backend.ctx is None:
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
        else:
            mid = np.array([(backend.ctx.mpf(a) + backend.ctx.mpf(b)) / 2 for a, b in zip(lo, hi)], dtype=object)
            half = np.array([(backend.ctx.mpf(b) - backend.ctx.mpf(a)) / 2 for a, b in zip(lo, hi)], dtype=object)
        q16, q32, err, l1_panel, noise_panel, noise_sq = _panel_rules(func, mid, half, xs, w16, w32, backend, noise)
        n_eval += lo.size * xs.size
        k = q32.shape[0]

        if value is None:
            value = np.zeros(k, dtype=backend.dtype) if backend.ctx is None else np.array([backend.ctx.mpc(0)] * k, dtype=object)
            error = np.zeros(k)
            l1 = np.zeros(k)
            rounding_sq = np.zeros(k)
        scale = backend.abs(value + np.sum(q32, axis=1))
        tol = np.maximum(abs_tol, rel_tol * scale)
        share = (np.asarray(hi - lo, dtype=float) / total_len)[None, :]
        # no panel can do better than the rounding noise of its own samples
        ok = np.all(err <= np.maximum(tol[:, None] * share, 2 * noise_panel), axis=0)
        # panels below the float resolution of their position cannot be refined
        ok |= (hi - lo) <= 64 * np.finfo(float).eps * np.maximum(1.0, np.abs(hi))

        value = value + np.sum(q32[:, ok], axis=1)
        error += np.sum(err[:, ok], axis=1)
        l1 += np.sum(l1_panel[:, ok], axis=1)
        rounding_sq += np.sum(noise_sq[:, ok], axis=1)
        n_done += int(np.count_nonzero(ok))
        if ok.all():
            # independent sample errors add in quadrature; 3 sigma
            return QuadResult(value, error, l1, 3 * np.sqrt(rounding_sq), n_eval, n_done)
        bad_lo, bad_hi = lo[~ok], hi[~ok]
        if 2 * bad_lo.size + n_done > max_panels:
            break
        cut = 0.5 * (bad_lo + bad_hi)
        lo = np.concatenate([bad_lo, cut])
        hi = np.concatenate([cut, bad_hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
    raise NoConvergence(
        f"adaptive quadrature did not converge ({lo.size} unresolved panels, {n_eval} evaluations)"
    )

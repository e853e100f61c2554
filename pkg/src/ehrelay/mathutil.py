"""Numerical primitives: real Lambert W (both branches), adaptive
Gauss-Kronrod quadrature with infinite-interval support, bisection, and a
damped Newton solver for small nonlinear systems.
"""
from __future__ import annotations

import enum
import math
from typing import Callable, Sequence

import numpy as np

_INV_E = math.exp(-1.0)


class Branch(enum.Enum):
    """Real branches of the Lambert W function."""

    PRINCIPAL = 0   # W0, defined on [-1/e, +inf)
    MINUS_ONE = -1  # W-1, defined on [-1/e, 0)


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement hits its interval limit.

    Carries the best available estimate in ``value`` / ``error``.
    """

    def __init__(self, msg: str, value: float, error: float):
        super().__init__(msg)
        self.value = value
        self.error = error


class RootFindError(RuntimeError):
    """Raised on non-convergence; carries the best iterate and residual."""

    def __init__(self, msg: str, x: np.ndarray, residual: float):
        super().__init__(msg)
        self.x = x
        self.residual = residual


def lambert_w(x: float, branch: Branch = Branch.PRINCIPAL) -> float:
    """Solve w * exp(w) = x on the requested real branch.

    Halley iteration from a series (near the branch point -1/e) or
    logarithmic (elsewhere) initial guess. Residual |w e^w - x| is driven
    to ~1e-15 * max(1, |x|), well inside the 1e-12 contract.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("lambert_w: x is NaN")
    if x < -_INV_E:
        # Allow roundoff-level undershoot at the branch point.
        if x < -_INV_E - 1e-14 * max(1.0, abs(x)):
            raise ValueError(f"lambert_w: x={x} below branch point -1/e")
        x = -_INV_E
    if x == -_INV_E:
        return -1.0

    p2 = 2.0 * (math.e * x + 1.0)
    if branch is Branch.PRINCIPAL:
        if x == 0.0:
            return 0.0
        if p2 < 0.5:
            # Series about the branch point, p = +sqrt(2(ex+1)).
            p = math.sqrt(p2)
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
        elif x < math.e:
            # Crude rational start; Halley cleans it up.
            w = x / (1.0 + x) if x > 0 else x * math.exp(-x)
        else:
            lx = math.log(x)
            w = lx - math.log(lx)
    elif branch is Branch.MINUS_ONE:
        if x >= 0.0:
            raise ValueError("lambert_w: W_{-1} requires x in [-1/e, 0)")
        if p2 < 0.5:
            p = -math.sqrt(p2)
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
        else:
            # w ~ log(-x) - log(-log(-x)) as x -> 0^-
            l1 = math.log(-x)
            l2 = math.log(-l1)
            w = l1 - l2 + l2 / l1
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown branch {branch!r}")

    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        # Halley step: f / (e^w (w+1) - (w+2) f / (2 w + 2))
        denom = ew * w1 - (w + 2.0) * f / (2.0 * w1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


# 15-point Gauss-Kronrod nodes with embedded 7-point Gauss weights.
_GK_NODES = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000,
    -0.207784955007898, -0.405845151377397, -0.586087235467691,
    -0.741531185599394, -0.864864423359769, -0.949107912342759,
    -0.991455371120813,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_GK_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
])


def _gk_panel(f, a: float, b: float) -> tuple[float, float]:
    """One 7-15 Gauss-Kronrod panel on [a, b]; f must accept arrays."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _GK_NODES), dtype=float)
    k15 = half * float(fx @ _GK_WK)
    g7 = half * float(fx @ _GK_WG)
    err = (200.0 * abs(k15 - g7)) ** 1.5
    return k15, err


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-9,
    max_intervals: int = 4096,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod integral of f over [a, b], b may be +inf.

    f must be vectorized (called on node arrays). Infinite upper limits are
    mapped to [0, 1) by x = a + t/(1-t). Returns (value, error_estimate)
    with error_estimate <= abs_tol on success; raises QuadratureError
    (carrying the best estimate) when the interval limit is reached.
    """
    if not np.isfinite(a):
        raise ValueError("integrate_adaptive: lower limit must be finite")
    if math.isinf(b):
        base = f

        def f_mapped(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            u = 1.0 - t
            return np.asarray(base(a + t / u), dtype=float) / (u * u)

        f, a, b = f_mapped, 0.0, 1.0
    if b <= a:
        if b == a:
            return 0.0, 0.0
        raise ValueError("integrate_adaptive: requires b >= a")

    val, err = _gk_panel(f, a, b)
    panels = [(a, b, val, err)]
    while True:
        total = math.fsum(p[2] for p in panels)
        total_err = math.fsum(p[3] for p in panels)
        if total_err <= abs_tol:
            return total, total_err
        if len(panels) >= max_intervals:
            raise QuadratureError(
                f"quadrature did not reach abs_tol={abs_tol:g} within "
                f"{max_intervals} intervals (err={total_err:g})",
                total, total_err,
            )
        worst = max(range(len(panels)), key=lambda i: panels[i][3])
        lo, hi, _, _ = panels.pop(worst)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk_panel(f, lo, mid)
        v2, e2 = _gk_panel(f, mid, hi)
        panels.append((lo, mid, v1, e1))
        panels.append((mid, hi, v2, e2))


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of a scalar function by bisection; f(lo) and f(hi) must differ
    in sign (zero endpoints are returned directly)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("bisect: no sign change on bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) <= tol * max(1.0, abs(mid)):
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def solve_system(
    f: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    tol: float = 1e-8,
    max_iter: int = 100,
    keep_positive: bool = False,
) -> tuple[np.ndarray, float]:
    """Damped Newton iteration for F(x) = 0 with finite-difference Jacobian.

    Step halving enforces monotone decrease of ||F||_inf and, when
    keep_positive is set, strictly positive iterates (needed by the
    water-level calibration system). Raises RootFindError with the best
    iterate on non-convergence.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = np.asarray(f(x), dtype=float)
    best_x, best_r = x.copy(), float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        r = float(np.max(np.abs(fx)))
        if r < best_r:
            best_x, best_r = x.copy(), r
        if r <= tol:
            return x, r
        n = x.size
        jac = np.empty((fx.size, n))
        for j in range(n):
            h = 1e-6 * max(1.0, abs(x[j]))
            xh = x.copy()
            xh[j] += h
            jac[:, j] = (np.asarray(f(xh), dtype=float) - fx) / h
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -fx, rcond=None)[0]
        t = 1.0
        for _ in range(40):
            xn = x + t * step
            if keep_positive and np.any(xn <= 0.0):
                t *= 0.5
                continue
            fn = np.asarray(f(xn), dtype=float)
            if np.max(np.abs(fn)) < r * (1.0 - 1e-4 * t) or np.max(np.abs(fn)) <= tol:
                x, fx = xn, fn
                break
            t *= 0.5
        else:
            raise RootFindError(
                f"newton stalled at residual {r:g}", best_x, best_r)
    r = float(np.max(np.abs(fx)))
    if r <= tol:
        return x, r
    raise RootFindError(f"newton: no convergence (residual {r:g})", best_x, best_r)

"""Deterministic one-dimensional maximization.

Dense grid scan followed by Brent refinement (parabolic interpolation
with golden-section fallback) on the bracket around the grid winner.
Shared by the Kalman MLE search and by acquisition maximization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["OptResult", "grid_max", "brent_max", "grid_then_brent"]

# 2 - golden ratio, the golden-section step fraction.
_CGOLD = 0.3819660112501051


@dataclass(frozen=True)
class OptResult:
    x_star: float
    f_star: float
    evaluations: int


def _check_finite(fx: float, x: float) -> float:
    if not np.isfinite(fx):
        raise ValueError(f"objective returned non-finite value {fx} at x={x}")
    return float(fx)


def grid_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n: int,
    f_batch: Callable[[np.ndarray], np.ndarray] | None = None,
) -> OptResult:
    """Maximize over n equally spaced points including both endpoints.

    Ties break toward the smallest x.  ``f_batch``, when given, must
    return the same values as ``f`` mapped over an array; it is used to
    evaluate the whole grid in one call.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    xs = np.linspace(lo, hi, n)
    if f_batch is not None:
        fs = np.asarray(f_batch(xs), dtype=float)
        for x, fx in zip(xs, fs):
            _check_finite(fx, x)
    else:
        fs = np.array([_check_finite(f(x), x) for x in xs])
    best = int(np.argmax(fs))  # first maximum: smallest x on ties
    return OptResult(float(xs[best]), float(fs[best]), n)


def brent_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    c: float,
    tol: float,
    max_iter: int = 200,
    bracket_values: Sequence[float] | None = None,
) -> OptResult:
    """Brent maximization inside the bracket a < b < c.

    Requires f(b) >= max(f(a), f(c)).  Refines to absolute x-tolerance
    ``tol``; the returned point always lies in [a, c].
    """
    if not (a < b < c):
        raise ValueError(f"invalid bracket: need a < b < c, got ({a}, {b}, {c})")
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    evals = 0
    if bracket_values is None:
        fa, fb, fc = (_check_finite(f(p), p) for p in (a, b, c))
        evals += 3
    else:
        fa, fb, fc = (float(v) for v in bracket_values)
    if fb < fa or fb < fc:
        raise ValueError(
            f"invalid bracket: f(b)={fb} must be >= f(a)={fa} and f(c)={fc}"
        )

    # Minimize the negated objective; negation is exact in IEEE floats.
    lo, hi = a, c
    x = w = v = b
    fx = fw = fv = -fb
    d = e = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        tol1 = tol
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (hi - lo):
            break
        use_golden = True
        if abs(e) > tol1:
            # Parabola through (x, fx), (w, fw), (v, fv).
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            if abs(p) < abs(0.5 * q * e_prev) and q * (lo - x) < p < q * (hi - x):
                d = p / q
                u = x + d
                if u - lo < tol2 or hi - u < tol2:
                    d = tol1 if x < mid else -tol1
                use_golden = False
        if use_golden:
            e = (hi if x < mid else lo) - x
            d = _CGOLD * e
        u = x + d if abs(d) >= tol1 else x + (tol1 if d > 0.0 else -tol1)
        fu = -_check_finite(f(u), u)
        evals += 1
        if fu <= fx:
            if u >= x:
                lo = x
            else:
                hi = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                lo = u
            else:
                hi = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return OptResult(float(x), float(-fx), evals)


def grid_then_brent(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n: int,
    tol: float,
    f_batch: Callable[[np.ndarray], np.ndarray] | None = None,
) -> OptResult:
    """Grid scan, then Brent refinement around the grid winner.

    When the winner is an endpoint it is returned as-is.  The result is
    never below the best grid value.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    xs = np.linspace(lo, hi, n)
    if f_batch is not None:
        fs = np.asarray(f_batch(xs), dtype=float)
        for x, fx in zip(xs, fs):
            _check_finite(fx, x)
    else:
        fs = np.array([_check_finite(f(x), x) for x in xs])
    best = int(np.argmax(fs))
    if best == 0 or best == n - 1:
        return OptResult(float(xs[best]), float(fs[best]), n)
    refined = brent_max(
        f,
        float(xs[best - 1]),
        float(xs[best]),
        float(xs[best + 1]),
        tol,
        bracket_values=(fs[best - 1], fs[best], fs[best + 1]),
    )
    total = n + refined.evaluations
    if refined.f_star >= fs[best]:
        return OptResult(refined.x_star, refined.f_star, total)
    return OptResult(float(xs[best]), float(fs[best]), total)

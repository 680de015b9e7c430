"""Bracketing and refinement helpers for scalar root scans.

All solvers in this package reduce to the same pattern: evaluate a smooth
residual on a grid, bracket sign changes, refine each bracket.  Refinement is
bisection to a fixed width followed by two secant polish steps that are only
accepted when they reduce the residual.  The batch variants operate on arrays
of brackets simultaneously, which keeps strength sweeps fast in pure numpy.
"""

from __future__ import annotations

import numpy as np


def sign_change_brackets(x: np.ndarray, f: np.ndarray) -> list[tuple[float, float]]:
    """Brackets [x_i, x_{i+1}] where f changes sign (exact zeros included)."""
    s = np.sign(f)
    idx = np.where(s[:-1] * s[1:] < 0)[0]
    out = [
        (float(min(x[i], x[i + 1])), float(max(x[i], x[i + 1]))) for i in idx
    ]
    hits = np.where(s == 0)[0]
    for i in hits:
        lo = float(min(x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]))
        hi = float(max(x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]))
        if hi > lo:
            out.append((lo, hi))
    return sorted(out)


def refine_brackets(func, brackets, xtol: float, polish: int = 2):
    """Converge every bracket to width <= xtol; vectorized bisection + secant.

    func maps an array of abscissas to an array of residuals.  Returns
    (roots, residuals) sorted by root.  Brackets whose endpoints do not
    actually straddle a sign change (can happen after grid refinement around
    an exact zero) collapse to the endpoint with the smaller |f|.
    """
    if not brackets:
        return np.empty(0), np.empty(0)
    a = np.array([b[0] for b in brackets], dtype=float)
    b = np.array([b[1] for b in brackets], dtype=float)
    fa = func(a)
    fb = func(b)
    bad = fa * fb > 0  # not a true bracket; keep best endpoint
    n_iter = int(np.ceil(np.log2(max(np.max(b - a), xtol) / xtol))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        fm = func(mid)
        take_left = fa * fm <= 0
        b = np.where(take_left, mid, b)
        fb = np.where(take_left, fm, fb)
        a = np.where(take_left, a, mid)
        fa = np.where(take_left, fa, fm)
    root = 0.5 * (a + b)
    fr = func(root)
    for _ in range(polish):
        denom = fb - fa
        safe = np.abs(denom) > 0
        x = np.where(safe, b - fb * (b - a) / np.where(safe, denom, 1.0), root)
        x = np.clip(x, np.minimum(a, b), np.maximum(a, b))
        fx = func(x)
        better = np.abs(fx) < np.abs(fr)
        root = np.where(better, x, root)
        fr = np.where(better, fx, fr)
    if np.any(bad):
        pick_a = np.abs(fa) < np.abs(fb)
        fallback = np.where(pick_a, a, b)
        f_fall = np.where(pick_a, fa, fb)
        root = np.where(bad, fallback, root)
        fr = np.where(bad, f_fall, fr)
    order = np.argsort(root)
    return root[order], fr[order]


def dedup_sorted(roots: np.ndarray, residuals: np.ndarray, tol: float):
    """Merge sorted roots closer than tol, keeping the smaller residual."""
    if roots.size == 0:
        return roots, residuals
    keep_r = [float(roots[0])]
    keep_f = [float(residuals[0])]
    for r, f in zip(roots[1:], residuals[1:]):
        if r - keep_r[-1] < tol:
            if abs(f) < abs(keep_f[-1]):
                keep_r[-1] = float(r)
                keep_f[-1] = float(f)
        else:
            keep_r.append(float(r))
            keep_f.append(float(f))
    return np.array(keep_r), np.array(keep_f)


def subtract_windows(lo: float, hi: float, windows) -> list[tuple[float, float]]:
    """Split [lo, hi] into segments avoiding the given (open) windows."""
    segs = [(lo, hi)]
    for wlo, whi in sorted(windows):
        nxt = []
        for slo, shi in segs:
            if whi <= slo or wlo >= shi:
                nxt.append((slo, shi))
                continue
            if wlo > slo:
                nxt.append((slo, wlo))
            if whi < shi:
                nxt.append((whi, shi))
        segs = nxt
    return [s for s in segs if s[1] > s[0]]


def edge_ladder(edge: float, inward: float, span: float, decades: int = 3, per_decade: int = 24):
    """Log-spaced abscissas approaching `edge` from the `inward` direction.

    Covers distances from `span` down to span/10^decades; used to recover
    roots that sit close to an excluded window or to the domain boundary.
    """
    d = np.logspace(np.log10(span), np.log10(span / 10.0**decades), decades * per_decade)
    return edge + inward * d

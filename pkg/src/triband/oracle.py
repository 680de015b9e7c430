"""Independent bound-state verification by direct ODE integration.

Eliminating psi1 and psi3 through the algebraic constraint
(E - v1) psi1 = -(E - v3) psi3 leaves the exact first-order pair

    u' = sqrt(2) (E - v2) v,
    v' = -sqrt(2) (E - v1)(E - v3) u / (2E - v1 - v3),

for u = psi1 - psi3 and v = psi2.  The three-component system itself is not
canonical (the derivative matrix is singular), which is why the reduction, not
the raw system, is integrated.  A bound state decays on both sides, so the
state launched along the left decaying ray (u, v) ~ (2E/kappa, sqrt(2)) at x1
must arrive at x2 parallel to the right ray (2E/kappa, -sqrt(2)); the signed
cross product of the arrival state with that ray is the shooting mismatch.

Integration is fixed-step RK4, deliberately ignorant of the closed-form
trigonometry used by the main solver.  The interior coefficients are constant,
so fixed steps are adequate as long as |k| h stays small; callers probing
large wave numbers should raise n_steps.
"""

from __future__ import annotations

import numpy as np

from . import rootfind
from .boundstates import EDGE_MARGIN, VA_WINDOW, ZERO_WINDOW
from .model import REDUCE_RTOL, Geometry, PotentialConfig, SPole, kappa

ORACLE_XTOL = 1e-10  # bisection tolerance relative to m


def _rk4(cfg: PotentialConfig, e: np.ndarray, u, v, span: float, n_steps: int):
    """Fixed-step RK4 of u' = cu v, v' = cv u over `span`, renormalizing
    periodically (the rescaling cannot move a zero of any mismatch)."""
    cu = np.sqrt(2.0) * (e - cfg.v2)
    denom = 2.0 * e - cfg.v1 - cfg.v3
    cv = -np.sqrt(2.0) * (e - cfg.v1) * (e - cfg.v3) / denom
    h = span / n_steps
    for i in range(n_steps):
        k1u, k1v = cu * v, cv * u
        k2u, k2v = cu * (v + 0.5 * h * k1v), cv * (u + 0.5 * h * k1u)
        k3u, k3v = cu * (v + 0.5 * h * k2v), cv * (u + 0.5 * h * k2u)
        k4u, k4v = cu * (v + h * k3v), cv * (u + h * k3u)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if i % 64 == 0:
            norm = np.hypot(u, v)
            u, v = u / norm, v / norm
    return u, v


def _left_ray(cfg: PotentialConfig, e: np.ndarray):
    kap = kappa(e, cfg.m)
    u = 2.0 * e / kap
    v = np.full_like(np.asarray(e, dtype=float), np.sqrt(2.0))
    norm = np.hypot(u, v)
    return u / norm, v / norm


def _mismatch_batch(cfg: PotentialConfig, geom: Geometry, e: np.ndarray, n_steps: int):
    """Full-interval shooting mismatch on an array of energies."""
    e = np.asarray(e, dtype=float)
    u, v = _left_ray(cfg, e)
    u, v = _rk4(cfg, e, u, v, geom.l, n_steps)
    kap = kappa(e, cfg.m)
    ru, rv = 2.0 * e / kap, -np.sqrt(2.0)
    return (u * rv - v * ru) / np.hypot(u, v) / np.hypot(ru, rv)


def _parity_mismatch_batch(cfg: PotentialConfig, geom: Geometry, e: np.ndarray, n_steps: int):
    """Midpoint parity mismatches (u(a), v(a)) from the left decaying ray.

    The rectangle is reflection symmetric about its midpoint a, so every
    bound state has u = psi1 - psi3 odd and psi2 even (u(a) = 0) or the other
    way around (v(a) = 0).  Tracking the two families separately keeps their
    zeros simple even when an even/odd doublet is exponentially split, which
    the product mismatch cannot resolve on any fixed grid.
    """
    e = np.asarray(e, dtype=float)
    u, v = _left_ray(cfg, e)
    u, v = _rk4(cfg, e, u, v, 0.5 * geom.l, max(1, n_steps // 2))
    norm = np.hypot(u, v)
    return u / norm, v / norm


def shoot(cfg: PotentialConfig, geom: Geometry, e: float, n_steps: int = 2000) -> float:
    """Shooting mismatch at one energy; zero marks a bound state."""
    m = cfg.m
    if not 0 < abs(e) < m:
        raise ValueError(f"E = {e} not inside the open gap minus 0")
    if abs(2.0 * e - cfg.v1 - cfg.v3) < 1e-12 * cfg.scale():
        raise SPole("constraint split singular: 2E = v1 + v3")
    return float(_mismatch_batch(cfg, geom, np.asarray([e]), n_steps)[0])


def oracle_bound_states(
    cfg: PotentialConfig,
    geom: Geometry,
    n_grid: int = 4000,
    n_steps: int = 2000,
    extra_exclusions=(),
) -> list[float]:
    """Grid-scan shooting mismatches over the gap and bisect every sign change.

    The scan runs on the two midpoint parity mismatches rather than the
    full-interval product, so exponentially split even/odd doublets are still
    two simple zeros.  Exclusion windows around E = 0 and the constraint pole
    at E = va mirror the main solver's so both enumerate the same domain.
    """
    m = cfg.m
    lo, hi = -m + EDGE_MARGIN * m, m - EDGE_MARGIN * m
    windows = [(-ZERO_WINDOW * m, ZERO_WINDOW * m)]
    if abs(cfg.va) < m:
        windows.append((cfg.va - VA_WINDOW * m, cfg.va + VA_WINDOW * m))
    windows = list(windows) + list(extra_exclusions)
    segments = rootfind.subtract_windows(lo, hi, windows)

    def fun_plus(x):
        return _parity_mismatch_batch(cfg, geom, np.asarray(x, dtype=float), n_steps)[0]

    def fun_minus(x):
        return _parity_mismatch_batch(cfg, geom, np.asarray(x, dtype=float), n_steps)[1]

    total = sum(s[1] - s[0] for s in segments)
    out = []
    for fun in (fun_plus, fun_minus):
        brackets = []
        for slo, shi in segments:
            n = max(16, int(round(n_grid * (shi - slo) / total)))
            xs = np.linspace(slo, shi, n)
            fs = fun(xs)
            brackets.extend(rootfind.sign_change_brackets(xs, fs))
        roots, fr = rootfind.refine_brackets(fun, brackets, xtol=ORACLE_XTOL * m)
        roots, _ = rootfind.dedup_sorted(roots, fr, tol=5.0 * ORACLE_XTOL * m)
        out.extend(float(r) for r in roots)
    return sorted(out)


def resolvable_va_window(
    cfg: PotentialConfig, geom: Geometry, n_steps: int = 2000, n_grid: int = 4000
) -> float:
    """Half-width around va inside which neither solver resolves levels.

    When va lies in the gap (off the plane v2 = va), k^2 ~ F(va)/(E - va)
    diverges and genuine levels accumulate at va without bound.  Fixed-step
    RK4 loses phase accuracy once |k| h grows, and any finite grid stops
    separating the accumulating roots, so count comparisons are meaningful
    only outside a configuration-dependent window.  Returns 0.0 when there is
    no in-gap accumulation point.
    """
    m = cfg.m
    if cfg.on_plane_a(REDUCE_RTOL) or not abs(cfg.va) < m:
        return 0.0
    f_va = abs((cfg.va - cfg.v1) * (cfg.va - cfg.v2) * (cfg.va - cfg.v3))
    if f_va == 0:
        return 0.0
    # RK4 phase accuracy: keep |k| h below ~0.2
    k_cap = 0.2 * n_steps / geom.l
    d_rk4 = f_va / k_cap**2
    # grid resolvability: consecutive-root spacing ~ 4 pi d^{3/2} / (l sqrt(F))
    de = 2.0 * m / n_grid
    d_grid = (4.0 * de * geom.l * np.sqrt(f_va) / np.pi) ** (2.0 / 3.0)
    return float(2.0 * max(d_rk4, d_grid, VA_WINDOW * m))

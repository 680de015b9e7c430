"""Self-verification suite: solver-vs-oracle cross-checks plus invariants.

Run through `triband verify`; every check returns (name, ok, detail) and the
CLI exits nonzero if any check fails.  The random suite draws strengths
uniformly from [-5m, 5m] and widths from [0.2, 3]/m with a fixed seed, so
results are reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from . import boundstates, oracle, pointlimits
from .boundstates import (
    boundary_values,
    connection_matrix,
    current,
    discontinuities,
    eigenfunction,
    find_bound_states,
)
from .model import Geometry, PoleAtVa, PotentialConfig
from .pointlimits import SqueezeLaw
from .spectra import PencilSpec


def random_configs(seed: int, cases: int, strength: float = 5.0, m: float = 1.0):
    """The seeded random (config, geometry) suite used by the cross-checks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(cases):
        v = rng.uniform(-strength * m, strength * m, size=3)
        l = rng.uniform(0.2 / m, 3.0 / m)
        out.append((PotentialConfig(v[0], v[1], v[2], m), Geometry.centered(l)))
    return out


def comparison_domain(cfg, geom, n_steps=2000, n_grid=4000):
    """Exclusion intervals shared by solver and oracle for count comparison."""
    w = oracle.resolvable_va_window(cfg, geom, n_steps=n_steps, n_grid=n_grid)
    if w <= 0:
        return []
    return [(cfg.va - w, cfg.va + w)]


def crosscheck_config(cfg, geom, n_steps=2000, n_grid=4000, atol=1e-8):
    """Compare solver and oracle level lists on the common resolvable domain.

    Returns (ok, n_solver, n_oracle, max_abs_diff).
    """
    excl = comparison_domain(cfg, geom, n_steps=n_steps, n_grid=n_grid)
    sol = find_bound_states(cfg, geom, n_grid=n_grid, extra_exclusions=excl)
    e_solver = np.array([s.energy for s in sol])
    e_oracle = np.array(
        oracle.oracle_bound_states(cfg, geom, n_grid=n_grid, n_steps=n_steps, extra_exclusions=excl)
    )
    if e_solver.size != e_oracle.size:
        return False, e_solver.size, e_oracle.size, np.inf
    if e_solver.size == 0:
        return True, 0, 0, 0.0
    diff = float(np.max(np.abs(e_solver - e_oracle)))
    return diff < atol * cfg.m, e_solver.size, e_oracle.size, diff


def check_oracle_agreement(seed=42, cases=20, atol=1e-8):
    worst = 0.0
    for cfg, geom in random_configs(seed, cases):
        ok, ns, no, diff = crosscheck_config(cfg, geom, atol=atol)
        if not ok:
            return False, f"mismatch at {cfg}: counts {ns}/{no}, diff {diff:g}"
        if np.isfinite(diff):
            worst = max(worst, diff)
    return True, f"{cases} configurations agree, worst |dE| = {worst:.3g}"


def check_unit_determinant(seed=42, samples=10000, tol=1e-12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = 0
    while n < samples:
        v = rng.uniform(-5, 5, size=3)
        l = rng.uniform(0.05, 4.0)
        e = rng.uniform(-0.999, 0.999)
        cfg = PotentialConfig(v[0], v[1], v[2], 1.0)
        try:
            lam = connection_matrix(cfg, Geometry.centered(l), e)
        except PoleAtVa:
            continue
        if not np.isfinite(lam.det):
            continue
        # det - 1 cancels two O(cosh^2) terms in the evanescent region, so the
        # error must be measured against their size
        scale = max(1.0, lam.l11 * lam.l11, abs(lam.l12 * lam.l21))
        worst = max(worst, abs(lam.det - 1.0) / scale)
        n += 1
    return worst < tol, f"max |det - 1| (scaled) = {worst:.3g} over {samples} samples"


def _solved_examples():
    """A few configurations with known nonempty spectra for function checks."""
    cases = [
        (PotentialConfig(3.0, 3.0, 3.0), Geometry.centered(0.5)),
        (PotentialConfig(0.0, 10.0, 0.0), Geometry.centered(2.0)),
        (PotentialConfig(-2.0, 1.5, 1.0), Geometry.centered(1.5)),
        (PotentialConfig(1.0, -2.0, -4.0), Geometry(0.3, 1.8)),
    ]
    out = []
    for cfg, geom in cases:
        sols = [
            s
            for s in find_bound_states(cfg, geom)
            if abs(s.energy - cfg.va) > 0.05 and abs(s.energy) > 0.05
        ]
        for s in sols[:3]:
            out.append((cfg, geom, s))
    return out


def check_parity_symmetry(tol=1e-10):
    worst = 0.0
    for cfg, geom, sol in _solved_examples():
        # grid exactly antisymmetric about the midpoint: index i mirrors n-1-i
        u = np.linspace(geom.l / 240.0, 1.5 * geom.l, 120)
        t = np.concatenate([-u[::-1], [0.0], u])
        samples = eigenfunction(sol, cfg, geom, geom.a + t, normalize="psi2_max")
        n = len(samples)
        for i in range(n):
            s, mirror = samples[i], samples[n - 1 - i]
            if sol.parity == "+":
                err = max(
                    abs(s.psi2 - mirror.psi2),
                    abs(s.psi1 + mirror.psi1),
                    abs(s.psi3 + mirror.psi3),
                )
            else:
                err = max(
                    abs(s.psi2 + mirror.psi2),
                    abs(s.psi1 - mirror.psi1),
                    abs(s.psi3 - mirror.psi3),
                )
            worst = max(worst, err)
    return worst < tol, f"max parity asymmetry = {worst:.3g}"


def check_current(tol=1e-12):
    worst = 0.0
    for cfg, geom, sol in _solved_examples():
        x = np.linspace(geom.x1 - geom.l, geom.x2 + geom.l, 101)
        for s in eigenfunction(sol, cfg, geom, x):
            worst = max(worst, abs(current(s)))
        bv = boundary_values(sol, cfg, geom)
        for side in ("x1", "x2"):
            jl = current(boundstates.WaveFunctionSample(0.0, *bv[side + "-"]))
            jr = current(boundstates.WaveFunctionSample(0.0, *bv[side + "+"]))
            worst = max(worst, abs(jl - jr))
    return worst < tol, f"max |j| = {worst:.3g}"


def check_discontinuities(tol=1e-9):
    worst = 0.0
    for cfg, geom, sol in _solved_examples():
        try:
            d1, d2 = discontinuities(sol, cfg, geom)
        except boundstates.MuPole:
            continue
        bv = boundary_values(sol, cfg, geom)
        for j in (0, 2):  # psi1 and psi3 jump identically
            worst = max(worst, abs((bv["x1-"][j] - bv["x1+"][j]) - d1))
            worst = max(worst, abs((bv["x2-"][j] - bv["x2+"][j]) - d2))
    return worst < tol, f"max |closed-form jump - sampled jump| = {worst:.3g}"


def check_outer_continuity(tol=1e-10):
    """v11 = v33 = 0 makes psi1 and psi3 continuous at both edges."""
    worst = 0.0
    for v22, l in ((10.0, 2.0), (-6.0, 1.3)):
        cfg = PotentialConfig(0.0, v22, 0.0)
        geom = Geometry.centered(l)
        isolated = [s for s in find_bound_states(cfg, geom) if abs(s.energy) > 0.1]
        for sol in isolated[:4]:
            bv = boundary_values(sol, cfg, geom)
            for j in (0, 2):
                worst = max(worst, abs(bv["x1-"][j] - bv["x1+"][j]))
                worst = max(worst, abs(bv["x2-"][j] - bv["x2+"][j]))
    return worst < tol, f"max outer-component jump = {worst:.3g}"


def check_type_three_squeeze():
    """The pure-v11 potential keeps no level away from the thresholds as l -> 0."""
    pencil = PencilSpec("P1", 1.0, 0.0, 0.0)
    law = SqueezeLaw("delta", 2.0)
    if pointlimits.limit_energy(pencil, law, n=0, parity="+") is not None:
        return False, "limit energy unexpectedly exists"
    margins = []
    for l in (1e-2, 1e-3):
        cfg = pencil.config(law.v_of_l(l), 1.0)
        sols = find_bound_states(cfg, Geometry.centered(l))
        margins.append(max((1.0 - abs(s.energy) for s in sols), default=0.0))
    ok = margins[1] < max(margins[0], 1e-8) and margins[1] < 1e-4
    return ok, f"threshold margins {margins[0]:.3g} -> {margins[1]:.3g}"


def run_all(seed=42, cases=20):
    """Run every verification check; returns list of (name, ok, detail)."""
    checks = [
        ("unit_determinant", check_unit_determinant),
        ("parity_symmetry", check_parity_symmetry),
        ("zero_current", check_current),
        ("discontinuity_closed_form", check_discontinuities),
        ("outer_continuity_v11_v33_zero", check_outer_continuity),
        ("type_three_squeeze_empty", check_type_three_squeeze),
        ("oracle_agreement", lambda: check_oracle_agreement(seed=seed, cases=cases)),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results

"""Point-interaction limits of the squeezed rectangular potential.

Three squeezing rates send the width l to zero with V(l) -> infinity:

    delta:       V = g / l
    two_thirds:  V = g (m / l^2)^{1/3}
    inv_square:  V = g / (l^2 m)

Each supported (spectrum type, rate, level index) combination yields a finite
limit energy E_n and a limit connection matrix Lambda_n acting on the
two-sided boundary values of (psi1 - psi3, psi2) at x = +-0.  The matrices
come in three shapes: a rotation-like matrix for the P/D types (delta rate),
and (-1)^n times a lower- or upper-triangular unit matrix with off-diagonal
2 chi_n or 2/chi_n, where chi_n = -sqrt((m^2 - E_n^2)/2)/E_n.

The delta rate covers ground states only; excited H/W ladders require the
two_thirds (H1) or inv_square (H2, W1, W2) rates.  The pure first-component
potential (alpha2 = alpha3 = 0 on P1) keeps kl -> 0 with finite k in every
rate and therefore supports no bound state in the limit: limit_energy returns
None for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundstates import (
    ConnectionMatrix,
    WaveFunctionSample,
    find_bound_states,
)
from .model import (
    SQRT2,
    BranchLost,
    Geometry,
    OutOfValidityWindow,
    TypeMismatch,
    UnsupportedCombination,
    sc_kernels,
)
from .spectra import PencilSpec, classify

FAMILIES = ("delta", "two_thirds", "inv_square")


@dataclass(frozen=True)
class SqueezeLaw:
    """Squeezing rate and dimensionless strength g."""

    family: str
    g: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.g == 0:
            raise ValueError("squeeze strength g must be nonzero")

    def v_of_l(self, l: float, m: float = 1.0) -> float:
        if self.family == "delta":
            return self.g / l
        if self.family == "two_thirds":
            return self.g * (m / l**2) ** (1.0 / 3.0)
        return self.g / (l * l * m)


@dataclass(frozen=True)
class PointInteraction:
    """Limit connection matrix with its bound-state energy."""

    lambda_n: ConnectionMatrix
    e_n: float
    n: int
    chi_n: float


def _is_type_three(pencil: PencilSpec) -> bool:
    z = lambda a: abs(a) <= 1e-12
    return (
        pencil.vertex == "P1"
        and not z(pencil.alpha1)
        and z(pencil.alpha2)
        and z(pencil.alpha3)
    )


def level_parity(tag: str, n: int) -> str:
    """Which split equation the n-th limit level solves."""
    if tag in ("H2", "W2"):
        return "+" if n % 2 == 0 else "-"
    if tag in ("H1", "W1"):
        return "+" if n % 2 == 1 else "-"
    raise TypeMismatch(f"levels of type {tag!r} are labeled by parity, not index")


def _ground_delta(g: float, m: float) -> float:
    return m * g / np.sqrt(4.0 + g * g)


def limit_energy(
    pencil: PencilSpec, law: SqueezeLaw, n: int = 0, parity: str | None = None, m: float = 1.0
):
    """Closed-form limit energy, or None when the limit holds no bound state.

    For types P and D (delta rate only) the two levels are selected by
    parity '+'/'-'; for the ladder types the index n selects the level and
    n = 0 always denotes the separate ground branch.  Raises
    OutOfValidityWindow when (g, n) falls outside a ladder's stated interval
    and UnsupportedCombination for (type, rate) pairs the theory does not
    cover.
    """
    g = law.g
    stype = classify(pencil)
    tag = stype.tag
    if _is_type_three(pencil):
        return None
    if tag in ("P", "D"):
        if law.family != "delta":
            raise UnsupportedCombination(f"type {tag} is realized by the delta rate only")
        if parity not in ("+", "-"):
            raise TypeMismatch("types P and D need parity '+' or '-'")
        beta = stype.beta
        x = 0.5 * np.sqrt(abs(beta)) * g
        if tag == "P":
            # sin/cos forms of sgn(tan x) [1 + beta cot^2 x]^{-1/2} etc.,
            # finite through the tan/cot singularities
            s, c = np.sin(x), np.cos(x)
            if parity == "+":
                return float(m * np.sign(c) * s / np.sqrt(s * s + beta * c * c))
            return float(-m * np.sign(s) * c / np.sqrt(c * c + beta * s * s))
        th = np.tanh(abs(x))
        sgn = np.sign(g)
        if parity == "+":
            return float(sgn * m * th / np.sqrt(th * th - beta))
        return float(sgn * m / np.sqrt(1.0 - beta * th * th))
    if tag == "H2":
        if law.family == "delta":
            return _ground_delta(g, m) if n == 0 else None
        if law.family == "inv_square":
            if n == 0:
                return _ground_delta(g, m)
            q = n * n * np.pi * np.pi
            return float(q * m / (2.0 * g) * (np.sqrt(1.0 + 4.0 * g * g / q**2) - 1.0))
        raise UnsupportedCombination("type H2 uses the delta or inv_square rates")
    if tag == "H1":
        if law.family != "two_thirds":
            raise UnsupportedCombination("type H1 excited levels use the two_thirds rate")
        if n < 1:
            raise UnsupportedCombination("the two_thirds ladder starts at n = 1")
        alpha = abs(pencil.alpha1)
        if not 0 < abs(g) < (n * np.pi / alpha) ** (2.0 / 3.0):
            raise OutOfValidityWindow(
                f"two_thirds level n={n} needs 0 < |g| < (n pi/alpha)^(2/3)"
            )
        return float((pencil.alpha1 / (n * np.pi)) ** 2 * g**3 * m)
    if tag == "W1":
        beta = stype.beta
        if law.family == "delta":
            if n == 0:
                return float(-np.sign(beta * g) * m / np.sqrt(1.0 + (beta * g) ** 2 / 4.0))
            return None
        if law.family == "inv_square":
            if n == 0:
                return float(-np.sign(beta * g) * m / np.sqrt(1.0 + (beta * g) ** 2 / 4.0))
            if not abs(beta * g) > (n * np.pi) ** 2:
                raise OutOfValidityWindow(f"inv_square level n={n} needs |beta g| > (n pi)^2")
            return float(-(n * np.pi) ** 2 * m / (beta * g))
        raise UnsupportedCombination("type W1 uses the delta or inv_square rates")
    if tag == "W2":
        alpha = pencil.alpha1
        if law.family == "delta":
            if n != 0:
                return None
            # real interior wave number in the limit requires g < 0; for
            # g > 0 the level is absorbed at the upper threshold
            return _ground_delta(g, m) if g < 0 else None
        if law.family == "inv_square":
            if n == 0:
                return _ground_delta(g, m) if g < 0 else None
            if not g < -(n * np.pi) ** 2 / (2.0 * alpha):
                raise OutOfValidityWindow(f"inv_square level n={n} needs g < -(n pi)^2/(2 alpha)")
            return float(-(1.0 + (n * np.pi) ** 2 / (alpha * g)) * m)
        raise UnsupportedCombination("type W2 uses the delta or inv_square rates")
    raise UnsupportedCombination(f"no squeezing limit tabulated for type {tag!r}")


def chi(e: float, m: float = 1.0) -> float:
    return float(-np.sqrt((m - e) * (m + e) / 2.0) / e)


def limit_matrix(
    pencil: PencilSpec,
    law: SqueezeLaw,
    n: int = 0,
    e_n: float | None = None,
    parity: str | None = None,
    m: float = 1.0,
) -> PointInteraction:
    """Limit connection matrix Lambda_n for a supported combination."""
    stype = classify(pencil)
    tag = stype.tag
    if e_n is None:
        e_n = limit_energy(pencil, law, n=n, parity=parity, m=m)
    if e_n is None:
        raise UnsupportedCombination("no bound state (hence no matrix) in this limit")
    if tag in ("P", "D"):
        beta = stype.beta
        s, c = sc_kernels(beta, law.g)
        lam = ConnectionMatrix(float(c), float(-SQRT2 * s), float(beta * s / SQRT2), float(c))
        return PointInteraction(lam, float(e_n), 0, chi(e_n, m))
    x = chi(e_n, m)
    sign = -1.0 if n % 2 else 1.0
    if tag in ("H2", "W2"):
        lam = ConnectionMatrix(sign, sign * 2.0 / x, 0.0, sign)
    elif tag in ("H1", "W1"):
        lam = ConnectionMatrix(sign, 0.0, sign * 2.0 * x, sign)
    else:
        raise UnsupportedCombination(f"no limit matrix for type {tag!r}")
    return PointInteraction(lam, float(e_n), n, x)


def boundary_connection_residual(pi: PointInteraction, parity: str, m: float = 1.0) -> float:
    """Residual of Lambda_n applied to the squeezed boundary columns.

    The left boundary column is (2E/kappa, sqrt(2)); Lambda_n must map it to
    (-2E/kappa, sqrt(2)) for a '+' state and to (2E/kappa, -sqrt(2)) for a
    '-' state.
    """
    e = pi.e_n
    kap = np.sqrt((m - e) * (m + e))
    left = np.array([2.0 * e / kap, SQRT2])
    target = np.array([-2.0 * e / kap, SQRT2]) if parity == "+" else np.array(
        [2.0 * e / kap, -SQRT2]
    )
    got = pi.lambda_n.as_array() @ left
    return float(np.max(np.abs(got - target)))


@dataclass(frozen=True)
class ConvergenceRow:
    l: float
    v: float
    e_b: float
    error: float
    order: float | None


def convergence_study(
    pencil: PencilSpec,
    law: SqueezeLaw,
    n: int = 0,
    l_sequence=(),
    parity: str | None = None,
    m: float = 1.0,
    capture_radius: float | None = None,
    n_grid: int = 4000,
) -> list[ConvergenceRow]:
    """Finite-width energies against the limit value over a decreasing l list.

    For every l the solver runs at V = V(l); the state nearest the limit
    energy (with matching parity) within the capture radius continues the
    branch.  The default radius is 0.2 times the distance to the nearest
    other limit level of the same family, or 0.1 m when there is none.
    """
    e_limit = limit_energy(pencil, law, n=n, parity=parity, m=m)
    if e_limit is None:
        raise UnsupportedCombination("no limit level to converge to")
    tag = classify(pencil).tag
    want_parity = parity if tag in ("P", "D") else level_parity(tag, n)
    if capture_radius is None:
        gaps = []
        if tag not in ("P", "D"):  # ladder families: look at neighboring levels
            for other in (n - 1, n + 1):
                if other < 0:
                    continue
                try:
                    e_o = limit_energy(pencil, law, n=other, parity=parity, m=m)
                except (OutOfValidityWindow, UnsupportedCombination, TypeMismatch):
                    continue
                if e_o is not None:
                    gaps.append(abs(e_o - e_limit))
        capture_radius = 0.2 * min(gaps) if gaps else 0.1 * m
    rows: list[ConvergenceRow] = []
    prev_err = None
    prev_l = None
    for l in l_sequence:
        v = law.v_of_l(l, m)
        cfg = pencil.config(v, m)
        geom = Geometry.centered(l)
        states = [
            s
            for s in find_bound_states(cfg, geom, n_grid=n_grid)
            if s.parity == want_parity and abs(s.energy - e_limit) <= capture_radius
        ]
        if not states:
            raise BranchLost(
                f"no {want_parity} state within {capture_radius:g} of {e_limit:g} at l={l:g}"
            )
        best = min(states, key=lambda s: abs(s.energy - e_limit))
        err = abs(best.energy - e_limit)
        order = None
        if prev_err is not None and err > 0 and prev_err > 0 and prev_l is not None:
            order = float(np.log(prev_err / err) / np.log(prev_l / l))
        rows.append(ConvergenceRow(float(l), float(v), best.energy, float(err), order))
        prev_err, prev_l = err, l
    return rows


def squeezed_eigenfunction(
    pencil: PencilSpec,
    law: SqueezeLaw,
    n: int = 0,
    x_grid=(),
    parity: str | None = None,
    m: float = 1.0,
) -> list[WaveFunctionSample]:
    """Two-sided exponential eigenfunction of the point interaction.

    Components are (1/rho, +-sqrt(2), +-rho) e^{-kappa |x|} per side; the '+'
    states flip the outer components across the origin, the '-' states flip
    psi2.
    """
    e = limit_energy(pencil, law, n=n, parity=parity, m=m)
    if e is None:
        raise UnsupportedCombination("no bound state in this limit")
    tag = classify(pencil).tag
    par = parity if tag in ("P", "D") else level_parity(tag, n)
    kap = np.sqrt((m - e) * (m + e))
    rho = np.sqrt((m - e) / (m + e))
    x = np.asarray(x_grid, dtype=float)
    env = np.exp(-kap * np.abs(x))
    right = x > 0
    out = []
    for xx, ev, rt in zip(x, env, right):
        if par == "+":
            s = -1.0 if rt else 1.0
            out.append(WaveFunctionSample(float(xx), s * ev / rho, SQRT2 * ev, s * ev * rho))
        else:
            s = -1.0 if rt else 1.0
            out.append(WaveFunctionSample(float(xx), ev / rho, s * SQRT2 * ev, ev * rho))
    return out

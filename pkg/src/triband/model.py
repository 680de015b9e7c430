"""Shared parameters and scalar kernels for the 1D pseudospin-one Hamiltonian.

The Hamiltonian is H = -i S_y d/dx + m S_z + diag(V11, V22, V33) acting on a
three-component wave function.  Everything downstream (band structure, bound
states, strength sweeps, point-interaction limits) is expressed through the
renormalized strengths

    v1 = V11 + m,   v2 = V22,   v3 = V33 - m,   va = (v1 + v3) / 2

and the scalar kernels defined here: the squared wave number k^2(E), the
exterior decay rate kappa, the amplitude ratio rho, and the trigonometric
kernels s(w, t) = sin(sqrt(w) t)/sqrt(w), c(w, t) = cos(sqrt(w) t) which are
analytically continued to w < 0 (imaginary wave number) via sinh/cosh.  Using
(s, c) of the real variable w = k^2 keeps every residual real-analytic in E,
so no branch bookkeeping for imaginary k is needed anywhere.

Energies are in units of the mass gap m (m = 1.0 by default), lengths in 1/m.
All functions are pure and stateless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative tolerance below which E is considered to sit on the k^2 pole at va.
POLE_RTOL = 1e-12
# Relative tolerance on the linear flat-band relations (plane membership
# as reported to users; absorbs float noise of symbolically built inputs).
PLANE_RTOL = 1e-9
# Stricter tolerance at which the numerics switch to the exact on-plane
# reductions; strengths further off the plane than this keep the generic
# formulas, whose answers differ from the reduced ones by the plane offset.
REDUCE_RTOL = 1e-12
# Relative half-width of the zero-energy guard used by gamma().
ZERO_E_RTOL = 1e-12

SQRT2 = np.sqrt(2.0)


class DomainError(ValueError):
    """Base class for numerical-domain failures (CLI exit code 2)."""


class PoleAtVa(DomainError):
    """E coincides with the pole of k^2 at the average strength va."""


class ZeroEnergyPole(DomainError):
    """E = 0 hit where an expression carries a 1/E factor."""


class ZeroK(DomainError):
    """k = 0 hit where an expression carries a 1/k factor."""


class ZeroDenominator(DomainError):
    """Division by E - v2 requested where the guarded form must be used."""


class GapEdge(DomainError):
    """kappa below tolerance: E too close to the gap edges +-m."""


class DegenerateRoots(DomainError):
    """Cubic root verification failed (residual above tolerance)."""


class PlaneMismatch(DomainError):
    """Flat-band quantity requested off the corresponding plane."""


class OutOfDomainSolution(DomainError):
    """A bound-state solution does not belong to the given configuration."""


class MuPole(DomainError):
    """2E = v1 + v3 hit in the discontinuity factor mu."""


class SPole(DomainError):
    """2E = v1 + v3 hit inside the reduced ODE integration."""


class TypeMismatch(DomainError):
    """Operation asked for a spectrum type it does not support."""


class OutOfValidityWindow(DomainError):
    """Closed-form limit evaluated outside its stated validity window."""


class UnsupportedCombination(DomainError):
    """(squeeze family, spectrum type, level index) not covered by the theory."""


class BranchLost(DomainError):
    """No finite-size state found within the capture radius of a limit level."""


@dataclass(frozen=True)
class PotentialConfig:
    """Bare strengths (V11, V22, V33) of the diagonal potential plus the mass.

    The renormalized strengths v1, v2, v3 and their average va are derived
    properties; v1 - v11 = m and v33 - v3 = m hold exactly by construction.
    """

    v11: float
    v22: float
    v33: float
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")

    @property
    def v1(self) -> float:
        return self.v11 + self.m

    @property
    def v2(self) -> float:
        return self.v22

    @property
    def v3(self) -> float:
        return self.v33 - self.m

    @property
    def va(self) -> float:
        return 0.5 * (self.v1 + self.v3)

    @classmethod
    def from_renormalized(cls, v1: float, v2: float, v3: float, m: float = 1.0):
        return cls(v11=v1 - m, v22=v2, v33=v3 + m, m=m)

    def scale(self) -> float:
        """Characteristic energy used for relative tolerances."""
        return max(self.m, abs(self.v1), abs(self.v2), abs(self.v3))

    def on_plane_a(self, rtol: float = PLANE_RTOL) -> bool:
        """V11 + V33 = 2 V22 within tolerance (equivalently v2 = va)."""
        return abs(self.v2 - self.va) <= rtol * self.scale()

    def on_plane_b(self, rtol: float = PLANE_RTOL) -> bool:
        """V33 - V11 = 2m within tolerance (equivalently v1 = v3)."""
        return abs(self.v1 - self.v3) <= rtol * self.scale()


@dataclass(frozen=True)
class Geometry:
    """Support [x1, x2] of the rectangular potential."""

    x1: float
    x2: float

    def __post_init__(self):
        if not self.x2 > self.x1:
            raise ValueError(f"need x1 < x2, got [{self.x1}, {self.x2}]")

    @property
    def l(self) -> float:
        return self.x2 - self.x1

    @property
    def a(self) -> float:
        return 0.5 * (self.x1 + self.x2)

    @classmethod
    def centered(cls, l: float) -> "Geometry":
        return cls(-0.5 * l, 0.5 * l)


@dataclass(frozen=True)
class EnergyPoint:
    """An in-gap energy with its exterior decay data.

    kappa = sqrt(m^2 - E^2) and rho = sqrt((m - E)/(m + E)); defined only for
    |E| < m.  The identities 1/rho - rho = 2E/kappa and 1/rho + rho = 2m/kappa
    hold exactly.
    """

    e: float
    m: float = 1.0

    def __post_init__(self):
        if not abs(self.e) < self.m:
            raise GapEdge(f"E = {self.e} outside the open gap (-{self.m}, {self.m})")

    @property
    def kappa(self) -> float:
        return float(np.sqrt((self.m - self.e) * (self.m + self.e)))

    @property
    def rho(self) -> float:
        return float(np.sqrt((self.m - self.e) / (self.m + self.e)))

    @property
    def rho_inv(self) -> float:
        return float(np.sqrt((self.m + self.e) / (self.m - self.e)))


def kappa(e, m=1.0):
    """Exterior decay rate sqrt(m^2 - E^2); elementwise."""
    return np.sqrt((m - e) * (m + e))


# --- constant matrices -------------------------------------------------------

S_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]]) / SQRT2
S_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)
# C flips components 1 <-> 3 and anti-commutes with the free Hamiltonian,
# which is what makes the free spectrum particle-hole symmetric.
C_MATRIX = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
# Reflection about the midpoint acts with P = diag(-1, 1, -1) on components.
P_MATRIX = np.diag([-1.0, 1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class SpinMatrices:
    """Bundle of the constant 3x3 matrices used by the model."""

    sy: np.ndarray = field(default_factory=lambda: S_Y.copy())
    sz: np.ndarray = field(default_factory=lambda: S_Z.copy())
    c: np.ndarray = field(default_factory=lambda: C_MATRIX.copy())
    p: np.ndarray = field(default_factory=lambda: P_MATRIX.copy())


def h0(k: float, m: float = 1.0) -> np.ndarray:
    """Momentum-space free Hamiltonian k S_y + m S_z for a plane wave e^{ikx}."""
    return k * S_Y + m * S_Z


# --- trigonometric kernels ---------------------------------------------------

def sc_kernels(w, t):
    """Return (s, c) with s = sin(sqrt(w) t)/sqrt(w), c = cos(sqrt(w) t).

    Continued to w < 0 as sinh/cosh of sqrt(-w) t; both are entire functions
    of w, evaluated through a series for |w| t^2 < 1e-6.  Elementwise in both
    arguments.
    """
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    u = w * t * t
    q = np.sqrt(np.abs(w))
    z = q * t
    with np.errstate(over="ignore", invalid="ignore"):
        s_pos = np.where(q > 0, np.sin(z) / np.where(q == 0, 1.0, q), t)
        c_pos = np.cos(z)
        s_neg = np.where(q > 0, np.sinh(z) / np.where(q == 0, 1.0, q), t)
        c_neg = np.cosh(z)
    s = np.where(u >= 0, s_pos, s_neg)
    c = np.where(u >= 0, c_pos, c_neg)
    small = np.abs(u) < 1e-6
    if np.any(small):
        s_ser = t * (1.0 - u / 6.0 + u * u / 120.0)
        c_ser = 1.0 - u / 2.0 + u * u / 24.0
        s = np.where(small, s_ser, s)
        c = np.where(small, c_ser, c)
    if s.ndim == 0:
        return float(s), float(c)
    return s, c


def sc_ratio(w, t):
    """Return s(w, t)/c(w, t) for w <= 0 without overflow (tanh form).

    Only meaningful where c does not vanish, i.e. for w <= 0 where
    c = cosh >= 1; used to normalize residuals in the imaginary-k region.
    """
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    q = np.sqrt(np.abs(w))
    z = q * t
    with np.errstate(invalid="ignore"):
        r = np.where(q > 0, np.tanh(z) / np.where(q == 0, 1.0, q), t)
    small = np.abs(w * t * t) < 1e-6
    if np.any(small):
        r = np.where(small, t * (1.0 + w * t * t / 3.0), r)
    if r.ndim == 0:
        return float(r)
    return r


# --- scalar kernels ----------------------------------------------------------

def k_squared(cfg: PotentialConfig, e):
    """Squared wave number (E - v1)(E - v2)(E - v3)/(E - va); elementwise.

    A negative value signals an imaginary wave number.  On the plane v2 = va
    the pole cancels against the zero at v2 and the reduced polynomial form
    (E - v1)(E - v3) is returned, valid for every E.  Off the plane, querying
    within POLE_RTOL of va raises PoleAtVa.
    """
    e = np.asarray(e, dtype=float)
    v1, v2, v3, va = cfg.v1, cfg.v2, cfg.v3, cfg.va
    if cfg.on_plane_a(REDUCE_RTOL):
        out = (e - v1) * (e - v3)
    else:
        tol = POLE_RTOL * max(cfg.m, abs(va))
        if np.any(np.abs(e - va) < tol):
            raise PoleAtVa(f"E within {tol} of the pole at va = {va}")
        out = (e - v1) * (e - v2) * (e - v3) / (e - va)
    if out.ndim == 0:
        return float(out)
    return out


def dispersion_sides(cfg: PotentialConfig, e, k2):
    """Residual F(E) - G(E) k^2 of the cubic dispersion relation."""
    e = np.asarray(e, dtype=float)
    f = (e - cfg.v1) * (e - cfg.v2) * (e - cfg.v3)
    g = e - cfg.va
    return f - g * np.asarray(k2, dtype=float)


def gamma(cfg: PotentialConfig, e: float, k: float) -> float:
    """Matching ratio (kappa/k)(1 - v2/E) between interior and exterior."""
    if abs(e) < ZERO_E_RTOL * cfg.m:
        raise ZeroEnergyPole("gamma has a 1/E pole at E = 0")
    if k == 0:
        raise ZeroK("gamma has a 1/k pole at k = 0")
    return kappa(e, cfg.m) / k * (1.0 - cfg.v2 / e)


def eta(cfg: PotentialConfig, e: float, k):
    """Interior amplitude ratio sqrt(2)(E - v2)/k.

    Accepts a real or complex (imaginary) wave number and returns the
    analytically continued value; downstream code only ever uses eta through
    the products eta*sin(kl) and sin(kl)/eta, which the (s, c) kernels
    evaluate without any branch choice.
    """
    if k == 0:
        raise ZeroK("eta has a 1/k pole at k = 0")
    val = SQRT2 * (e - cfg.v2) / k
    if isinstance(k, complex):
        return val
    return float(val)

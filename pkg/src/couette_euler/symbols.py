"""Time-dependent symbols of the sheared frame and the 2x2 mode system.

In the moving frame (X, Y) = (x - y t, y) the Laplacian becomes
Delta_L = dXX + (dY - t dX)^2, with Fourier symbol -p where

    p(t, k, eta)  = k^2 + (eta - k t)^2,
    dt p(t, k, eta) = -2 k (eta - k t)     (its time derivative).

The compressible pair (delta_hat, A_hat) = ((R+Theta)/gamma, A) in Fourier
space is rescaled to

    Z1 = delta_hat / (M p^{1/4}),      Z2 = A_hat / p^{3/4},

which turns the per-mode dynamics into Z' = L(t) Z + F(t) * source with a
trace-free real matrix L and scalar forcing profile F.

Two conventions are provided for the lower-left coefficient of L (and the
matching Lyapunov coefficient d):

* ``derived`` (default): substituting the weights into the unweighted
  equations gives  L21 = sqrt(p)/M + 2 M k^2 / p^{3/2}.
* ``printed``: the variant  L21 = 2 sqrt(p)/M + 2 M k^2 / p^{3/2}.

All quantitative checks in this package run under ``derived``; the switch
exists so both variants can be compared side by side.  The Lyapunov energy

    E = sqrt(d/b) |Z1|^2 + sqrt(b/d) |Z2|^2 + 2 (a/sqrt(db)) Re(Z1 conj(Z2))

with a = dtp/(4p), b = sqrt(p)/M satisfies 8 a^2 <= b d for every (t, k,
eta, M) in either convention, which makes E uniformly equivalent to the
diagonal quadratic form with margin m = 1 - 1/sqrt(8).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spectral import ModeKey, PhysParams

POSDEF_MARGIN = 1.0 - 1.0 / np.sqrt(8.0)


class Convention(str, enum.Enum):
    """Lower-left coefficient variant for the 2x2 system matrix."""

    DERIVED = "derived"
    PRINTED = "printed"

    @classmethod
    def parse(cls, value) -> "Convention":
        if isinstance(value, Convention):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"convention must be 'derived' or 'printed', got {value!r}"
            ) from None


def symbol_p(t: float, key: ModeKey):
    """p(t, k, eta) = k^2 + (eta - k t)^2 > 0; minimal (= k^2) at t = eta/k."""
    return key.k ** 2 + (key.eta - key.k * t) ** 2


def symbol_dtp(t: float, key: ModeKey):
    """d/dt of symbol_p: -2 k (eta - k t); vanishes at the critical time eta/k."""
    return -2.0 * key.k * (key.eta - key.k * t)


@dataclass(frozen=True)
class SymbolPoint:
    """Evaluated symbols at one (t, k, eta): p > 0 and dtp with dtp^2 <= 4 k^2 p."""

    t: float
    key: ModeKey
    p: float
    dtp: float

    def __post_init__(self):
        if not self.p > 0.0:
            raise ValueError("p must be positive")
        if self.dtp ** 2 > 4.0 * self.key.k ** 2 * self.p * (1.0 + 1e-12):
            raise ValueError("dtp^2 <= 4 k^2 p violated")


def symbol_point(t: float, key: ModeKey) -> SymbolPoint:
    return SymbolPoint(t=float(t), key=key, p=float(symbol_p(t, key)),
                       dtp=float(symbol_dtp(t, key)))


@dataclass(frozen=True)
class LyapCoeffs:
    """Coefficients (a, b, d) of the Lyapunov quadratic form at one (t, k, eta)."""

    a: float
    b: float
    d: float

    def __post_init__(self):
        if not (self.b > 0.0 and self.d > 0.0):
            raise ValueError("b and d must be positive")
        if 8.0 * self.a ** 2 > self.b * self.d * (1.0 + 1e-12):
            raise ValueError("positive definiteness margin 8 a^2 <= b d violated")


def lyap_coeffs(t: float, key: ModeKey, params: PhysParams,
                convention: Convention = Convention.DERIVED) -> LyapCoeffs:
    """a = dtp/(4p), b = sqrt(p)/M, d = L21 of the matching convention."""
    conv = Convention.parse(convention)
    p = symbol_p(t, key)
    a = 0.25 * symbol_dtp(t, key) / p
    b = np.sqrt(p) / params.mach
    d = b + 2.0 * params.mach * key.k ** 2 / p ** 1.5
    if conv is Convention.PRINTED:
        d = d + b
    return LyapCoeffs(a=float(a), b=float(b), d=float(d))


def matrix_L(t: float, key: ModeKey, params: PhysParams,
             convention: Convention = Convention.DERIVED) -> np.ndarray:
    """Trace-free system matrix [[-a, -b], [d, a]] of the weighted pair."""
    c = lyap_coeffs(t, key, params, convention)
    return np.array([[-c.a, -c.b], [c.d, c.a]], dtype=float)


def forcing_F(t: float, key: ModeKey, params: PhysParams) -> np.ndarray:
    """Forcing profile (0, -2 k^2 / (gamma p^{7/4})) multiplying the source."""
    p = symbol_p(t, key)
    return np.array([0.0, -2.0 * key.k ** 2 / (params.gamma * p ** 1.75)])


@dataclass(frozen=True)
class WeightedState:
    """Weighted compressible pair (Z1, Z2) at one mode."""

    Z1: complex
    Z2: complex

    def as_vector(self) -> np.ndarray:
        return np.array([self.Z1, self.Z2], dtype=np.complex128)

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(abs(self.Z1) ** 2 + abs(self.Z2) ** 2))


def weight(delta_hat, a_hat, t: float, key: ModeKey,
           params: PhysParams) -> WeightedState:
    """(delta_hat, A_hat) -> Z = (delta_hat/(M p^{1/4}), A_hat/p^{3/4})."""
    p = symbol_p(t, key)
    return WeightedState(Z1=delta_hat / (params.mach * p ** 0.25),
                         Z2=a_hat / p ** 0.75)


def unweight(z: WeightedState, t: float, key: ModeKey,
             params: PhysParams) -> tuple[complex, complex]:
    """Exact inverse of :func:`weight` (p > 0 always)."""
    p = symbol_p(t, key)
    return z.Z1 * params.mach * p ** 0.25, z.Z2 * p ** 0.75


def weight_arrays(delta_hat, a_hat, t, k, eta, mach):
    """Vectorized weighting for arrays of modes; returns (Z1, Z2)."""
    p = k ** 2 + (eta - k * t) ** 2
    return delta_hat / (mach * p ** 0.25), a_hat / p ** 0.75


def unweight_arrays(z1, z2, t, k, eta, mach):
    """Vectorized inverse of :func:`weight_arrays`; returns (delta_hat, A_hat)."""
    p = k ** 2 + (eta - k * t) ** 2
    return z1 * mach * p ** 0.25, z2 * p ** 0.75


def lyap_energy(z: WeightedState, coeffs: LyapCoeffs) -> float:
    """E(Z) = sqrt(d/b)|Z1|^2 + sqrt(b/d)|Z2|^2 + 2 a/sqrt(db) Re(Z1 conj Z2).

    Nonnegative: the margin 8 a^2 <= b d gives
    E >= (1 - 1/sqrt(8)) (sqrt(d/b)|Z1|^2 + sqrt(b/d)|Z2|^2).
    """
    return float(lyap_energy_arrays(z.Z1, z.Z2, coeffs.a, coeffs.b, coeffs.d))


def lyap_energy_arrays(z1, z2, a, b, d):
    """Vectorized Lyapunov energy; inputs broadcast elementwise."""
    rd = np.sqrt(d / b)
    cross = a / np.sqrt(d * b)
    return (rd * np.abs(z1) ** 2 + np.abs(z2) ** 2 / rd
            + 2.0 * cross * np.real(z1 * np.conj(z2)))


def lyap_coeff_arrays(t, k, eta, mach, convention: Convention = Convention.DERIVED):
    """Vectorized (a, b, d) over arrays of (k, eta) at a common time."""
    conv = Convention.parse(convention)
    q = eta - k * t
    p = k ** 2 + q ** 2
    a = -0.5 * k * q / p
    b = np.sqrt(p) / mach
    d = b + 2.0 * mach * k ** 2 / p ** 1.5
    if conv is Convention.PRINTED:
        d = d + b
    return a, b, d

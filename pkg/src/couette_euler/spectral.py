"""Spectral representation of real fields on T x R and anisotropic Sobolev norms.

The plane Couette background lives on (x, y) in T x R with T = [0, 2*pi).
All spectral data uses the transform

    fhat(k, eta) = (1/2pi) * integral over T x R of exp(-i(k*x + eta*y)) f dx dy,

for integer x-wavenumbers k and continuous y-frequencies eta.  With this
normalization Plancherel reads  ||f||_{L2}^2 = sum_k int |fhat(k,eta)|^2 d(eta),
so every norm below is a plain weighted quadrature over the stored modes.

A real field obeys the Hermitian symmetry fhat(-k,-eta) = conj(fhat(k,eta)).
The zero x-mode (k = 0) is excluded by construction; it decouples from the
sheared dynamics and is handled in :mod:`couette_euler.zero_mode`.

All operations treat fields as immutable values (results are fresh
objects, inputs are never written to), so evaluation over many modes is
safe to parallelize.  eta is discretized on a uniform grid symmetric about
0, so the Hermitian partner of a grid point is again a grid point.  Integrals over eta use the
trapezoid rule; Gaussian packets are truncated only where their spectral
tails are below 1e-14.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)

# A Gaussian of width w decays below 1e-14 at 8 widths; grids must cover at
# least that much of the spectral profile exp(-w^2 eta^2 / 2), i.e. 8/w.
MIN_WIDTHS = 8.0


def jap(x):
    """Japanese bracket <x> = sqrt(1 + x^2)."""
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


@dataclass(frozen=True)
class PhysParams:
    """Physical constants: ratio of specific heats and Mach number.

    gamma > 1 (gamma - 1 appears as a positive coefficient) and mach > 0
    (the acoustic speed in the linearized system is 1/mach).
    """

    gamma: float
    mach: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.mach > 0.0:
            raise ValueError(f"mach must be > 0, got {self.mach}")


def validate_params(p: PhysParams) -> PhysParams:
    """Return p unchanged after re-checking gamma > 1 and mach > 0."""
    if not (p.gamma > 1.0 and p.mach > 0.0):
        raise ValueError(f"invalid parameters gamma={p.gamma}, mach={p.mach}")
    return p


@dataclass(frozen=True)
class ModeKey:
    """A single nonzero x-wavenumber k paired with a y-frequency eta."""

    k: int
    eta: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise ValueError(f"k must be a nonzero integer, got {self.k}")


@dataclass(frozen=True)
class EtaGrid:
    """Uniform eta grid on [eta_min, eta_max], symmetric about 0."""

    eta_min: float
    eta_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two eta points")
        if not self.eta_min < self.eta_max:
            raise ValueError("eta_min must be < eta_max")
        if abs(self.eta_min + self.eta_max) > 1e-12 * max(1.0, abs(self.eta_max)):
            raise ValueError("grid must be symmetric about eta = 0")

    @property
    def spacing(self) -> float:
        return (self.eta_max - self.eta_min) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.eta_min, self.eta_max, self.n)
        pts.flags.writeable = False
        return pts


@dataclass
class SpectralField:
    """Complex amplitudes fhat(k, eta) for a set of nonzero integer k.

    amp has shape (len(k_list), grid.n).  k_list is sorted and never
    contains 0.  Physical (real) fields satisfy
    amp[-k, reversed eta] = conj(amp[k, eta]); see :meth:`hermitian_defect`.
    """

    grid: EtaGrid
    k_list: tuple[int, ...]
    amp: np.ndarray

    def __post_init__(self):
        self.k_list = tuple(int(k) for k in self.k_list)
        if any(k == 0 for k in self.k_list):
            raise ValueError("k = 0 modes are not representable here")
        if list(self.k_list) != sorted(set(self.k_list)):
            raise ValueError("k_list must be sorted and duplicate-free")
        self.amp = np.asarray(self.amp, dtype=np.complex128)
        if self.amp.shape != (len(self.k_list), self.grid.n):
            raise ValueError(
                f"amp shape {self.amp.shape} does not match "
                f"({len(self.k_list)}, {self.grid.n})"
            )

    @classmethod
    def zeros(cls, grid: EtaGrid, k_list) -> "SpectralField":
        ks = tuple(sorted(set(int(k) for k in k_list)))
        return cls(grid, ks, np.zeros((len(ks), grid.n), dtype=np.complex128))

    def index_of(self, k: int) -> int:
        try:
            return self.k_list.index(k)
        except ValueError:
            raise KeyError(f"k={k} not stored (have {self.k_list})") from None

    def row(self, k: int) -> np.ndarray:
        return self.amp[self.index_of(k)]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.k_list, self.amp.copy())

    def hermitian_defect(self) -> float:
        """Max |amp(-k,-eta) - conj(amp(k,eta))| over stored (k,-k) pairs."""
        worst = 0.0
        for i, k in enumerate(self.k_list):
            if -k in self.k_list:
                j = self.index_of(-k)
                worst = max(worst, float(np.max(np.abs(
                    self.amp[j, ::-1] - np.conj(self.amp[i])))))
        return worst

    def same_layout(self, other: "SpectralField") -> bool:
        return self.grid == other.grid and self.k_list == other.k_list

    def _binary(self, other, op):
        if isinstance(other, SpectralField):
            if not self.same_layout(other):
                raise ValueError("spectral fields live on different grids")
            return SpectralField(self.grid, self.k_list, op(self.amp, other.amp))
        return SpectralField(self.grid, self.k_list, op(self.amp, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.k_list, self.amp * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SpectralField(self.grid, self.k_list, self.amp / scalar)


@dataclass(frozen=True)
class GaussianPacket:
    """One physical field: x-harmonics times a Gaussian y-profile.

    The physical field is

        f(x, y) = amplitude * sum_k [ A_k e^{ikx} + conj(A_k) e^{-ikx} ]
                              * exp(-(y - center)^2 / (2 width^2))

    over the listed harmonics {k: A_k}, hence real by construction.  Every
    listed k must be nonzero so the field has zero x-mean.
    """

    harmonics: Mapping[int, complex]
    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.width > 0.0:
            raise ValueError(f"width must be > 0, got {self.width}")
        for k in self.harmonics:
            if int(k) != k or k == 0:
                raise ValueError(f"harmonic k must be a nonzero integer, got {k}")

    @property
    def is_zero(self) -> bool:
        return not self.harmonics or all(v == 0 for v in self.harmonics.values()) \
            or self.amplitude == 0.0


@dataclass(frozen=True)
class InitialDataSpec:
    """Gaussian packet descriptors for the four physical fields."""

    rho: GaussianPacket = field(default_factory=lambda: GaussianPacket({}))
    alpha: GaussianPacket = field(default_factory=lambda: GaussianPacket({}))
    omega: GaussianPacket = field(default_factory=lambda: GaussianPacket({}))
    theta: GaussianPacket = field(default_factory=lambda: GaussianPacket({}))

    def packets(self) -> dict[str, GaussianPacket]:
        return {"rho": self.rho, "alpha": self.alpha,
                "omega": self.omega, "theta": self.theta}

    def all_k(self) -> tuple[int, ...]:
        ks: set[int] = set()
        for packet in self.packets().values():
            for k in packet.harmonics:
                ks.add(int(k))
                ks.add(-int(k))
        return tuple(sorted(ks))

    def check_grid(self, grid: EtaGrid) -> None:
        """Require the grid to hold >= MIN_WIDTHS spectral widths of every packet."""
        for name, packet in self.packets().items():
            if packet.is_zero:
                continue
            need = MIN_WIDTHS / packet.width
            if grid.eta_max < need or -grid.eta_min < need:
                raise ValueError(
                    f"eta grid [{grid.eta_min}, {grid.eta_max}] truncates the "
                    f"{name} packet; need at least +/-{need:.3g}")


def make_packet(packet: GaussianPacket, grid: EtaGrid,
                k_list=None) -> SpectralField:
    """Spectral field of a Gaussian packet (transform taken analytically).

    A profile exp(-(y-c)^2/(2 w^2)) transforms to
    sqrt(2pi) * w * exp(-w^2 eta^2 / 2) * exp(-i c eta).  Each listed
    harmonic (k, A_k) fills row k with A_k times that profile and row -k
    with conj(A_k) times the same profile, which is exactly the Hermitian
    completion of a real field.
    """
    ks: set[int] = set()
    for k in packet.harmonics:
        ks.add(int(k))
        ks.add(-int(k))
    if k_list is not None:
        ks |= {int(k) for k in k_list}
    field_ = SpectralField.zeros(grid, ks if ks else (1, -1))
    if packet.is_zero and not packet.harmonics:
        return field_
    eta = grid.points
    profile = (packet.amplitude * SQRT_2PI * packet.width
               * np.exp(-0.5 * packet.width ** 2 * eta ** 2)
               * np.exp(-1j * packet.center * eta))
    for k, a_k in packet.harmonics.items():
        field_.amp[field_.index_of(int(k))] += a_k * profile
        field_.amp[field_.index_of(-int(k))] += np.conj(a_k) * profile
    return field_


def make_initial_fields(spec: InitialDataSpec, grid: EtaGrid) -> dict[str, SpectralField]:
    """All four initial spectral fields on a common k_list, grid checked."""
    spec.check_grid(grid)
    ks = spec.all_k()
    if not ks:
        ks = (-1, 1)
    return {name: make_packet(packet, grid, k_list=ks)
            for name, packet in spec.packets().items()}


def aniso_norm(f: SpectralField, s1: float, s2: float,
               isotropic: bool = False) -> float:
    """Anisotropic Sobolev norm (sum_k int <k>^{2 s1} <eta>^{2 s2} |fhat|^2 d eta)^{1/2}.

    With isotropic=True the weight is <(k, eta)>^{2 s1} instead and s2 is
    ignored, i.e. the usual H^s norm with s = s1.  Negative indices are fine;
    the brackets never vanish.  The eta integral is a trapezoid rule on the
    stored grid.
    """
    eta = f.grid.points
    total = 0.0
    for i, k in enumerate(f.k_list):
        if isotropic:
            w = (1.0 + k * k + eta ** 2) ** s1
        else:
            w = (1.0 + k * k) ** s1 * (1.0 + eta ** 2) ** s2
        total += float(np.trapezoid(w * np.abs(f.amp[i]) ** 2, eta))
    return float(np.sqrt(max(total, 0.0)))


def l2_norm(f: SpectralField) -> float:
    """Plain L2 norm, aniso_norm with zero indices."""
    return aniso_norm(f, 0.0, 0.0)


def reconstruct_physical(f: SpectralField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample the physical-space field on an (x, y) tensor grid.

    Inverts the stored transform directly:
    f(x, y) = sum_k [ (1/2pi) int fhat(k, eta) e^{i eta y} d eta ] e^{ikx}.
    Returns a real array of shape (len(x), len(y)); the imaginary part is
    dropped (it is zero for Hermitian data up to roundoff).
    """
    eta = f.grid.points
    out = np.zeros((len(x), len(y)), dtype=np.complex128)
    phase_y = np.exp(1j * np.outer(eta, y))          # (n_eta, ny)
    for i, k in enumerate(f.k_list):
        c_k = np.trapezoid(f.amp[i][:, None] * phase_y, eta, axis=0) / (2.0 * np.pi)
        out += np.outer(np.exp(1j * k * np.asarray(x)), c_k)
    return out.real


def physical_l2_norm(f: SpectralField, nx: int = 64,
                     y: np.ndarray | None = None) -> float:
    """L2(T x R) norm of the physical reconstruction on a matched grid.

    x uses nx uniform points on [0, 2pi) (exact for trig polynomials once
    nx > 2 max|k|); y defaults to a grid wide and fine enough for packets
    stored on the eta grid.
    """
    if y is None:
        extent = 4.0 * np.pi / max(f.grid.spacing, 1e-12)
        extent = min(extent, 80.0)
        y = np.linspace(-extent, extent, 4097)
    x = np.linspace(0.0, 2.0 * np.pi, nx, endpoint=False)
    vals = reconstruct_physical(f, x, y)
    # periodic x direction: uniform rectangle rule is the exact quadrature
    per_y = np.sum(np.abs(vals) ** 2, axis=0) * (2.0 * np.pi / nx)
    return float(np.sqrt(np.trapezoid(per_y, y)))


def weight_inequality_ratio(f: SpectralField, s: float, beta: float,
                            t: float) -> float:
    """Measured constant in ||p^{-beta} f||_{H^s} <= C <t>^{-2 beta} ||f||_{H^{s+2 beta}}.

    p(t, k, eta) = k^2 + (eta - k t)^2 is the moving-frame Laplacian symbol.
    Returns the ratio of the two sides (the empirical C); by Plancherel this
    is a pure weight comparison, so the ratio is grid-exact.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    eta = f.grid.points
    g = f.copy()
    for i, k in enumerate(f.k_list):
        p = k * k + (eta - k * t) ** 2
        g.amp[i] *= p ** (-beta)
    lhs = aniso_norm(g, s, 0.0, isotropic=True)
    rhs = float(jap(t) ** (-2.0 * beta)) * aniso_norm(f, s + 2.0 * beta, 0.0,
                                                      isotropic=True)
    if rhs == 0.0:
        return 0.0
    return lhs / rhs

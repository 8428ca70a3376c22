"""Transported invariants, field reconstruction and Helmholtz projections.

The linear flow transports three combinations unchanged:

    beta  = rho + omega,
    Gamma = theta + (gamma - 1) omega,
    sigma = (gamma - 1) rho - theta,

so the full state at any time is recoverable from the evolving pair
(delta_hat, A_hat), delta = (R + Theta)/gamma, plus the initial invariants:

    Omega = (beta_in + Gamma_in)/gamma - delta,
    R     = beta_in - Omega,
    Theta = Gamma_in - (gamma - 1) Omega.

Velocity spectra come from the Helmholtz split v = P[v] + Q[v] with
P[v] = grad^perp Delta^{-1} omega (divergence-free) and
Q[v] = grad Delta^{-1} alpha (curl-free).  In the moving frame, with
q = eta - k t and p = k^2 + q^2:

    P[v]^x -> i q Omega_hat / p,    P[v]^y -> -i k Omega_hat / p,
    Q[v]^x -> -i k A_hat / p,       Q[v]^y -> -i q A_hat / p.

The shear (x, y) -> (x - y t, y) relabels frequencies, eta -> xi = eta - kt,
without changing amplitudes, so every L2-type norm may be computed in the
moving frame directly; resampling to physical frequencies exists only for
export.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import EtaGrid, PhysParams, SpectralField


@dataclass
class Invariants:
    """Initial transported combinations beta, Gamma, sigma as spectral fields."""

    beta_in: SpectralField
    gamma_in: SpectralField
    sigma_in: SpectralField


def _require_same_layout(*fields: SpectralField):
    first = fields[0]
    for f in fields[1:]:
        if not first.same_layout(f):
            raise ValueError("fields live on different grids or k sets")


def invariants_from_initial(rho_in: SpectralField, alpha_in: SpectralField,
                            omega_in: SpectralField, theta_in: SpectralField,
                            params: PhysParams) -> Invariants:
    """beta = rho+omega, Gamma = theta+(gamma-1) omega, sigma = (gamma-1) rho-theta."""
    _require_same_layout(rho_in, alpha_in, omega_in, theta_in)
    g = params.gamma
    return Invariants(
        beta_in=rho_in + omega_in,
        gamma_in=theta_in + (g - 1.0) * omega_in,
        sigma_in=(g - 1.0) * rho_in - theta_in,
    )


def delta_from_fields(r_hat: SpectralField, theta_hat: SpectralField,
                      params: PhysParams) -> SpectralField:
    """delta = (R + Theta) / gamma."""
    _require_same_layout(r_hat, theta_hat)
    return (r_hat + theta_hat) / params.gamma


def reconstruct_fields(delta: SpectralField, inv: Invariants,
                       params: PhysParams):
    """Recover (R_hat, Theta_hat, Omega_hat) from delta and the invariants.

    The identity (R + Theta)/gamma = delta holds exactly by construction.
    """
    _require_same_layout(delta, inv.beta_in, inv.gamma_in)
    g = params.gamma
    omega = (inv.beta_in + inv.gamma_in) / g - delta
    r_hat = inv.beta_in - omega
    theta_hat = inv.gamma_in - (g - 1.0) * omega
    return r_hat, theta_hat, omega


@dataclass
class VelocitySpectra:
    """Moving-frame spectra of the Helmholtz components of the velocity."""

    Pvx: SpectralField
    Pvy: SpectralField
    Qvx: SpectralField
    Qvy: SpectralField


def helmholtz_spectra(omega_hat: SpectralField, a_hat: SpectralField,
                      t: float) -> VelocitySpectra:
    """Helmholtz projection spectra at time t (see module docstring).

    Identities k*Pvx + q*Pvy = 0 (incompressibility) and
    k*Qvy - q*Qvx = 0 (irrotationality) hold pointwise.
    """
    _require_same_layout(omega_hat, a_hat)
    eta = omega_hat.grid.points
    pvx = omega_hat.copy()
    pvy = omega_hat.copy()
    qvx = a_hat.copy()
    qvy = a_hat.copy()
    for i, k in enumerate(omega_hat.k_list):
        q = eta - k * t
        p = k * k + q * q
        pvx.amp[i] = 1j * q * omega_hat.amp[i] / p
        pvy.amp[i] = -1j * k * omega_hat.amp[i] / p
        qvx.amp[i] = -1j * k * a_hat.amp[i] / p
        qvy.amp[i] = -1j * q * a_hat.amp[i] / p
    return VelocitySpectra(Pvx=pvx, Pvy=pvy, Qvx=qvx, Qvy=qvy)


def velocity_norms(omega_hat: SpectralField, a_hat: SpectralField, t: float):
    """(||P[v]^x||, ||P[v]^y||, ||Q[v]||) in L2, computed in the moving frame.

    ||P[v]^x||^2 = sum_k int q^2/p^2 |Omega_hat|^2,
    ||P[v]^y||^2 = sum_k int k^2/p^2 |Omega_hat|^2,
    ||Q[v]||^2   = sum_k int |A_hat|^2 / p.
    """
    _require_same_layout(omega_hat, a_hat)
    eta = omega_hat.grid.points
    pvx2 = pvy2 = qv2 = 0.0
    for i, k in enumerate(omega_hat.k_list):
        q = eta - k * t
        p = k * k + q * q
        w_om = np.abs(omega_hat.amp[i]) ** 2
        w_a = np.abs(a_hat.amp[i]) ** 2
        pvx2 += float(np.trapezoid(q * q / p ** 2 * w_om, eta))
        pvy2 += float(np.trapezoid(k * k / p ** 2 * w_om, eta))
        qv2 += float(np.trapezoid(w_a / p, eta))
    return np.sqrt(pvx2), np.sqrt(pvy2), np.sqrt(qv2)


@dataclass
class ShearedField:
    """A spectrum relabeled to physical frequencies xi = eta - k t.

    Pure relabeling: per k the xi grid is the eta grid shifted by -k t and
    the amplitudes are untouched, so all L2 norms agree exactly with the
    moving-frame field.  Use :meth:`sample` for off-grid queries.
    """

    t: float
    grid: EtaGrid
    k_list: tuple[int, ...]
    amp: np.ndarray

    def xi(self, k: int) -> np.ndarray:
        return self.grid.points - k * self.t

    def row(self, k: int) -> np.ndarray:
        return self.amp[self.k_list.index(k)]

    def sample(self, k: int, xi_values) -> np.ndarray:
        """Amplitudes at physical frequencies xi (must lie in the stored range)."""
        xi_values = np.atleast_1d(np.asarray(xi_values, dtype=float))
        eta_req = xi_values + k * self.t
        grid = self.grid
        if np.any(eta_req < grid.eta_min - 1e-12) or \
                np.any(eta_req > grid.eta_max + 1e-12):
            raise ValueError("requested physical frequency outside the stored "
                             "eta range")
        row = self.row(k)
        return (np.interp(eta_req, grid.points, row.real)
                + 1j * np.interp(eta_req, grid.points, row.imag))

    def l2_norm(self) -> float:
        eta = self.grid.points
        total = sum(float(np.trapezoid(np.abs(a) ** 2, eta)) for a in self.amp)
        return float(np.sqrt(total))


def to_physical_frequency(f: SpectralField, t: float) -> ShearedField:
    """Relabel a moving-frame spectrum to physical frequencies at time t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return ShearedField(t=float(t), grid=f.grid, k_list=f.k_list,
                        amp=f.amp.copy())


def compressible_block_norms(a_hat: SpectralField, delta: SpectralField,
                             t: float, params: PhysParams):
    """Both sides of the compressible-block norm identity.

    Left: sum_k int (|A_hat|^2/p + gamma^2/M^2 |delta_hat|^2).
    Right: sum_k int sqrt(p) (|Z2|^2 + gamma^2 |Z1|^2) with the standard
    weights Z1 = delta/(M p^{1/4}), Z2 = A/p^{3/4}.  The two agree pointwise
    by construction of the weights (the gamma^2 factor rides along with the
    density normalization).
    """
    _require_same_layout(a_hat, delta)
    eta = a_hat.grid.points
    m = params.mach
    g = params.gamma
    left = right = 0.0
    for i, k in enumerate(a_hat.k_list):
        p = k * k + (eta - k * t) ** 2
        aa = np.abs(a_hat.amp[i]) ** 2
        dd = np.abs(delta.amp[i]) ** 2
        left += float(np.trapezoid(aa / p + g * g / m ** 2 * dd, eta))
        z1 = np.abs(delta.amp[i] / (m * p ** 0.25)) ** 2
        z2 = np.abs(a_hat.amp[i] / p ** 0.75) ** 2
        right += float(np.trapezoid(np.sqrt(p) * (z2 + g * g * z1), eta))
    return left, right

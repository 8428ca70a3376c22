"""Independent finite-difference solver of the original-coordinate system.

For one x-wavenumber k the unsheared equations close on the complex
y-profiles (rho_k, alpha_k, omega_k, theta_k):

    d/dt rho_k   = -i k y rho_k - alpha_k,
    d/dt alpha_k = -i k y alpha_k - 2 i k (dy psi_a + i k psi_w)
                   - (1/(gamma M^2)) (dyy - k^2)(rho_k + theta_k),
    d/dt omega_k = -i k y omega_k + alpha_k,
    d/dt theta_k = -i k y theta_k - (gamma - 1) alpha_k,

where psi_a and psi_w solve the Helmholtz problems
(dyy - k^2) psi = alpha_k (resp. omega_k) with homogeneous Dirichlet values
at +/-L (a tridiagonal solve).  The transport factor i k y is kept exact
(diagonal in y), so the only spatial discretization error comes from dyy
and the Helmholtz solve, both second order.

This solver is a deliberate cross-check: it never uses the moving frame,
the weighted variables or the transported invariants.  Profiles must stay
numerically compact; boundary contamination above 1e-10 aborts a run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .spectral import PhysParams, SpectralField

BOUNDARY_TOL = 1e-10


@dataclass
class FdState:
    """Complex profiles of one x-wavenumber on a uniform y-grid [-L, L]."""

    k: int
    L: float
    rho: np.ndarray
    alpha: np.ndarray
    omega: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise ValueError("k must be a nonzero integer")
        n = len(self.rho)
        for name in ("rho", "alpha", "omega", "theta"):
            arr = np.asarray(getattr(self, name), dtype=np.complex128)
            if arr.shape != (n,):
                raise ValueError("profiles must share one grid")
            setattr(self, name, arr)

    @property
    def n(self) -> int:
        return len(self.rho)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n)

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    def profiles(self):
        return {"rho": self.rho, "alpha": self.alpha,
                "omega": self.omega, "theta": self.theta}

    def boundary_magnitude(self) -> float:
        return max(abs(complex(p[i]))
                   for p in self.profiles().values() for i in (0, -1))

    @classmethod
    def gaussian(cls, k: int, L: float, n: int, amps: dict, center=0.0,
                 width=1.0):
        """Profiles amp * exp(-(y-c)^2/(2 w^2)); amps keys rho/alpha/omega/theta."""
        y = np.linspace(-L, L, n)
        bump = np.exp(-((y - center) ** 2) / (2.0 * width ** 2))
        zero = np.zeros_like(y, dtype=np.complex128)
        vals = {name: amps.get(name, 0.0) * bump for name in
                ("rho", "alpha", "omega", "theta")}
        return cls(k=k, L=L, rho=vals["rho"] + zero, alpha=vals["alpha"] + zero,
                   omega=vals["omega"] + zero, theta=vals["theta"] + zero)


def helmholtz_solve_fd(rhs: np.ndarray, k: int, L: float) -> np.ndarray:
    """Solve (dyy - k^2) psi = rhs, psi(+/-L) = 0, on the uniform grid of rhs.

    Second-order tridiagonal system on the interior nodes.  For k != 0 the
    operator is negative definite, so the solve cannot be singular; a
    failure is re-raised with context just in case.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    rhs = np.asarray(rhs, dtype=np.complex128)
    n = len(rhs)
    h = 2.0 * L / (n - 1)
    m = n - 2
    ab = np.zeros((3, m), dtype=np.complex128)
    ab[0, 1:] = 1.0 / h ** 2
    ab[1, :] = -2.0 / h ** 2 - float(k) ** 2
    ab[2, :-1] = 1.0 / h ** 2
    try:
        interior = solve_banded((1, 1), ab, rhs[1:-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise RuntimeError(f"singular Helmholtz system at k={k}") from exc
    psi = np.zeros(n, dtype=np.complex128)
    psi[1:-1] = interior
    return psi


def _dyy_minus_k2(f: np.ndarray, k: int, h: float) -> np.ndarray:
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h ** 2
    out[0] = (f[1] - 2.0 * f[0]) / h ** 2
    out[-1] = (f[-2] - 2.0 * f[-1]) / h ** 2
    return out - float(k) ** 2 * f


def _rhs(state: np.ndarray, k: int, L: float, y: np.ndarray, h: float,
         params: PhysParams) -> np.ndarray:
    rho, alpha, omega, theta = state
    psi_a = helmholtz_solve_fd(alpha, k, L)
    psi_w = helmholtz_solve_fd(omega, k, L)
    dpsi_a = np.gradient(psi_a, h)
    transport = -1j * k * y
    out = np.empty_like(state)
    out[0] = transport * rho - alpha
    out[1] = (transport * alpha - 2j * k * (dpsi_a + 1j * k * psi_w)
              - _dyy_minus_k2(rho + theta, k, h) / (params.gamma * params.mach ** 2))
    out[2] = transport * omega + alpha
    out[3] = transport * theta - (params.gamma - 1.0) * alpha
    return out


def max_stable_dt(state: FdState, params: PhysParams) -> float:
    """Acoustic CFL 0.5 M h combined with resolution of the shear phase k y."""
    return min(0.5 * params.mach * state.h, 0.5 / (abs(state.k) * state.L))


def step_fd(state: FdState, params: PhysParams, dt: float) -> FdState:
    """One classical RK4 step of the closed system at fixed k."""
    if dt > max_stable_dt(state, params) * (1.0 + 1e-12):
        raise ValueError(
            f"dt={dt:.3e} violates the step bound {max_stable_dt(state, params):.3e} "
            "(acoustic CFL / shear phase resolution)")
    y = state.y
    h = state.h
    s = np.array([state.rho, state.alpha, state.omega, state.theta])
    k1 = _rhs(s, state.k, state.L, y, h, params)
    k2 = _rhs(s + 0.5 * dt * k1, state.k, state.L, y, h, params)
    k3 = _rhs(s + 0.5 * dt * k2, state.k, state.L, y, h, params)
    k4 = _rhs(s + dt * k3, state.k, state.L, y, h, params)
    s = s + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return FdState(k=state.k, L=state.L, rho=s[0], alpha=s[1], omega=s[2],
                   theta=s[3])


def evolve_fd(state: FdState, params: PhysParams, t_end: float,
              dt: float | None = None) -> FdState:
    """March to t_end with uniform steps; checks boundary decay as it goes."""
    limit = max_stable_dt(state, params)
    if dt is None:
        dt = limit
    n_steps = max(1, int(np.ceil(t_end / dt - 1e-12)))
    step = t_end / n_steps
    for i in range(n_steps):
        state = step_fd(state, params, step)
        if state.boundary_magnitude() > BOUNDARY_TOL * 1e2:
            raise RuntimeError(
                f"boundary contamination at t={(i + 1) * step:.4g}: "
                f"{state.boundary_magnitude():.3e}")
    return state


def spectral_profile_at_k(field: SpectralField, k: int, t: float,
                          y: np.ndarray) -> np.ndarray:
    """y-profile of the k-th x-coefficient from a moving-frame spectrum.

    The physical frequency is xi = eta - k t, so
    f_k(t, y) = (1/2pi) int fhat(k, eta) exp(i (eta - k t) y) d eta,
    evaluated by the trapezoid rule on the stored eta grid.
    """
    eta = field.grid.points
    amps = field.row(k)
    w = np.full(eta.shape, field.grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    phase = np.exp(1j * np.outer(eta - k * t, y))
    return (amps * w) @ phase / (2.0 * np.pi)


def compare_with_spectral(fd: FdState, spectral_fields: dict, t: float) -> dict:
    """Relative L2 discrepancy per field between the two solution paths.

    spectral_fields maps names (rho/alpha/omega/theta) to the moving-frame
    SpectralFields (R, A, Omega, Theta) at the same time t; these are
    inverse-transformed onto the finite-difference y-grid at fixed k.
    """
    y = fd.y
    names = {"rho": fd.rho, "alpha": fd.alpha, "omega": fd.omega,
             "theta": fd.theta}
    out = {}
    for name, fd_profile in names.items():
        spec = spectral_profile_at_k(spectral_fields[name], fd.k, t, y)
        denom = np.linalg.norm(fd_profile)
        diff = np.linalg.norm(fd_profile - spec)
        out[name] = float(diff / denom) if denom > 0 else float(diff)
    return out


def profile_l2_pair_norm(profile: np.ndarray, y: np.ndarray) -> float:
    """L2(T x R) norm of the real field carried by one +/-k profile pair.

    f = f_k(y) e^{ikx} + conj gives ||f||^2 = 4 pi int |f_k|^2 dy.
    """
    return float(np.sqrt(4.0 * np.pi * np.trapezoid(np.abs(profile) ** 2, y)))

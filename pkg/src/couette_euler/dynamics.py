"""Time integration of the per-mode systems.

Three equivalent formulations of one (k, eta) mode are integrated here:

* weighted pair     Z' = L(t) Z + F(t) * source          (Z1, Z2)
* unweighted pair   (delta_hat, A_hat)' = ...            raw amplitudes
* full quadruple    (R_hat, A_hat, Omega_hat, Theta_hat)' = ...

plus the homogeneous propagator Phi_L(t, s) and the integral representation

    Z(t) = Phi_L(t, 0) ( Z_in + int_0^t Phi_L(0, s) F(s) source ds ).

The integrator is classical RK4 with local error estimated by step doubling
and the oscillation-resolving cap dt <= c_osc * M / sqrt(p(t, k, eta)); the
acoustic frequency grows like |k| t / M, so fixed steps would silently
under-resolve late times.  The forcing integral uses the trapezoid rule on
the propagator's own accepted time samples.

The full quadruple conserves beta_hat = R+Omega and Gamma_hat =
Theta+(gamma-1)Omega exactly (they are linear invariants, which every
Runge-Kutta method preserves), so their drift measures pure roundoff.

Batched mode evolution is compiled with numba when available; set the
environment variable COUETTE_EULER_NO_NUMBA=1 to force the (much slower)
pure-numpy path, which implements the identical stepping rule.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .spectral import ModeKey, PhysParams
from .symbols import Convention, lyap_coeff_arrays

_SAFETY = 0.9

if os.environ.get("COUETTE_EULER_NO_NUMBA"):
    _KERNELS = None
else:
    try:
        from . import _kernels as _KERNELS
    except ImportError:  # pragma: no cover - numba present in normal installs
        _KERNELS = None


class IntegrationError(RuntimeError):
    """Step underflow or step-budget exhaustion, with the offending mode."""

    def __init__(self, message, t=None, key=None):
        super().__init__(message)
        self.t = t
        self.key = key


@dataclass(frozen=True)
class StepPolicy:
    """Step-size policy: base step, oscillation resolution, error tolerance."""

    base_dt: float = 0.05
    c_osc: float = 0.1
    tol: float = 1e-6
    min_dt: float = 1e-12
    max_steps: int = 100_000_000

    def __post_init__(self):
        if not (self.base_dt > 0 and self.c_osc > 0 and self.tol > 0):
            raise ValueError("base_dt, c_osc and tol must be positive")


@dataclass(frozen=True)
class FullModeState:
    """Quadruple (R_hat, A_hat, Omega_hat, Theta_hat) at one mode.

    The combinations R+Omega and Theta+(gamma-1) Omega are conserved by the
    evolution (verified by the tests, not enforced here).
    """

    rhat: complex
    ahat: complex
    omegahat: complex
    thetahat: complex

    def as_vector(self) -> np.ndarray:
        return np.array([self.rhat, self.ahat, self.omegahat, self.thetahat],
                        dtype=np.complex128)

    @classmethod
    def from_vector(cls, y) -> "FullModeState":
        y = np.asarray(y, dtype=np.complex128).reshape(4)
        return cls(rhat=complex(y[0]), ahat=complex(y[1]),
                   omegahat=complex(y[2]), thetahat=complex(y[3]))

    def delta(self, params: PhysParams) -> complex:
        return (self.rhat + self.thetahat) / params.gamma


@dataclass
class Trajectory:
    """Sampled solution of one mode: times, states (n_times, dim), metadata."""

    times: np.ndarray
    states: np.ndarray
    key: ModeKey | None = None
    params: PhysParams | None = None
    convention: Convention = Convention.DERIVED
    n_steps: int = 0

    def final(self) -> np.ndarray:
        return self.states[-1]


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def rhs_weighted(t, z, key: ModeKey, params: PhysParams, source=0.0,
                 convention: Convention = Convention.DERIVED) -> np.ndarray:
    """L(t) z + F(t) * source for the weighted pair z = (Z1, Z2)."""
    a, b, d = lyap_coeff_arrays(t, key.k, key.eta, params.mach, convention)
    p = key.k ** 2 + (key.eta - key.k * t) ** 2
    f2 = -2.0 * key.k ** 2 / (params.gamma * p ** 1.75)
    z = np.asarray(z, dtype=np.complex128)
    return np.array([-a * z[0] - b * z[1],
                     d * z[0] + a * z[1] + f2 * source], dtype=np.complex128)


def rhs_unweighted(t, s, key: ModeKey, params: PhysParams, source=0.0,
                   convention: Convention = Convention.DERIVED) -> np.ndarray:
    """Raw-pair dynamics for s = (delta_hat, A_hat)."""
    k, eta = key.k, key.eta
    q = eta - k * t
    p = k * k + q * q
    dtp = -2.0 * k * q
    coef = p / params.mach ** 2 + 2.0 * k * k / p
    if Convention.parse(convention) is Convention.PRINTED:
        coef += p / params.mach ** 2
    s = np.asarray(s, dtype=np.complex128)
    return np.array([
        -s[1],
        (dtp / p) * s[1] + coef * s[0]
        - (2.0 * k * k / (params.gamma * p)) * source,
    ], dtype=np.complex128)


def rhs_full(t, s, key: ModeKey, params: PhysParams) -> np.ndarray:
    """Quadruple dynamics for s = (R_hat, A_hat, Omega_hat, Theta_hat)."""
    k, eta = key.k, key.eta
    q = eta - k * t
    p = k * k + q * q
    s = np.asarray(s, dtype=np.complex128)
    da = ((-2.0 * k * q / p) * s[1] - (2.0 * k * k / p) * s[2]
          + (p / (params.gamma * params.mach ** 2)) * (s[0] + s[3]))
    return np.array([-s[1], da, s[1], -(params.gamma - 1.0) * s[1]],
                    dtype=np.complex128)


# ---------------------------------------------------------------------------
# reference adaptive integrator (pure numpy; the compiled kernels implement
# exactly this stepping rule)
# ---------------------------------------------------------------------------

def _rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _adaptive_march(rhs, y0, sample_times, policy, key, params,
                    on_accept=None):
    y = np.array(y0, dtype=np.complex128)
    states = np.empty((len(sample_times),) + y.shape, dtype=np.complex128)
    states[0] = y
    t = float(sample_times[0])
    h = policy.base_dt
    steps = 0
    for j in range(1, len(sample_times)):
        tt = float(sample_times[j])
        while t < tt:
            if steps >= policy.max_steps:
                raise IntegrationError(
                    f"step budget {policy.max_steps} exhausted at t={t}",
                    t=t, key=key)
            p = key.k ** 2 + (key.eta - key.k * t) ** 2
            hcap = policy.c_osc * params.mach / np.sqrt(p)
            h_eff = min(h, policy.base_dt, hcap)
            closing = h_eff >= tt - t
            if closing:
                h_eff = tt - t
            y_full = _rk4_step(rhs, t, y, h_eff)
            y_mid = _rk4_step(rhs, t, y, 0.5 * h_eff)
            y_half = _rk4_step(rhs, t + 0.5 * h_eff, y_mid, 0.5 * h_eff)
            err = float(np.max(np.abs(y_half - y_full))) / 15.0
            sc = policy.tol * (1.0 + float(np.max(np.abs(y_half))))
            if err <= sc:
                y = y_half
                t_new = tt if closing else t + h_eff
                if on_accept is not None:
                    on_accept(t, t_new, h_eff, y)
                t = t_new
                steps += 1
                fac = 4.0 if err == 0.0 else min(
                    4.0, max(0.2, _SAFETY * (sc / err) ** 0.2))
                h = h_eff * fac
            else:
                h = h_eff * max(0.1, _SAFETY * (sc / err) ** 0.2)
                if h < policy.min_dt:
                    raise IntegrationError(
                        f"step underflow (dt={h:.3e}) at t={t}, "
                        f"k={key.k}, eta={key.eta}", t=t, key=key)
        states[j] = y
    return states, steps


def _sample_times(t_end, sample_dt):
    if sample_dt is None or sample_dt >= t_end:
        return np.array([0.0, float(t_end)])
    n = int(np.floor(t_end / sample_dt + 1e-9))
    ts = np.arange(n + 1) * sample_dt
    if ts[-1] < t_end - 1e-12 * max(1.0, t_end):
        ts = np.append(ts, t_end)
    ts[-1] = t_end
    return ts


def integrate(rhs, state0, t_end: float, policy: StepPolicy, key: ModeKey,
              params: PhysParams, sample_dt: float | None = None,
              convention: Convention = Convention.DERIVED) -> Trajectory:
    """Integrate y' = rhs(t, y) from 0 to t_end with the adaptive RK4 march.

    rhs is any callable (t, y) -> dy, typically one of :func:`rhs_weighted`,
    :func:`rhs_unweighted`, :func:`rhs_full` with the mode data bound.  The
    trajectory is sampled every sample_dt (always including 0 and t_end).
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    ts = _sample_times(t_end, sample_dt)
    states, steps = _adaptive_march(rhs, state0, ts, policy, key, params)
    return Trajectory(times=ts, states=states, key=key, params=params,
                      convention=convention, n_steps=steps)


# ---------------------------------------------------------------------------
# batched evolution over many modes (compiled fast path)
# ---------------------------------------------------------------------------

def _as_mode_arrays(k, etas):
    etas = np.asarray(etas, dtype=float)
    kvec = np.broadcast_to(np.asarray(k, dtype=float), etas.shape).copy()
    if np.any(kvec == 0):
        raise ValueError("k = 0 modes cannot be integrated here")
    return kvec, etas


def _check_status(status, tfail, kvec, etavec):
    bad = np.nonzero(status)[0]
    if bad.size:
        i = int(bad[0])
        kind = "step underflow" if status[i] == 1 else "step budget exceeded"
        raise IntegrationError(
            f"{kind} at t={tfail[i]:.6g}, k={kvec[i]:.0f}, eta={etavec[i]:.6g}",
            t=float(tfail[i]), key=ModeKey(int(kvec[i]), float(etavec[i])))


def evolve_full_modes(k, etas, y0, params: PhysParams, sample_times,
                      policy: StepPolicy) -> np.ndarray:
    """March the quadruple system over a batch of modes.

    y0 has shape (4, n_modes); returns (n_samples, 4, n_modes) complex.
    """
    kvec, etavec = _as_mode_arrays(k, etas)
    ts = np.asarray(sample_times, dtype=float)
    y0 = np.ascontiguousarray(y0, dtype=np.complex128)
    if _KERNELS is not None:
        out, status, tfail, _ = _KERNELS.rk4_full_batch(
            kvec, etavec, y0, params.gamma, params.mach, ts,
            policy.base_dt, policy.c_osc, policy.tol, policy.min_dt,
            policy.max_steps)
        _check_status(status, tfail, kvec, etavec)
        return out
    out = np.empty((len(ts), 4, len(etavec)), dtype=np.complex128)
    for i in range(len(etavec)):
        key = ModeKey(int(kvec[i]), float(etavec[i]))
        states, _ = _adaptive_march(
            lambda t, y: rhs_full(t, y, key, params), y0[:, i], ts,
            policy, key, params)
        out[:, :, i] = states
    return out


def evolve_pair_modes(k, etas, z0, source, params: PhysParams, sample_times,
                      policy: StepPolicy, weighted: bool = True,
                      convention: Convention = Convention.DERIVED) -> np.ndarray:
    """March the 2x2 pair (weighted or raw) over a batch of modes.

    z0 has shape (2, n_modes), source (n_modes,); returns
    (n_samples, 2, n_modes) complex.
    """
    kvec, etavec = _as_mode_arrays(k, etas)
    ts = np.asarray(sample_times, dtype=float)
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    src = np.ascontiguousarray(
        np.broadcast_to(np.asarray(source, dtype=np.complex128), etavec.shape))
    printed = Convention.parse(convention) is Convention.PRINTED
    if _KERNELS is not None:
        out, status, tfail, _ = _KERNELS.rk4_pair_batch(
            kvec, etavec, z0, src, params.gamma, params.mach, printed,
            weighted, ts, policy.base_dt, policy.c_osc, policy.tol,
            policy.min_dt, policy.max_steps)
        _check_status(status, tfail, kvec, etavec)
        return out
    rhs_fn = rhs_weighted if weighted else rhs_unweighted
    out = np.empty((len(ts), 2, len(etavec)), dtype=np.complex128)
    for i in range(len(etavec)):
        key = ModeKey(int(kvec[i]), float(etavec[i]))
        states, _ = _adaptive_march(
            lambda t, y: rhs_fn(t, y, key, params, src[i], convention),
            z0[:, i], ts, policy, key, params)
        out[:, :, i] = states
    return out


# ---------------------------------------------------------------------------
# propagator and integral representation
# ---------------------------------------------------------------------------

def _propagate_matrix(key, params, t_from, t_to, policy, convention,
                      accumulate):
    printed = Convention.parse(convention) is Convention.PRINTED
    if _KERNELS is not None:
        m11, m12, m21, m22, i1, i2, status, tfail, _ = _KERNELS.propagator_kernel(
            float(key.k), float(key.eta), params.gamma, params.mach, printed,
            float(t_from), float(t_to), accumulate, policy.base_dt,
            policy.c_osc, policy.tol, policy.min_dt, policy.max_steps)
        if status:
            kind = "step underflow" if status == 1 else "step budget exceeded"
            raise IntegrationError(f"{kind} at t={tfail:.6g}, k={key.k}, "
                                   f"eta={key.eta}", t=tfail, key=key)
        return np.array([[m11, m12], [m21, m22]]), np.array([i1, i2])

    integral = np.zeros(2)
    state = {"g": None}

    def forcing(t):
        p = key.k ** 2 + (key.eta - key.k * t) ** 2
        return -2.0 * key.k ** 2 / (params.gamma * p ** 1.75)

    def rhs(t, m):
        a, b, d = lyap_coeff_arrays(t, key.k, key.eta, params.mach, convention)
        mat = m.reshape(2, 2)
        return (np.array([[-a, -b], [d, a]]) @ mat).ravel()

    def on_accept(t_old, t_new, h, y):
        mat = y.reshape(2, 2).real
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        f2 = forcing(t_new)
        g_new = np.array([-mat[0, 1] * f2, mat[0, 0] * f2]) / det
        if state["g"] is not None:
            integral[:] += 0.5 * h * (state["g"] + g_new)
        state["g"] = g_new

    if accumulate:
        state["g"] = np.array([0.0, forcing(t_from)])
    eye = np.eye(2, dtype=np.complex128).ravel()
    ts = np.array([t_from, t_to], dtype=float)
    states, _ = _adaptive_march(rhs, eye, ts, policy, key, params,
                                on_accept=on_accept if accumulate else None)
    return states[-1].reshape(2, 2).real, integral


def propagator(key: ModeKey, params: PhysParams, t_from: float, t_to: float,
               policy: StepPolicy,
               convention: Convention = Convention.DERIVED) -> np.ndarray:
    """Solution operator Phi_L(t_to, t_from) of the homogeneous weighted pair.

    Columns are integrations from the canonical basis states.  L is
    trace-free, so det Phi = 1; a backward request (t_to < t_from) returns
    the det-normalized inverse of the forward propagator.
    """
    if t_to == t_from:
        return np.eye(2, dtype=np.complex128)
    if t_to < t_from:
        fwd = propagator(key, params, t_to, t_from, policy, convention)
        det = fwd[0, 0] * fwd[1, 1] - fwd[0, 1] * fwd[1, 0]
        return np.array([[fwd[1, 1], -fwd[0, 1]],
                         [-fwd[1, 0], fwd[0, 0]]]) / det
    mat, _ = _propagate_matrix(key, params, t_from, t_to, policy, convention,
                               accumulate=False)
    return mat.astype(np.complex128)


def duhamel_solve(z_in, source, key: ModeKey, params: PhysParams,
                  t_end: float, policy: StepPolicy,
                  convention: Convention = Convention.DERIVED) -> np.ndarray:
    """Final weighted state via the integral representation.

    Computes Phi_L(t, 0) (z_in + int_0^t Phi_L(0, s) F(s) source ds), the
    integral accumulated by the trapezoid rule on the propagator's accepted
    steps.  Agreement with direct integration improves like c_osc^2; use
    c_osc <= 2e-3 for 1e-6 accuracy over moderate horizons.
    """
    z_in = np.asarray(z_in, dtype=np.complex128).reshape(2)
    mat, integral = _propagate_matrix(key, params, 0.0, float(t_end), policy,
                                      convention, accumulate=True)
    return mat @ (z_in + integral * complex(source))

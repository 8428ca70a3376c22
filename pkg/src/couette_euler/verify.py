"""Cross-validation procedures: each pits two independent solution paths
against each other and reports quantitative discrepancies.

* zero-mode marcher vs. the d'Alembert closed form (plus energy drift),
* sheared-frame spectral solution vs. the unsheared finite-difference
  solver at fixed k (the headline dual-method check),
* the normalized forcing integral vs. the universal constant on a grid of
  (k, eta, gamma),
* the four formulations of one mode (weighted pair, raw pair, full
  quadruple, propagator integral form) against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (EtaGrid, GaussianPacket, InitialDataSpec, ModeKey,
                       PhysParams, make_initial_fields)
from .symbols import Convention, weight_arrays, unweight_arrays
from .dynamics import (StepPolicy, duhamel_solve, evolve_full_modes,
                       evolve_pair_modes)
from .fd_oracle import FdState, compare_with_spectral, evolve_fd
from .zero_mode import (ZeroModeState, dalembert_reference, wave_energy,
                        zero_mode_trajectory)
from .analysis import duhamel_bound_check, reference_forcing_constant
from .spectral import SpectralField


# ---------------------------------------------------------------------------
# zero mode vs. closed form
# ---------------------------------------------------------------------------

# Width of the acceptance-scale Gaussian for the wave check.  The spatial
# operator is second order, so the dispersion error at fixed point count
# scales like c*t*h^2/w^3 with h proportional to the domain size
# 12.43*w + c*t; a wide pulse keeps the error below 1e-6 at n = 4096.
WAVE_CHECK_WIDTH = 24.0


def zero_mode_domain(width: float, t_end: float, mach: float) -> float:
    """L >= decay radius (7.43 w) + horizon t/M + 5 widths of margin."""
    return 12.43 * width + t_end / mach


@dataclass
class ZeroModeCheck:
    mach: float
    max_error: float
    energy_drift: float


def zero_mode_wave_check(gamma: float, mach: float, t_end: float = 2.0,
                         n: int = 4096,
                         width: float = WAVE_CHECK_WIDTH) -> ZeroModeCheck:
    """March Gaussian rho0/theta0 data and compare with d'Alembert.

    Returns the max pointwise error of rho0+theta0 at t_end and the
    relative drift of the wave energy over the run.
    """
    params = PhysParams(gamma=gamma, mach=mach)
    L = zero_mode_domain(width, t_end, mach)
    s0 = ZeroModeState.gaussian(L=L, n=n, rho_amp=0.7, theta_amp=0.3,
                                width=width)
    states = zero_mode_trajectory(s0, params, [0.5 * t_end, t_end])
    final = states[-1]
    exact = dalembert_reference(s0, params, t_end)
    err = float(np.max(np.abs(final.rho0 + final.theta0 - exact)))
    e0 = wave_energy(s0, params)
    drift = max(abs(wave_energy(s, params) - e0) for s in states) / e0
    return ZeroModeCheck(mach=mach, max_error=err, energy_drift=drift)


# ---------------------------------------------------------------------------
# spectral vs. finite-difference oracle
# ---------------------------------------------------------------------------

_ORACLE_AMPS = {"rho": 1.0, "alpha": 0.5, "omega": 0.7, "theta": 0.4}


@dataclass
class OracleCheck:
    t: float
    n_eta: int
    n_y: int
    discrepancy: dict

    @property
    def worst(self) -> float:
        return max(self.discrepancy.values())


def oracle_comparison(gamma: float = 1.4, mach: float = 1.0, k: int = 1,
                      t_end: float = 1.0, n_eta: int = 512,
                      n_y: int | None = 2048,
                      width: float = 1.0) -> OracleCheck:
    """Evolve matched Gaussian data along both solution paths to t_end.

    The spectral side integrates the quadruple system in the moving frame;
    the oracle marches the original-coordinate equations at fixed k on a
    truncated y-line.  Discrepancies are relative L2 per field.  With
    n_y=None the y resolution is chosen to keep h ~ 0.03 regardless of the
    Mach-dependent domain size.
    """
    params = PhysParams(gamma=gamma, mach=mach)
    spec = InitialDataSpec(**{
        name: GaussianPacket({k: amp}, width=width)
        for name, amp in _ORACLE_AMPS.items()})
    grid = EtaGrid(-16.0, 16.0, n_eta)
    fields = make_initial_fields(spec, grid)

    eta = grid.points
    y0 = np.stack([fields[name].row(k)
                   for name in ("rho", "alpha", "omega", "theta")])
    policy = StepPolicy(base_dt=0.02, c_osc=0.02, tol=1e-9)
    states = evolve_full_modes(k, eta, y0, params, np.array([0.0, t_end]),
                               policy)
    spectral_now = {}
    for idx, name in enumerate(("rho", "alpha", "omega", "theta")):
        f = SpectralField.zeros(grid, (k,))
        f.amp[0] = states[-1, idx]
        spectral_now[name] = f

    # domain: Gaussian decay radius + acoustic horizon + the slower of the
    # Gaussian margin and the e^{-|k| y} Helmholtz tail (needs ~24/|k| for
    # tails below 1e-10)
    L = 7.43 * width + t_end / mach + max(5.0 * width, 24.0 / abs(k))
    if n_y is None:
        n_y = int(np.ceil(2.0 * L / 0.03)) | 1
    fd = FdState.gaussian(k=k, L=L, n=n_y, amps=_ORACLE_AMPS, width=width)
    fd = evolve_fd(fd, params, t_end)
    disc = compare_with_spectral(fd, spectral_now, t_end)
    return OracleCheck(t=t_end, n_eta=n_eta, n_y=n_y, discrepancy=disc)


# ---------------------------------------------------------------------------
# forcing-integral bound on a grid
# ---------------------------------------------------------------------------

@dataclass
class DuhamelGridCheck:
    bound: float
    entries: list
    worst_margin: float

    @property
    def all_within(self) -> bool:
        return all(e["value"] <= self.bound * (1.0 + 1e-6) for e in self.entries)


def duhamel_grid_check(gammas=(1.4, 2.0), ks=(1, 2, 3),
                       etas=(0.0, 1.0, 10.0)) -> DuhamelGridCheck:
    """Normalized forcing integral vs. the universal constant on a grid."""
    bound = reference_forcing_constant()
    entries = []
    worst = np.inf
    for g in gammas:
        params = PhysParams(gamma=g, mach=1.0)
        for k in ks:
            for eta in etas:
                res = duhamel_bound_check(ModeKey(int(k), float(eta)), params)
                entries.append({"gamma": g, "k": k, "eta": eta,
                                "value": res.value,
                                "raw_integral": res.raw_integral})
                worst = min(worst, bound - res.value)
    return DuhamelGridCheck(bound=bound, entries=entries, worst_margin=worst)


# ---------------------------------------------------------------------------
# formulation equivalence
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceCheck:
    n_modes: int
    t_checked: tuple
    max_rel_diff: float
    per_pair: dict


def _rel_diff(a, b):
    na = np.sqrt(np.abs(a[0]) ** 2 + np.abs(a[1]) ** 2)
    nb = np.sqrt(np.abs(b[0]) ** 2 + np.abs(b[1]) ** 2)
    d = np.sqrt(np.abs(a[0] - b[0]) ** 2 + np.abs(a[1] - b[1]) ** 2)
    return d / np.maximum(np.maximum(na, nb), 1e-300)


def formulation_equivalence(gamma: float = 1.4, mach: float = 1.0,
                            n_modes: int = 20, t_end: float = 50.0,
                            seed: int = 7,
                            convention: Convention = Convention.DERIVED,
                            policy: StepPolicy | None = None,
                            duhamel_policy: StepPolicy | None = None,
                            duhamel_times=(10.0, 50.0)) -> EquivalenceCheck:
    """Pairwise agreement of the four solution paths on random modes.

    All paths are compared on the raw pair (delta_hat, A_hat); relative
    differences use the larger of the two compared magnitudes.  The
    integral-representation leg gets its own, finer policy: its forcing
    quadrature (trapezoid on the accepted steps) converges like c_osc^2,
    against c_osc^4 for the direct marches.
    """
    if policy is None:
        policy = StepPolicy(base_dt=0.01, c_osc=0.002, tol=1e-9)
    if duhamel_policy is None:
        duhamel_policy = StepPolicy(base_dt=0.01, c_osc=3.5e-4, tol=1e-10)
    params = PhysParams(gamma=gamma, mach=mach)
    rng = np.random.default_rng(seed)
    ks = (rng.integers(1, 4, size=n_modes)
          * rng.choice([-1, 1], size=n_modes)).astype(float)
    etas = rng.uniform(-5.0, 5.0, size=n_modes)
    y0 = rng.normal(size=(4, n_modes)) + 1j * rng.normal(size=(4, n_modes))
    src = y0[0] + y0[2] + y0[3] + (params.gamma - 1.0) * y0[2]

    times = np.arange(0.0, t_end + 2.5, 5.0)
    times[-1] = t_end

    full = evolve_full_modes(ks, etas, y0, params, times, policy)
    delta_full = (full[:, 0] + full[:, 3]) / params.gamma
    a_full = full[:, 1]

    delta0 = (y0[0] + y0[3]) / params.gamma
    z0 = np.stack(weight_arrays(delta0, y0[1], 0.0, ks, etas, params.mach))
    zw = evolve_pair_modes(ks, etas, z0, src, params, times, policy,
                           weighted=True, convention=convention)
    delta_w = np.empty_like(delta_full)
    a_w = np.empty_like(a_full)
    for j, t in enumerate(times):
        delta_w[j], a_w[j] = unweight_arrays(zw[j, 0], zw[j, 1], t, ks, etas,
                                             params.mach)

    raw0 = np.stack([delta0, y0[1]])
    zu = evolve_pair_modes(ks, etas, raw0, src, params, times, policy,
                           weighted=False, convention=convention)

    per_pair = {}
    worst = 0.0
    labels = {"full_vs_weighted": ((delta_full, a_full), (delta_w, a_w)),
              "full_vs_unweighted": ((delta_full, a_full), (zu[:, 0], zu[:, 1])),
              "weighted_vs_unweighted": ((delta_w, a_w), (zu[:, 0], zu[:, 1]))}
    for name, (a, b) in labels.items():
        rel = float(np.max(_rel_diff(a, b)[1:]))  # skip identical t=0
        per_pair[name] = rel
        worst = max(worst, rel)

    # integral-representation path, checked at selected horizons
    duh_rel = 0.0
    for t_c in duhamel_times:
        j = int(np.argmin(np.abs(times - t_c)))
        t_c = float(times[j])
        for i in range(n_modes):
            key = ModeKey(int(ks[i]), float(etas[i]))
            z_final = duhamel_solve(z0[:, i], src[i], key, params, t_c,
                                    duhamel_policy, convention)
            d_d, a_d = unweight_arrays(z_final[0], z_final[1], t_c, ks[i],
                                       etas[i], params.mach)
            rel = float(_rel_diff((np.array([delta_full[j, i]]),
                                   np.array([a_full[j, i]])),
                                  (np.array([d_d]), np.array([a_d])))[0])
            duh_rel = max(duh_rel, rel)
    per_pair["duhamel_vs_full"] = duh_rel
    worst = max(worst, duh_rel)

    return EquivalenceCheck(n_modes=n_modes, t_checked=tuple(times[1:]),
                            max_rel_diff=worst, per_pair=per_pair)

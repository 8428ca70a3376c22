"""Linear dynamics of compressible shear-flow perturbations, per Fourier mode.

The package simulates the linearized 2D non-isentropic compressible Euler
equations around plane Couette flow, mode by mode in the sheared frame, and
verifies the structural properties of the system: transported invariants,
a Lyapunov functional equivalent to its initial value, algebraic decay of
the incompressible velocity, and sqrt(t)-type growth of the compressible
quantities.
"""

from .spectral import (EtaGrid, GaussianPacket, InitialDataSpec, ModeKey,
                       PhysParams, SpectralField, aniso_norm, make_packet,
                       make_initial_fields, validate_params)
from .symbols import (Convention, LyapCoeffs, SymbolPoint, WeightedState,
                      forcing_F, lyap_coeffs, lyap_energy, matrix_L,
                      symbol_p, symbol_dtp, symbol_point, unweight, weight)
from .dynamics import (FullModeState, IntegrationError, StepPolicy,
                       Trajectory, duhamel_solve, evolve_full_modes,
                       evolve_pair_modes, integrate, propagator, rhs_full,
                       rhs_unweighted, rhs_weighted)
from .fields import (Invariants, VelocitySpectra, helmholtz_spectra,
                     invariants_from_initial, reconstruct_fields,
                     to_physical_frequency, velocity_norms)
from .zero_mode import (ZeroModeState, dalembert_reference, evolve_zero_mode,
                        recover_zero_fields, wave_energy)
from .fd_oracle import (FdState, compare_with_spectral, evolve_fd,
                        helmholtz_solve_fd, step_fd)
from .analysis import (NormSeries, PowerLawFit, duhamel_bound_check,
                       fit_power_law, lyapunov_sweep,
                       reference_forcing_constant, bound_constants_report)
from .config import RunConfig, default_config, load_config, parse_config
from .pipeline import (run_config, run_convention_comparison,
                       run_simulation, run_sweep)

__version__ = "0.1.0"

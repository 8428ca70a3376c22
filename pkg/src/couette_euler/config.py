"""Run configuration: INI-style file with sections [params], [grid],
[initial.<field>], [run] and optional [sweep].

Schema (keys are exact; unknown keys are rejected):

    [params]   gamma, mach
    [grid]     eta_min, eta_max, n_eta
    [initial.rho] / [initial.alpha] / [initial.omega] / [initial.theta]
               k_set     comma list of nonzero integer harmonics
               amp       comma list of complex amplitudes (one per k, or one
                         value broadcast to all)
               center    Gaussian center in y
               width     Gaussian width in y (> 0)
               amplitude overall real scale (optional, default 1)
    [run]      t_end, sample_dt, base_dt, c_osc, tol, convention
               (derived | printed), out_dir, seed, k_set (optional override
               of the simulated wavenumbers; must cover the packet harmonics)
    [sweep]    gamma, mach    comma lists (optional)

A missing [initial.<field>] section means that field starts at zero.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field as dc_field, replace

from .spectral import (EtaGrid, GaussianPacket, InitialDataSpec, PhysParams)
from .symbols import Convention
from .dynamics import StepPolicy

_FIELD_NAMES = ("rho", "alpha", "omega", "theta")
_KEYS = {
    "params": {"gamma", "mach"},
    "grid": {"eta_min", "eta_max", "n_eta"},
    "initial": {"k_set", "amp", "center", "width", "amplitude"},
    "run": {"t_end", "sample_dt", "base_dt", "c_osc", "tol", "convention",
            "out_dir", "seed", "k_set"},
    "sweep": {"gamma", "mach"},
}

DEFAULT_CONFIG = """\
[params]
gamma = 1.4
mach = 0.5

[grid]
eta_min = -16.0
eta_max = 16.0
n_eta = 512

[initial.rho]
k_set = 1
amp = 1.0
center = 0.0
width = 1.0

[initial.alpha]
k_set = 1
amp = 0.6+0.2j
center = 0.3
width = 1.2

[initial.omega]
k_set = 1
amp = 0.8
center = -0.2
width = 1.0

[initial.theta]
k_set = 1
amp = 0.5-0.3j
center = 0.1
width = 1.1

[run]
t_end = 500.0
sample_dt = 0.5
base_dt = 0.05
c_osc = 0.1
tol = 1e-6
convention = derived
out_dir = out
seed = 1234
"""


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams
    grid: EtaGrid
    initial: InitialDataSpec
    t_end: float = 500.0
    sample_dt: float = 0.5
    policy: StepPolicy = dc_field(default_factory=StepPolicy)
    convention: Convention = Convention.DERIVED
    out_dir: str = "out"
    seed: int = 0
    k_set: tuple[int, ...] = ()
    sweep_gamma: tuple[float, ...] = ()
    sweep_mach: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0 < self.sample_dt <= self.t_end:
            raise ValueError("sample_dt must lie in (0, t_end]")
        packet_ks = {abs(k) for k in self.initial.all_k()}
        if self.k_set:
            if any(k == 0 for k in self.k_set):
                raise ValueError("k_set must not contain 0")
            if not packet_ks <= {abs(k) for k in self.k_set}:
                raise ValueError("k_set must cover every packet harmonic")
        self.initial.check_grid(self.grid)

    @property
    def fit_window(self) -> tuple[float, float]:
        return (0.1 * self.t_end, self.t_end)

    def simulated_ks(self) -> tuple[int, ...]:
        if self.k_set:
            ks = sorted({abs(int(k)) for k in self.k_set})
        else:
            ks = sorted({abs(k) for k in self.initial.all_k()}) or [1]
        return tuple(ks)

    def with_params(self, params: PhysParams) -> "RunConfig":
        return replace(self, params=params)

    def with_out_dir(self, out_dir: str) -> "RunConfig":
        return replace(self, out_dir=out_dir)


def _check_keys(section: str, options, allowed) -> None:
    unknown = set(options) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) {sorted(unknown)} in [{section}]")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_complex_list(text: str) -> tuple[complex, ...]:
    return tuple(complex(tok.strip().replace(" ", ""))
                 for tok in text.split(",") if tok.strip())


def _parse_packet(cp: configparser.ConfigParser, section: str) -> GaussianPacket:
    if not cp.has_section(section):
        return GaussianPacket({})
    _check_keys(section, cp.options(section), _KEYS["initial"])
    ks = _parse_int_list(cp.get(section, "k_set", fallback=""))
    amps = _parse_complex_list(cp.get(section, "amp", fallback="1.0"))
    if ks and len(amps) == 1:
        amps = amps * len(ks)
    if len(ks) != len(amps):
        raise ValueError(f"[{section}]: k_set and amp lengths differ")
    return GaussianPacket(
        harmonics=dict(zip(ks, amps)),
        center=cp.getfloat(section, "center", fallback=0.0),
        width=cp.getfloat(section, "width", fallback=1.0),
        amplitude=cp.getfloat(section, "amplitude", fallback=1.0),
    )


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(text)

    known_sections = {"params", "grid", "run", "sweep"} | {
        f"initial.{name}" for name in _FIELD_NAMES}
    for section in cp.sections():
        if section not in known_sections:
            raise ValueError(f"unknown section [{section}]")

    _check_keys("params", cp.options("params"), _KEYS["params"])
    params = PhysParams(gamma=cp.getfloat("params", "gamma"),
                        mach=cp.getfloat("params", "mach"))

    _check_keys("grid", cp.options("grid"), _KEYS["grid"])
    grid = EtaGrid(eta_min=cp.getfloat("grid", "eta_min"),
                   eta_max=cp.getfloat("grid", "eta_max"),
                   n=cp.getint("grid", "n_eta"))

    initial = InitialDataSpec(
        rho=_parse_packet(cp, "initial.rho"),
        alpha=_parse_packet(cp, "initial.alpha"),
        omega=_parse_packet(cp, "initial.omega"),
        theta=_parse_packet(cp, "initial.theta"),
    )

    has_run = cp.has_section("run")
    _check_keys("run", cp.options("run") if has_run else [], _KEYS["run"])

    def get(key, fallback):
        if not has_run:
            return fallback
        return cp.get("run", key, fallback=fallback)
    policy = StepPolicy(
        base_dt=float(get("base_dt", 0.05)),
        c_osc=float(get("c_osc", 0.1)),
        tol=float(get("tol", 1e-6)),
    )
    sweep_gamma = sweep_mach = ()
    if cp.has_section("sweep"):
        _check_keys("sweep", cp.options("sweep"), _KEYS["sweep"])
        sweep_gamma = _parse_float_list(cp.get("sweep", "gamma", fallback=""))
        sweep_mach = _parse_float_list(cp.get("sweep", "mach", fallback=""))

    return RunConfig(
        params=params,
        grid=grid,
        initial=initial,
        t_end=float(get("t_end", 500.0)),
        sample_dt=float(get("sample_dt", 0.5)),
        policy=policy,
        convention=Convention.parse(get("convention", "derived")),
        out_dir=str(get("out_dir", "out")),
        seed=int(get("seed", 0)),
        k_set=_parse_int_list(get("k_set", "")),
        sweep_gamma=sweep_gamma,
        sweep_mach=sweep_mach,
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r") as handle:
        return parse_config(handle.read())


def default_config() -> RunConfig:
    """The bundled default run (the one the verification suite exercises)."""
    return parse_config(DEFAULT_CONFIG)


def write_default_config(path: str) -> None:
    with open(path, "w") as handle:
        handle.write(DEFAULT_CONFIG)

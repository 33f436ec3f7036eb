"""Time-periodic solutions of the damped isentropic Euler equations."""

from ._core import (
    AdmissibilityError,
    BoundaryForcing,
    ConfigError,
    DampingField,
    DomainError,
    Equilibrium,
    PeriodicSignal,
    SolverError,
    __version__,
    euler_residual,
    frozen_oracle,
    make_equilibrium,
    make_forcing,
    pde_residual,
    riemann_from_state,
    run,
    solve_periodic,
    sound_speed,
    state_from_riemann,
    validate_config,
)

__all__ = [
    "AdmissibilityError",
    "BoundaryForcing",
    "ConfigError",
    "DampingField",
    "DomainError",
    "Equilibrium",
    "PeriodicSignal",
    "SolverError",
    "__version__",
    "euler_residual",
    "frozen_oracle",
    "make_equilibrium",
    "make_forcing",
    "pde_residual",
    "riemann_from_state",
    "run",
    "solve_periodic",
    "sound_speed",
    "state_from_riemann",
    "validate_config",
]

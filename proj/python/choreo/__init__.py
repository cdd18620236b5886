"""Equally spaced choreographies of the n-body problem."""

from ._core import (
    ChoreoError,
    CollisionError,
    Config,
    ContractError,
    DomainError,
    InfeasibleError,
    ParseError,
    __version__,
    analyze,
    config_residual,
    detect_symmetry_axis,
    dft_basis,
    great_circle_test,
    mass_feasibility,
    mass_modes,
    minimize_action,
    mode_residual_curved,
    mode_residual_flat,
    polygon_curved,
    polygon_flat,
    run_cli,
    set_thread_count,
    simulate,
    span_dimension,
    thread_count,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]

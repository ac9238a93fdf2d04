"""Solver, belief filters and simulator for dynamic games with private beliefs."""

from ._core import (
    EquilibriumRule,
    GameSpec,
    InvestmentParams,
    NoPureFixedPoint,
    SpecDocument,
    SpecError,
    build_spec,
    cascade_value,
    drift,
    in_analytic_cascade,
    parse_spec,
    private_update,
    run_command,
    scalar_update,
    simulate,
    solve,
    verify,
    write_spec,
    __version__,
)

__all__ = [
    "EquilibriumRule",
    "GameSpec",
    "InvestmentParams",
    "NoPureFixedPoint",
    "SpecDocument",
    "SpecError",
    "build_spec",
    "cascade_value",
    "drift",
    "in_analytic_cascade",
    "parse_spec",
    "private_update",
    "run_command",
    "scalar_update",
    "simulate",
    "solve",
    "verify",
    "write_spec",
    "__version__",
]

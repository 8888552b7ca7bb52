"""Core-guided MaxSAT and soft-precedence scheduling."""

from softcore._softcore import (
    OracleRefused,
    RcpspParseError,
    WcnfParseError,
    brute_force_maxsat,
    exact_makespan,
    makespan_lower_bound,
    solve_rcpsp,
    solve_wcnf,
    splitmix64,
    verify_core,
)

__all__ = [
    "OracleRefused",
    "RcpspParseError",
    "WcnfParseError",
    "brute_force_maxsat",
    "exact_makespan",
    "makespan_lower_bound",
    "solve_rcpsp",
    "solve_wcnf",
    "splitmix64",
    "verify_core",
]

"""Stochastic Kepler problem: integrators, Monte Carlo ensembles and orbital elements.

Every high-level call takes a :class:`Config`, whose keys match the
command-line tool and the preset files::

    import stokep
    cfg = stokep.Config(T=1.0, n=2000, observables=["M", "H"])
    est = stokep.ensemble(cfg)
    est["observables"]["H"]["mean"][-1]
"""

from ._stokep import (
    Config,
    EnsembleDegenerateError,
    InconclusiveStudyError,
    InvalidArgument,
    NumericDomainError,
    PericenterSingularityError,
    StokepError,
    UnboundOrbitError,
    canonical_wong_zakai,
    check_structure,
    converge,
    ensemble,
    extract_elements,
    gauss,
    invariants,
    reconstruct_polar,
    run_cli,
    simulate,
)

__all__ = [
    "Config",
    "EnsembleDegenerateError",
    "InconclusiveStudyError",
    "InvalidArgument",
    "NumericDomainError",
    "PericenterSingularityError",
    "StokepError",
    "UnboundOrbitError",
    "canonical_wong_zakai",
    "check_structure",
    "converge",
    "ensemble",
    "extract_elements",
    "gauss",
    "invariants",
    "reconstruct_polar",
    "run_cli",
    "simulate",
]

"""Ordered Bratteli diagrams: dimension groups, invariants and classification verdicts."""

from ._bvkit import (
    CapabilityError,
    InputError,
    Diagram,
    classify_k,
    classify_tau,
    classify_weak,
    divides_unit,
    frobenius,
    periodic_spectrum,
    represent,
    run_cli,
    verify_certificate,
)

__all__ = [
    "CapabilityError",
    "InputError",
    "Diagram",
    "classify_k",
    "classify_tau",
    "classify_weak",
    "divides_unit",
    "frobenius",
    "periodic_spectrum",
    "represent",
    "run_cli",
    "verify_certificate",
]

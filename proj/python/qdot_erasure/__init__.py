"""Minimum work to erase a quantum-dot charge bit.

Energies are in micro-eV throughout. Divergent costs are reported as
``math.inf``.
"""

from ._core import (
    BroadeningKernel,
    DeviceSpec,
    DivergentTail,
    DomainError,
    DotSystem,
    ErasureTarget,
    InvalidSystem,
    KernelKind,
    ParseError,
    QdotError,
    RampProfile,
    StepTooLarge,
    ValidationError,
    analyze,
    check_bound,
    deviation_about,
    energy_scales,
    erasure_costs,
    eta_erasure_work,
    grid_mad,
    half_occupation_level,
    hbar_gamma_ueV,
    load_config,
    lorentzian_eta_work,
    occupation,
    occupation_curve,
    parse_quantity,
    run_lemma_suite,
    run_protocol,
    sweep,
    thermal_energy_ueV,
    unbroadened_occupation,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

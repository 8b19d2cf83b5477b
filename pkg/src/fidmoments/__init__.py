"""Exact and sampled moments of the quantum gate fidelity."""

from .bases import OperatorBasis, bell_vector, chi0, hermitian_basis, max_entangled
from .bounds import bound_report, scaling_sweep
from .channels import (
    ChiMatrix,
    KrausChannel,
    amplitude_damping,
    apply,
    chi_to_kraus,
    compose,
    conjugate,
    dephasing,
    depolarizing,
    deviation_channel,
    identity_channel,
    jamiolkowski_state,
    kraus_to_chi,
    random_cptp,
    unitary_channel,
    validate_cptp,
)
from .moments import (
    MomentBudgetError,
    MomentReport,
    analyze,
    average_fidelity,
    central_moment,
    gate_fidelity,
    moment,
    second_moment,
    variance,
    variance_qubit,
)
from .montecarlo import SampleConfig, compare, estimate_moments

__version__ = "0.1.0"

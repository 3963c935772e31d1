"""Steady-state photon statistics of two driven atoms in a lossy cavity.

Two coherently driven two-level atoms couple with position-dependent
strengths to a single damped cavity mode.  The package builds the
Hamiltonian and Liouvillian, solves for the steady state with automated
Fock-cutoff convergence, evaluates photon-statistics witnesses (g2, Mandel
Q, Klyshko) and fits the photon distribution with a negative binomial
distribution extended to the nonclassical domain (s < 0, p > 1).
"""

from .contours import marching_squares
from .model import (
    CollapseChannel,
    SystemParams,
    build_collapse_channels,
    build_hamiltonian,
    build_hamiltonian_dicke,
    build_liouvillian,
    coupling_constants,
    dicke_projectors,
    symmetric_couplings,
)
from .photostats import (
    PhotonStatistics,
    UndefinedStatisticsError,
    classify_statistics,
    coherent_state,
    fock_state,
    g2,
    klyshko,
    mandel_q,
    mean_photon_number,
    photon_pmf,
    photon_statistics,
    reduced_cavity_state,
    thermal_state,
)
from .qnbd import (
    PoissonLimitError,
    QnbdParams,
    ValidityReport,
    critical_probability,
    fidelity,
    klyshko_qnbd,
    nbd_pmf_raw,
    nbd_pmf_sequence,
    params_from_moments,
    params_from_witnesses,
    poisson_pmf,
    qnbd_params,
    qnbd_pmf,
    thermal_pmf,
    validity_check,
)
from .steadystate import (
    SingularSteadyStateError,
    SteadyStateResult,
    solve_converged,
    solve_steady_state,
    time_evolve,
)
from .sweep import (
    Axis,
    DistributionReport,
    GridPoint,
    GridResult,
    SweepConfig,
    run_distribution_report,
    run_grid,
    run_phase_profile,
    run_validity_map,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CollapseChannel",
    "DistributionReport",
    "GridPoint",
    "GridResult",
    "PhotonStatistics",
    "PoissonLimitError",
    "QnbdParams",
    "SingularSteadyStateError",
    "SteadyStateResult",
    "SweepConfig",
    "SystemParams",
    "UndefinedStatisticsError",
    "ValidityReport",
    "build_collapse_channels",
    "build_hamiltonian",
    "build_hamiltonian_dicke",
    "build_liouvillian",
    "classify_statistics",
    "coherent_state",
    "coupling_constants",
    "critical_probability",
    "dicke_projectors",
    "fidelity",
    "fock_state",
    "g2",
    "klyshko",
    "klyshko_qnbd",
    "mandel_q",
    "marching_squares",
    "mean_photon_number",
    "nbd_pmf_raw",
    "nbd_pmf_sequence",
    "params_from_moments",
    "params_from_witnesses",
    "photon_pmf",
    "photon_statistics",
    "poisson_pmf",
    "qnbd_params",
    "qnbd_pmf",
    "reduced_cavity_state",
    "run_distribution_report",
    "run_grid",
    "run_phase_profile",
    "run_validity_map",
    "solve_converged",
    "solve_steady_state",
    "symmetric_couplings",
    "thermal_pmf",
    "thermal_state",
    "time_evolve",
    "validity_check",
]

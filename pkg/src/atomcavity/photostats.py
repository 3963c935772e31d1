"""Photon-counting statistics of the cavity field.

Extracts from a steady state everything the statistics toolkit consumes:
photon-number moments, the zero-delay second-order correlation

    g2 = <adag adag a a> / <adag a>^2,

the Mandel parameter

    Q = (<adag adag a a> - <adag a>^2) / <adag a> = <adag a> (g2 - 1),

the photon-number distribution, the Klyshko nonclassicality sequence and
the populations of the collective atomic states.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import dicke_projectors

KLYSHKO_FLOOR = 1e-12
MEAN_N_FLOOR = 1e-12
PMF_CLIP = 1e-10
CLASS_TOL = 0.01

CLASSIFICATIONS = ("antibunched", "coherent", "bunched", "thermal", "superbunched")


class UndefinedStatisticsError(ValueError):
    """Normalized statistics are undefined (mean photon number ~ 0)."""


def reduced_cavity_state(rho, n_atoms):
    """Partial trace over the atoms, returning the cavity density matrix.

    Assumes the global tensor ordering atom1 (x) atom2 (x) cavity.
    """
    rho = np.asarray(rho)
    dim = rho.shape[0]
    atoms_dim = 2**n_atoms
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or dim % atoms_dim:
        raise ValueError(
            f"state of shape {rho.shape} is not atoms (x) cavity with {n_atoms} atoms"
        )
    cav_dim = dim // atoms_dim
    blocks = rho.reshape(atoms_dim, cav_dim, atoms_dim, cav_dim)
    return np.einsum("icid->cd", blocks)


def photon_pmf(rho_cav):
    """Photon-number distribution p(n) from the cavity density matrix.

    Diagonal values in [-1e-10, 0) are truncation noise: they are clipped to
    zero and the distribution renormalized.  More negative values indicate a
    solver failure and raise.
    """
    pmf = np.real(np.diag(np.asarray(rho_cav))).copy()
    worst = pmf.min() if pmf.size else 0.0
    if worst < -PMF_CLIP:
        raise ValueError(
            f"photon probability {worst:.2e} below -{PMF_CLIP:.0e}: not truncation noise"
        )
    if worst < 0.0:
        pmf[pmf < 0.0] = 0.0
        pmf = pmf / pmf.sum()
    return pmf


def photon_moments(rho_cav):
    """First moment <adag a> and second factorial moment <adag adag a a>."""
    pmf = np.real(np.diag(np.asarray(rho_cav)))
    n = np.arange(pmf.size)
    mean_n = float(np.dot(n, pmf))
    m2 = float(np.dot(n * (n - 1), pmf))
    return mean_n, m2


def mean_photon_number(rho_cav):
    return photon_moments(rho_cav)[0]


def g2(rho_cav):
    """Zero-delay second-order correlation <adag adag a a> / <adag a>^2."""
    mean_n, m2 = photon_moments(rho_cav)
    if mean_n < MEAN_N_FLOOR:
        raise UndefinedStatisticsError(
            f"g2 undefined: mean photon number {mean_n:.2e} below {MEAN_N_FLOOR:.0e}"
        )
    return m2 / mean_n**2


def mandel_q(rho_cav):
    """Mandel Q = (<adag adag a a> - <adag a>^2) / <adag a>."""
    mean_n, m2 = photon_moments(rho_cav)
    if mean_n < MEAN_N_FLOOR:
        raise UndefinedStatisticsError(
            f"Q undefined: mean photon number {mean_n:.2e} below {MEAN_N_FLOOR:.0e}"
        )
    return (m2 - mean_n**2) / mean_n


def klyshko(pmf, floor=KLYSHKO_FLOOR):
    """Klyshko sequence kappa_n = (n+1) P(n-1) P(n+1) / (n P(n)^2).

    Returns an array aligned with the pmf indices: entry n holds kappa_n.
    Entries at n = 0, at the last index, and wherever P(n) <= floor are NaN
    (undefined, not an error); kappa_n < 1 witnesses nonclassicality.
    """
    pmf = np.asarray(pmf, dtype=float)
    if pmf.size < 3:
        raise ValueError(f"need at least 3 probabilities, got {pmf.size}")
    kappa = np.full(pmf.size, np.nan)
    n = np.arange(1, pmf.size - 1)
    defined = pmf[n] > floor
    nd = n[defined]
    kappa[nd] = (nd + 1) * pmf[nd - 1] * pmf[nd + 1] / (nd * pmf[nd] ** 2)
    return kappa


def classify_statistics(g2_value, tol=CLASS_TOL):
    """Five-way light-statistics class from g2.

    The measure-zero classes coherent (g2 = 1) and thermal (g2 = 2) are
    assigned within a band of half-width `tol`; outside the bands the strict
    inequalities decide.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if abs(g2_value - 1.0) <= tol:
        return "coherent"
    if abs(g2_value - 2.0) <= tol:
        return "thermal"
    if g2_value < 1.0:
        return "antibunched"
    if g2_value < 2.0:
        return "bunched"
    return "superbunched"


def atomic_populations(rho, params):
    """Populations of the collective atomic states {gg, plus, minus, ee}."""
    rho = np.asarray(rho)
    return {
        name: float(np.trace(proj @ rho).real)
        for name, proj in dicke_projectors(params).items()
    }


@dataclass
class PhotonStatistics:
    mean_n: float
    second_factorial_moment: float
    g2: float
    q: float
    pmf: np.ndarray
    klyshko: np.ndarray
    classification: str
    dicke_populations: dict


def photon_statistics(rho, params, class_tol=CLASS_TOL):
    """All cavity-field statistics of a full-system steady state.

    Raises :class:`UndefinedStatisticsError` for a (near-)vacuum state,
    where the normalized witnesses g2 and Q do not exist.
    """
    rho_cav = reduced_cavity_state(rho, params.n_atoms)
    mean_n, m2 = photon_moments(rho_cav)
    g2_val = g2(rho_cav)
    q_val = mandel_q(rho_cav)
    pmf = photon_pmf(rho_cav)
    populations = (
        atomic_populations(rho, params) if params.n_atoms == 2 else {}
    )
    return PhotonStatistics(
        mean_n=mean_n,
        second_factorial_moment=m2,
        g2=g2_val,
        q=q_val,
        pmf=pmf,
        klyshko=klyshko(pmf),
        classification=classify_statistics(g2_val, class_tol),
        dicke_populations=populations,
    )


def coherent_state(alpha, n_max):
    """Coherent-state density matrix |alpha><alpha| truncated at n_max."""
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return np.outer(amps, amps.conj())


def thermal_state(nbar, n_max):
    """Thermal (Bose-Einstein) cavity state with mean occupation nbar."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    n = np.arange(n_max + 1)
    if nbar == 0:
        pmf = np.zeros(n_max + 1)
        pmf[0] = 1.0
    else:
        pmf = (nbar / (1.0 + nbar)) ** n / (1.0 + nbar)
        pmf = pmf / pmf.sum()
    return np.diag(pmf.astype(complex))


def fock_state(n, n_max):
    """Fock-state density matrix |n><n|."""
    if not 0 <= n <= n_max:
        raise ValueError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    rho[n, n] = 1.0
    return rho

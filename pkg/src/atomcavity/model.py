"""Driven two-atom/one-atom cavity model with position-dependent couplings.

Two coherently pumped two-level atoms couple to a single lossy cavity mode.
One atom sits at an antinode (coupling g); moving the second atom along the
cavity axis introduces the interatomic phase phi_z, so its coupling becomes
g*cos(phi_z), which may be negative.  In the frame rotating at the laser
frequency (hbar = 1):

    H = Delta * sum_i Sz_i  +  delta * adag a
        + sum_i g_i (Sp_i a + Sm_i adag)
        + eta * sum_i (Sp_i + Sm_i)

with Sz = |e><e|, and dissipation through spontaneous emission (rate gamma,
operator Sm_i per atom) and cavity decay (rate kappa, operator a).  The
tensor ordering is fixed globally as atom1 (x) atom2 (x) cavity.

All rates are in absolute units; configurations conventionally set kappa = 1
and express everything in units of kappa.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .operators import (
    commutator_superoperator,
    dagger,
    destroy,
    embed,
    lindblad_dissipator,
    spin_lowering,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven atom-cavity system.

    Rates (g, kappa, gamma, eta) are nonnegative and kappa is strictly
    positive, since it serves as the reference unit.  delta = omega_C -
    omega_L and delta_a = omega_A - omega_L are the cavity-laser and
    atom-laser detunings and may take either sign.  phi_z is reduced
    modulo 2*pi on construction.
    """

    g: float = 1.0
    kappa: float = 1.0
    gamma: float = 1.0
    eta: float = 1.0
    delta: float = 0.0
    delta_a: float = 0.0
    phi_z: float = 0.0
    n_max: int = 20
    n_atoms: int = 2

    def __post_init__(self):
        for name in ("g", "kappa", "gamma", "eta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")
        if self.n_atoms not in (1, 2):
            raise ValueError(f"n_atoms must be 1 or 2, got {self.n_atoms}")
        object.__setattr__(self, "phi_z", float(self.phi_z) % TWO_PI)

    @property
    def dims(self):
        """Subsystem dimensions in the global tensor ordering."""
        return [2] * self.n_atoms + [self.n_max + 1]

    @property
    def dim(self):
        """Total Hilbert-space dimension 2^n_atoms * (n_max + 1)."""
        return 2**self.n_atoms * (self.n_max + 1)

    def replace(self, **changes):
        """Return a copy with the given fields replaced."""
        import dataclasses

        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class CollapseChannel:
    """A dissipation channel: jump operator (full space) and its rate."""

    operator: np.ndarray
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"collapse rate must be >= 0, got {self.rate}")


def coupling_constants(params):
    """Per-atom cavity couplings: g_1 = g, g_2 = g*cos(phi_z) (signed)."""
    if params.n_atoms == 1:
        return (params.g,)
    return (params.g, params.g * math.cos(params.phi_z))


def symmetric_couplings(params):
    """Collective couplings g_pm = g * (1 +- cos(phi_z)) / sqrt(2).

    g_plus couples the cavity to the symmetric Dicke state, g_minus to the
    antisymmetric one; g_minus vanishes in phase (phi_z = 0) and g_plus
    vanishes out of phase (phi_z = pi).
    """
    c = math.cos(params.phi_z)
    return (
        params.g * (1.0 + c) / math.sqrt(2.0),
        params.g * (1.0 - c) / math.sqrt(2.0),
    )


def _site_operators(params):
    """Embedded lowering operators for each atom plus the cavity mode."""
    dims = params.dims
    sm = spin_lowering()
    atom_lowering = [embed(sm, i, dims) for i in range(params.n_atoms)]
    a = embed(destroy(params.n_max), params.n_atoms, dims)
    return atom_lowering, a


def build_hamiltonian(params):
    """Dense Hamiltonian H0 + H_I + H_L on the full tensor-product space."""
    atom_lowering, a = _site_operators(params)
    gs = coupling_constants(params)
    h = params.delta * (dagger(a) @ a)
    for sm_i, g_i in zip(atom_lowering, gs):
        sp_i = dagger(sm_i)
        h = h + params.delta_a * (sp_i @ sm_i)
        h = h + g_i * (sp_i @ a + sm_i @ dagger(a))
        h = h + params.eta * (sp_i + sm_i)
    return h


def build_collapse_channels(params):
    """Spontaneous emission per atom plus cavity decay, in the full space."""
    atom_lowering, a = _site_operators(params)
    channels = [
        CollapseChannel(sm_i, params.gamma, label=f"atom{i + 1}")
        for i, sm_i in enumerate(atom_lowering)
    ]
    channels.append(CollapseChannel(a, params.kappa, label="cavity"))
    return channels


def build_liouvillian(params, hamiltonian=None):
    """Sparse Liouvillian L with L @ vec(rho) = vec(drho/dt).

    Combines the -i commutator with the spontaneous-emission and cavity-decay
    dissipators.  An alternative Hamiltonian (e.g. the Dicke-form interaction)
    may be supplied to build L from a different but equivalent decomposition.
    """
    if hamiltonian is None:
        hamiltonian = build_hamiltonian(params)
    liouv = commutator_superoperator(sp.csr_matrix(hamiltonian))
    for channel in build_collapse_channels(params):
        liouv = liouv + lindblad_dissipator(channel.operator, channel.rate)
    return liouv.tocsr()


def collective_raising(params, sign=+1):
    """Collective Dicke raising operator D_pm^dag = (S1^+ +- S2^+)/sqrt(2)."""
    if params.n_atoms != 2:
        raise ValueError("collective Dicke operators require n_atoms = 2")
    atom_lowering, _ = _site_operators(params)
    s1p, s2p = dagger(atom_lowering[0]), dagger(atom_lowering[1])
    return (s1p + sign * s2p) / math.sqrt(2.0)


def dicke_interaction_hamiltonian(params):
    """Interaction in the collective basis: sum of H_plus and H_minus.

    H_pm = g_pm * (a D_pm^dag + a^dag D_pm); equals the site-basis
    interaction part of :func:`build_hamiltonian` for every phi_z.
    """
    _, a = _site_operators(params)
    g_plus, g_minus = symmetric_couplings(params)
    h = np.zeros((params.dim, params.dim), dtype=complex)
    for g_pm, sign in ((g_plus, +1), (g_minus, -1)):
        d_dag = collective_raising(params, sign)
        h = h + g_pm * (a @ d_dag + dagger(a) @ dagger(d_dag))
    return h


def build_hamiltonian_dicke(params):
    """Full Hamiltonian with the interaction written in the collective basis."""
    atom_lowering, a = _site_operators(params)
    h = params.delta * (dagger(a) @ a)
    for sm_i in atom_lowering:
        sp_i = dagger(sm_i)
        h = h + params.delta_a * (sp_i @ sm_i)
        h = h + params.eta * (sp_i + sm_i)
    return h + dicke_interaction_hamiltonian(params)


def dicke_projectors(params):
    """Projectors onto {gg, plus, minus, ee}, tensored with the cavity identity.

    |pm> = (|ge> +- |eg>)/sqrt(2) are the single-excitation Dicke states.
    """
    if params.n_atoms != 2:
        raise ValueError("Dicke projectors require n_atoms = 2")
    # atomic basis ordering from kron: |gg>, |ge>, |eg>, |ee>
    gg = np.array([1.0, 0.0, 0.0, 0.0])
    ge = np.array([0.0, 1.0, 0.0, 0.0])
    eg = np.array([0.0, 0.0, 1.0, 0.0])
    ee = np.array([0.0, 0.0, 0.0, 1.0])
    plus = (ge + eg) / math.sqrt(2.0)
    minus = (ge - eg) / math.sqrt(2.0)
    eye_cav = np.eye(params.n_max + 1, dtype=complex)
    return {
        name: np.kron(np.outer(vec, vec).astype(complex), eye_cav)
        for name, vec in (("gg", gg), ("plus", plus), ("minus", minus), ("ee", ee))
    }

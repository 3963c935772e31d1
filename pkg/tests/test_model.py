"""Model construction: parameters, Hamiltonian, collapse channels, Liouvillian.

The central test rebuilds the full master-equation right-hand side densely
from the textbook formula and compares it elementwise against the sparse
Liouvillian acting on random states.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from atomcavity.model import (
    SystemParams,
    build_collapse_channels,
    build_hamiltonian,
    build_hamiltonian_dicke,
    build_liouvillian,
    collective_raising,
    coupling_constants,
    dicke_projectors,
    symmetric_couplings,
)
from atomcavity.operators import dagger, unvectorize, vectorize


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(g=-0.1)
    with pytest.raises(ValueError):
        SystemParams(kappa=0.0)
    with pytest.raises(ValueError):
        SystemParams(eta=-1.0)
    with pytest.raises(ValueError):
        SystemParams(n_max=1)
    with pytest.raises(ValueError):
        SystemParams(n_atoms=3)


def test_phi_z_reduced_modulo_two_pi():
    assert SystemParams(phi_z=2 * math.pi + 0.3).phi_z == pytest.approx(0.3)
    assert SystemParams(phi_z=-0.5).phi_z == pytest.approx(2 * math.pi - 0.5)


def test_dims_and_replace():
    p = SystemParams(n_max=5)
    assert p.dims == [2, 2, 6]
    assert p.dim == 24
    q = p.replace(n_max=7, eta=0.0)
    assert q.n_max == 7 and q.eta == 0.0
    assert p.n_max == 5  # original untouched
    one = SystemParams(n_max=5, n_atoms=1)
    assert one.dims == [2, 6]
    assert one.dim == 12


def test_coupling_constants_signs():
    p = SystemParams(g=0.8)
    assert coupling_constants(p) == (0.8, 0.8)
    assert coupling_constants(p.replace(phi_z=math.pi)) == pytest.approx((0.8, -0.8))
    g1, g2 = coupling_constants(p.replace(phi_z=math.pi / 2))
    assert g1 == 0.8 and abs(g2) < 1e-15
    assert coupling_constants(p.replace(n_atoms=1)) == (0.8,)


def test_symmetric_couplings():
    p = SystemParams(g=1.0)
    gp, gm = symmetric_couplings(p)
    assert gp == pytest.approx(math.sqrt(2.0)) and gm == 0.0
    gp, gm = symmetric_couplings(p.replace(phi_z=math.pi))
    assert abs(gp) < 1e-15 and gm == pytest.approx(math.sqrt(2.0))
    # sum rule: collective and site couplings carry the same total weight
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = p.replace(g=float(rng.uniform(0.1, 3.0)), phi_z=float(rng.uniform(0, 7)))
        gp, gm = symmetric_couplings(q)
        g1, g2 = coupling_constants(q)
        assert gp**2 + gm**2 == pytest.approx(g1**2 + g2**2, rel=1e-12)


def _basis_index(a1, a2, n, n_max):
    return (2 * a1 + a2) * (n_max + 1) + n


def test_hamiltonian_matrix_elements():
    p = SystemParams(g=0.7, eta=0.3, delta=0.4, delta_a=0.9,
                     phi_z=1.1, n_max=3)
    h = build_hamiltonian(p)
    assert_allclose(h, dagger(h), atol=1e-14)
    idx = lambda a1, a2, n: _basis_index(a1, a2, n, p.n_max)
    g1, g2 = coupling_constants(p)
    # exchange: <e g 0|H|g g 1> = g1, <g e 0|H|g g 1> = g2
    assert h[idx(1, 0, 0), idx(0, 0, 1)] == pytest.approx(g1)
    assert h[idx(0, 1, 0), idx(0, 0, 1)] == pytest.approx(g2)
    # sqrt(n) enhancement on the photon ladder
    assert h[idx(1, 0, 1), idx(0, 0, 2)] == pytest.approx(g1 * math.sqrt(2))
    # coherent drive and diagonal detunings
    assert h[idx(1, 0, 0), idx(0, 0, 0)] == pytest.approx(p.eta)
    assert h[idx(0, 1, 2), idx(0, 0, 2)] == pytest.approx(p.eta)
    assert h[idx(0, 0, 2), idx(0, 0, 2)] == pytest.approx(2 * p.delta)
    assert h[idx(1, 1, 0), idx(1, 1, 0)] == pytest.approx(2 * p.delta_a)


def test_dicke_form_equals_site_form():
    rng = np.random.default_rng(6)
    for _ in range(10):
        p = SystemParams(
            g=float(rng.uniform(0, 2)),
            eta=float(rng.uniform(0, 2)),
            delta=float(rng.uniform(-2, 2)),
            delta_a=float(rng.uniform(-2, 2)),
            phi_z=float(rng.uniform(0, 2 * math.pi)),
            n_max=4,
        )
        assert_allclose(build_hamiltonian(p), build_hamiltonian_dicke(p), atol=1e-12)


def test_drive_pumps_only_the_symmetric_state():
    p = SystemParams(g=0.0, eta=0.6, delta=0.0, delta_a=0.0, n_max=2)
    h = build_hamiltonian(p)
    proj = dicke_projectors(p)
    # starting from the ground state the drive creates |plus> with weight
    # eta*sqrt(2) and never touches |minus>
    gg0 = np.zeros(p.dim)
    gg0[0] = 1.0
    out = h @ gg0
    assert np.linalg.norm(proj["minus"] @ out) < 1e-14
    plus0 = collective_raising(p, +1) @ gg0
    assert_allclose(out, p.eta * math.sqrt(2.0) * plus0, atol=1e-14)


def test_dicke_projectors_resolve_identity():
    p = SystemParams(n_max=3)
    proj = dicke_projectors(p)
    total = sum(proj.values())
    assert_allclose(total, np.eye(p.dim), atol=1e-14)
    for name, pr in proj.items():
        assert_allclose(pr @ pr, pr, atol=1e-14)


def test_collapse_channels():
    p = SystemParams(gamma=0.4, kappa=1.3, n_max=2)
    channels = build_collapse_channels(p)
    assert [c.label for c in channels] == ["atom1", "atom2", "cavity"]
    assert [c.rate for c in channels] == [0.4, 0.4, 1.3]
    one = build_collapse_channels(p.replace(n_atoms=1))
    assert [c.label for c in one] == ["atom1", "cavity"]


def test_liouvillian_dense_oracle(random_rho):
    """L @ vec(rho) equals the textbook master-equation right-hand side."""
    rng = np.random.default_rng(7)
    for _ in range(5):
        p = SystemParams(
            g=float(rng.uniform(0, 2)),
            gamma=float(rng.uniform(0, 2)),
            eta=float(rng.uniform(0, 2)),
            delta=float(rng.uniform(-2, 2)),
            delta_a=float(rng.uniform(-2, 2)),
            phi_z=float(rng.uniform(0, 2 * math.pi)),
            kappa=float(rng.uniform(0.5, 2)),
            n_max=3,
        )
        liouv = build_liouvillian(p)
        h = build_hamiltonian(p)
        rho = random_rho(rng, p.dim)
        rhs = -1j * (h @ rho - rho @ h)
        for ch in build_collapse_channels(p):
            c = ch.operator
            cdc = dagger(c) @ c
            rhs = rhs + (ch.rate / 2.0) * (
                2.0 * c @ rho @ dagger(c) - cdc @ rho - rho @ cdc
            )
        assert_allclose(unvectorize(liouv @ vectorize(rho)), rhs, atol=1e-12)


def test_liouvillian_preserves_trace(random_rho):
    rng = np.random.default_rng(8)
    p = SystemParams(g=0.9, eta=0.7, phi_z=2.0, n_max=3)
    liouv = build_liouvillian(p)
    for _ in range(20):
        rho = random_rho(rng, p.dim)
        drho = unvectorize(liouv @ vectorize(rho))
        assert abs(np.trace(drho)) < 1e-12


def test_vacuum_is_stationary_without_drive():
    p = SystemParams(g=1.2, eta=0.0, delta=0.5, delta_a=-0.3, n_max=3)
    liouv = build_liouvillian(p)
    rho = np.zeros((p.dim, p.dim), dtype=complex)
    rho[0, 0] = 1.0
    assert np.max(np.abs(liouv @ vectorize(rho))) < 1e-14


def test_one_atom_model():
    p = SystemParams(n_max=4, n_atoms=1)
    h = build_hamiltonian(p)
    assert h.shape == (10, 10)
    assert_allclose(h, dagger(h), atol=1e-14)
    with pytest.raises(ValueError):
        collective_raising(p)
    with pytest.raises(ValueError):
        dicke_projectors(p)

"""Complex operator algebra for composite quantum systems.

Operators are plain dense complex numpy arrays; superoperators acting on
vectorized density matrices are scipy CSR matrices (Liouvillians are
extremely sparse, so a dense D^2 x D^2 representation is never built).

Vectorization follows the column-stacking convention throughout:

    vec(rho)[i + D*j] = rho[i, j]        (numpy order='F')

which gives the fundamental identity  vec(A rho B) = kron(B.T, A) vec(rho).
Every superoperator in this package is written against this one convention.
"""

import numpy as np
import scipy.sparse as sp


def kron(a, b):
    """Kronecker product of two dense matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a):
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def destroy(n_max):
    """Bosonic annihilation operator on the Fock space {|0>, ..., |n_max>}.

    The matrix is (n_max+1) x (n_max+1) with <n-1|a|n> = sqrt(n) on the
    superdiagonal and zeros elsewhere.
    """
    if n_max < 1:
        raise ValueError(f"Fock cutoff must be >= 1, got {n_max}")
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1).astype(complex)


def spin_lowering():
    """Two-level lowering operator |g><e| in the basis (|g>, |e>)."""
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def embed(op, slot, dims):
    """Embed a single-subsystem operator into a tensor-product space.

    `dims` lists the subsystem dimensions in the fixed global ordering
    (atom 1) x (atom 2) x (cavity); `op` acts on subsystem `slot` and
    identities fill the remaining slots.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (dims[slot], dims[slot]):
        raise ValueError(
            f"operator shape {op.shape} does not match dims[{slot}] = {dims[slot]}"
        )
    full = np.eye(1, dtype=complex)
    for k, d in enumerate(dims):
        factor = op if k == slot else np.eye(d, dtype=complex)
        full = np.kron(full, factor)
    return full


def vectorize(rho):
    """Column-stack a square matrix: vec(rho)[i + D*j] = rho[i, j]."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")


def unvectorize(v, dim=None):
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((dim, dim), order="F")


def left_multiply(op):
    """Sparse superoperator for rho -> op @ rho."""
    op = sp.csr_matrix(op)
    eye = sp.identity(op.shape[0], dtype=complex, format="csr")
    return sp.kron(eye, op, format="csr")


def right_multiply(op):
    """Sparse superoperator for rho -> rho @ op."""
    op = sp.csr_matrix(op)
    eye = sp.identity(op.shape[0], dtype=complex, format="csr")
    return sp.kron(op.T, eye, format="csr")


def commutator_superoperator(h):
    """Sparse superoperator for rho -> -i [h, rho]."""
    return (-1j * (left_multiply(h) - right_multiply(h))).tocsr()


def lindblad_dissipator(c, rate):
    """Sparse dissipator (rate/2) * (2 c rho c^dag - c^dag c rho - rho c^dag c).

    Returned as a CSR superoperator under the column-stacking convention.
    A zero rate yields an explicit all-zero superoperator.
    """
    if rate < 0:
        raise ValueError(f"dissipation rate must be >= 0, got {rate}")
    c = sp.csr_matrix(c)
    eye = sp.identity(c.shape[0], dtype=complex, format="csr")
    cdc = (c.conj().T @ c).tocsr()
    sandwich = sp.kron(c.conj(), c, format="csr")
    anticomm = sp.kron(eye, cdc, format="csr") + sp.kron(cdc.T, eye, format="csr")
    return ((rate / 2.0) * (2.0 * sandwich - anticomm)).tocsr()


def expectation(op, rho):
    """Expectation value tr(op @ rho), returned as a complex number."""
    return complex(np.trace(np.asarray(op) @ np.asarray(rho)))

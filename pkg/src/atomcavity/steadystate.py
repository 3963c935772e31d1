"""Steady-state solution of the master equation and a time-domain cross-check.

The steady state solves L @ vec(rho) = 0 subject to tr(rho) = 1.  The
singular linear system is made square by replacing the row of L indexed by
the (0, 0) matrix element with the vectorized trace row and setting that
entry of the right-hand side accordingly, then factorizing with sparse LU.
A classic fixed-step RK4 integrator provides a fully independent
cross-check, and a cutoff-escalation protocol automates Fock-space
convergence.
"""

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import photostats
from .model import build_liouvillian
from .operators import unvectorize, vectorize

HERMITICITY_WARN = 1e-8
RESIDUAL_REJECT = 1e-6
TRACE_DRIFT_LIMIT = 1e-6
DEFAULT_REL_TOL = 1e-6
TAIL_TOL = 1e-10
N_MAX_CAP = 200
ESCALATION = 1.5


class SingularSteadyStateError(RuntimeError):
    """The trace-constrained system is singular: no unique steady state."""


class TraceDriftError(RuntimeError):
    """RK4 integration lost the trace beyond tolerance (unstable step size)."""


@dataclass
class SteadyStateResult:
    rho: np.ndarray
    residual: float
    n_max_used: int
    converged: bool
    solve_time: float
    min_eigenvalue: float
    diagnostics: dict = field(default_factory=dict)


def _trace_constrained(liouvillian, dim):
    """Replace the row of the (0,0) element with the trace row.

    The trace row is scaled to the mean magnitude of the Liouvillian entries
    to keep the factorization well conditioned.
    """
    coo = liouvillian.tocoo()
    weight = float(np.mean(np.abs(coo.data))) if coo.nnz else 1.0
    weight = max(weight, 1e-12)
    keep = coo.row != 0
    rows = np.concatenate([coo.row[keep], np.zeros(dim, dtype=coo.row.dtype)])
    cols = np.concatenate(
        [coo.col[keep], np.arange(dim, dtype=coo.col.dtype) * (dim + 1)]
    )
    data = np.concatenate([coo.data[keep], np.full(dim, weight, dtype=complex)])
    matrix = sp.csc_matrix((data, (rows, cols)), shape=liouvillian.shape)
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = weight
    return matrix, rhs


def solve_steady_state(liouvillian, dim, n_max=None):
    """Solve L @ vec(rho) = 0 with unit trace by sparse LU.

    Returns a :class:`SteadyStateResult` whose `rho` is Hermitized and
    trace-normalized.  Raises :class:`SingularSteadyStateError` when the
    constrained matrix cannot be factorized or the solution fails to
    annihilate the Liouvillian (degenerate steady-state manifold) -- there is
    no silent pseudo-solution.
    """
    liouvillian = sp.csr_matrix(liouvillian)
    if liouvillian.shape != (dim * dim, dim * dim):
        raise ValueError(
            f"Liouvillian shape {liouvillian.shape} does not match dim {dim}"
        )
    t0 = time.perf_counter()
    matrix, rhs = _trace_constrained(liouvillian, dim)
    try:
        lu = spla.splu(matrix)
    except RuntimeError as exc:  # splu signals exact singularity this way
        raise SingularSteadyStateError(
            f"trace-constrained Liouvillian is singular: {exc}"
        ) from exc
    vec_rho = lu.solve(rhs)
    if not np.all(np.isfinite(vec_rho)):
        raise SingularSteadyStateError(
            "non-finite steady-state solution (singular system)"
        )
    rho = unvectorize(vec_rho, dim)

    asymmetry = float(np.max(np.abs(rho - rho.conj().T)))
    scale = float(np.max(np.abs(rho)))
    if asymmetry > HERMITICITY_WARN * max(1.0, scale):
        warnings.warn(
            f"steady-state asymmetry {asymmetry:.2e} exceeds {HERMITICITY_WARN:.0e}; "
            "possible solver failure",
            RuntimeWarning,
            stacklevel=2,
        )
    rho = 0.5 * (rho + rho.conj().T)
    trace = float(np.trace(rho).real)
    if abs(trace) < 1e-14:
        raise SingularSteadyStateError("steady-state solution has vanishing trace")
    rho = rho / trace

    residual = float(np.max(np.abs(liouvillian @ vectorize(rho))))
    if residual > RESIDUAL_REJECT:
        raise SingularSteadyStateError(
            f"steady-state residual {residual:.2e} exceeds {RESIDUAL_REJECT:.0e}; "
            "degenerate steady-state manifold"
        )
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    return SteadyStateResult(
        rho=rho,
        residual=residual,
        n_max_used=n_max if n_max is not None else -1,
        converged=True,
        solve_time=time.perf_counter() - t0,
        min_eigenvalue=min_eig,
    )


def default_time_step(params):
    """Fixed RK4 step 0.01 / max(kappa, gamma, g, eta, |delta|, |delta_a|)."""
    fastest = max(
        params.kappa,
        params.gamma,
        params.g,
        params.eta,
        abs(params.delta),
        abs(params.delta_a),
    )
    return 0.01 / fastest


def time_evolve(liouvillian, rho0, t_final, dt):
    """Classic 4th-order Runge-Kutta integration of dvec(rho)/dt = L vec(rho).

    The step size must keep dt * ||L|| well inside the RK4 stability region;
    :func:`default_time_step` implements the documented rule.  Trace drift
    beyond 1e-6 raises :class:`TraceDriftError` since it signals instability.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    if t_final == 0:
        return rho0.copy()
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    liouvillian = sp.csr_matrix(liouvillian)
    n_steps = max(1, int(math.ceil(t_final / dt)))
    h = t_final / n_steps
    v = vectorize(rho0).astype(complex)
    trace0 = float(np.trace(rho0).real)
    diag_idx = np.arange(dim) * (dim + 1)
    check_every = max(1, n_steps // 200)
    for step in range(n_steps):
        k1 = liouvillian @ v
        k2 = liouvillian @ (v + (0.5 * h) * k1)
        k3 = liouvillian @ (v + (0.5 * h) * k2)
        k4 = liouvillian @ (v + h * k3)
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % check_every == 0 or step == n_steps - 1:
            drift = abs(float(v[diag_idx].sum().real) - trace0)
            if drift > TRACE_DRIFT_LIMIT:
                raise TraceDriftError(
                    f"trace drift {drift:.2e} at step {step + 1}/{n_steps}; "
                    "reduce dt"
                )
    return unvectorize(v, dim)


def _cavity_observables(rho, params):
    """Mean photon number, g2 and Q of the cavity mode (None when undefined)."""
    rho_cav = photostats.reduced_cavity_state(rho, params.n_atoms)
    mean_n = photostats.mean_photon_number(rho_cav)
    try:
        g2_val = photostats.g2(rho_cav)
        q_val = photostats.mandel_q(rho_cav)
    except photostats.UndefinedStatisticsError:
        g2_val = None
        q_val = None
    pmf = photostats.photon_pmf(rho_cav)
    return {"mean_n": mean_n, "g2": g2_val, "q": q_val, "tail": float(pmf[-1])}


def _observables_close(obs_small, obs_large, rel_tol):
    """Relative agreement of mean_n, g2 and Q between two cutoffs."""
    for key in ("mean_n", "g2", "q"):
        a, b = obs_small[key], obs_large[key]
        if a is None and b is None:
            continue
        if a is None or b is None:
            return False
        scale = max(abs(a), abs(b))
        if scale < 1e-14:  # both essentially zero (vacuum)
            continue
        if abs(a - b) / scale > rel_tol:
            return False
    return True


def solve_converged(
    params,
    rel_tol=DEFAULT_REL_TOL,
    n_max_cap=N_MAX_CAP,
    tail_tol=TAIL_TOL,
):
    """Steady state with automated Fock-cutoff convergence.

    Solves at n_max and at ceil(1.5 * n_max); when <a^dag a>, g2 and Q all
    agree to `rel_tol` (relative) and the photon distribution tail of the
    larger solve stays below `tail_tol`, the larger solve is returned flagged
    converged.  Otherwise the cutoff escalates by factor 1.5 up to the cap;
    hitting the cap returns the last solve flagged not-converged, with the
    escalation history in `diagnostics`.
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")
    n_small = min(params.n_max, n_max_cap)
    params_small = params.replace(n_max=n_small)
    result_small = solve_steady_state(
        build_liouvillian(params_small), params_small.dim, n_max=n_small
    )
    obs_small = _cavity_observables(result_small.rho, params_small)
    history = [(n_small, obs_small)]

    while True:
        n_large = min(int(math.ceil(ESCALATION * n_small)), n_max_cap)
        if n_large <= n_small:
            result_small.converged = False
            result_small.diagnostics = {
                "reason": f"cutoff cap {n_max_cap} reached without convergence",
                "history": history,
            }
            return result_small
        params_large = params.replace(n_max=n_large)
        result_large = solve_steady_state(
            build_liouvillian(params_large), params_large.dim, n_max=n_large
        )
        obs_large = _cavity_observables(result_large.rho, params_large)
        history.append((n_large, obs_large))
        if (
            _observables_close(obs_small, obs_large, rel_tol)
            and obs_large["tail"] < tail_tol
        ):
            result_large.converged = True
            result_large.diagnostics = {"history": history}
            return result_large
        n_small = n_large
        result_small = result_large
        obs_small = obs_large

"""Negative binomial photon statistics and its quantum extension.

The negative binomial distribution (nbd)

    P_{s,p}(n) = binom(s+n-1, n) p^s (1-p)^n,     s > 0,  0 < p <= 1,

interpolates between Poissonian (s -> inf) and thermal (s = 1) photon
counting.  Extending the parameters to s < 0 and p > 1 reaches the
nonclassical domain; there the raw values turn negative beyond n = |s| + 1,
so the quantum extension (qnbd) truncates the support at n <= |s| + 1 and
renormalizes.  The parameters map onto the standard witnesses through

    s = 1 / (g2 - 1),        p = 1 / (1 + Q).

All probabilities are generated by the recursion

    P(0) = p^s,    P(n+1) = P(n) * (s+n) / (n+1) * (1-p),

which stays finite at the removable Gamma-function singularities
(s a nonpositive integer) and is numerically stable in both domains.
"""

import math
from dataclasses import dataclass

import numpy as np

PCR_THRESHOLD = 0.001
POISSON_GUARD = 1e-9
NORMALIZATION_TOL = 1e-6


class PoissonLimitError(ValueError):
    """Parameters sit on the Poissonian point where |s| diverges."""


def _classify_regime(s, p):
    """'classical' for s > 0, 0 < p <= 1; 'nonclassical' for s < 0, p > 1."""
    if p <= 0:
        raise ValueError(f"p must be > 0, got {p}")
    if s == 0:
        raise ValueError("s must be nonzero")
    if s > 0 and p <= 1:
        return "classical"
    if s < 0 and p > 1:
        return "nonclassical"
    raise ValueError(
        f"(s, p) = ({s}, {p}) is neither classical (s>0, p<=1) "
        "nor nonclassical (s<0, p>1)"
    )


@dataclass(frozen=True)
class QnbdParams:
    """Shape s and probability-like p, with the derived truncation data.

    In the classical regime the normalization is 1 and there is no cutoff.
    In the nonclassical regime the support ends at the largest integer
    n <= |s| + 1 and `normalization` rescales the retained raw values
    to unit total probability.
    """

    s: float
    p: float
    normalization: float = 1.0
    n_cut: int | None = None

    @property
    def classical(self):
        return self.s > 0

    @property
    def mean(self):
        """Mean s(1-p)/p of the untruncated distribution."""
        return self.s * (1.0 - self.p) / self.p


def qnbd_params(s, p):
    """Build :class:`QnbdParams`, validating the regime and deriving the cutoff."""
    regime = _classify_regime(s, p)
    if regime == "classical":
        return QnbdParams(s=float(s), p=float(p))
    n_cut = int(math.floor(abs(s) + 1.0))
    raw = nbd_pmf_sequence(s, p, n_cut)
    return QnbdParams(
        s=float(s), p=float(p), normalization=1.0 / float(raw.sum()), n_cut=n_cut
    )


def nbd_pmf_sequence(s, p, n_max):
    """Raw recursion values P(0..n_max); may go negative for s < 0."""
    if p <= 0:
        raise ValueError(f"p must be > 0, got {p}")
    if s == 0:
        raise ValueError("s must be nonzero")
    out = np.empty(n_max + 1)
    out[0] = p**s
    q = 1.0 - p
    for n in range(n_max):
        out[n + 1] = out[n] * (s + n) / (n + 1) * q
    return out


def nbd_pmf_raw(s, p, n):
    """Single raw value P_{s,p}(n) from the recursion (no truncation).

    Valid for any nonzero real s, including the nonclassical domain where
    the result may be negative for n beyond the critical index.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return float(nbd_pmf_sequence(s, p, n)[n])


def qnbd_pmf(params, n_max):
    """Photon distribution of length n_max + 1 under the quantum extension.

    Classical regime: the raw nbd values (renormalized only if the cutoff
    leaves a tail above 1e-12).  Nonclassical regime: raw values on the
    truncated support n <= |s| + 1, zero beyond, scaled to unit sum.
    """
    if not isinstance(params, QnbdParams):
        raise TypeError("params must be QnbdParams; use qnbd_params(s, p)")
    if params.classical:
        pmf = nbd_pmf_sequence(params.s, params.p, n_max)
        deficit = abs(pmf.sum() - 1.0)
        if deficit > 1e-12:
            pmf = pmf / pmf.sum()
        return pmf
    pmf = np.zeros(n_max + 1)
    top = min(params.n_cut, n_max)
    raw = nbd_pmf_sequence(params.s, params.p, top)
    pmf[: top + 1] = raw
    # n_max below the support end drops probability mass; rescale over what
    # was emitted so the result is always a valid distribution
    return pmf / pmf.sum()


def thermal_pmf(nbar, n_max):
    """Bose-Einstein distribution, truncated and renormalized if needed."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    n = np.arange(n_max + 1)
    if nbar == 0:
        pmf = np.zeros(n_max + 1)
        pmf[0] = 1.0
        return pmf
    pmf = (nbar / (1.0 + nbar)) ** n / (1.0 + nbar)
    if abs(pmf.sum() - 1.0) > 1e-12:
        pmf = pmf / pmf.sum()
    return pmf


def poisson_pmf(nbar, n_max):
    """Poisson distribution, truncated and renormalized if needed."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    pmf = np.zeros(n_max + 1)
    pmf[0] = math.exp(-nbar)
    for n in range(n_max):
        pmf[n + 1] = pmf[n] * nbar / (n + 1)
    if abs(pmf.sum() - 1.0) > 1e-12:
        pmf = pmf / pmf.sum()
    return pmf


def pmf_moments(pmf):
    """Mean and second factorial moment of a photon-number distribution."""
    pmf = np.asarray(pmf, dtype=float)
    n = np.arange(pmf.size)
    return float(np.dot(n, pmf)), float(np.dot(n * (n - 1), pmf))


def params_from_moments(mean, second_factorial_moment):
    """Invert the moment relations for (s, p).

        s = mean^2 / (m2 - mean^2),
        p = mean / (m2 + mean - mean^2).

    On the Poissonian point m2 = mean^2 both parameters degenerate
    (s -> +-inf, p -> 1); within the guard band |g2 - 1| < 1e-9 this raises
    :class:`PoissonLimitError` instead of returning astronomically large s.
    """
    if mean <= 0:
        raise ValueError(f"mean must be > 0, got {mean}")
    if second_factorial_moment < 0:
        raise ValueError(
            f"second factorial moment must be >= 0, got {second_factorial_moment}"
        )
    g2_val = second_factorial_moment / mean**2
    if abs(g2_val - 1.0) < POISSON_GUARD:
        raise PoissonLimitError(
            "moments are Poissonian (m2 = mean^2): s diverges; "
            "use poisson_pmf for this limit"
        )
    denom = second_factorial_moment + mean - mean**2
    if denom <= 0:  # Q <= -1: below the Fock-state bound, p undefined
        raise ValueError(
            f"moments imply Q <= -1 (denominator {denom:.3e}): "
            "outside the distribution's domain"
        )
    s = mean**2 / (second_factorial_moment - mean**2)
    p = mean / denom
    return qnbd_params(s, p)


def params_from_witnesses(g2, q):
    """(s, p) directly from the witnesses: s = 1/(g2-1), p = 1/(1+Q)."""
    if q <= -1.0:
        raise ValueError(f"Q must be > -1, got {q}")
    if abs(g2 - 1.0) < POISSON_GUARD:
        raise PoissonLimitError(
            "g2 = 1 is the Poissonian point: s diverges; "
            "use poisson_pmf for this limit"
        )
    return qnbd_params(1.0 / (g2 - 1.0), 1.0 / (1.0 + q))


def critical_probability(s, p):
    """Critical index n_cr = floor(|s|) + 2 and the raw value there.

    P(n_cr) is the first value that can turn negative when the nonclassical
    parameters are used without truncation; its magnitude bounds the error
    of the nontruncated form.
    """
    if _classify_regime(s, p) != "nonclassical":
        raise ValueError(f"(s, p) = ({s}, {p}) is classical: no critical index")
    n_cr = int(math.floor(abs(s))) + 2
    return n_cr, nbd_pmf_raw(s, p, n_cr)


@dataclass(frozen=True)
class ValidityReport:
    """Whether the NONtruncated qnbd is usable at a nonclassical point."""

    s: float
    p: float
    n_cr: int
    p_cr: float
    abs_p_cr: float
    p_cr_ok: bool
    decreasing_ok: bool
    mean_n: float
    threshold: float

    @property
    def valid(self):
        return self.p_cr_ok and self.decreasing_ok


def validity_check(g2, q, p_cr_threshold=PCR_THRESHOLD):
    """Validity of the nontruncated qnbd at a nonclassical (g2, Q) point.

    Checks |P_cr| < threshold and the decreasing-probabilities condition
    Q > -0.5 (equivalently p < 2), and reports the implied mean photon
    number <adag a> = Q / (g2 - 1).
    """
    if not (0.0 <= g2 < 1.0) or not (-1.0 < q < 0.0):
        raise ValueError(
            f"(g2, Q) = ({g2}, {q}) is not in the nonclassical domain "
            "(0 <= g2 < 1, -1 < Q < 0)"
        )
    params = params_from_witnesses(g2, q)
    n_cr, p_cr = critical_probability(params.s, params.p)
    return ValidityReport(
        s=params.s,
        p=params.p,
        n_cr=n_cr,
        p_cr=p_cr,
        abs_p_cr=abs(p_cr),
        p_cr_ok=abs(p_cr) < p_cr_threshold,
        decreasing_ok=q > -0.5,
        mean_n=q / (g2 - 1.0),
        threshold=p_cr_threshold,
    )


def klyshko_qnbd(s, n):
    """Closed-form Klyshko parameter (s+n)/(s+n-1) of the (q)nbd."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    denom = s + n - 1.0
    if abs(denom) < 1e-12:
        raise ZeroDivisionError(f"Klyshko pole at n = 1 - s (s = {s}, n = {n})")
    return (s + n) / denom


def fidelity(a, b):
    """Classical fidelity (Bhattacharyya coefficient) of two distributions.

    F = sum_n sqrt(a_n b_n), in [0, 1]; the shorter input is padded with
    zeros.  For diagonal states this equals the quantum fidelity
    tr sqrt(sqrt(rho) sigma sqrt(rho)).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    for name, pmf in (("a", a), ("b", b)):
        if abs(pmf.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"input {name} is not normalized: sum = {pmf.sum():.8f}"
            )
    return float(np.sum(np.sqrt(np.clip(a, 0.0, None) * np.clip(b, 0.0, None))))

"""Shared test fixtures and the acceptance-summary terminal hook."""

import numpy as np
import pytest


@pytest.fixture
def random_rho():
    """Factory for random density matrices (Ginibre construction)."""

    def make(rng, dim):
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = m @ m.conj().T
        return rho / np.trace(rho).real

    return make


# one human-readable line per acceptance criterion, printed at the end of the
# run so the gate's verdict is visible without scrolling through pytest output
CRITERIA = {
    "test_criterion_01_solver_properties":
        "criterion 1: solver residual/trace/positivity + RK4 oracle agreement",
    "test_criterion_02_witness_identity":
        "criterion 2: Q = <n>(g2-1) from independent code paths",
    "test_criterion_03_giant_bunching":
        "criterion 3: giant bunching at phi_z=pi, nonclassical at phi_z=0",
    "test_criterion_04_nonclassicality_optimum":
        "criterion 4: min Mandel Q <= -0.09 on the 21x21 in-phase grid",
    "test_criterion_05_out_of_phase_classicality":
        "criterion 5: out-of-phase grid is everywhere bunched (g2>1, Q>0)",
    "test_criterion_06_qnbd_fit_values":
        "criterion 6: fitted (s, p) at the pinned operating point",
    "test_criterion_07_distribution_agreement":
        "criterion 7: fidelity > 0.999 and fit bands at four reference points",
    "test_criterion_08_raw_pmf_pin":
        "criterion 8: raw nbd value at (s, p, n) = (-8.7, 1.07, 10)",
    "test_criterion_09_limit_laws":
        "criterion 9: thermal (s=1) and Poisson (s->inf) limit laws",
    "test_criterion_10_klyshko_consistency":
        "criterion 10: numeric vs closed-form Klyshko parameter",
    "test_criterion_11_symmetry_and_reduction":
        "criterion 11: phi_z mirror symmetry and one-atom reduction",
    "test_criterion_12_detuned_bunching_sweep":
        "criterion 12: detuned in-phase sweep solely bunched (documented failure)",
}


def _criterion_key(nodeid):
    if "test_acceptance.py::" not in nodeid:
        return None
    name = nodeid.rsplit("::", 1)[-1]
    return name if name in CRITERIA else None


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for status, tag in (("passed", "PASS"), ("failed", "FAIL"),
                        ("error", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            key = _criterion_key(getattr(report, "nodeid", ""))
            if key is not None:
                # a later failed phase overrides an earlier passed one
                if verdicts.get(key) != "FAIL":
                    verdicts[key] = tag
    if not verdicts:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key, label in CRITERIA.items():
        if key in verdicts:
            terminalreporter.write_line(f"[{verdicts[key]}] {label}")

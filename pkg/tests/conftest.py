"""Shared helpers: seeded random inputs and the acceptance summary hook."""
import numpy as np

from detbal import KrausSet


def random_channel(d: int, n: int, seed: int) -> KrausSet:
    """Haar-style random channel: QR of a complex Gaussian (d*n, d) block."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d * n, d)) + 1j * rng.normal(size=(d * n, d))
    V, _ = np.linalg.qr(X)
    return KrausSet([V[k * d:(k + 1) * d, :] for k in range(n)])


def random_hermitian(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (X + X.conj().T) / 2


def random_unitary(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    U, _ = np.linalg.qr(X)
    return U


# one (criterion -> (passed, detail)) entry per acceptance criterion;
# test_acceptance records before asserting so failures still report
ACCEPTANCE_RESULTS = {}


def record_acceptance(criterion: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c.lstrip("C"))):
        passed, detail = ACCEPTANCE_RESULTS[crit]
        status = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {crit}: {status}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)

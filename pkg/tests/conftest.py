import numpy as np
from hypothesis import strategies as st


def random_hermitian(rng, dim, scale=1.0):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (A + A.conj().T) / 2


def random_unitary(rng, dim):
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
couplings = st.floats(min_value=0.0, max_value=15.0, allow_nan=False)
detunings = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
times = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)


# acceptance criteria report: criterion number -> (passed, details)
ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed, detail = prev[0] and passed, f"{prev[1]}; {detail}"
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

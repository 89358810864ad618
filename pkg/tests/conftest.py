import numpy as np
import pytest

from trapsqueeze.gaussian import symplectic_form
from trapsqueeze.propagation import expm

ACCEPTANCE = []


def record_criterion(label, passed, detail):
    ACCEPTANCE.append((label, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20090415)


def random_symplectic(n_modes, rng, scale=0.5):
    k = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
    return expm(symplectic_form(n_modes) @ (0.5 * (k + k.T)))


def random_physical_cm(n_modes, rng, max_thermal=3.0):
    S = random_symplectic(n_modes, rng)
    nu = rng.uniform(1.0, max_thermal, size=n_modes)
    return S @ np.diag(np.concatenate([nu, nu])) @ S.T


def two_mode_squeezed(r):
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    return np.array([
        [c, s, 0, 0],
        [s, c, 0, 0],
        [0, 0, c, -s],
        [0, 0, -s, c],
    ])


def static_pair_propagator(k_diag, k_off, w, t):
    """Closed-form propagator of a constant two-ion form.

    Position block ``[[k_diag, k_off], [k_off, k_diag]]``, momentum block
    ``w * I``.  The centre-of-mass and stretch modes decouple, each a
    harmonic oscillator with ``G = diag(k, w)``.
    """
    U = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    S_modes = []
    for k in (k_diag + k_off, k_diag - k_off):
        om = np.sqrt(k * w)
        c, s = np.cos(om * t), np.sin(om * t)
        S_modes.append(np.array([[c, np.sqrt(w / k) * s], [-np.sqrt(k / w) * s, c]]))
    # xxpp layout: positions (0, 1), momenta (2, 3)
    S = np.zeros((4, 4))
    for i, Sm in enumerate(S_modes):
        S[i, i], S[i, 2 + i] = Sm[0]
        S[2 + i, i], S[2 + i, 2 + i] = Sm[1]
    R = np.zeros((4, 4))
    R[:2, :2] = U
    R[2:, 2:] = U
    return R @ S @ R.T


def classical_propagator(field, t_end, n_modes, rtol=1e-12, atol=1e-13):
    """Propagator of ``z' = J G(t) z`` from an adaptive ODE solver.

    An independent reference: no covariance equation and no fixed grid.
    """
    from scipy.integrate import solve_ivp

    J = symplectic_form(n_modes)
    d = 2 * n_modes

    def rhs(t, y):
        return (J @ field(t) @ y.reshape(d, d)).ravel()

    sol = solve_ivp(rhs, (0.0, t_end), np.eye(d).ravel(), method="DOP853", rtol=rtol, atol=atol)
    assert sol.success
    return sol.y[:, -1].reshape(d, d)

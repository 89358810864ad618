"""Covariance-matrix algebra for zero-mean Gaussian states.

Conventions used throughout the package:

* canonical vector ordered ``(x_1, ..., x_N, p_1, ..., p_N)``;
* hbar = 1 and the vacuum of a unit oscillator has covariance matrix equal
  to the identity, so a pure state has all symplectic eigenvalues equal to 1;
* a quadratic Hamiltonian is written ``H = R^T G R / 2`` with ``G`` real
  symmetric.

Covariance matrices and quadratic forms are plain ``numpy`` arrays; the
functions here never modify their inputs.
"""

from dataclasses import dataclass

import math

import numpy as np

from .errors import InvalidState, UnstableHamiltonian, UnsupportedDimension

PHYSICAL_TOL = 1e-9
SYMMETRY_TOL = 1e-10


def symplectic_form(n_modes):
    """Return the ``2N x 2N`` symplectic form ``[[0, I], [-I, 0]]``."""
    n = int(n_modes)
    if n < 1:
        raise UnsupportedDimension(f"n_modes must be positive, got {n_modes}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def n_modes_of(matrix):
    """Number of modes of a ``2N x 2N`` matrix."""
    shape = np.shape(matrix)
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] % 2:
        raise UnsupportedDimension(f"expected a 2N x 2N matrix, got shape {shape}")
    return shape[0] // 2


def _symmetry_defect(m):
    return float(np.max(np.abs(m - m.T))) if m.size else 0.0


def _checked(sigma):
    s = np.asarray(sigma, dtype=float)
    n_modes_of(s)
    if not np.all(np.isfinite(s)):
        raise InvalidState("covariance matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(s))))
    if _symmetry_defect(s) > SYMMETRY_TOL * scale:
        raise InvalidState(f"covariance matrix is not symmetric (defect {_symmetry_defect(s):.3g})")
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise InvalidState("covariance matrix is not positive definite") from None
    return s


def _symplectic_spectrum(s):
    n = s.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(symplectic_form(n) @ s))
    # eigenvalues come in +/- i*nu pairs
    return np.sort(ev)[::-1][::2]


def symplectic_eigenvalues(sigma):
    """Symplectic spectrum of a covariance matrix.

    Parameters
    ----------
    sigma : array_like, shape (2N, 2N)
        Symmetric positive-definite matrix.

    Returns
    -------
    ndarray, shape (N,)
        Moduli of the eigenvalues of ``J sigma``, one per mode, descending.
    """
    return _symplectic_spectrum(_checked(sigma))


def _sym_sqrt(m):
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def ground_state_cm(G):
    """Covariance matrix of the ground state of ``H = R^T G R / 2``.

    Uses ``sigma = G^{-1/2} |G^{1/2} J G^{1/2}| G^{-1/2}`` where ``|M|`` is the
    positive square root of ``M M^T``; for ``G = diag(w**2, 1)`` this gives
    ``diag(1/w, w)``.

    Raises
    ------
    UnstableHamiltonian
        If ``G`` is not positive definite (some normal mode has a
        non-positive squared frequency).
    """
    G = np.asarray(G, dtype=float)
    n = n_modes_of(G)
    G = 0.5 * (G + G.T)
    w, v = np.linalg.eigh(G)
    if np.min(w) <= 0.0:
        raise UnstableHamiltonian(
            f"quadratic form is not positive definite (smallest eigenvalue {np.min(w):.6g})"
        )
    g_half = (v * np.sqrt(w)) @ v.T
    g_mhalf = (v / np.sqrt(w)) @ v.T
    m = g_half @ symplectic_form(n) @ g_half
    sigma = g_mhalf @ _sym_sqrt(m @ m.T) @ g_mhalf
    return 0.5 * (sigma + sigma.T)


def purity(sigma, check=True):
    """Purity ``Tr rho**2 = 1 / sqrt(det sigma)``.

    Evaluated as the inverse product of the symplectic eigenvalues, which
    stays accurate for strongly squeezed states where a direct determinant
    loses all digits.  Without ``check``, a state so ill-conditioned that its
    spectrum underflows to zero gives ``nan``.
    """
    s = np.asarray(sigma, dtype=float)
    n_modes_of(s)
    if check and not np.linalg.eigvalsh(0.5 * (s + s.T))[0] > 0.0:
        raise InvalidState("covariance matrix is not positive definite, det sigma <= 0")
    prod = float(np.prod(_symplectic_spectrum(s)))
    return 1.0 / prod if prod > 0.0 else math.nan


def partial_transpose(sigma):
    """Partial transposition of a two-mode covariance matrix.

    Flips the sign of the second mode's momentum, ``P sigma P`` with
    ``P = diag(1, 1, 1, -1)``.  The result need not be a physical state.
    """
    s = np.asarray(sigma, dtype=float)
    if n_modes_of(s) != 2:
        raise UnsupportedDimension("partial transposition is defined here for two modes only")
    flip = np.array([1.0, 1.0, 1.0, -1.0])
    return s * np.outer(flip, flip)


@dataclass(frozen=True)
class CMReport:
    """Diagnostics produced by :func:`validate_cm`."""

    symmetry_defect: float
    min_eigenvalue: float
    min_symplectic_eigenvalue: float
    physical: bool


def validate_cm(sigma):
    """Check a candidate covariance matrix without raising.

    The matrix is flagged physical iff its symmetry defect is below 1e-10 and
    its smallest symplectic eigenvalue is at least ``1 - 1e-9``.
    """
    nan = float("nan")
    try:
        s = np.asarray(sigma, dtype=float)
        n_modes_of(s)
    except (TypeError, ValueError):
        return CMReport(nan, nan, nan, False)
    if not np.all(np.isfinite(s)):
        return CMReport(nan, nan, nan, False)
    defect = _symmetry_defect(s)
    sym = 0.5 * (s + s.T)
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    min_nu = float(_symplectic_spectrum(sym)[-1]) if min_eig > 0 else nan
    physical = defect < SYMMETRY_TOL and min_eig > 0 and min_nu >= 1.0 - PHYSICAL_TOL
    return CMReport(defect, min_eig, min_nu, bool(physical))


"""Figures of merit: squeezing, logarithmic negativity and stability maps."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidState, UnsupportedDimension
from .gaussian import (
    PHYSICAL_TOL,
    _checked,
    _symplectic_spectrum,
    n_modes_of,
    partial_transpose,
    purity,
)
from .propagation import is_stable
from .trap import coeffs_at

LOGNEG_TOL = 1e-12


def squeezing_min_eig(sigma, check=True):
    """Smallest ordinary eigenvalue of the covariance matrix.

    Values below 1 mean some quadrature is squeezed below vacuum.  With
    ``check`` the state must be physical (smallest symplectic eigenvalue at
    least ``1 - 1e-9``), otherwise only symmetry is assumed.
    """
    if check:
        s = _checked(sigma)
        if _symplectic_spectrum(s)[-1] < 1.0 - PHYSICAL_TOL:
            raise InvalidState("covariance matrix violates the uncertainty principle")
    else:
        s = np.asarray(sigma, dtype=float)
    return float(np.linalg.eigvalsh(s)[0])


def log_negativity(sigma):
    """Logarithmic negativity of a two-mode Gaussian state, in ebits.

    ``max(0, -log2 nu)`` with ``nu`` the smallest symplectic eigenvalue of the
    partially transposed covariance matrix; ``nu`` within 1e-12 of 1 counts
    as 1.
    """
    s = np.asarray(sigma, dtype=float)
    if n_modes_of(s) != 2:
        raise UnsupportedDimension("log_negativity needs a two-mode covariance matrix")
    nu = _symplectic_spectrum(partial_transpose(s))[-1]
    if nu >= 1.0 - LOGNEG_TOL:
        return 0.0
    if nu <= 0.0:
        return math.inf
    return -math.log2(nu)


_EPR = np.array([
    [1.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, -1.0],
    [1.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0],
]) / math.sqrt(2.0)


def epr_quadratures(sigma):
    """Covariance of ``(x1+x2, p1-p2, x1-x2, p1+p2) / sqrt2``."""
    s = np.asarray(sigma, dtype=float)
    if n_modes_of(s) != 2:
        raise UnsupportedDimension("EPR quadratures need a two-mode covariance matrix")
    return _EPR @ s @ _EPR.T


def epr_min_variance(sigma):
    """Smallest eigenvalue of the covariance restricted to an EPR pair.

    The pairs are ``((x1 + x2)/sqrt2, (p1 - p2)/sqrt2)`` and
    ``((x1 - x2)/sqrt2, (p1 + p2)/sqrt2)``; a value below 1 signals squeezing
    of a non-local combination of the two ions' quadratures.
    """
    t = epr_quadratures(sigma)
    return float(min(np.linalg.eigvalsh(t[:2, :2])[0], np.linalg.eigvalsh(t[2:, 2:])[0]))


@dataclass(frozen=True)
class SeriesRow:
    t: float
    a: float
    q: float
    lambda_min: float
    purity: float
    log_neg: Optional[float] = None


def series_from(result, schedule):
    """One :class:`SeriesRow` per stored state of a propagation result."""
    if len(result.times) == 0:
        raise ValueError("empty propagation result")
    two = result.n_modes == 2
    a, q = coeffs_at(schedule, result.times)
    rows = []
    for i, (t, s) in enumerate(zip(result.times, result.states)):
        rows.append(SeriesRow(
            t=float(t),
            a=float(a[i]),
            q=float(q[i]),
            lambda_min=squeezing_min_eig(s, check=False),
            purity=purity(s, check=False),
            log_neg=log_negativity(s) if two else None,
        ))
    return rows


@dataclass(frozen=True)
class StabilityMap:
    """``stable[i, j]`` is the verdict at ``(a_values[i], q_values[j])``."""

    a_values: np.ndarray
    q_values: np.ndarray
    stable: np.ndarray


def _row(args):
    params, a, q_values, steps = args
    return [is_stable(params, a, q, steps=steps) for q in q_values]


def stability_classify(params, a_range, q_range, resolution, jobs=1, steps=2048):
    """Floquet stability over a rectangular ``(a, q)`` grid.

    ``resolution`` is the number of grid points per axis (an int, or an
    ``(n_a, n_q)`` pair); a range with equal ends may use a single point.
    Rows are independent and are spread over ``jobs`` worker processes.
    """
    n_a, n_q = (resolution, resolution) if np.isscalar(resolution) else resolution
    a_values = np.linspace(a_range[0], a_range[1], int(n_a))
    q_values = np.linspace(q_range[0], q_range[1], int(n_q))
    if not (np.all(np.isfinite(a_values)) and np.all(np.isfinite(q_values))):
        raise ValueError("stability ranges must be finite")
    tasks = [(params, a, q_values, steps) for a in a_values]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, tasks))
    else:
        rows = [_row(t) for t in tasks]
    return StabilityMap(a_values, q_values, np.array(rows, dtype=bool).reshape(len(a_values), len(q_values)))


def instability_onset(params, a, q_stable, q_unstable, tol=1e-5, steps=2048):
    """Bisect on ``q`` for the loss of Floquet stability at fixed ``a``.

    ``q_stable`` must be stable and ``q_unstable`` unstable; returns the
    midpoint of the final bracket.
    """
    lo, hi = q_stable, q_unstable
    if not is_stable(params, a, lo, steps=steps) or is_stable(params, a, hi, steps=steps):
        raise ValueError("bracket must go from a stable to an unstable q")
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if is_stable(params, a, mid, steps=steps):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

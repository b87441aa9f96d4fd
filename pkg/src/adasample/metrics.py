"""Pose-error metrics and the paired t-test used for run comparisons.

The rotation distance between two orientations is the angle of the relative
rotation, computed through the trace identity
``rho = arccos((trace(R^T R') - 1) / 2)``, which equals the Frobenius norm of
the matrix logarithm divided by sqrt(2) for proper rotations.

The t distribution's CDF is evaluated through the regularized incomplete
beta function with a continued-fraction expansion (modified Lentz), keeping
the statistics path free of external dependencies so tests can check it
against an independent implementation.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "rotation_from_angles",
    "geodesic_distance",
    "acc_threshold",
    "med_err",
    "paired_t_test",
]


def _rot_z(deg: float) -> np.ndarray:
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_x(deg: float) -> np.ndarray:
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_from_angles(azimuth: float, elevation: float, in_plane: float) -> np.ndarray:
    """Orientation matrix from viewpoint angles in degrees (z-x-z composition)."""
    return _rot_z(in_plane) @ _rot_x(elevation) @ _rot_z(azimuth)


def _check_rotation(r: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(3))) > tol or abs(np.linalg.det(r) - 1.0) > tol:
        raise ValueError("input is not a proper rotation matrix")
    return r


def geodesic_distance(r: np.ndarray, r_prime: np.ndarray) -> float:
    """Included angle between two rotations, in degrees."""
    r = _check_rotation(r)
    r_prime = _check_rotation(r_prime)
    cos_rho = (np.trace(r.T @ r_prime) - 1.0) / 2.0
    return math.degrees(math.acos(min(1.0, max(-1.0, cos_rho))))


def acc_threshold(rhos, threshold: float = 30.0) -> float:
    """Fraction of angular errors at or below the threshold (inclusive)."""
    rhos = np.asarray(rhos, dtype=float)
    if rhos.size == 0:
        raise ValueError("acc_threshold needs a non-empty list")
    return float(np.mean(rhos <= threshold))


def med_err(rhos) -> float:
    """Median angular error in degrees (mean of the central pair when even)."""
    rhos = np.asarray(rhos, dtype=float)
    if rhos.size == 0:
        raise ValueError("med_err needs a non-empty list")
    return float(np.median(rhos))


# ---- Student t CDF via the regularized incomplete beta ---------------------

_BETA_EPS = 1e-15
_BETA_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for the incomplete beta (modified Lentz)
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < 1e-300:
        d = 1e-300
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _t_sf_two_sided(t: float, dof: int) -> float:
    """P(|T| >= t) for t >= 0 under Student's t with ``dof`` degrees of freedom."""
    return _betainc(dof / 2.0, 0.5, dof / (dof + t * t))


def paired_t_test(xs, ys) -> tuple:
    """Two-sided paired t-test; returns ``(t, p, n)``.

    Raises on mismatched lengths, n < 2, or zero-variance differences (the
    degenerate case where the statistic is undefined).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("paired t-test needs two equal-length vectors")
    n = xs.size
    if n < 2:
        raise ValueError("paired t-test needs n >= 2")
    diff = xs - ys
    sd = diff.std(ddof=1)
    if sd == 0.0:
        raise ZeroDivisionError("zero-variance differences: t statistic undefined")
    t = float(diff.mean() / (sd / math.sqrt(n)))
    p = _t_sf_two_sided(abs(t), n - 1)
    return t, p, n

"""Stability of the compensating cascade and the length-bandwidth trade-off.

The cascade converges on a band iff the sub-system error response stays
strictly inside the unit circle there: |1 - sqrt(alpha)*exp(-j*theta)| < 1
with theta the dispersion phase accumulated over the target span. For a
beta2-only span this reduces to a closed-form bound on
``|beta2|/2 * (pi*B)^2 * z`` evaluated at the band edge delta_omega = pi*B,
which yields the maximum stable transmission length for a given bandwidth.
"""

import math
from dataclasses import dataclass

import numpy as np

from .iterative import CONTRACTION_MARGIN


@dataclass(frozen=True)
class RegionQuery:
    """Axes for a stability-region scan at fixed alpha and fiber beta2."""

    alpha: float
    beta2_fib: float
    bandwidth_grid: np.ndarray
    z_grid: np.ndarray

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")
        for name in ("bandwidth_grid", "z_grid"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-d array")
            if not np.all(arr > 0):
                raise ValueError(f"{name} values must be positive")
            if not np.all(np.diff(arr) > 0):
                raise ValueError(f"{name} must be strictly increasing")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _error_magnitude(alpha: float, theta) -> np.ndarray:
    """|1 - sqrt(alpha)*exp(-j*theta)| via the law of cosines."""
    return np.sqrt(1.0 + alpha - 2.0 * math.sqrt(alpha) * np.cos(theta))


def stable(
    alpha: float,
    beta2: float,
    bandwidth_hz: float,
    z_m: float,
    extra_betas: tuple = (),
    n_probe: int = 4097,
) -> bool:
    """True iff sup over |delta_omega| <= pi*B of the error magnitude is < 1.

    The test is strict with a :data:`CONTRACTION_MARGIN` guard. With only
    beta2 present the supremum sits at the band edge (the magnitude is
    monotone in the accumulated phase while it stays below pi), so the edge
    value decides; configured higher orders ``extra_betas = (beta3, ...)``
    switch to a dense numeric scan of the band.
    """
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    if z_m < 0:
        raise ValueError("z must be non-negative")
    edge = math.pi * bandwidth_hz
    if not extra_betas:
        theta_edge = abs(beta2) / 2.0 * edge**2 * z_m
        if theta_edge >= math.pi:
            return False
        worst = _error_magnitude(alpha, theta_edge)
    else:
        dw = np.linspace(-edge, edge, n_probe)
        theta = beta2 / 2.0 * dw**2
        power = dw**2
        for i, beta_i in enumerate(extra_betas, start=3):
            power = power * dw
            theta = theta + beta_i / math.factorial(i) * power
        worst = float(np.max(_error_magnitude(alpha, z_m * theta)))
    return worst < 1.0 - CONTRACTION_MARGIN


def z_max(bandwidth_hz: float, alpha: float, beta2: float) -> float:
    """Longest stable span for a given band: 2*acos(sqrt(alpha)/2) / (|beta2|*(pi*B)^2).

    Unbounded (inf) when beta2 is zero.
    """
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    if beta2 == 0:
        return math.inf
    return (
        2.0
        * math.acos(math.sqrt(alpha) / 2.0)
        / (abs(beta2) * (math.pi * bandwidth_hz) ** 2)
    )


def region_table(q: RegionQuery) -> tuple[np.ndarray, np.ndarray]:
    """Stability matrix over (B, z) plus the closed-form boundary curve.

    Returns ``(matrix, boundary)`` with ``matrix[i, j] = stable(B_i, z_j)``
    and ``boundary[i] = z_max(B_i)``. Rows are independent and the result
    is deterministic.
    """
    matrix = np.empty((q.bandwidth_grid.size, q.z_grid.size), dtype=bool)
    boundary = np.empty(q.bandwidth_grid.size)
    for i, b in enumerate(q.bandwidth_grid):
        boundary[i] = z_max(b, q.alpha, q.beta2_fib)
        for j, z in enumerate(q.z_grid):
            matrix[i, j] = stable(q.alpha, q.beta2_fib, b, z)
    return matrix, boundary

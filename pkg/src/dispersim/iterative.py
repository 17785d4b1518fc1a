"""Iterative inversion of sampled LTI responses.

Given a response H, the error response E = 1 - mu*H measures its deviation
from (scaled) identity. When max|E| < 1 over the band of interest, the
geometric partial sums 1 + E + ... + E^K converge bin-wise to 1/(mu*H), so
repeatedly applying E and re-adding the input realizes an approximate
inverse of H. Everything here is diagonal in the frequency basis, so all
operations are bin-wise on sampled transfer functions.
"""

from dataclasses import dataclass

import numpy as np

from .signal import Envelope, GridMismatchError, TransferFunction, apply_tf

#: Strictness margin for contraction tests, avoids boundary flapping.
CONTRACTION_MARGIN = 1e-9


@dataclass(frozen=True)
class IterationSpec:
    """Number of error-operator applications and the scaling factor mu."""

    k_terms: int
    mu: float = 1.0

    def __post_init__(self):
        if not isinstance(self.k_terms, (int, np.integer)) or isinstance(
            self.k_terms, bool
        ):
            raise ValueError("k_terms must be an integer")
        if self.k_terms < 0:
            raise ValueError("k_terms must be non-negative")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ValueError("mu must be positive")


def error_tf(h: TransferFunction, mu: float = 1.0) -> TransferFunction:
    """Error response 1 - mu*h, bin-wise."""
    return TransferFunction(h.grid, 1.0 - mu * h.values)


def neumann_sum_tf(h: TransferFunction, spec: IterationSpec) -> TransferFunction:
    """Partial geometric sum S_K = sum_{j=0..K} (1 - mu*h)^j, bin-wise.

    Convergence is not required to evaluate the sum; it is only needed for
    S_K to approximate 1/(mu*h).
    """
    e = 1.0 - spec.mu * h.values
    acc = np.ones_like(e)
    term = np.ones_like(e)
    for _ in range(spec.k_terms):
        term = term * e
        acc = acc + term
    return TransferFunction(h.grid, acc)


def feedback_run(
    e_in: Envelope, h: TransferFunction, spec: IterationSpec
) -> Envelope:
    """Closed-loop realization of the truncated sum.

    Starting from y = input, the loop body y <- input + E{y} runs exactly
    ``spec.k_terms`` times; the result equals applying
    :func:`neumann_sum_tf` directly.
    """
    if e_in.grid != h.grid:
        raise GridMismatchError("input and response must share a grid")
    err = error_tf(h, spec.mu)
    y = e_in
    for _ in range(spec.k_terms):
        fed_back = apply_tf(y, err)
        y = Envelope(
            e_in.grid, e_in.samples + fed_back.samples, e_in.carrier_wavelength
        )
    return y


def operator_norm(
    h: TransferFunction, mu: float = 1.0, band_limit: float | None = None
) -> float:
    """max over |delta_omega| <= band_limit of |1 - mu*h|.

    ``band_limit`` defaults to the whole grid. The sum converges on the band
    iff this is < 1 (use :data:`CONTRACTION_MARGIN` for a strict test).
    """
    if band_limit is None:
        band_limit = h.grid.max_abs_delta_omega
    if band_limit < 0:
        raise ValueError("band_limit must be non-negative")
    if band_limit > h.grid.max_abs_delta_omega * (1 + 1e-12):
        raise ValueError("band_limit exceeds the grid band")
    mask = np.abs(h.grid.delta_omega) <= band_limit
    if not np.any(mask):
        raise ValueError("band contains no bins")
    return float(np.max(np.abs(1.0 - mu * h.values[mask])))

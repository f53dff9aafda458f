"""Independent quadrature oracle for the first horizon derivative.

For the operator ``box + 1`` on the one-dimensional base model, restricting
the equation to the horizon forces

    @t u|_{t=0}(x) = - Integral_{-inf}^0 e^s u0(x - 2 s) ds,

a damped average of the initial datum along the backward generator flow.
This module evaluates that integral per grid point by direct Fourier
summation and composite Gauss panels.  It deliberately shares no code path
with the transport solver (no FFT shifts, no mode division) so it can serve
as a genuinely independent cross-check on order-0 jets; only the truncation
and panel budget policy matches the solver's quadrature backend.

The kernel is specific to this operator on this model and is not
generalized.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .fields import Field


def _direct_samples(u0: Field, points: np.ndarray) -> np.ndarray:
    """Evaluate u0 at arbitrary points by summing its Fourier series."""
    coeffs = u0.coeffs[0]
    k = u0.torus.modes()[0].astype(float) * (2.0 * np.pi / u0.torus.periods[0])
    phases = np.exp(1j * np.outer(points, k))
    return np.real(phases @ coeffs)


def horizon_first_derivative(
    u0: Field,
    s_cut: float = -36.0,
    steps: int = 1024,
    gauss_order: int = 8,
) -> Field:
    """- Integral_{-inf}^0 e^s u0(x - 2s) ds on the collocation grid."""
    if u0.torus.dims != 1 or u0.components != 1:
        raise ValidationError("the oracle is defined for scalar data on the circle")
    if s_cut >= 0:
        raise ValidationError("s_cut must be negative")
    nodes, weights = np.polynomial.legendre.leggauss(gauss_order)
    edges = np.linspace(s_cut, 0.0, steps + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    s = (mid[:, None] + half * nodes[None, :]).reshape(-1)
    w = np.broadcast_to(half * weights[None, :], (steps, gauss_order)).reshape(-1)

    x = u0.torus.axes()[0]
    acc = np.zeros_like(x)
    for si, wi in zip(s, w):
        acc += wi * np.exp(si) * _direct_samples(u0, x - 2.0 * si)
    return Field.from_values(u0.torus, -acc)

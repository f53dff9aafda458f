"""Model spacetimes in null normal form.

Each built-in model is a metric ``2 dt dx^1 + psi(t) (dx^1)^2 + sum dy_j^2``
on ``R x T^n``, presented through the data every solver consumes: the
degeneracy function ``psi`` (closed form plus Taylor coefficients at t = 0),
the horizon generator ``V`` recorded in the unit-surface-gravity gauge, the
tangent field ``Z`` with ``grad(t) = Z - psi @t``, the transversal metric
``gbar`` (identity), and the auxiliary Riemannian metric ``sigma`` (identity)
that defines all Sobolev norms.

The generator gauge: on the base model ``V = @x1`` satisfies
``nabla_V V = -V/2``, so the recorded generator is ``-2 @x1`` (surface
gravity 1).  Degenerate variants (``psi = t^m``, m >= 2) keep the drift
``-2 @x1`` of the d'Alembertian and are flagged with zero surface gravity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .fields import Field
from .torus import SpatialTorus


def _as_tuple(x, n: int, kind: str) -> tuple:
    if np.isscalar(x):
        return tuple([x] * n)
    t = tuple(x)
    if len(t) != n:
        raise ValidationError(f"{kind} must have {n} entries")
    return t


@dataclass(frozen=True)
class HorizonModel:
    """A spacetime in null normal form around its compact Cauchy horizon."""

    name: str
    torus: SpatialTorus
    psi_taylor: tuple[float, ...]
    psi: Callable[[float], float]
    dpsi: Callable[[float], float]
    generator: tuple[float, ...]
    z_direction: tuple[float, ...]
    surface_gravity: float
    degenerate: bool

    def __post_init__(self):
        if all(v == 0.0 for v in self.generator):
            raise ValidationError("generator must be non-zero")
        if not self.degenerate:
            if self.psi_taylor[0] != 0.0 or self.psi_taylor[1] <= 0.0:
                raise ValidationError(
                    "non-degenerate model needs psi(0) = 0 and psi'(0) > 0"
                )

    @property
    def dims(self) -> int:
        return self.torus.dims

    def psi_coefficient(self, j: int) -> float:
        """j-th Taylor coefficient of psi at t = 0 (zero beyond the stored jet)."""
        return self.psi_taylor[j] if j < len(self.psi_taylor) else 0.0

    def sigma(self) -> np.ndarray:
        """Constant coefficient matrix of the horizon metric (flat: identity)."""
        return np.eye(self.dims)

    def gbar(self) -> np.ndarray:
        """Transversal metric on E in the transverse frame (identity)."""
        return np.eye(max(self.dims - 1, 0))

    def transverse_frame(self) -> np.ndarray:
        """Orthonormal basis of E = sigma-orthocomplement of the generator.

        Shape (n-1, n); empty for one-dimensional horizons.
        """
        n = self.dims
        if n == 1:
            return np.zeros((0, 1))
        v = np.asarray(self.generator, dtype=float)
        v = v / np.linalg.norm(v)
        basis = [v]
        for e in np.eye(n):
            w = e.copy()
            for b in basis:
                w -= np.dot(w, b) * b
            norm = np.linalg.norm(w)
            if norm > 1e-12:
                basis.append(w / norm)
        frame = np.array(basis[1:])
        if frame.shape != (n - 1, n):
            raise ValidationError("failed to build a transverse frame")
        return frame

    def sigma_on_generator(self) -> float:
        v = np.asarray(self.generator, dtype=float)
        return float(v @ self.sigma() @ v)


def make_misner(sign: str, period: float = 2.0 * np.pi, resolution: int = 64) -> HorizonModel:
    """The one-dimensional model ``(+/-) 2 dt dx + t dx^2`` on R x S^1.

    ``sign='+'`` records the generator ``-2 @x`` (unit surface gravity);
    ``sign='-'`` flips it to ``+2 @x``.
    """
    if sign not in ("+", "-"):
        raise ValidationError("sign must be '+' or '-'")
    if period <= 0:
        raise ValidationError("period must be positive")
    torus = SpatialTorus(1, (float(period),), (int(resolution),))
    v = (-2.0,) if sign == "+" else (2.0,)
    return HorizonModel(
        name=f"misner{sign}",
        torus=torus,
        psi_taylor=(0.0, 1.0),
        psi=lambda t: t,
        dpsi=lambda t: 1.0,
        generator=v,
        z_direction=tuple(-0.5 * np.asarray(v)),
        surface_gravity=1.0,
        degenerate=False,
    )


def make_generalized_misner(m: int, transverse_dims: int, periods, resolution) -> HorizonModel:
    """``2 dt dx + t^m dx^2 + sum dy_j^2``; surface gravity vanishes for m >= 2."""
    if int(m) != m or m < 1:
        raise ValidationError("m must be an integer >= 1")
    m = int(m)
    n = 1 + int(transverse_dims)
    periods = _as_tuple(periods, n, "periods")
    resolution = _as_tuple(resolution, n, "resolution")
    torus = SpatialTorus(n, tuple(float(p) for p in periods), tuple(int(r) for r in resolution))
    taylor = [0.0] * (m + 1)
    taylor[m] = float(math.factorial(m))
    v = (-2.0,) + (0.0,) * (n - 1)
    return HorizonModel(
        name=f"generalized_misner(m={m})",
        torus=torus,
        psi_taylor=tuple(taylor),
        psi=lambda t, m=m: t**m,
        dpsi=lambda t, m=m: m * t ** (m - 1),
        generator=v,
        z_direction=tuple(-0.5 * np.asarray(v)),
        surface_gravity=1.0 if m == 1 else 0.0,
        degenerate=m >= 2,
    )


def make_torus_quotient(v, periods, resolution) -> HorizonModel:
    """Quotient model with generator direction ``v`` on a flat n-torus.

    ``v`` is recorded as given and is interpreted in the unit-surface-gravity
    gauge (the analogue of ``-2 @x1``); irrational direction ratios make the
    generator flow dense.  ``psi(t) = t`` and ``sigma`` is the flat identity.
    """
    v = tuple(float(c) for c in np.atleast_1d(np.asarray(v, dtype=float)))
    if all(c == 0.0 for c in v):
        raise ValidationError("generator direction must be non-zero")
    n = len(v)
    periods = _as_tuple(periods, n, "periods")
    resolution = _as_tuple(resolution, n, "resolution")
    torus = SpatialTorus(n, tuple(float(p) for p in periods), tuple(int(r) for r in resolution))
    return HorizonModel(
        name="torus_quotient",
        torus=torus,
        psi_taylor=(0.0, 1.0),
        psi=lambda t: t,
        dpsi=lambda t: 1.0,
        generator=v,
        z_direction=tuple(-0.5 * np.asarray(v)),
        surface_gravity=1.0,
        degenerate=False,
    )


def null_form_data(model: HorizonModel, taylor_order: int) -> dict:
    """Taylor and frame data consumed by the wave-operator assembly."""
    if taylor_order < 1:
        raise ValidationError("taylor_order must be >= 1")
    psi_taylor = [model.psi_coefficient(j) for j in range(taylor_order + 1)]
    return {
        "psi_taylor": psi_taylor,
        "z_direction": model.z_direction,
        "gbar": model.gbar(),
        "kappa": model.surface_gravity,
    }


def constant_field(model: HorizonModel, value) -> Field:
    return Field.constant(model.torus, value)

"""Horizon jets: build w^N(t, x) = sum u_j t^j / j! order by order.

Each order solves one transport problem ``A_k u_{k+1} = rhs_k``; the engine
never aborts on singular transport operators, it records the per-order
obstruction (unsolvable right-hand-side components) and free kernel
directions and continues with the minimum-norm solution, because the
counterexample gallery is a first-class use case.

Semi-linear sources are composed through truncated power-series arithmetic
over fields (dealiased products): the order-k source jet depends only on
``u_0 .. u_k``, so the recursion stays explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import OrderShortfallError, ValidationError
from .fields import Field, l2_norm, multiply, sobolev_norm
from .operators import OperatorSpec, TimeCoefficient, horizon_transport_family, order_residual
from .transport import (
    DEFAULT_SINGULAR_THRESHOLD,
    Obstruction,
    TransportProblem,
    solve_spectral,
    solve_system,
)

# -- nonlinearities -----------------------------------------------------------


class Nonlinearity:
    """A smooth function f(u) usable both pointwise and on truncated series.

    ``series(a, order)`` maps series coefficients ``a_j`` of u(t) to the
    series coefficients of f(u(t)) through ``order``; ``pointwise`` evaluates
    f on grid samples.
    """

    def series(self, a: Sequence[Field], order: int) -> list[Field]:
        raise NotImplementedError

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _series_product(a: Sequence[Field], b: Sequence[Field], order: int) -> list[Field]:
    torus = a[0].torus
    out = []
    for n in range(order + 1):
        acc = Field.zero(torus)
        for j in range(n + 1):
            if j < len(a) and n - j < len(b):
                acc = acc + multiply(a[j], b[n - j])
        out.append(acc)
    return out


@dataclass(frozen=True)
class Polynomial(Nonlinearity):
    """f(u) = sum_m coeffs[m] u^m."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))

    def series(self, a: Sequence[Field], order: int) -> list[Field]:
        torus = a[0].torus
        out = [Field.zero(torus) for _ in range(order + 1)]
        if self.coeffs:
            out[0] = out[0] + Field.constant(torus, self.coeffs[0])
        power = [Field.constant(torus, 1.0)]
        for m in range(1, len(self.coeffs)):
            power = _series_product(power, list(a), order)
            c = self.coeffs[m]
            if c != 0.0:
                for n in range(order + 1):
                    out[n] = out[n] + c * power[n]
        return out

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values)
        for c in reversed(self.coeffs):
            out = out * values + c
        return out


@dataclass(frozen=True)
class Exp(Nonlinearity):
    """f(u) = amplitude * exp(u); series via g' = u' g."""

    amplitude: float = 1.0

    def series(self, a: Sequence[Field], order: int) -> list[Field]:
        torus = a[0].torus
        g = [Field.from_values(torus, self.amplitude * np.exp(a[0].values()))]
        for n in range(1, order + 1):
            acc = Field.zero(torus)
            for j in range(1, n + 1):
                if j < len(a):
                    acc = acc + float(j) * multiply(a[j], g[n - j])
            g.append((1.0 / n) * acc)
        return g

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(values)


@dataclass(frozen=True)
class Sin(Nonlinearity):
    amplitude: float = 1.0

    def series(self, a: Sequence[Field], order: int) -> list[Field]:
        return _sin_cos_series(a, order, self.amplitude)[0]

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(values)


@dataclass(frozen=True)
class Cos(Nonlinearity):
    amplitude: float = 1.0

    def series(self, a: Sequence[Field], order: int) -> list[Field]:
        return _sin_cos_series(a, order, self.amplitude)[1]

    def pointwise(self, values: np.ndarray) -> np.ndarray:
        return self.amplitude * np.cos(values)


def _sin_cos_series(a: Sequence[Field], order: int, amplitude: float):
    torus = a[0].torus
    s = [Field.from_values(torus, np.sin(a[0].values()))]
    c = [Field.from_values(torus, np.cos(a[0].values()))]
    for n in range(1, order + 1):
        acc_s = Field.zero(torus)
        acc_c = Field.zero(torus)
        for j in range(1, n + 1):
            if j < len(a):
                acc_s = acc_s + float(j) * multiply(a[j], c[n - j])
                acc_c = acc_c - float(j) * multiply(a[j], s[n - j])
        s.append((1.0 / n) * acc_s)
        c.append((1.0 / n) * acc_c)
    return [amplitude * f for f in s], [amplitude * f for f in c]


# -- sources -------------------------------------------------------------------


@dataclass(frozen=True)
class SourceTerm:
    """An inhomogeneity f(t, x) as a t-jet plus a closed-form evaluator."""

    jet_fn: Callable[[int], Field]
    closed: Callable[[float], Field]

    @classmethod
    def zero(cls, torus, components: int = 1) -> "SourceTerm":
        z = Field.zero(torus, components)
        return cls(jet_fn=lambda j: z, closed=lambda t: z)

    @classmethod
    def static(cls, field: Field) -> "SourceTerm":
        z = Field.zero(field.torus, field.components)
        return cls(jet_fn=lambda j: field if j == 0 else z, closed=lambda t: field)

    @classmethod
    def separable(cls, field: Field, time_profile: TimeCoefficient) -> "SourceTerm":
        """f(t, x) = field(x) * c(t) with derivative-convention Taylor data."""

        def jet(j: int) -> Field:
            return float(time_profile.coefficient(j)) * field

        return cls(jet_fn=jet, closed=lambda t: float(time_profile(t)) * field)


def as_source(torus, f, components: int = 1) -> SourceTerm:
    if f is None:
        return SourceTerm.zero(torus, components)
    if isinstance(f, SourceTerm):
        return f
    if isinstance(f, Field):
        return SourceTerm.static(f)
    raise ValidationError("source must be None, a Field or a SourceTerm")


# -- the jet container ----------------------------------------------------------


@dataclass(frozen=True)
class KernelDirections:
    """Free directions of one singular order: modes, and for systems the
    null vectors of the corresponding blocks."""

    order: int
    modes: tuple
    directions: tuple = ()

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "modes": [list(map(int, m)) for m in self.modes],
            "directions": [list(d) for d in self.directions],
        }


@dataclass(frozen=True)
class AsymptoticSolution:
    """The horizon jet (u_0, ..., u_{N+1}) of one characteristic problem."""

    op: OperatorSpec
    order: int
    jets: tuple[Field, ...]
    source_jets: tuple[Field, ...]
    obstructions: tuple[tuple[int, Obstruction], ...]
    free_kernel: tuple[KernelDirections, ...]

    @property
    def clean(self) -> bool:
        return all(not ob.has_violation for _, ob in self.obstructions)

    def obstructed_orders(self) -> list[int]:
        return [k for k, ob in self.obstructions if ob.has_violation]

    def singular_orders(self) -> list[int]:
        return [k for k, _ in self.obstructions]


def _solve_order(op, fam, rhs, threshold):
    prob = TransportProblem(
        op.torus,
        fam.v,
        fam.lam,
        rhs,
        beta=fam.beta if op.d == 1 else None,
        matrix_shift=fam.matrix_shift,
    )
    if op.d == 1:
        return solve_spectral(prob, threshold)
    return solve_system(prob, threshold)


def _kernel_of(op, fam, obstruction: Obstruction) -> KernelDirections:
    directions = ()
    if op.d > 1 and obstruction.singular_modes:
        dirs = []
        shift = fam.matrix_shift
        for mode in obstruction.singular_modes:
            vk = sum(
                2.0 * np.pi * m / p * vi
                for m, p, vi in zip(mode, op.torus.periods, fam.v)
            )
            block = 1j * vk * np.eye(op.d) + shift
            _, s, vh = np.linalg.svd(block)
            null = vh[s <= obstruction.threshold].conj()
            dirs.extend(tuple(np.round(row.real, 12)) for row in null)
        directions = tuple(dirs)
    return KernelDirections(order=fam.k, modes=obstruction.singular_modes, directions=directions)


def linear_asymptotics(
    op: OperatorSpec,
    u0: Field,
    f=None,
    N: int = 8,
    singular_threshold: float = DEFAULT_SINGULAR_THRESHOLD,
) -> AsymptoticSolution:
    """Iterate the per-order transport solves for a linear problem."""
    if u0.components != op.d:
        raise ValidationError("initial data has the wrong number of components")
    source = as_source(op.torus, f, op.d)
    jets = [u0]
    source_jets = []
    obstructions = []
    kernels = []
    for k in range(N + 1):
        fam = horizon_transport_family(op, k)
        f_k = source.jet_fn(k)
        source_jets.append(f_k)
        rhs = fam.rhs_assembler(jets, f_k)
        res = _solve_order(op, fam, rhs, singular_threshold)
        jets.append(res.solution)
        if res.obstruction is not None:
            obstructions.append((k, res.obstruction))
            kernels.append(_kernel_of(op, fam, res.obstruction))
    return AsymptoticSolution(
        op=op,
        order=N,
        jets=tuple(jets),
        source_jets=tuple(source_jets),
        obstructions=tuple(obstructions),
        free_kernel=tuple(kernels),
    )


def semilinear_asymptotics(
    op: OperatorSpec,
    nonlinearity: Nonlinearity,
    u0: Field,
    N: int = 8,
    singular_threshold: float = DEFAULT_SINGULAR_THRESHOLD,
) -> AsymptoticSolution:
    """Jet recursion with source ``f(w)`` composed from the jet built so far."""
    if op.d != 1:
        raise ValidationError("semi-linear jets are scalar only")
    jets = [u0]
    source_jets = []
    obstructions = []
    kernels = []
    for k in range(N + 1):
        fam = horizon_transport_family(op, k)
        series = [jets[j] * (1.0 / math.factorial(j)) for j in range(len(jets))]
        b = nonlinearity.series(series, k)
        f_k = float(math.factorial(k)) * b[k]
        source_jets.append(f_k)
        rhs = fam.rhs_assembler(jets, f_k)
        res = _solve_order(op, fam, rhs, singular_threshold)
        jets.append(res.solution)
        if res.obstruction is not None:
            obstructions.append((k, res.obstruction))
            kernels.append(_kernel_of(op, fam, res.obstruction))
    return AsymptoticSolution(
        op=op,
        order=N,
        jets=tuple(jets),
        source_jets=tuple(source_jets),
        obstructions=tuple(obstructions),
        free_kernel=tuple(kernels),
    )


def evaluate_jet(w: AsymptoticSolution, t: float) -> tuple[Field, Field]:
    """Horner evaluation of (w^N(t), @t w^N(t))."""
    if t < 0:
        raise ValidationError("jets are evaluated at t >= 0")
    jets = w.jets
    top = len(jets) - 1
    u = jets[top] * (1.0 / math.factorial(top))
    for j in range(top - 1, -1, -1):
        u = t * u + jets[j] * (1.0 / math.factorial(j))
    if top == 0:
        ut = Field.zero(w.op.torus, w.op.d)
    else:
        ut = jets[top] * (1.0 / math.factorial(top - 1))
        for j in range(top - 1, 0, -1):
            ut = t * ut + jets[j] * (1.0 / math.factorial(j - 1))
    return u, ut


def residual_order_check(w: AsymptoticSolution, f=None) -> list[float]:
    """L2 norms of ``@t^k (P w^N - f)|_0`` for k <= N, straight from Taylor data."""
    norms = []
    for k in range(w.order + 1):
        if f is None:
            f_k = w.source_jets[k] if k < len(w.source_jets) else None
        else:
            f_k = as_source(w.op.torus, f, w.op.d).jet_fn(k)
        r = order_residual(w.op, w.jets, k, f_k)
        norms.append(l2_norm(r))
    return norms


def residual_scale(u0: Field, m: int = 1) -> float:
    """Normalization for residual tolerances: max(1, ||u0||_{2m})."""
    return max(1.0, sobolev_norm(u0, 2 * m))

"""Wave operators in interior normal form.

Every operator is kept as ``P = psi(t) @t^2 + L1(t) @t + L2(t)`` where
``L1`` and ``L2`` are spatial operators (first and second order) acting on
fields over the horizon torus.  Two representations coexist:

* Taylor data ``{psi_j, L1_j, L2_j}`` at ``t = 0`` (derivative convention,
  coefficient ``j`` is the j-th t-derivative at 0) drives the horizon jet
  recursion exactly;
* closed-form evaluators ``L1(t), L2(t), psi(t)`` drive the interior
  evolution for ``t > 0``.

The per-order transport operator is obtained by a Leibniz expansion of
``@t^k(P w)|_0``: the coefficient of the top jet ``u_{k+1}`` is
``k psi_1 + L1_0``, and everything of lower order moves to the right-hand
side.  For the base model with unit surface gravity this reproduces the
classical ``(-2 @x + (k+1)) u_{k+1} + (lower orders)`` recursion at
coefficient level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import OrderShortfallError, DegenerateDivision, ValidationError
from .fields import Field, multiply
from .models import HorizonModel
from .torus import SpatialTorus


# -- spatial operators -------------------------------------------------------


@dataclass(frozen=True)
class SpatialOperator:
    """Constant-coefficient spatial operator, optionally with a scalar
    multiplication field.

    Terms: ``sum_ij quad[i,j] @i @j  +  sum_abi drift[a,b,i] @i (on comp. b)
    + mult_const + mult_field``.  ``drift`` is (d, d, n); ``quad`` acts
    componentwise.
    """

    d: int
    n: int
    quad: np.ndarray | None = None
    drift: np.ndarray | None = None
    mult_const: np.ndarray | None = None
    mult_field: Field | None = None

    @classmethod
    def zero(cls, d: int, n: int) -> "SpatialOperator":
        return cls(d=d, n=n)

    @classmethod
    def drift_vector(cls, v, d: int = 1) -> "SpatialOperator":
        v = np.asarray(v, dtype=float)
        n = v.size
        drift = np.zeros((d, d, n))
        for a in range(d):
            drift[a, a, :] = v
        return cls(d=d, n=n, drift=drift)

    @classmethod
    def drift_matrix(cls, mat) -> "SpatialOperator":
        mat = np.asarray(mat, dtype=float)
        if mat.ndim != 3 or mat.shape[0] != mat.shape[1]:
            raise ValidationError("matrix drift must have shape (d, d, n)")
        return cls(d=mat.shape[0], n=mat.shape[2], drift=mat)

    @classmethod
    def multiplication(cls, c, d: int = 1, n: int = 1) -> "SpatialOperator":
        if isinstance(c, Field):
            if c.components != 1:
                raise ValidationError("multiplication field must be scalar")
            return cls(d=d, n=c.torus.dims, mult_field=c)
        c = np.asarray(c, dtype=float)
        if c.ndim == 0:
            c = float(c) * np.eye(d)
        if c.shape != (d, d):
            raise ValidationError("multiplication matrix must be (d, d)")
        return cls(d=d, n=n, mult_const=c)

    @classmethod
    def quadratic(cls, Q, d: int = 1) -> "SpatialOperator":
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValidationError("quadratic part must be a square matrix")
        return cls(d=d, n=Q.shape[0], quad=Q)

    def __add__(self, other: "SpatialOperator") -> "SpatialOperator":
        if not isinstance(other, SpatialOperator):
            return NotImplemented
        if self.d != other.d or self.n != other.n:
            raise ValidationError("operator shapes differ")

        def _add(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return a + b

        return SpatialOperator(
            d=self.d,
            n=self.n,
            quad=_add(self.quad, other.quad),
            drift=_add(self.drift, other.drift),
            mult_const=_add(self.mult_const, other.mult_const),
            mult_field=_add(self.mult_field, other.mult_field),
        )

    def scaled(self, c: float) -> "SpatialOperator":
        return SpatialOperator(
            d=self.d,
            n=self.n,
            quad=None if self.quad is None else c * self.quad,
            drift=None if self.drift is None else c * self.drift,
            mult_const=None if self.mult_const is None else c * self.mult_const,
            mult_field=None if self.mult_field is None else c * self.mult_field,
        )

    @property
    def is_mode_diagonal(self) -> bool:
        """True when the action is blockwise multiplication in Fourier space."""
        return self.mult_field is None

    def is_zero(self) -> bool:
        return (
            self.quad is None
            and self.drift is None
            and self.mult_const is None
            and self.mult_field is None
        )

    def block_symbol(self, torus: SpatialTorus) -> np.ndarray:
        """Mode-wise (d, d) blocks of the constant-coefficient part.

        Shape (d, d, *res); requires ``is_mode_diagonal``.
        """
        if not self.is_mode_diagonal:
            raise ValidationError("operator with a multiplication field is not diagonal")
        d = self.d
        sym = np.zeros((d, d, *torus.resolution), dtype=np.complex128)
        kt = torus.wavenumbers()
        if self.quad is not None:
            qsym = np.zeros(torus.resolution)
            for i in range(self.n):
                for j in range(self.n):
                    if self.quad[i, j] != 0.0:
                        qsym = qsym - self.quad[i, j] * kt[i] * kt[j]
            for a in range(d):
                sym[a, a] += qsym
        if self.drift is not None:
            for a in range(d):
                for b in range(d):
                    for i in range(self.n):
                        c = self.drift[a, b, i]
                        if c != 0.0:
                            sym[a, b] += 1j * c * kt[i]
        if self.mult_const is not None:
            for a in range(d):
                for b in range(d):
                    if self.mult_const[a, b] != 0.0:
                        sym[a, b] += self.mult_const[a, b]
        return sym

    def apply(self, f: Field) -> Field:
        if f.components != self.d:
            raise ValidationError("component count mismatch")
        torus = f.torus
        out = np.zeros_like(f.coeffs)
        kt = torus.wavenumbers()
        if self.quad is not None:
            qsym = np.zeros(torus.resolution)
            for i in range(self.n):
                for j in range(self.n):
                    if self.quad[i, j] != 0.0:
                        qsym = qsym - self.quad[i, j] * kt[i] * kt[j]
            out = out + qsym[np.newaxis] * f.coeffs
        if self.drift is not None:
            partials = [f.coeffs * (1j * kt[i])[np.newaxis] for i in range(self.n)]
            for a in range(self.d):
                acc = np.zeros(torus.resolution, dtype=np.complex128)
                for b in range(self.d):
                    for i in range(self.n):
                        c = self.drift[a, b, i]
                        if c != 0.0:
                            acc = acc + c * partials[i][b]
                out[a] += acc
        if self.mult_const is not None:
            out = out + np.einsum("ab,b...->a...", self.mult_const, f.coeffs)
        result = Field(torus, out)
        if self.mult_field is not None:
            result = result + multiply(self.mult_field, f)
        return result


# -- time-dependent coefficients ---------------------------------------------


@dataclass(frozen=True)
class TimeCoefficient:
    """A coefficient c(t) as derivative-convention Taylor data plus closed form.

    ``taylor[j] = (d/dt)^j c |_{t=0}``; when ``exact`` the list is the whole
    expansion (polynomial), so queries beyond it return zero instead of
    raising :class:`OrderShortfallError`.
    """

    taylor: tuple
    closed: Callable[[float], object]
    exact: bool = True

    @classmethod
    def constant(cls, c) -> "TimeCoefficient":
        return cls(taylor=(c,), closed=lambda t, c=c: c, exact=True)

    @classmethod
    def from_monomials(cls, coeffs: Sequence[float]) -> "TimeCoefficient":
        """c(t) = sum_j coeffs[j] t^j."""
        coeffs = tuple(float(c) for c in coeffs)
        taylor = tuple(c * math.factorial(j) for j, c in enumerate(coeffs))

        def closed(t, coeffs=coeffs):
            return sum(c * t**j for j, c in enumerate(coeffs))

        return cls(taylor=taylor, closed=closed, exact=True)

    def coefficient(self, j: int):
        if j < len(self.taylor):
            return self.taylor[j]
        if self.exact:
            return 0.0
        raise OrderShortfallError(
            f"coefficient Taylor data stops at order {len(self.taylor) - 1}, "
            f"order {j} requested"
        )

    def __call__(self, t: float):
        return self.closed(t)


ZERO = TimeCoefficient.constant(0.0)


def _coeff_is_zero(c) -> bool:
    if isinstance(c, Field):
        return not np.any(c.coeffs)
    return c == 0.0


# -- the operator spec ---------------------------------------------------------


@dataclass(frozen=True)
class OperatorSpec:
    """P = psi @t^2 + L1 @t + L2 with dual Taylor/closed-form coefficients."""

    model: HorizonModel
    d: int
    l1_taylor_fn: Callable[[int], SpatialOperator]
    l2_taylor_fn: Callable[[int], SpatialOperator]
    l1_closed: Callable[[float], SpatialOperator]
    l2_closed: Callable[[float], SpatialOperator]
    beta: Field | None = None
    b_endo: np.ndarray | None = None
    v_connection: np.ndarray | None = None
    label: str = ""

    @property
    def torus(self) -> SpatialTorus:
        return self.model.torus

    def psi(self, t: float) -> float:
        return self.model.psi(t)

    def psi_coefficient(self, j: int) -> float:
        return self.model.psi_coefficient(j)

    def l1_coefficient(self, j: int) -> SpatialOperator:
        return self.l1_taylor_fn(j)

    def l2_coefficient(self, j: int) -> SpatialOperator:
        return self.l2_taylor_fn(j)


@dataclass(frozen=True)
class Admissibility:
    """Verdict of the horizon drift-sign criterion."""

    kind: str  # "admissible" | "non_admissible" | "degenerate_surface_gravity"
    witness: dict | None = None

    @property
    def is_admissible(self) -> bool:
        return self.kind == "admissible"


def _as_time_coefficient(c, name: str) -> TimeCoefficient:
    if c is None:
        return ZERO
    if isinstance(c, TimeCoefficient):
        return c
    if np.isscalar(c):
        return TimeCoefficient.constant(float(c))
    if isinstance(c, Field):
        return TimeCoefficient.constant(c)
    raise ValidationError(f"{name} must be a number, Field or TimeCoefficient")


@dataclass(frozen=True)
class ScalarPerturbation:
    """First-order perturbation ``@_W`` of the d'Alembertian, split as
    ``W = w_t(t, x) @t + w_spatial . grad``; ``w_spatial`` is tangent to the
    horizon slices and does not affect admissibility."""

    w_t: TimeCoefficient = ZERO
    w_spatial: tuple[float, ...] | None = None


def _beta_field(model: HorizonModel, w_t0) -> Field:
    if isinstance(w_t0, Field):
        return w_t0
    return Field.constant(model.torus, float(w_t0))


def scalar_operator(
    model: HorizonModel,
    W: ScalarPerturbation | None = None,
    alpha=None,
    label: str = "",
) -> OperatorSpec:
    """Assemble ``box + @_W + alpha`` on a built-in model.

    The d'Alembertian of the null normal form contributes
    ``psi @t^2 + (@_V + psi'(t)) @t - Laplacian_E``; ``W`` adds ``w_t(t)`` to
    the @t coefficient and its spatial part to ``L2``; ``alpha`` is a
    multiplication term in ``L2``.
    """
    n = model.dims
    W = W or ScalarPerturbation()
    w_t = _as_time_coefficient(W.w_t, "w_t")
    alpha_c = _as_time_coefficient(alpha, "alpha")
    v = np.asarray(model.generator, dtype=float)

    frame = model.transverse_frame()
    quad_E = None
    if frame.shape[0] > 0:
        quad_E = -sum(np.outer(e, e) for e in frame)

    drift_op = SpatialOperator.drift_vector(v, d=1)
    spatial_drift = (
        SpatialOperator.drift_vector(np.asarray(W.w_spatial, dtype=float), d=1)
        if W.w_spatial is not None
        else None
    )

    def mult_op(c) -> SpatialOperator | None:
        if _coeff_is_zero(c):
            return None
        if isinstance(c, Field):
            return SpatialOperator.multiplication(c, d=1, n=n)
        return SpatialOperator(d=1, n=n, mult_const=np.array([[float(c)]]))

    def l1_taylor(j: int) -> SpatialOperator:
        op = SpatialOperator.zero(1, n)
        if j == 0:
            op = op + drift_op
        m = mult_op(model.psi_coefficient(j + 1))
        if m is not None:
            op = op + m
        mc = mult_op(w_t.coefficient(j))
        if mc is not None:
            op = op + mc
        return op

    def l2_taylor(j: int) -> SpatialOperator:
        op = SpatialOperator.zero(1, n)
        if j == 0:
            if quad_E is not None:
                op = op + SpatialOperator.quadratic(quad_E, d=1)
            if spatial_drift is not None:
                op = op + spatial_drift
        m = mult_op(alpha_c.coefficient(j))
        if m is not None:
            op = op + m
        return op

    def l1_closed(t: float) -> SpatialOperator:
        op = drift_op
        m = mult_op(model.dpsi(t))
        if m is not None:
            op = op + m
        mc = mult_op(w_t(t))
        if mc is not None:
            op = op + mc
        return op

    def l2_closed(t: float) -> SpatialOperator:
        op = SpatialOperator.zero(1, n)
        if quad_E is not None:
            op = op + SpatialOperator.quadratic(quad_E, d=1)
        if spatial_drift is not None:
            op = op + spatial_drift
        m = mult_op(alpha_c(t))
        if m is not None:
            op = op + m
        return op

    return OperatorSpec(
        model=model,
        d=1,
        l1_taylor_fn=l1_taylor,
        l2_taylor_fn=l2_taylor,
        l1_closed=l1_closed,
        l2_closed=l2_closed,
        beta=_beta_field(model, w_t.coefficient(0)),
        label=label or "scalar",
    )


def system_operator(
    model: HorizonModel,
    L1_matrix_taylor: Sequence[SpatialOperator],
    L2_matrix_taylor: Sequence[SpatialOperator],
    d: int,
    L1_closed: Callable[[float], SpatialOperator] | None = None,
    L2_closed: Callable[[float], SpatialOperator] | None = None,
    b_endo: np.ndarray | None = None,
    v_connection: np.ndarray | None = None,
    taylor_exact: bool = True,
    label: str = "system",
) -> OperatorSpec:
    """Matrix-coefficient operator with d components.

    Taylor lists use the derivative convention; when ``taylor_exact`` the
    lists extend by zero operators (polynomial coefficients), otherwise a
    query past the end raises :class:`OrderShortfallError`.  Closed forms
    default to exact Taylor summation.
    """
    L1_matrix_taylor = list(L1_matrix_taylor)
    L2_matrix_taylor = list(L2_matrix_taylor)
    for op in L1_matrix_taylor + L2_matrix_taylor:
        if op.d != d:
            raise ValidationError("matrix coefficient does not match component count")
    n = model.dims

    def taylor_fn(lst):
        def get(j: int) -> SpatialOperator:
            if j < len(lst):
                return lst[j]
            if taylor_exact:
                return SpatialOperator.zero(d, n)
            raise OrderShortfallError(
                f"matrix Taylor data stops at order {len(lst) - 1}, order {j} requested"
            )

        return get

    def closed_from_taylor(lst):
        def closed(t: float) -> SpatialOperator:
            op = SpatialOperator.zero(d, n)
            for j, term in enumerate(lst):
                op = op + term.scaled(t**j / math.factorial(j))
            return op

        return closed

    if b_endo is not None:
        b_endo = np.asarray(b_endo, dtype=float)
    if v_connection is not None:
        v_connection = np.asarray(v_connection, dtype=float)

    return OperatorSpec(
        model=model,
        d=d,
        l1_taylor_fn=taylor_fn(L1_matrix_taylor),
        l2_taylor_fn=taylor_fn(L2_matrix_taylor),
        l1_closed=L1_closed or closed_from_taylor(L1_matrix_taylor),
        l2_closed=L2_closed or closed_from_taylor(L2_matrix_taylor),
        b_endo=b_endo,
        v_connection=v_connection,
        label=label,
    )


# -- admissibility -------------------------------------------------------------


def admissibility_check(op: OperatorSpec, fiber_metric: np.ndarray | None = None) -> Admissibility:
    """Classify the operator by the horizon drift-sign criterion.

    Scalar case: admissible iff the transversal drift coefficient is
    non-negative everywhere on the collocation grid.  System case: checked
    against a supplied positive-definite constant fiber metric ``a`` via the
    symmetric part of ``grad_V a + a B_V``, with ``grad_V a`` reconstructed
    from the operator's frame connection along the generator when present.
    Degenerate models are classified outright.
    """
    if op.model.degenerate or op.model.surface_gravity == 0.0:
        return Admissibility(kind="degenerate_surface_gravity")
    if op.d == 1:
        if op.beta is None:
            raise ValidationError("scalar operator lacks its transversal drift data")
        vals = op.beta.values()[0]
        min_val = float(np.min(vals))
        if min_val >= -1e-12:
            return Admissibility(kind="admissible")
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        point = tuple(float(ax[i]) for ax, i in zip(op.model.torus.axes(), idx))
        return Admissibility(
            kind="non_admissible",
            witness={"point": point, "beta": min_val},
        )
    a = np.eye(op.d) if fiber_metric is None else np.asarray(fiber_metric, dtype=float)
    eigs_a = np.linalg.eigvalsh(a)
    if np.min(eigs_a) <= 0:
        raise ValidationError("fiber metric must be positive definite")
    b_v = op.b_endo if op.b_endo is not None else np.zeros((op.d, op.d))
    total = a @ b_v
    if op.v_connection is not None:
        # (grad_V a)(w, w) for constant a in the frame: -(a G_V + G_V^T a)
        total = total - (a @ op.v_connection + op.v_connection.T @ a)
    sym = 0.5 * (total + total.T)
    eigs = np.linalg.eigvalsh(sym)
    if np.max(eigs) <= 1e-12:
        return Admissibility(kind="admissible")
    direction = np.linalg.eigh(sym)[1][:, -1]
    return Admissibility(
        kind="non_admissible",
        witness={"eigenvalue": float(np.max(eigs)), "direction": direction.tolist()},
    )


# -- per-order transport family -------------------------------------------------


@dataclass(frozen=True)
class TransportFamily:
    """Order-k horizon transport operator and its right-hand-side assembler.

    The operator is ``A_k = k psi_1 + L1_0``, split for the solver as a
    generator drift ``v``, a constant ``lam = (k+1) psi_1`` and a
    (possibly x-dependent) shift ``beta`` with multiplier ``lam + beta/2``.
    System case: ``matrix_shift = k psi_1 I + M_0`` carries the endomorphism
    part of ``L1_0``.
    """

    k: int
    v: tuple[float, ...]
    lam: float
    beta: Field | None
    matrix_shift: np.ndarray | None
    operator: SpatialOperator
    rhs_assembler: Callable


def horizon_transport_family(op: OperatorSpec, k: int) -> TransportFamily:
    psi1 = op.psi_coefficient(1)
    l1_0 = op.l1_coefficient(0)
    n = op.model.dims

    if l1_0.drift is None:
        raise ValidationError("L1(0) carries no generator drift")
    drift = l1_0.drift
    v = drift[0, 0, :].copy()
    for a in range(op.d):
        for b in range(op.d):
            expected = v if a == b else np.zeros(n)
            if not np.allclose(drift[a, b, :], expected):
                raise ValidationError("L1(0) drift is not a scalar multiple of the generator")

    a_k = l1_0
    if k * psi1 != 0.0:
        a_k = a_k + SpatialOperator.multiplication(k * psi1, d=op.d, n=n)

    lam = (k + 1) * psi1
    beta = None
    matrix_shift = None
    if op.d == 1:
        m0 = Field.zero(op.torus)
        if l1_0.mult_const is not None:
            m0 = m0 + Field.constant(op.torus, float(l1_0.mult_const[0, 0]))
        if l1_0.mult_field is not None:
            m0 = m0 + l1_0.mult_field
        beta = 2.0 * (m0 - Field.constant(op.torus, psi1))
    else:
        m0 = l1_0.mult_const if l1_0.mult_const is not None else np.zeros((op.d, op.d))
        matrix_shift = k * psi1 * np.eye(op.d) + m0

    def rhs_assembler(jets: Sequence[Field], f_k: Field | None = None) -> Field:
        """RHS of ``A_k u_{k+1} = rhs`` from jets ``u_0..u_k`` and the source jet."""
        if len(jets) < k + 1:
            raise OrderShortfallError(f"need jets u_0..u_{k}, got {len(jets)}")
        rhs = f_k if f_k is not None else Field.zero(op.torus, op.d)
        for j in range(2, k + 1):
            psi_j = op.psi_coefficient(j)
            if psi_j != 0.0:
                rhs = rhs - (math.comb(k, j) * psi_j) * jets[k + 2 - j]
        for j in range(1, k + 1):
            l1_j = op.l1_coefficient(j)
            if not l1_j.is_zero():
                rhs = rhs - float(math.comb(k, j)) * l1_j.apply(jets[k + 1 - j])
        for j in range(0, k + 1):
            l2_j = op.l2_coefficient(j)
            if not l2_j.is_zero():
                rhs = rhs - float(math.comb(k, j)) * l2_j.apply(jets[k - j])
        return rhs

    return TransportFamily(
        k=k,
        v=tuple(v),
        lam=lam,
        beta=beta,
        matrix_shift=matrix_shift,
        operator=a_k,
        rhs_assembler=rhs_assembler,
    )


def order_residual(op: OperatorSpec, jets: Sequence[Field], k: int, f_k: Field | None = None) -> Field:
    """``@t^k (P w - f)|_0`` evaluated directly from Taylor data.

    ``jets`` must contain ``u_0 .. u_{k+1}``.
    """
    if len(jets) < k + 2:
        raise OrderShortfallError(f"need jets u_0..u_{k + 1} for order {k}")
    fam = horizon_transport_family(op, k)
    return fam.operator.apply(jets[k + 1]) - fam.rhs_assembler(jets[: k + 1], f_k)


# -- interior application --------------------------------------------------------


def interior_apply(
    op: OperatorSpec, t: float, u: Field, ut: Field, f_ext: Field | None = None
) -> Field:
    """Second time derivative forced by ``P u = f_ext`` at time ``t > 0``."""
    psi = op.psi(t)
    if abs(psi) < 1e-300:
        raise DegenerateDivision(t, psi)
    rhs = f_ext if f_ext is not None else Field.zero(op.torus, op.d)
    out = rhs - op.l1_closed(t).apply(ut) - op.l2_closed(t).apply(u)
    return (1.0 / psi) * out


def apply_full(op: OperatorSpec, t: float, u: Field, ut: Field, utt: Field) -> Field:
    """Evaluate ``P u = psi utt + L1 ut + L2 u`` at time t from closed forms."""
    return (
        op.psi(t) * utt + op.l1_closed(t).apply(ut) + op.l2_closed(t).apply(u)
    )


# -- presets ---------------------------------------------------------------------


def tm_connection_laplacian(model: HorizonModel, label: str = "tm_connection_laplacian") -> OperatorSpec:
    """Rough Laplacian of the Levi-Civita connection acting on tangent-frame
    components over the one-dimensional base model.

    In the frame (@t, @x) the operator reads
    ``t @t^2 + (-2 @x + diag(0, 2)) @t + [[0, -1], [0, 0]] @x``; the frame
    connection along the recorded generator is ``diag(-1, 1)``.
    """
    if model.dims != 1:
        raise ValidationError("the tangent-frame system preset needs the 1-d model")
    if model.psi_taylor != (0.0, 1.0):
        raise ValidationError("the tangent-frame system preset needs psi(t) = t")
    v = np.asarray(model.generator, dtype=float)
    if not np.allclose(v, [-2.0]):
        raise ValidationError("the tangent-frame system preset is built for the '+' model")
    l1_0 = SpatialOperator.drift_vector(v, d=2) + SpatialOperator.multiplication(
        np.array([[0.0, 0.0], [0.0, 2.0]]), d=2, n=1
    )
    l2_drift = np.zeros((2, 2, 1))
    l2_drift[0, 1, 0] = -1.0
    l2_0 = SpatialOperator.drift_matrix(l2_drift)
    return system_operator(
        model,
        [l1_0],
        [l2_0],
        d=2,
        b_endo=np.zeros((2, 2)),
        v_connection=np.array([[-1.0, 0.0], [0.0, 1.0]]),
        label=label,
    )


OPERATOR_PRESETS = {
    "box": lambda model: scalar_operator(model, label="box"),
    "box_plus_one": lambda model: scalar_operator(model, alpha=1.0, label="box_plus_one"),
    "box_minus_dt": lambda model: scalar_operator(
        model, W=ScalarPerturbation(w_t=TimeCoefficient.constant(-1.0)), label="box_minus_dt"
    ),
    "box_minus_dt_plus_one": lambda model: scalar_operator(
        model,
        W=ScalarPerturbation(w_t=TimeCoefficient.constant(-1.0)),
        alpha=1.0,
        label="box_minus_dt_plus_one",
    ),
    "ce26_box_minus_2t_plus_1": lambda model: scalar_operator(
        model, alpha=TimeCoefficient.from_monomials([-1.0, -2.0]), label="ce26_box_minus_2t_plus_1"
    ),
    "tm_connection_laplacian": tm_connection_laplacian,
}


def operator_preset(name: str, model: HorizonModel) -> OperatorSpec:
    if name not in OPERATOR_PRESETS:
        raise ValidationError(
            f"unknown operator preset '{name}'; available: {sorted(OPERATOR_PRESETS)}"
        )
    return OPERATOR_PRESETS[name](model)

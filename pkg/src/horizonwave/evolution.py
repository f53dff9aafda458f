"""Interior time evolution and the characteristic-solve pipeline.

Method of lines: spatial operators act spectrally, time stepping is an
adaptive embedded Dormand-Prince 5(4) pair on the first-order system
``(u, @t u)``.  The right-hand side divides by ``psi(t)``, so steps obey the
stiffness guard ``h <= c_safe / mu(t)`` with ``mu`` the modulus bound of the
fastest characteristic mode (drift wavenumber over ``psi``); the integrator
only ever runs *away* from the horizon - approaching it is done by
re-seeding the jet at a smaller seed time, never by stepping across the
degeneracy.

Snapshot times are hit exactly by clipping accepted steps, so requested
outputs carry no interpolation error beyond the local tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .asymptotics import (
    AsymptoticSolution,
    Nonlinearity,
    SourceTerm,
    as_source,
    evaluate_jet,
    linear_asymptotics,
    semilinear_asymptotics,
)
from .errors import NoConvergence, NotAdmissible, StepSizeUnderflow, ValidationError
from .fields import Field, l2_norm, sobolev_norm
from .operators import OperatorSpec, admissibility_check

C_SAFE = 0.5


@dataclass(frozen=True)
class EvolutionState:
    t: float
    u: Field
    ut: Field

    def __post_init__(self):
        if self.t <= 0:
            raise ValidationError("evolution states live at t > 0")


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    max_cfl_ratio: float


@dataclass(frozen=True)
class Trajectory:
    states: tuple[EvolutionState, ...]
    stats: IntegratorStats
    source: SourceTerm | None = None

    def __post_init__(self):
        ts = [s.t for s in self.states]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("trajectory times must strictly increase")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def final(self) -> EvolutionState:
        return self.states[-1]

    def norms(self, s: float) -> np.ndarray:
        return np.array([sobolev_norm(st.u, s) for st in self.states])


# -- Dormand-Prince 5(4) --------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _dp54(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: np.ndarray,
    t_end: float,
    rtol: float,
    atol: float,
    max_step: Callable[[float], float],
    stops: Sequence[float],
    on_accept: Callable[[float, np.ndarray], None],
):
    t = t0
    y = y0
    f0 = rhs(t, y)
    stops = sorted(set(float(s) for s in stops if t0 < s <= t_end)) + [t_end]
    stop_iter = iter(stops)
    next_stop = next(stop_iter)
    h = min(max_step(t), (t_end - t0) / 16.0)
    steps = 0
    rejected = 0
    max_cfl = 0.0
    k = [None] * 7
    while t < t_end - 1e-15 * max(1.0, t_end):
        hmax = max_step(t)
        h = min(h, hmax, next_stop - t)
        if h < 1e-14 * max(t, 1e-6):
            raise StepSizeUnderflow(t, h)
        k[0] = f0
        for i in range(1, 7):
            yi = y.copy()
            for j, a in enumerate(_DP_A[i]):
                if a != 0.0:
                    yi = yi + (h * a) * k[j]
            k[i] = rhs(t + _DP_C[i] * h, yi)
        y5 = y.copy()
        y4 = y.copy()
        for i in range(7):
            if _DP_B5[i] != 0.0:
                y5 = y5 + (h * _DP_B5[i]) * k[i]
            if _DP_B4[i] != 0.0:
                y4 = y4 + (h * _DP_B4[i]) * k[i]
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(np.abs((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t_new = t + h
            max_cfl = max(max_cfl, h / hmax if hmax > 0 else 0.0)
            t = t_new
            y = y5
            f0 = k[6]  # FSAL
            steps += 1
            if abs(t - next_stop) <= 1e-12 * max(1.0, abs(next_stop)):
                t = next_stop
                on_accept(t, y)
                if next_stop >= t_end - 1e-15 * max(1.0, t_end):
                    break
                next_stop = next(stop_iter)
        else:
            rejected += 1
        factor = 0.9 * err ** (-0.2) if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
    return IntegratorStats(steps=steps, rejected=rejected, max_cfl_ratio=max_cfl)


# -- evolve ----------------------------------------------------------------------


def _speed_bound(op: OperatorSpec) -> tuple[float, float]:
    """Worst-case drift wavenumber |d| and quadratic symbol q over the grid."""
    l1 = op.l1_closed(1.0)
    torus = op.torus
    kmax = [float(np.max(np.abs(k))) for k in torus.wavenumbers()]
    dmax = 0.0
    if l1.drift is not None:
        dmax = float(
            sum(
                np.max(np.sum(np.abs(l1.drift[:, :, i]), axis=1)) * kmax[i]
                for i in range(torus.dims)
            )
        )
    l2 = op.l2_closed(1.0)
    qmax = 0.0
    if l2.quad is not None:
        kvec = np.array(kmax)
        qmax = float(abs(kvec @ l2.quad @ kvec))
    return dmax, qmax


def evolve(
    op: OperatorSpec,
    f_closed,
    s0: EvolutionState,
    t_end: float,
    tol: dict | None = None,
    snapshot_times: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``psi u_tt = f - L1 u_t - L2 u`` from ``s0.t`` to ``t_end``."""
    if t_end <= s0.t:
        raise ValidationError("t_end must exceed the seed time")
    tol = tol or {}
    rtol = float(tol.get("rel", 1e-9))
    atol = float(tol.get("abs", 1e-12))
    source = as_source(op.torus, f_closed, op.d) if not callable(f_closed) else f_closed
    if isinstance(source, SourceTerm):
        source_eval = source.closed
        source_obj = source
    else:
        source_eval = source
        source_obj = None

    torus = op.torus
    d = op.d
    shape = (d, *torus.resolution)
    size = int(np.prod(shape))
    dmax, qmax = _speed_bound(op)

    def max_step(t: float) -> float:
        psi = op.psi(t)
        if psi <= 0:
            return 1e-16
        disc = math.sqrt(dmax * dmax + 4.0 * psi * qmax)
        mu = (dmax + disc) / (2.0 * psi)
        mu = max(mu, 1e-6)
        return C_SAFE / mu

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        u = Field(torus, y[:size].reshape(shape))
        ut = Field(torus, y[size:].reshape(shape))
        f_t = source_eval(t) if source_eval is not None else None
        psi = op.psi(t)
        acc = (f_t if f_t is not None else Field.zero(torus, d)) - op.l1_closed(t).apply(
            ut
        ) - op.l2_closed(t).apply(u)
        utt = (1.0 / psi) * acc
        return np.concatenate([ut.coeffs.reshape(-1), utt.coeffs.reshape(-1)])

    y0 = np.concatenate([s0.u.coeffs.reshape(-1), s0.ut.coeffs.reshape(-1)])
    states = [s0]

    def record(t: float, y: np.ndarray):
        u = Field(torus, y[:size].reshape(shape).copy())
        ut = Field(torus, y[size:].reshape(shape).copy())
        states.append(EvolutionState(t=t, u=u, ut=ut))

    stats = _dp54(
        rhs,
        s0.t,
        y0,
        float(t_end),
        rtol,
        atol,
        max_step,
        snapshot_times or [],
        record,
    )
    return Trajectory(states=tuple(states), stats=stats, source=source_obj)


def characteristic_solve(
    op: OperatorSpec,
    u0: Field,
    f=None,
    N: int = 8,
    tau: float = 1e-3,
    t_end: float = 1.0,
    tol: dict | None = None,
    snapshot_times: Sequence[float] | None = None,
) -> dict:
    """Jet -> seed -> evolve, the full characteristic pipeline.

    Hard error for non-admissible operators; use the asymptotic engine
    directly to study those.
    """
    verdict = admissibility_check(op)
    if not verdict.is_admissible:
        raise NotAdmissible({"kind": verdict.kind, "witness": verdict.witness})
    if not 0 < tau < t_end:
        raise ValidationError("need 0 < tau < t_end")
    jet = linear_asymptotics(op, u0, f, N)
    u_seed, ut_seed = evaluate_jet(jet, tau)
    source = as_source(op.torus, f, op.d)
    traj = evolve(
        op,
        source,
        EvolutionState(t=tau, u=u_seed, ut=ut_seed),
        t_end,
        tol,
        snapshot_times,
    )
    return {"jet": jet, "traj": traj}


# -- horizon-limit study ----------------------------------------------------------


def _loglog_slope(ts: np.ndarray, vals: np.ndarray, floor: float) -> float:
    mask = vals > floor
    if np.count_nonzero(mask) < 3:
        return float("nan")
    x = np.log(ts[mask])
    y = np.log(vals[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def horizon_limit_study(
    op: OperatorSpec,
    f,
    u0: Field,
    N: int,
    tau_list: Sequence[float],
    t1: float,
    m: int = 1,
    tol: dict | None = None,
) -> dict:
    """Compare the interior solutions seeded at decreasing times with the jet.

    Returns per-tau norms ``||v_tau(t1) - w^N(t1)||_{2m+1}``, the pairwise
    Cauchy differences at ``t1`` between successive seeds, and the fitted
    log-log slope of ``||v_tau - w^N||_{2m}(t)`` along the final (smallest
    seed) trajectory.
    """
    taus = list(tau_list)
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValidationError("seed times must be strictly decreasing")
    if not all(0 < t < t1 for t in taus):
        raise ValidationError("all seed times must lie in (0, t1)")
    verdict = admissibility_check(op)
    if not verdict.is_admissible:
        raise NotAdmissible({"kind": verdict.kind, "witness": verdict.witness})
    jet = linear_asymptotics(op, u0, f, N)
    source = as_source(op.torus, f, op.d)
    w_t1, _ = evaluate_jet(jet, t1)

    finals = []
    rows = []
    slope = float("nan")
    slope_points = 0
    for i, tau in enumerate(taus):
        u_seed, ut_seed = evaluate_jet(jet, tau)
        snap = None
        if i == len(taus) - 1:
            snap = list(np.geomspace(tau * 1.0000001, t1, 40))
        traj = evolve(
            op,
            source,
            EvolutionState(t=tau, u=u_seed, ut=ut_seed),
            t1,
            tol,
            snapshot_times=snap,
        )
        fin = traj.final()
        finals.append(fin)
        rows.append(
            {
                "tau": tau,
                "norm_2m1": sobolev_norm(fin.u - w_t1, 2 * m + 1),
            }
        )
        if i == len(taus) - 1:
            ts = []
            diffs = []
            for st in traj.states:
                w_t, _ = evaluate_jet(jet, st.t)
                ts.append(st.t)
                diffs.append(sobolev_norm(st.u - w_t, 2 * m))
            ts = np.array(ts)
            diffs = np.array(diffs)
            scale = max(1.0, sobolev_norm(w_t1, 2 * m))
            floor = 1e-13 * scale
            slope = _loglog_slope(ts, diffs, floor)
            slope_points = int(np.count_nonzero(diffs > floor))
    cauchy = [
        l2_norm(a.u - b.u) for a, b in zip(finals, finals[1:])
    ]
    return {
        "rows": rows,
        "cauchy_differences": cauchy,
        "slope": slope,
        "slope_points": slope_points,
        "jet": jet,
    }


# -- Picard iteration ---------------------------------------------------------------


class _TrajectoryInterpolant:
    """Cubic interpolation of a snapshot grid, one spline batch per run."""

    def __init__(self, traj: Trajectory):
        from scipy.interpolate import CubicSpline

        ts = traj.times
        shape = traj.states[0].u.coeffs.shape
        data = np.stack([st.u.coeffs.reshape(-1) for st in traj.states])
        self._torus = traj.states[0].u.torus
        self._shape = shape
        self._spline = CubicSpline(ts, data, axis=0)
        self._tmin = ts[0]
        self._tmax = ts[-1]

    def __call__(self, t: float) -> Field:
        t = min(max(t, self._tmin), self._tmax)
        return Field(self._torus, self._spline(t).reshape(self._shape))


def picard_iterate(
    op: OperatorSpec,
    nonlinearity: Nonlinearity,
    u0: Field,
    N: int = 8,
    T: float = 0.3,
    tau: float = 1e-3,
    max_iter: int = 25,
    tol: float = 1e-9,
    m: int = 1,
    integrator_tol: dict | None = None,
    grid_points: int = 400,
) -> dict:
    """Solve ``P u = f(u)`` near the horizon by iterated characteristic solves.

    ``v_0`` is the semi-linear jet evaluated in time; each sweep solves the
    linear problem with source ``f(v_k)`` from the same seed (all iterates
    share the horizon jet, so the seed is fixed).  Stops when
    ``sup_t ||v_{k+1} - v_k||_{2m}`` drops below ``tol``; reports the ratio
    sequence of successive increments.
    """
    verdict = admissibility_check(op)
    if not verdict.is_admissible:
        raise NotAdmissible({"kind": verdict.kind, "witness": verdict.witness})
    if not 0 < tau < T:
        raise ValidationError("need 0 < tau < T")
    jet = semilinear_asymptotics(op, nonlinearity, u0, N)
    u_seed, ut_seed = evaluate_jet(jet, tau)
    seed = EvolutionState(t=tau, u=u_seed, ut=ut_seed)
    grid = np.concatenate(
        [
            np.geomspace(tau, min(10 * tau, T / 2), grid_points // 4, endpoint=False),
            np.linspace(min(10 * tau, T / 2), T, grid_points - grid_points // 4),
        ]
    )
    grid = np.unique(grid)

    def jet_values(t: float) -> Field:
        u, _ = evaluate_jet(jet, t)
        return u

    current: Callable[[float], Field] = jet_values
    current_samples = [jet_values(t) for t in grid]

    increments = []
    trajectory = None
    source_iterate = current
    converged = False
    for _ in range(max_iter):
        source_iterate = current

        def source_eval(t: float, cur=source_iterate) -> Field:
            u_t = cur(t)
            return Field.from_values(op.torus, nonlinearity.pointwise(u_t.values()))

        traj = evolve(op, source_eval, seed, T, integrator_tol, snapshot_times=list(grid))
        interp = _TrajectoryInterpolant(traj)
        new_samples = [interp(t) for t in grid]
        diff = max(
            sobolev_norm(a - b, 2 * m) for a, b in zip(new_samples, current_samples)
        )
        increments.append(diff)
        current = interp
        current_samples = new_samples
        trajectory = traj
        if diff < tol:
            converged = True
            break
    ratios = [
        increments[i + 1] / increments[i]
        for i in range(len(increments) - 1)
        if increments[i] > 0
    ]
    if not converged:
        raise NoConvergence(
            "Picard iteration did not contract; shrink the time window",
            diagnostics={"increments": increments, "ratios": ratios},
        )
    # Fixed-point defect along snapshots: P v_final = f(v_prev) by
    # construction, so P v_final - f(v_final) = f(v_prev) - f(v_final)
    # up to integrator tolerance.
    residuals = []
    for st in trajectory.states:
        f_new = Field.from_values(op.torus, nonlinearity.pointwise(st.u.values()))
        f_used = Field.from_values(
            op.torus, nonlinearity.pointwise(source_iterate(st.t).values())
        )
        residuals.append(l2_norm(f_used - f_new))
    return {
        "jet": jet,
        "traj": trajectory,
        "increments": increments,
        "ratios": ratios,
        "iterations": len(increments),
        "residuals": residuals,
    }

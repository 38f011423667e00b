"""Mild-solution machinery: data splitting, reference solve, Picard iteration.

Rough initial data a is split as a = a_ref + a_0 with a_ref = e^{delta A} a
smooth and a_0 small.  The reference part is advanced by an exponential-Euler
integrator; the remainder V = v - v_ref is constructed by Picard iteration on
the Duhamel integral with the coupling nonlinearity, monitored in the
S(T)-norm max(sup ||V||, sup t^{1/2} ||grad V||) with mixed L^inf_H L^p_z
norms.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import Grid
from .fields import (
    PhysicalField,
    SpectralField,
    horizontal_derivative,
    inverse_transform,
    norm_anisotropic,
    vertical_derivative,
)
from .nonlinear import advection
from .projection import ProjectionTables, check_solenoidal, project_hydrostatic
from .semigroup import StokesOperator


class SolverDivergenceError(RuntimeError):
    """Blow-up guard tripped or Picard iteration diverged."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class SolverConfig:
    N: int = 16
    K: int = 16
    h: float = 1.0
    p: float = 4.0
    dt: float = 0.005
    T: float = 0.1
    delta: float = 0.01
    eps0: float | None = None  # rough-part threshold; default 0.05 * ||a||
    max_picard: int = 20
    picard_tol: float = 1e-10
    dealias: bool = True
    reproject: bool = True
    seed: int = 0
    snapshot_every: int = 1

    def __post_init__(self):
        if not self.p > 3:
            raise ValueError(f"norm exponent p must be > 3, got {self.p}")
        if not 0 < self.dt <= self.T:
            raise ValueError(f"need 0 < dt <= T, got dt={self.dt}, T={self.T}")
        if self.delta < 0:
            raise ValueError(f"smoothing time must be >= 0, got {self.delta}")

    def grid(self) -> Grid:
        return Grid(self.N, self.K, self.h)


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list  # SpectralField per node
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory time nodes must be strictly increasing")


@dataclass
class IterationReport:
    """Per-Picard-iteration S(T)-norm bookkeeping."""

    K_m: list = field(default_factory=list)  # arrays over time nodes
    H_m: list = field(default_factory=list)
    S_m: list = field(default_factory=list)  # scalars, S(T)-norm per iterate
    diff_S: list = field(default_factory=list)  # ||V_{m+1} - V_m||_{S(T)}
    ratios: list = field(default_factory=list)  # contraction factors, m >= 1
    converged: bool = False
    iterations: int = 0


def mixed_norm(v: SpectralField, p: float) -> float:
    """||v||_{L^inf_H L^p_z} from node values."""
    return norm_anisotropic(inverse_transform(v), np.inf, p)


def grad_mixed_norm(v: SpectralField, p: float) -> float:
    """||grad v||_{L^inf_H L^p_z}, full gradient stacked componentwise."""
    parts = [
        inverse_transform(horizontal_derivative(v, "x")).values,
        inverse_transform(horizontal_derivative(v, "y")).values,
        vertical_derivative(v).values,
    ]
    stacked = PhysicalField(np.concatenate(parts, axis=0), v.grid)
    return norm_anisotropic(stacked, np.inf, p)


def _s_norm(v_list, times, p):
    """S(T)-norm of a discrete trajectory, plus the K and H node series."""
    H = np.zeros(len(times))
    Kw = np.zeros(len(times))
    running_h, running_k = 0.0, 0.0
    for n, t in enumerate(times):
        running_h = max(running_h, mixed_norm(v_list[n], p))
        if t > 0:
            running_k = max(running_k, np.sqrt(t) * grad_mixed_norm(v_list[n], p))
        H[n] = running_h
        Kw[n] = running_k
    return max(running_h, running_k), Kw, H


def split_data(op: StokesOperator, a: SpectralField, delta: float):
    """a = a_ref + a_0 with a_ref = e^{delta A} a in the operator's domain."""
    a_ref = op.semigroup_apply(delta, a)
    a0 = SpectralField(a.coeffs - a_ref.coeffs, a.grid)
    return a_ref, a0


def _nonlinearity(v, config, tables):
    f = advection(v, dealias=config.dealias)
    f.coeffs = -f.coeffs
    return project_hydrostatic(f, tables)


def reference_solve(
    op: StokesOperator, a_ref: SpectralField, T: float, dt: float, config: SolverConfig
) -> Trajectory:
    """Exponential-Euler integration v_{n+1} = e^{dtA} v_n + dt phi1(dtA) P F(v_n)."""
    tables = ProjectionTables.build(op.grid)
    nsteps = int(round(T / dt))
    times = dt * np.arange(nsteps + 1)
    v = a_ref.copy()
    snaps = [v.copy()]
    energy = [v.norm2()]
    guard = max(energy[0], 1e-300) * 1e6
    for _ in range(nsteps):
        F = _nonlinearity(v, config, tables)
        stepped = op.semigroup_apply(dt, v).coeffs + dt * op.phi1_apply(dt, F).coeffs
        v = SpectralField(stepped, op.grid)
        if config.reproject:
            v = project_hydrostatic(v, tables)
        e = v.norm2()
        if not np.isfinite(e) or e > guard:
            raise SolverDivergenceError(
                f"reference solve blew up: ||v|| = {e:.3e} vs initial {energy[0]:.3e}"
            )
        snaps.append(v.copy())
        energy.append(e)
    return Trajectory(times, snaps, {"energy": np.array(energy)})


def picard_iterate(
    op: StokesOperator, a0: SpectralField, v_ref: Trajectory, T: float, config: SolverConfig
):
    """Duhamel fixed-point iteration for the rough remainder V.

    V_{m+1}(t) = e^{tA} a_0 + int_0^t e^{(t-s)A} F_m(s) ds with
    F_m = -P( (U_m.grad)V_m + (U_m.grad)v_ref + (u_ref.grad)V_m ),
    the integral by trapezoidal quadrature on the shared time grid.
    """
    times = v_ref.times
    if times[-1] < T - 1e-12:
        raise ValueError("reference trajectory does not cover [0, T]")
    keep = times <= T + 1e-12
    times = times[keep]
    vref = [s for s, k in zip(v_ref.snapshots, keep) if k]
    n_nodes = len(times)
    dt = times[1] - times[0]
    tables = ProjectionTables.build(op.grid)
    p = config.p

    free = [op.semigroup_apply(t, a0) for t in times]
    V = [s.copy() for s in free]

    report = IterationReport()
    S, Kw, H = _s_norm(V, times, p)
    report.K_m.append(Kw)
    report.H_m.append(H)
    report.S_m.append(S)

    for m in range(config.max_picard):
        F = []
        for j in range(n_nodes):
            f = advection(V[j], V[j], dealias=config.dealias).coeffs
            f += advection(V[j], vref[j], dealias=config.dealias).coeffs
            f += advection(vref[j], V[j], dealias=config.dealias).coeffs
            F.append(project_hydrostatic(SpectralField(-f, op.grid), tables))
        Vnew = [free[0].copy()]
        for n in range(1, n_nodes):
            acc = free[n].coeffs.copy()
            for j in range(n + 1):
                w = 0.5 * dt if j in (0, n) else dt
                tau = times[n] - times[j]
                term = F[j] if tau == 0 else op.semigroup_apply(tau, F[j])
                acc += w * term.coeffs
            Vnew.append(SpectralField(acc, op.grid))

        diff = [SpectralField(a.coeffs - b.coeffs, op.grid) for a, b in zip(Vnew, V)]
        dS, _, _ = _s_norm(diff, times, p)
        report.diff_S.append(dS)
        if len(report.diff_S) >= 2 and report.diff_S[-2] > 0:
            report.ratios.append(dS / report.diff_S[-2])
        V = Vnew
        S, Kw, H = _s_norm(V, times, p)
        report.K_m.append(Kw)
        report.H_m.append(H)
        report.S_m.append(S)
        report.iterations = m + 1
        if dS < config.picard_tol:
            report.converged = True
            break
        if len(report.diff_S) >= 3 and all(
            report.diff_S[-i] > 2.0 * report.diff_S[-i - 1] for i in (1, 2)
        ):
            raise SolverDivergenceError(
                "Picard iteration diverging: S-norm of differences doubled twice",
                report=report,
            )
    return Trajectory(times, V), report


def _shrink_delta(op, a, config):
    """Halve the smoothing time until the rough part is below the threshold."""
    scale = mixed_norm(a, config.p)
    eps0 = config.eps0 if config.eps0 is not None else 0.05 * scale
    delta = config.delta
    for _ in range(60):
        a_ref, a0 = split_data(op, a, delta)
        if mixed_norm(a0, config.p) <= eps0 or delta == 0.0:
            return a_ref, a0, delta
        delta /= 2.0
    return a_ref, a0, delta


def full_solve(a: SpectralField, config: SolverConfig, op: StokesOperator | None = None):
    """Reference solve plus Picard remainder: v = v_ref + V on [0, T]."""
    if op is None:
        op = StokesOperator(config.grid())
    a_ref, a0, delta = _shrink_delta(op, a, config)
    vref = reference_solve(op, a_ref, config.T, config.dt, config)
    if float(np.abs(a0.coeffs).max()) == 0.0:
        V = Trajectory(vref.times, [SpectralField.zeros(op.grid) for _ in vref.times])
        report = IterationReport(converged=True)
    else:
        V, report = picard_iterate(op, a0, vref, config.T, config)
    snaps = [
        SpectralField(r.coeffs + s.coeffs, op.grid)
        for r, s in zip(vref.snapshots, V.snapshots)
    ]
    times = V.times
    traj = Trajectory(times, snaps)
    p = config.p
    traj.diagnostics = {
        "energy": np.array([s.norm2() for s in snaps]),
        "sol_drift": np.array([check_solenoidal(s) for s in snaps]),
        "norm_inf_p": np.array([mixed_norm(s, p) for s in snaps]),
        "t_sqrt_grad_norm": np.array(
            [np.sqrt(t) * grad_mixed_norm(s, p) if t > 0 else 0.0 for t, s in zip(times, snaps)]
        ),
        "residual": mild_residual(op, traj, config),
        "delta": delta,
        "picard": report,
    }
    return traj


def mild_residual(op: StokesOperator, traj: Trajectory, config: SolverConfig) -> np.ndarray:
    """Defect in the Duhamel identity per time node, in L^2.

    Uses the same trapezoidal quadrature as the Picard iteration, with
    F(v) = -P (u . grad) v.
    """
    times = traj.times
    tables = ProjectionTables.build(op.grid)
    F = [_nonlinearity(s, config, tables) for s in traj.snapshots]
    res = np.zeros(len(times))
    for n, t in enumerate(times):
        if n == 0:
            continue
        dt = times[1] - times[0]
        acc = op.semigroup_apply(t, traj.snapshots[0]).coeffs.copy()
        for j in range(n + 1):
            w = 0.5 * dt if j in (0, n) else dt
            tau = t - times[j]
            term = F[j] if tau == 0 else op.semigroup_apply(tau, F[j])
            acc += w * term.coeffs
        res[n] = SpectralField(traj.snapshots[n].coeffs - acc, op.grid).norm2()
    return res

"""Interface evolution: the nonlinear velocity operator and time stepping.

Both interfaces move with the co-normal traces of the transformed velocity
potentials; one full transmission solve per evaluation.  Time stepping is
explicit adaptive Runge-Kutta-Fehlberg 4(5) with step rejection, a 2/3-rule
de-aliasing of the interfaces after every accepted step, and (for surface
tension) an additional step cap reflecting the cubic growth of the
surface-tension symbol at the largest retained mode.

The Rayleigh-Taylor monitor evaluates the jumps of the normal pressure
derivatives from the transformed traces, normalized to physical normal
derivatives; positive margins are the parabolicity regime of the
gravity-driven problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .diffraction import (
    DiffractionSolution,
    SolverFailure,
    solve_potentials,
    solve_potentials_st,
)
from .geometry import (
    AdmissibilityError,
    InterfacePair,
    PeriodicFn,
    check_admissible,
    make_grid,
)
from .operators import (
    FluidParams,
    StripField,
    boundary_B1,
    boundary_B_minus,
    boundary_B_plus,
    strip_heights,
)

__all__ = [
    "RTReport",
    "SimState",
    "StepRejected",
    "Trajectory",
    "dealias",
    "fit_mode_rate",
    "linearized_matrix",
    "mode_amplitude",
    "phi",
    "pressures",
    "rayleigh_taylor",
    "simulate",
    "step",
]

# Fehlberg 4(5) tableau; the fourth-order solution is propagated.
_RKF_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_RKF_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RKF_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_RKF_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)

_MAX_STEPS = 200_000
_MIN_DT = 1e-12


class StepRejected(RuntimeError):
    """An intermediate Runge-Kutta stage left the admissible set."""


@dataclass(frozen=True)
class SimState:
    t: float
    fh: InterfacePair
    last_solution: DiffractionSolution | None = None


@dataclass(frozen=True)
class RTReport:
    """Signed parabolicity margins; positive means Rayleigh-Taylor holds."""

    margin_f: float
    margin_h: float

    @property
    def satisfied(self) -> bool:
        return self.margin_f > 0.0 and self.margin_h > 0.0


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    f_values: list = field(default_factory=list)
    h_values: list = field(default_factory=list)
    rt_reports: list = field(default_factory=list)
    dt_used: list = field(default_factory=list)
    reason: str = ""

    def record(self, t, fh, report, dt):
        if self.times and t <= self.times[-1]:
            raise ValueError("trajectory times must increase strictly")
        self.times.append(float(t))
        self.f_values.append(fh.f.values.copy())
        self.h_values.append(fh.h.values.copy())
        self.rt_reports.append(report)
        self.dt_used.append(float(dt))


def _solve(fh, b, params, surface_tension, n_y):
    solver = solve_potentials_st if surface_tension else solve_potentials
    return solver(fh, b, params, n_y=n_y)


def phi(t: float, fh: InterfacePair, b, params: FluidParams,
        surface_tension: bool = False, n_y: int | None = None):
    """Interface velocities (df/dt, dh/dt) at time t.

    b may be a PeriodicFn (time-constant) or a callable t -> PeriodicFn.
    """
    b_fn = b(t) if callable(b) else b
    sol = _solve(fh, b_fn, params, surface_tension, n_y)
    df = -boundary_B_minus(fh.f, params, sol.v_minus)
    dh = -boundary_B1(fh.f, fh.h, params, sol.v_plus)
    return df, dh


def pressures(solution: DiffractionSolution, fh: InterfacePair,
              params: FluidParams) -> tuple[StripField, StripField]:
    """Fluid pressures on the strips: potential minus the hydrostatic part."""
    y_plus = strip_heights(fh, solution.v_plus.strip)
    y_minus = strip_heights(fh, solution.v_minus.strip)
    p_plus = StripField(solution.v_plus.strip,
                        solution.v_plus.values - params.g * params.rho_plus * y_plus)
    p_minus = StripField(solution.v_minus.strip,
                         solution.v_minus.values - params.g * params.rho_minus * y_minus)
    return p_plus, p_minus


def rayleigh_taylor(fh: InterfacePair, b, params: FluidParams,
                    n_y: int | None = None) -> RTReport:
    """Parabolicity margins from the gravity-driven potentials.

    margin_f is the minimum over x of minus the jump of the normal pressure
    derivative across the lower interface; margin_h the minimum of minus the
    upper fluid's normal pressure derivative on the top interface.  Both are
    physical normal derivatives (slope-normalized).
    """
    from .geometry import spectral_derivative

    b_fn = b(0.0) if callable(b) else b
    sol = solve_potentials(fh, b_fn, params, n_y=n_y)
    fp = spectral_derivative(fh.f, 1).values
    hp = spectral_derivative(fh.h, 1).values
    co_minus = (params.mu_minus / params.k) * boundary_B_minus(fh.f, params, sol.v_minus).values
    co_plus = (params.mu_plus / params.k) * boundary_B_plus(fh.f, fh.h, params, sol.v_plus).values
    co_top = (params.mu_plus / params.k) * boundary_B1(fh.f, fh.h, params, sol.v_plus).values
    drho = params.g * (params.rho_minus - params.rho_plus)
    margin_f = np.min((drho - co_minus + co_plus) / np.sqrt(1.0 + fp**2))
    margin_h = np.min((params.g * params.rho_plus - co_top) / np.sqrt(1.0 + hp**2))
    return RTReport(margin_f=float(margin_f), margin_h=float(margin_h))


def step(state: SimState, dt: float, b_at, params: FluidParams,
         surface_tension: bool = False, n_y: int | None = None):
    """One explicit RKF45 step of the interface evolution.

    Returns (new_state, error_estimate); the estimate is the sup-norm of the
    embedded fourth/fifth-order difference.  Raises StepRejected when an
    intermediate stage leaves the admissible set.
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    fh = state.fh
    f0, h0, d = fh.f.values, fh.h.values, fh.d
    grid = fh.grid
    ks = []
    for stage in range(6):
        fv = f0.copy()
        hv = h0.copy()
        for j, a in enumerate(_RKF_A[stage]):
            fv = fv + dt * a * ks[j][0]
            hv = hv + dt * a * ks[j][1]
        rep = check_admissible(PeriodicFn(grid, fv), PeriodicFn(grid, hv), d)
        if not rep.ok:
            raise StepRejected(
                f"stage {stage} left the admissible set "
                f"(gap_fd={rep.gap_fd:.3e}, gap_hf={rep.gap_hf:.3e})")
        stage_fh = InterfacePair(PeriodicFn(grid, fv), PeriodicFn(grid, hv), d)
        df, dh = phi(state.t + _RKF_C[stage] * dt, stage_fh, b_at, params,
                     surface_tension, n_y)
        ks.append((df.values, dh.values))

    f4 = f0 + dt * sum(b * k[0] for b, k in zip(_RKF_B4, ks))
    h4 = h0 + dt * sum(b * k[1] for b, k in zip(_RKF_B4, ks))
    err_f = dt * sum((b5 - b4) * k[0] for b4, b5, k in zip(_RKF_B4, _RKF_B5, ks))
    err_h = dt * sum((b5 - b4) * k[1] for b4, b5, k in zip(_RKF_B4, _RKF_B5, ks))
    err = max(np.max(np.abs(err_f)), np.max(np.abs(err_h)))
    rep = check_admissible(PeriodicFn(grid, f4), PeriodicFn(grid, h4), d)
    if not rep.ok:
        raise StepRejected("step result left the admissible set")
    new_fh = InterfacePair(PeriodicFn(grid, f4), PeriodicFn(grid, h4), d)
    return SimState(t=state.t + dt, fh=new_fh), float(err)


def dealias(u: PeriodicFn) -> PeriodicFn:
    """Zero the modes above two thirds of the Nyquist mode."""
    n = u.grid.n_x
    cutoff = (2 * (n // 2)) // 3
    coeff = np.fft.rfft(u.values)
    coeff[cutoff + 1:] = 0.0
    return PeriodicFn(u.grid, np.fft.irfft(coeff, n=n))


def _st_dt_cap(config: SimConfig) -> float:
    gamma = max(config.params.gamma_f, config.params.gamma_h)
    if not config.surface_tension or gamma == 0.0:
        return np.inf
    m_max = max(1, config.n_x // 3)
    rate_scale = config.params.k / min(config.params.mu_plus, config.params.mu_minus)
    return config.cfl_st / (gamma * m_max**3 * rate_scale)


def simulate(config: SimConfig) -> Trajectory:
    """Adaptive integration of the interface evolution described by config.

    Terminates with reason 't_end', 'admissibility_lost', 'rt_violated'
    (when stop_on_rt is set on a run without surface tension), or
    'step_failure'; failures are recorded, never raised past the trajectory.
    """
    grid = make_grid(config.n_x)
    f = config.f0.build(grid)
    h = config.h0.build(grid)
    b = config.b.build(grid)
    fh = InterfacePair(f, h, config.params.d)
    params = config.params
    stop_on_rt = config.stop_on_rt and not config.surface_tension

    traj = Trajectory()
    state = SimState(t=0.0, fh=fh)
    try:
        report = rayleigh_taylor(fh, b, params, n_y=config.n_y)
    except SolverFailure:
        traj.reason = "step_failure"
        return traj
    traj.record(0.0, fh, report, 0.0)
    if stop_on_rt and not report.satisfied:
        traj.reason = "rt_violated"
        return traj

    dt = min(config.dt_init, config.dt_max, _st_dt_cap(config), config.t_end)
    rejected_in_a_row = 0
    for _ in range(_MAX_STEPS):
        if state.t >= config.t_end * (1.0 - 1e-12):
            traj.reason = "t_end"
            return traj
        dt = min(dt, config.t_end - state.t)
        try:
            new_state, err = step(state, dt, b, params,
                                  config.surface_tension, n_y=config.n_y)
        except StepRejected:
            dt *= 0.5
            rejected_in_a_row += 1
            if dt < _MIN_DT or rejected_in_a_row > 60:
                traj.reason = "step_failure"
                return traj
            continue
        except (SolverFailure, AdmissibilityError):
            traj.reason = "step_failure"
            return traj

        scale = max(np.max(np.abs(new_state.fh.f.values)),
                    np.max(np.abs(new_state.fh.h.values)), 1.0)
        tol = config.atol + config.rtol * scale
        ratio = err / tol
        if ratio > 1.0:
            dt *= max(0.2, 0.9 * ratio ** (-0.2))
            rejected_in_a_row += 1
            if dt < _MIN_DT or rejected_in_a_row > 60:
                traj.reason = "step_failure"
                return traj
            continue
        rejected_in_a_row = 0

        f_new = dealias(new_state.fh.f)
        h_new = dealias(new_state.fh.h)
        rep = check_admissible(f_new, h_new, params.d)
        if not rep.ok:
            traj.reason = "admissibility_lost"
            return traj
        state = SimState(t=new_state.t, fh=InterfacePair(f_new, h_new, params.d))

        try:
            report = rayleigh_taylor(state.fh, b, params, n_y=config.n_y)
        except SolverFailure:
            traj.reason = "step_failure"
            return traj
        traj.record(state.t, state.fh, report, dt)
        if stop_on_rt and not report.satisfied:
            traj.reason = "rt_violated"
            return traj

        growth = 5.0 if ratio == 0.0 else min(5.0, 0.9 * ratio ** (-0.2))
        dt = min(dt * max(0.2, growth), config.dt_max, _st_dt_cap(config))
    traj.reason = "step_failure"
    return traj


# ---------------------------------------------------------------------------
# Linearization diagnostics


def _assert_x_independent(u: PeriodicFn, name: str):
    if np.max(np.abs(u.values - np.mean(u.values))) > 1e-12:
        raise ValueError(f"{name} must be x-independent for per-mode linearization")


def linearized_matrix(fh: InterfacePair, b: PeriodicFn, params: FluidParams,
                      m: int, surface_tension: bool = False, eps: float = 1e-6,
                      n_y: int | None = None) -> np.ndarray:
    """Per-mode Jacobian of the interface velocities at a flat state.

    Directional finite differences of the velocity operator along the
    mode-m sine in each interface, projected back onto that sine; at an
    x-independent base the modes decouple and the result is a real 2x2
    matrix per mode.
    """
    if m <= 0:
        raise ValueError("mode m must be positive")
    grid = fh.grid
    if m >= grid.n_x // 2:
        raise ValueError("mode m must be below the Nyquist mode")
    _assert_x_independent(fh.f, "f")
    _assert_x_independent(fh.h, "h")
    _assert_x_independent(b, "b")

    direction = np.sin(m * grid.nodes)
    weight = 2.0 / grid.n_x

    def project(values):
        return weight * float(values @ direction)

    base_f, base_h = phi(0.0, fh, b, params, surface_tension, n_y)
    out = np.empty((2, 2))
    for col, (df_vals, dh_vals) in enumerate((
            (eps * direction, np.zeros(grid.n_x)),
            (np.zeros(grid.n_x), eps * direction))):
        pert = InterfacePair(PeriodicFn(grid, fh.f.values + df_vals),
                             PeriodicFn(grid, fh.h.values + dh_vals), fh.d)
        pf, ph = phi(0.0, pert, b, params, surface_tension, n_y)
        out[0, col] = project((pf.values - base_f.values) / eps)
        out[1, col] = project((ph.values - base_h.values) / eps)
    return out


def mode_amplitude(values: np.ndarray, m: int) -> float:
    """Magnitude of the mode-m Fourier coefficient of sampled values."""
    n = len(values)
    coeff = np.fft.rfft(values)[m]
    return float(2.0 * np.abs(coeff) / n)


def fit_mode_rate(times, amplitudes, efolds: float = 1.0):
    """Least-squares growth rate of log|amplitude| over the given e-folds.

    Fits from the first sample until the amplitude has changed by the
    requested number of e-folds (either direction).  Returns (rate,
    r_squared); fits with r_squared below 0.999 should be rejected.
    """
    times = np.asarray(times, dtype=float)
    amps = np.asarray(amplitudes, dtype=float)
    if np.any(amps <= 0):
        raise ValueError("amplitudes must be positive for a log fit")
    logs = np.log(amps)
    target = efolds
    idx = np.nonzero(np.abs(logs - logs[0]) >= target)[0]
    end = int(idx[0]) + 1 if idx.size else len(logs)
    if end < 3:
        raise ValueError("not enough samples inside the fit window")
    t_win, y_win = times[:end], logs[:end]
    coeffs = np.polyfit(t_win, y_win, 1)
    fit = np.polyval(coeffs, t_win)
    ss_res = float(np.sum((y_win - fit) ** 2))
    ss_tot = float(np.sum((y_win - np.mean(y_win)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coeffs[0]), r_squared

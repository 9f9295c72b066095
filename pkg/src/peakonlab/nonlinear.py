"""Full nonlinear perturbation dynamics along characteristics, with breaking.

In the frame moving with the peaked wave, a single-peak perturbation v obeys

    v_t = (c - phi) v_x + phi w - pi m^2 vbar sinh x + (v|peak - v) v_x - Q[v],

and along the characteristics dX/dt = phi(X) - M + V - V|peak the fields
(X, V, W, U, J) close into the ODE system

    dV/dt = phi(X) W - pi m^2 vbar sinh X - Q[v](X),
    dW/dt = phi'(X) W - pi m^2 vbar (cosh X - 1) + (V^2 - V|peak^2)/2
            - P[v](X) + P[v](0),
    dU/dt = phi'(X)(W - U) + phi(X) V - pi m^2 vbar cosh X - U^2/2 + V^2
            - P[v](X),
    dJ/dt = (phi'(X) + U) J,

with the nonlocal forcing convolved in the characteristic frame.  The mean
vbar stays constant (Q has zero circle mean); the peak value obeys
d v|peak / dt = -Q[v](0) and the endpoints s = 0, 2*pi are fixed points of
the discrete stages, so the boundary identities hold to rounding.

The slopes on the two sides of the peak satisfy scalar equations

    dU+-/dt = +-U+- + M V|peak - pi m^2 vbar - (U+-)^2/2 + (V|peak)^2 - P[v](0),

whose right member is dominated by the Riccati supersolution
dUbar/dt = Ubar - Ubar^2/2 + F for any constant F bounding the forcing
bracket.  When U+ starts below the negative equilibrium root of
U - U^2/2 + F, the supersolution escapes to -infinity in finite time, which
upper-bounds the lifespan of the solution: the slope just right of the peak
steepens without bound while v itself stays small -- wave breaking.
Integration stops once max|U| crosses the blow-up threshold (or goes
non-finite); the reported stop time is the last completed step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .convolution import node_convolutions
from .kernel import M, TWO_PI, m, phi, phi_open_interval, phi_prime_open_interval
from .profiles import InitialCondition
from .state import CharacteristicState, cosine_grid


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a characteristic state."""

    dX: np.ndarray
    dV: np.ndarray
    dW: np.ndarray
    dU: np.ndarray
    dJ: np.ndarray
    dv_peak: float


@dataclass(frozen=True)
class BlowupReport:
    """Outcome of a nonlinear run.

    ``u_plus_history`` holds (time, slope-right-of-peak) rows for every
    completed step.  When breaking is detected, max_abs_slope is at least
    the threshold (infinite if the state left the reals inside one step).
    """

    status: str  # "completed" | "blew_up"
    t_stop: float
    max_abs_slope: float
    u_plus_history: np.ndarray


@dataclass
class NonlinearTrajectory:
    """Saved states plus dense per-step peak diagnostics."""

    times: np.ndarray
    states: list
    diag_t: np.ndarray
    diag_v_peak: np.ndarray
    diag_p0: np.ndarray
    diag_q0: np.ndarray
    diag_u_right: np.ndarray
    diag_u_left: np.ndarray
    vbar: float

    def forcing_bracket(self) -> np.ndarray:
        """M V|peak - pi m^2 vbar + V|peak^2 - P[v](0) along the run."""
        return (M * self.diag_v_peak - math.pi * m * m * self.vbar
                + self.diag_v_peak ** 2 - self.diag_p0)


def _rhs(s: np.ndarray, Z: np.ndarray, pmv: float):
    """Stage derivative for stacked Z = (X, W, V, U, J); returns (dZ, Q0, P0)."""
    X, W, V, U, J = Z
    Q, P = node_convolutions(s, X, V, U, J)
    ph = phi_open_interval(X)
    php = phi_prime_open_interval(X)  # one-sided at the fixed endpoints
    coshX = np.cosh(X)
    sinhX = np.sinh(X)
    v0 = V[0]
    p0 = P[0]
    dZ = np.stack([
        ph - M + V - v0,
        php * W + pmv * (1.0 - coshX) + 0.5 * (V * V - v0 * v0) - P + p0,
        ph * W - pmv * sinhX - Q,
        php * (W - U) + ph * V - pmv * coshX - 0.5 * U * U + V * V - P,
        (php + U) * J,
    ])
    dZ[0, 0] = dZ[0, -1] = 0.0  # the peak characteristics are exact fixed points
    return dZ, float(Q[0]), p0


def nl_rhs(state: CharacteristicState) -> StateDerivative:
    """Time derivative of a state under the nonlinear flow.

    Zero perturbation reduces to the pure characteristic flow
    (dX = phi - M, dJ = phi' J); the peak value moves with -Q[v](0).
    """
    Z = np.stack([state.X, state.W, state.V, state.U, state.J])
    dZ, q0, _ = _rhs(state.s, Z, math.pi * m * m * state.vbar)
    return StateDerivative(dX=dZ[0], dV=dZ[2], dW=dZ[1], dU=dZ[3], dJ=dZ[4],
                           dv_peak=-q0)


def integrate_nonlinear(ic: InitialCondition, t_end: float, dt: float = 5e-4,
                        n_chars: int = 512, slope_threshold: float = 1e6,
                        save_times=None):
    """Fixed-step RK4 for the nonlinear characteristic system.

    Advances until ``t_end`` or until breaking is detected (max|U| at or
    above ``slope_threshold``, or a non-finite state).  Returns the
    trajectory (states at the requested save times that were reached, dense
    peak diagnostics every step) and a :class:`BlowupReport`.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_chars < 16:
        raise ValueError("need at least 16 characteristics")
    if slope_threshold <= 0:
        raise ValueError("slope_threshold must be positive")
    if save_times is None:
        save_times = [t_end]
    save_steps = sorted({int(round(ts / dt)) for ts in save_times})
    if save_steps and save_steps[-1] * dt > t_end + dt / 2:
        raise ValueError("save times must lie within [0, t_end]")
    n_steps = int(round(t_end / dt))

    s = cosine_grid(n_chars)
    Z = np.stack([
        s.copy(),
        np.asarray(ic.antiderivative(s), dtype=float),
        np.asarray(ic.value(s), dtype=float),
        np.asarray(ic.slope(s), dtype=float),
        np.ones_like(s),
    ])
    pmv = math.pi * m * m * ic.vbar

    times, states = [], []
    diag = {"t": [], "v_peak": [], "p0": [], "q0": [], "ur": [], "ul": []}

    def record_diag(t, q0, p0):
        diag["t"].append(t)
        diag["v_peak"].append(Z[2, 0])
        diag["p0"].append(p0)
        diag["q0"].append(q0)
        diag["ur"].append(Z[3, 0])
        diag["ul"].append(Z[3, -1])

    def record_state(k):
        t = k * dt
        times.append(t)
        states.append(CharacteristicState(
            t=t, s=s, X=Z[0].copy(), V=Z[2].copy(), W=Z[1].copy(),
            U=Z[3].copy(), J=Z[4].copy(), vbar=ic.vbar))

    if save_steps and save_steps[0] == 0:
        record_state(0)
        save_steps = save_steps[1:]

    status, t_stop, max_slope = "completed", 0.0, float(np.max(np.abs(Z[3])))
    save_iter = iter(save_steps)
    next_save = next(save_iter, None)
    # overflow past the threshold is the detection signal, not an anomaly
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            # the first stage is the derivative at the current state: reuse
            # it for the dense diagnostics instead of a separate evaluation
            k1, q0, p0 = _rhs(s, Z, pmv)
            record_diag((k - 1) * dt, q0, p0)
            k2, _, _ = _rhs(s, Z + 0.5 * dt * k1, pmv)
            k3, _, _ = _rhs(s, Z + 0.5 * dt * k2, pmv)
            k4, _, _ = _rhs(s, Z + dt * k3, pmv)
            Z_new = Z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(Z_new)):
                status = "blew_up"
                t_stop = (k - 1) * dt
                max_slope = math.inf  # unbounded within one step
                break
            Z = Z_new
            t = k * dt
            slope_now = float(np.max(np.abs(Z[3])))
            max_slope = max(max_slope, slope_now)
            t_stop = t
            if next_save is not None and k == next_save:
                record_state(k)
                next_save = next(save_iter, None)
            if slope_now >= slope_threshold:
                status = "blew_up"
                _, q0, p0 = _rhs(s, Z, pmv)
                record_diag(t, q0, p0)
                break
        else:
            _, q0, p0 = _rhs(s, Z, pmv)
            record_diag(n_steps * dt, q0, p0)

    history = np.column_stack([np.array(diag["t"]), np.array(diag["ur"])])
    report = BlowupReport(status=status, t_stop=t_stop,
                          max_abs_slope=max_slope, u_plus_history=history)
    traj = NonlinearTrajectory(
        times=np.array(times), states=states,
        diag_t=np.array(diag["t"]), diag_v_peak=np.array(diag["v_peak"]),
        diag_p0=np.array(diag["p0"]), diag_q0=np.array(diag["q0"]),
        diag_u_right=np.array(diag["ur"]), diag_u_left=np.array(diag["ul"]),
        vbar=ic.vbar)
    return traj, report


def measured_forcing_bound(trajectory: NonlinearTrajectory,
                           report: BlowupReport) -> float:
    """Largest forcing bracket seen while the run still resolved the flow.

    When breaking was detected, the record taken at the stopping step is
    excluded: past the slope threshold the discrete state no longer means
    anything (the convolution of the overshooting slope can even flip sign),
    and the supersolution comparison only needs a bound valid while the
    solution exists.  Clamped at zero, which can only enlarge the
    supersolution and so keeps the bound valid.
    """
    bracket = trajectory.forcing_bracket()
    if report.status == "blew_up":
        bracket = bracket[trajectory.diag_t < report.t_stop]
    if bracket.size == 0:
        return 0.0
    return max(0.0, float(np.max(bracket)))


def peak_slope_forecast(u_plus_0: float, u_minus_0: float,
                        trajectory: NonlinearTrajectory):
    """Integrate the scalar peak-slope equations against recorded forcing.

    The two one-sided slopes obey
    dU+-/dt = +-U+- + M V|peak - pi m^2 vbar - (U+-)^2/2 + (V|peak)^2 - P[v](0)
    with V|peak(t) and P[v](0)(t) taken from the trajectory diagnostics
    (monotone-cubic interpolation between steps).  Returns the maximal
    deviations (right, left) from the slopes the full run actually carried
    on its peak-side characteristics.
    """
    t_grid = trajectory.diag_t
    if len(t_grid) < 2:
        raise ValueError("trajectory too short for a forecast")
    v0_f = PchipInterpolator(t_grid, trajectory.diag_v_peak)
    p0_f = PchipInterpolator(t_grid, trajectory.diag_p0)
    pmv = math.pi * m * m * trajectory.vbar

    def rhs(t, u, sign):
        drive = M * v0_f(t) - pmv + v0_f(t) ** 2 - p0_f(t)
        return sign * u - 0.5 * u * u + drive

    res_r, res_l = 0.0, 0.0
    u_r, u_l = float(u_plus_0), float(u_minus_0)
    for i in range(len(t_grid) - 1):
        res_r = max(res_r, abs(u_r - trajectory.diag_u_right[i]))
        res_l = max(res_l, abs(u_l - trajectory.diag_u_left[i]))
        t0, t1 = t_grid[i], t_grid[i + 1]
        h = t1 - t0
        for sign, u in (( +1.0, u_r), (-1.0, u_l)):
            a = rhs(t0, u, sign)
            b = rhs(t0 + h / 2, u + h / 2 * a, sign)
            c = rhs(t0 + h / 2, u + h / 2 * b, sign)
            d = rhs(t1, u + h * c, sign)
            unew = u + h / 6 * (a + 2 * b + 2 * c + d)
            if sign > 0:
                u_r = unew
            else:
                u_l = unew
    res_r = max(res_r, abs(u_r - trajectory.diag_u_right[-1]))
    res_l = max(res_l, abs(u_l - trajectory.diag_u_left[-1]))
    return res_r, res_l


def _riccati_roots(forcing: float):
    root = math.sqrt(1.0 + 2.0 * forcing)
    return 1.0 + root, 1.0 - root  # r_plus, r_minus (negative equilibrium)


def riccati_bound(u0: float, forcing: float) -> float:
    """Finite escape time of dU/dt = U - U^2/2 + forcing from U(0) = u0.

    By separation of variables the solution reaches -infinity at

        T = (2 / (r+ - r-)) log((r+ - u0) / (r- - u0)),

    where r+- = 1 +- sqrt(1 + 2 forcing) are the equilibria; infinite when
    u0 >= r- (the negative root, which lies in (-forcing, 0)).
    """
    if forcing < 0:
        raise ValueError("forcing must be nonnegative")
    r_plus, r_minus = _riccati_roots(forcing)
    if u0 >= r_minus:
        return math.inf
    delta = r_plus - r_minus
    return (2.0 / delta) * math.log((r_plus - u0) / (r_minus - u0))


def riccati_supersolution(u0: float, forcing: float, t):
    """Closed-form solution of dU/dt = U - U^2/2 + forcing, U(0) = u0.

    Valid for t below the escape time when u0 lies under the negative
    equilibrium.  Vectorized over t.
    """
    if forcing < 0:
        raise ValueError("forcing must be nonnegative")
    r_plus, r_minus = _riccati_roots(forcing)
    t = np.asarray(t, dtype=float)
    ratio0 = (u0 - r_plus) / (u0 - r_minus)
    ratio = ratio0 * np.exp(-0.5 * (r_plus - r_minus) * t)
    out = (r_plus - r_minus * ratio) / (1.0 - ratio)
    return float(out[()]) if out.ndim == 0 else out


def reconstruct_u(state: CharacteristicState, x_grid):
    """Rebuild the full wave u = phi + v on positions in [0, 2*pi].

    The perturbation is interpolated from (X, V) by a monotone piecewise
    cubic, which cannot overshoot across the steepening front.  Also returns
    the peak drift rate: the crest location moves with da/dt = v|peak on top
    of the background speed M.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(x_grid < -1e-12) or np.any(x_grid > TWO_PI + 1e-12):
        raise ValueError("x_grid must lie within [0, 2*pi]")
    v_interp = PchipInterpolator(state.X, state.V)
    u = phi(x_grid) + v_interp(np.clip(x_grid, state.X[0], state.X[-1]))
    return u, state.v_peak

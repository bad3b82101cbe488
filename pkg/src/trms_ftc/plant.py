"""Nonlinear twin-rotor plant: torques, actuator maps, dynamics, integration, trim.

State ordering is fixed as

    x = [alpha_v, s_v, u_vv, alpha_h, s_h, u_hh]

with pitch angle alpha_v, vertical momentum term s_v, main-motor internal
voltage u_vv, yaw angle alpha_h, horizontal momentum term s_h and tail-motor
internal voltage u_hh.  Inputs are the commanded motor voltages [u_v, u_h].

All functions here are pure; a simulation loop owns whatever state it steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import InfeasibleTrimError
from .params import TrmsParams

N_STATES = 6
N_INPUTS = 2


@dataclass(frozen=True)
class PlantState:
    """Named view of the six-dimensional plant state."""

    alpha_v: float = 0.0
    s_v: float = 0.0
    u_vv: float = 0.0
    alpha_h: float = 0.0
    s_h: float = 0.0
    u_hh: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_v, self.s_v, self.u_vv,
                         self.alpha_h, self.s_h, self.u_hh])

    @staticmethod
    def from_array(x) -> "PlantState":
        x = np.asarray(x, dtype=float)
        if x.shape != (N_STATES,):
            raise ValueError(f"state must have shape ({N_STATES},), got {x.shape}")
        return PlantState(*x.tolist())


@dataclass(frozen=True)
class ControlInput:
    """Commanded motor voltages (V)."""

    u_v: float = 0.0
    u_h: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.u_v, self.u_h])


def saturate(u, limit: float) -> np.ndarray:
    """Clip a command vector to the symmetric actuator range."""
    return np.clip(np.asarray(u, dtype=float), -limit, limit)


def _polyval_nc(coeffs, x: float) -> float:
    # Horner evaluation of a zero-constant-term polynomial given descending
    # coefficients for powers len(coeffs)..1.
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc * x


def rotor_speed(channel: str, u_internal: float, params: TrmsParams) -> float:
    """Propeller angular velocity (rad/s) from the internal motor voltage."""
    if not math.isfinite(u_internal):
        raise ValueError("rotor_speed: non-finite input voltage")
    if channel == "main":
        return _polyval_nc(params.main_speed_coeffs, u_internal)
    if channel == "tail":
        return _polyval_nc(params.tail_speed_coeffs, u_internal)
    raise ValueError(f"unknown channel {channel!r}")


def thrust(channel: str, omega: float, params: TrmsParams) -> float:
    """Propulsive force (N) from the propeller angular velocity."""
    if not math.isfinite(omega):
        raise ValueError("thrust: non-finite angular velocity")
    if channel == "main":
        return _polyval_nc(params.main_thrust_coeffs, omega)
    if channel == "tail":
        return _polyval_nc(params.tail_thrust_coeffs, omega)
    raise ValueError(f"unknown channel {channel!r}")


def gravity_torque(alpha_v: float, params: TrmsParams) -> float:
    """Gravity return torque on the beam in the vertical plane (N m)."""
    return params.g * ((params.a_const - params.b_const) * math.cos(alpha_v)
                       - params.c_const * math.sin(alpha_v))


def centrifugal_torque(alpha_v: float, omega_h: float, params: TrmsParams) -> float:
    """Torque from centrifugal forces under yaw rotation (N m)."""
    return -(omega_h * omega_h) * params.h_const * math.sin(alpha_v) * math.cos(alpha_v)


def horizontal_inertia(alpha_v: float, params: TrmsParams) -> float:
    """Pitch-dependent inertia seen by the yaw axis (kg m^2)."""
    c = math.cos(alpha_v)
    s = math.sin(alpha_v)
    return params.d_const * c * c + params.e_const * s * s + params.f_const


def angular_rates(state, params: TrmsParams) -> tuple[float, float]:
    """True angular rates (pitch rate, yaw rate) hidden in the momentum states."""
    x = _as_state_tuple(state)
    omega_t = rotor_speed("tail", x[5], params)
    omega_m = rotor_speed("main", x[2], params)
    omega_v = x[1] + params.j_tr * omega_t / params.j_v
    omega_h = x[4] + params.j_mr * omega_m * math.cos(x[0]) / horizontal_inertia(x[0], params)
    return omega_v, omega_h


def _as_state_tuple(state) -> tuple[float, ...]:
    if isinstance(state, PlantState):
        return (state.alpha_v, state.s_v, state.u_vv,
                state.alpha_h, state.s_h, state.u_hh)
    x = np.asarray(state, dtype=float)
    if x.shape != (N_STATES,):
        raise ValueError(f"state must have shape ({N_STATES},), got {x.shape}")
    return tuple(x.tolist())


def _deriv(x1, x2, x3, x4, x5, x6, u_v, u_h, p: TrmsParams,
           d=(0.0,) * N_STATES):
    # Scalar fast path shared by dynamics(), step() and the harness loop.
    # d is an optional additive state-derivative disturbance.
    omega_m = _polyval_nc(p.main_speed_coeffs, x3)
    omega_t = _polyval_nc(p.tail_speed_coeffs, x6)
    f_v = _polyval_nc(p.main_thrust_coeffs, omega_m)
    f_h = _polyval_nc(p.tail_thrust_coeffs, omega_t)
    s1 = math.sin(x1)
    c1 = math.cos(x1)
    j_h = p.d_const * c1 * c1 + p.e_const * s1 * s1 + p.f_const
    omega_v = x2 + p.j_tr * omega_t / p.j_v
    omega_h = x5 + p.j_mr * omega_m * c1 / j_h
    dx1 = omega_v + d[0]
    dx2 = (p.l_m * p.s_f * f_v
           - p.k_v * omega_v
           + p.g * ((p.a_const - p.b_const) * c1 - p.c_const * s1)
           - omega_h * omega_h * p.h_const * s1 * c1) / p.j_v + d[1]
    dx3 = (-x3 + p.k_mr * u_v) / p.t_mr + d[2]
    dx4 = omega_h + d[3]
    dx5 = (p.l_t * p.s_f * f_h * c1 - p.k_h * omega_h) / j_h + d[4]
    dx6 = (-x6 + p.k_tr * u_h) / p.t_tr + d[5]
    return dx1, dx2, dx3, dx4, dx5, dx6


def dynamics(state, control, params: TrmsParams) -> np.ndarray:
    """State derivative of the full nonlinear model.

    ``control`` is assumed to be already saturated by the caller; the map is
    total on finite inputs and has no side effects.
    """
    x = _as_state_tuple(state)
    if isinstance(control, ControlInput):
        u_v, u_h = control.u_v, control.u_h
    else:
        u = np.asarray(control, dtype=float)
        if u.shape != (N_INPUTS,):
            raise ValueError(f"input must have shape ({N_INPUTS},), got {u.shape}")
        u_v, u_h = u.tolist()
    if not all(math.isfinite(v) for v in (*x, u_v, u_h)):
        raise ValueError("dynamics: non-finite state or input")
    return np.array(_deriv(*x, u_v, u_h, params))


def _rk4(x, u_v, u_h, dt, p, d=(0.0,) * N_STATES):
    x1, x2, x3, x4, x5, x6 = x
    h2 = dt * 0.5
    a1, a2, a3, a4, a5, a6 = _deriv(x1, x2, x3, x4, x5, x6, u_v, u_h, p, d)
    b1, b2, b3, b4, b5, b6 = _deriv(x1 + h2 * a1, x2 + h2 * a2, x3 + h2 * a3,
                                    x4 + h2 * a4, x5 + h2 * a5, x6 + h2 * a6,
                                    u_v, u_h, p, d)
    c1, c2, c3, c4, c5, c6 = _deriv(x1 + h2 * b1, x2 + h2 * b2, x3 + h2 * b3,
                                    x4 + h2 * b4, x5 + h2 * b5, x6 + h2 * b6,
                                    u_v, u_h, p, d)
    e1, e2, e3, e4, e5, e6 = _deriv(x1 + dt * c1, x2 + dt * c2, x3 + dt * c3,
                                    x4 + dt * c4, x5 + dt * c5, x6 + dt * c6,
                                    u_v, u_h, p, d)
    s = dt / 6.0
    return (x1 + s * (a1 + 2.0 * (b1 + c1) + e1),
            x2 + s * (a2 + 2.0 * (b2 + c2) + e2),
            x3 + s * (a3 + 2.0 * (b3 + c3) + e3),
            x4 + s * (a4 + 2.0 * (b4 + c4) + e4),
            x5 + s * (a5 + 2.0 * (b5 + c5) + e5),
            x6 + s * (a6 + 2.0 * (b6 + c6) + e6))


def step(state, control, dt: float, params: TrmsParams) -> np.ndarray:
    """Advance the plant by one classical fourth-order Runge-Kutta step."""
    if not (dt > 0.0):
        raise ValueError("step: dt must be strictly positive")
    x = _as_state_tuple(state)
    if isinstance(control, ControlInput):
        u_v, u_h = control.u_v, control.u_h
    else:
        u = np.asarray(control, dtype=float)
        u_v, u_h = u.tolist()
    return np.array(_rk4(x, u_v, u_h, dt, params))


def _required_main_thrust(alpha_v: float, params: TrmsParams) -> float:
    # Main thrust needed to cancel the gravity torque at a frozen pitch.
    return -gravity_torque(alpha_v, params) / (params.l_m * params.s_f)


def trim(alpha_v_ref: float, alpha_h_ref: float, params: TrmsParams,
         tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Equilibrium (state, input) holding the requested pitch and yaw angles.

    At equilibrium the tail thrust must vanish (no net yaw torque), which
    pins u_h = 0 and reduces the problem to one scalar equation: the main
    thrust balancing gravity at the requested pitch.  The root closest to
    zero command inside the actuator range is returned.

    Raises InfeasibleTrimError when no command inside the saturation limits
    produces the required thrust.
    """
    p = params
    target = _required_main_thrust(alpha_v_ref, p)

    def residual(u_v: float) -> float:
        return thrust("main", rotor_speed("main", p.k_mr * u_v, p), p) - target

    lim = p.u_sat
    grid = np.linspace(-lim, lim, 401)
    vals = [residual(v) for v in grid]
    brackets = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            brackets.append((a, a))
        elif fa * fb < 0.0:
            brackets.append((a, b))
    if vals[-1] == 0.0:
        brackets.append((grid[-1], grid[-1]))
    if not brackets:
        raise InfeasibleTrimError(
            f"no main-rotor command in [-{lim}, {lim}] V balances the gravity "
            f"torque at pitch {alpha_v_ref:.4f} rad (required thrust {target:.2f} N)")
    # prefer the physically sensible root: smallest command magnitude
    a, b = min(brackets, key=lambda ab: min(abs(ab[0]), abs(ab[1])))
    u_v_star = a if a == b else brentq(residual, a, b, xtol=tol, rtol=8.9e-16)

    u_vv = p.k_mr * u_v_star
    omega_m = rotor_speed("main", u_vv, p)
    s_h = -p.j_mr * omega_m * math.cos(alpha_v_ref) / horizontal_inertia(alpha_v_ref, p)
    x_star = np.array([alpha_v_ref, 0.0, u_vv, alpha_h_ref, s_h, 0.0])
    u_star = np.array([u_v_star, 0.0])
    return x_star, u_star

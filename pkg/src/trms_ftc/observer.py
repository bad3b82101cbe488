"""Online multi-observer: state estimation under faults and fault reconstruction.

Two estimators run side by side in the loop:

* the unknown-input observer tracks the faulty plant and reconstructs the
  fault vector algebraically from a filtered output derivative;
* a plain Luenberger observer on the nominal bank provides the fault-free
  state estimate the control law compares against.

The fault reconstruction needs dy/dt, realized causally as a filtered
differentiator (two cascaded one-pole stages with time constant tau_f).
The model-predicted part of the residual passes through a value filter with
the same two poles, so the direct command feedthrough cancels exactly on
both sides; without that matching, the fault-compensation path closes a
unit-gain algebraic loop through the command and rings.  The fault estimate
feeding the observer integration is the one from the previous step: the
algebraic loop between the estimator state and its own fault estimate is
broken by this one-step lag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .multimodel import ModelBank
from .synthesis import UioDesign

DEFAULT_TAU_F = 0.01


@dataclass(frozen=True)
class ObserverState:
    """Value-type state of the fault observer.

    x_hat_f: estimated faulty-plant state (n).
    f_hat: current fault estimate (s).
    filt_y, filt_dy: derivative-filter stages on the measured output (p each).
    filt_w, filt_w2: matching value-filter stages on the model-predicted
        fault rate (s each).
    """

    x_hat_f: np.ndarray
    f_hat: np.ndarray
    filt_y: np.ndarray
    filt_dy: np.ndarray
    filt_w: np.ndarray
    filt_w2: np.ndarray

    @staticmethod
    def initial(x0, y0, n_faults: int) -> "ObserverState":
        x0 = np.asarray(x0, dtype=float)
        y0 = np.asarray(y0, dtype=float)
        return ObserverState(x0.copy(), np.zeros(n_faults), y0.copy(),
                             np.zeros_like(y0), np.zeros(n_faults),
                             np.zeros(n_faults))


def deriv_filter_step(filt_y: np.ndarray, filt_dy: np.ndarray, y: np.ndarray,
                      dt: float, tau_f: float) -> tuple[np.ndarray, np.ndarray]:
    """Advance the filtered differentiator one step under a held input y.

    The cascade admits an exact zero-order-hold update, so the step is
    unconditionally stable for any dt.  Returns (filt_y', filt_dy'); the
    second entry is the dy/dt estimate.
    """
    if not (dt > 0.0 and tau_f > 0.0):
        raise ValueError("deriv_filter_step: dt and tau_f must be positive")
    a = math.exp(-dt / tau_f)
    dev = filt_y - y
    new_y = y + a * dev
    new_dy = a * filt_dy - (a * dt / (tau_f * tau_f)) * dev
    return new_y, new_dy


def value_filter_step(filt_w: np.ndarray, filt_w2: np.ndarray, w: np.ndarray,
                      dt: float, tau_f: float) -> tuple[np.ndarray, np.ndarray]:
    """Two cascaded one-pole value stages, exact under a held input w.

    Shares its poles with deriv_filter_step so residual comparisons see the
    same lag on both sides.
    """
    a = math.exp(-dt / tau_f)
    new_w = w + a * (filt_w - w)
    new_w2 = w + a * ((dt / tau_f) * (filt_w - w) + (filt_w2 - w))
    return new_w, new_w2


def predicted_fault_rate(design: UioDesign, bank: ModelBank, mu,
                         x_hat_f, u_f) -> np.ndarray:
    """Model-predicted projected output rate sum_i mu_i H_i C (A_i x + B_i u + dX_i)."""
    c = bank.c_mat
    x_hat_f = np.asarray(x_hat_f, dtype=float)
    u_f = np.asarray(u_f, dtype=float)
    w = np.zeros(bank.models[0].n_faults)
    for wgt, m, h in zip(np.asarray(mu, dtype=float), bank.models, design.h_proj):
        w += wgt * (h @ (c @ (m.a_mat @ x_hat_f + m.b_mat @ u_f + m.delta_x)))
    return w


def fault_estimate(design: UioDesign, bank: ModelBank, mu, y_dot,
                   x_hat_f, u_f) -> np.ndarray:
    """Algebraic fault reconstruction from an output derivative.

    f_hat = sum_i mu_i H_i (y_dot - C (A_i x_hat_f + B_i u_f + dX_i)).
    With the exact derivative this satisfies
    f - f_hat = -sum_i mu_i H_i C A_i (x_f - x_hat_f).
    """
    mu = np.asarray(mu, dtype=float)
    y_dot = np.asarray(y_dot, dtype=float)
    x_hat_f = np.asarray(x_hat_f, dtype=float)
    u_f = np.asarray(u_f, dtype=float)
    c = bank.c_mat
    if y_dot.shape != (c.shape[0],):
        raise ValueError(f"y_dot must have shape ({c.shape[0]},)")
    if x_hat_f.shape != (c.shape[1],):
        raise ValueError(f"x_hat_f must have shape ({c.shape[1]},)")
    h_bar = sum(w * h for w, h in zip(mu, design.h_proj))
    return h_bar @ y_dot - predicted_fault_rate(design, bank, mu, x_hat_f, u_f)


def uio_state_derivative(design: UioDesign, bank: ModelBank, mu,
                         x_hat_f, u_f, y, f_hat) -> np.ndarray:
    """Right-hand side of the unknown-input observer ODE."""
    x_hat_f = np.asarray(x_hat_f, dtype=float)
    c = bank.c_mat
    innov = np.asarray(y, dtype=float) - c @ x_hat_f
    dx = np.zeros_like(x_hat_f)
    for w, m, k2 in zip(np.asarray(mu, dtype=float), bank.models, design.k2):
        dx += w * (m.a_mat @ x_hat_f + m.b_mat @ u_f + m.l_mat @ f_hat
                   + m.delta_x + k2 @ innov)
    return dx


def affine_rk4(m_mat: np.ndarray, c_vec: np.ndarray, x: np.ndarray,
               dt: float) -> np.ndarray:
    """One RK4 step of the affine system dx/dt = M x + c."""
    k1 = m_mat @ x + c_vec
    k2 = m_mat @ (x + 0.5 * dt * k1) + c_vec
    k3 = m_mat @ (x + 0.5 * dt * k2) + c_vec
    k4 = m_mat @ (x + dt * k3) + c_vec
    return x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def uio_step(design: UioDesign, bank: ModelBank, obs: ObserverState,
             u_f, y, mu, dt: float, tau_f: float = DEFAULT_TAU_F) -> ObserverState:
    """One observer step: integrate the state estimate, then refresh f_hat.

    The weights, command and measurement are held over the step.  The state
    integration uses the previous fault estimate; the refreshed estimate
    compares the filtered measured derivative against the equally filtered
    model prediction.
    """
    if not (dt > 0.0):
        raise ValueError("uio_step: dt must be strictly positive")
    mu = np.asarray(mu, dtype=float)
    u_f = np.asarray(u_f, dtype=float)
    y = np.asarray(y, dtype=float)
    c = bank.c_mat

    m_mat = np.zeros((c.shape[1], c.shape[1]))
    c_vec = np.zeros(c.shape[1])
    for w, m, k2 in zip(mu, bank.models, design.k2):
        m_mat += w * (m.a_mat - k2 @ c)
        c_vec += w * (m.b_mat @ u_f + m.l_mat @ obs.f_hat + m.delta_x + k2 @ y)
    x_next = affine_rk4(m_mat, c_vec, obs.x_hat_f, dt)

    filt_y, filt_dy = deriv_filter_step(obs.filt_y, obs.filt_dy, y, dt, tau_f)
    w_pred = predicted_fault_rate(design, bank, mu, obs.x_hat_f, u_f)
    filt_w, filt_w2 = value_filter_step(obs.filt_w, obs.filt_w2, w_pred, dt, tau_f)
    h_bar = sum(w * h for w, h in zip(mu, design.h_proj))
    f_next = h_bar @ filt_dy - filt_w2
    return ObserverState(x_next, f_next, filt_y, filt_dy, filt_w, filt_w2)


def luenberger_step(design: UioDesign, bank: ModelBank, x_hat, u, y, mu,
                    dt: float) -> np.ndarray:
    """Fault-free estimator step on the nominal bank, driven by the nominal command."""
    if not (dt > 0.0):
        raise ValueError("luenberger_step: dt must be strictly positive")
    mu = np.asarray(mu, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    c = bank.c_mat
    m_mat = np.zeros((c.shape[1], c.shape[1]))
    c_vec = np.zeros(c.shape[1])
    for w, m, k in zip(mu, bank.models, design.k_nom):
        m_mat += w * (m.a_mat - k @ c)
        c_vec += w * (m.b_mat @ np.asarray(u, dtype=float) + m.delta_x
                      + k @ np.asarray(y, dtype=float))
    return affine_rk4(m_mat, c_vec, x_hat, dt)

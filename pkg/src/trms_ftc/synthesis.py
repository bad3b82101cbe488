"""Offline gain synthesis for the multi-model controller and fault observer.

Produces, per local model:

* the fault projector H, a left pseudo-inverse of C @ L;
* the state-feedback gain K1 from a Riccati design whose weights are set
  by the two synthesis knobs (zeta, rho): Q = C'C + zeta*I, R = I/rho;
* the observer gain K2 for the fault-decoupled matrix A_bar = (I - L H C) A,
  obtained by duality from the same Riccati solver;
* the compensation matrix S mapping fault estimates back into the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DesignError
from .multimodel import LocalModel, ModelBank, is_detectable

DEFAULT_ZETA = 2.0
DEFAULT_RHO = 700.0
# Observer Riccati weights: scaled identity on the dual state, identity on
# the dual input.  The scale buys estimation bandwidth; see observer_gain.
DEFAULT_OBS_Q = 1.0
IMAG_AXIS_TOL = 1e-9


def fault_projector(c_mat: np.ndarray, l_mat: np.ndarray) -> np.ndarray:
    """Left pseudo-inverse of C @ L via the normal equations."""
    c_mat = np.asarray(c_mat, dtype=float)
    l_mat = np.asarray(l_mat, dtype=float)
    s = l_mat.shape[1]
    if s == 0:
        return np.zeros((0, c_mat.shape[0]))
    cl = c_mat @ l_mat
    if np.linalg.matrix_rank(cl) < s:
        raise DesignError(
            "C @ L must have full column rank (every fault direction has to "
            "show up independently in the outputs) to build the fault projector")
    return np.linalg.solve(cl.T @ cl, cl.T)


def solve_care(a, b, q, r) -> np.ndarray:
    """Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0.

    Solved through the stable invariant subspace of the 2n-by-2n Hamiltonian
    matrix.  Hamiltonian eigenvalues within 1e-9 of the imaginary axis abort
    the synthesis instead of being perturbed.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    r = np.atleast_2d(np.asarray(r, dtype=float))
    n = a.shape[0]
    g = b @ np.linalg.solve(r, b.T)
    ham = np.block([[a, -g], [-q, -a.T]])

    eigs = np.linalg.eigvals(ham)
    scale = max(1.0, np.abs(eigs).max())
    if np.any(np.abs(eigs.real) <= IMAG_AXIS_TOL * scale):
        raise DesignError(
            "Hamiltonian has eigenvalues on the imaginary axis; the pair is "
            "not stabilizable (or the weights are degenerate) and no "
            "stabilizing Riccati solution exists")

    _, z, sdim = scipy.linalg.schur(ham, sort="lhp")
    if sdim != n:
        raise DesignError(
            f"stable Hamiltonian subspace has dimension {sdim}, expected {n}; "
            "no stabilizing Riccati solution exists")
    z11 = z[:n, :n]
    z21 = z[n:, :n]
    try:
        p = scipy.linalg.solve(z11.T, z21.T).T
    except scipy.linalg.LinAlgError as exc:
        raise DesignError("stable subspace is not a graph over the state space") from exc
    p = 0.5 * (p + p.T)

    residual = a.T @ p + p @ a - p @ g @ p + q
    if np.linalg.norm(residual) > 1e-8 * max(1.0, np.linalg.norm(p) * np.linalg.norm(a)):
        raise DesignError("Riccati residual is too large; synthesis aborted")
    return p


def feedback_gain(model: LocalModel, zeta: float = DEFAULT_ZETA,
                  rho: float = DEFAULT_RHO) -> np.ndarray:
    """State-feedback gain K1 = R^-1 B' P with Q = C'C + zeta*I, R = I/rho."""
    a, b, c = model.a_mat, model.b_mat, model.c_mat
    q = c.T @ c + zeta * np.eye(a.shape[0])
    r = np.eye(b.shape[1]) / rho
    p = solve_care(a, b, q, r)
    k1 = rho * (b.T @ p)
    if np.max(np.linalg.eigvals(a - b @ k1).real) >= 0.0:
        raise DesignError("state feedback synthesis failed to stabilize the model")
    return k1


def observer_gain(model: LocalModel, h_proj: np.ndarray,
                  q_scale: float = DEFAULT_OBS_Q) -> tuple[np.ndarray, np.ndarray]:
    """Fault-decoupled matrix A_bar and observer gain K2.

    A_bar = (I - L H C) A removes the fault directions from the error
    dynamics; K2 then comes from the dual Riccati problem on (A_bar', C')
    with weights (q_scale * I, I), so A_bar - K2 C is Hurwitz.
    """
    a, c, l = model.a_mat, model.c_mat, model.l_mat
    n = a.shape[0]
    a_bar = (np.eye(n) - l @ h_proj @ c) @ a
    if not is_detectable(a_bar, c):
        raise DesignError(
            "(A_bar, C) is not detectable; the operating point violates the "
            "observability assumption behind the observer synthesis")
    p = solve_care(a_bar.T, c.T, q_scale * np.eye(n), np.eye(c.shape[0]))
    k2 = p @ c.T
    if np.max(np.linalg.eigvals(a_bar - k2 @ c).real) >= 0.0:
        raise DesignError("observer synthesis failed to stabilize the error dynamics")
    return a_bar, k2


def comp_gain(b_mat: np.ndarray, l_mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares S with B S ~= L, plus the Frobenius residual.

    A nonzero residual flags fault directions the inputs cannot reach.
    """
    b_mat = np.asarray(b_mat, dtype=float)
    l_mat = np.asarray(l_mat, dtype=float)
    if l_mat.shape[1] == 0:
        return np.zeros((b_mat.shape[1], 0)), 0.0
    s, *_ = np.linalg.lstsq(b_mat, l_mat, rcond=None)
    residual = float(np.linalg.norm(b_mat @ s - l_mat))
    return s, residual


def nominal_observer_gain(model: LocalModel,
                          q_scale: float = DEFAULT_OBS_Q) -> np.ndarray:
    """Plain Luenberger gain for the fault-free estimator: A - K C Hurwitz."""
    a, c = model.a_mat, model.c_mat
    p = solve_care(a.T, c.T, q_scale * np.eye(a.shape[0]), np.eye(c.shape[0]))
    k = p @ c.T
    if np.max(np.linalg.eigvals(a - k @ c).real) >= 0.0:
        raise DesignError("nominal observer synthesis failed to stabilize")
    return k


@dataclass(frozen=True)
class FtcGains:
    """Per-model feedback gains K1 and fault-compensation matrices S."""

    k1: tuple[np.ndarray, ...]
    s_comp: tuple[np.ndarray, ...]
    zeta: float
    rho: float


@dataclass(frozen=True)
class UioDesign:
    """Per-model fault projectors, decoupled matrices and observer gains."""

    h_proj: tuple[np.ndarray, ...]
    k2: tuple[np.ndarray, ...]
    a_bar: tuple[np.ndarray, ...]
    k_nom: tuple[np.ndarray, ...]


def design_gains(bank: ModelBank, zeta: float = DEFAULT_ZETA,
                 rho: float = DEFAULT_RHO,
                 obs_q: float = DEFAULT_OBS_Q) -> tuple[FtcGains, UioDesign]:
    """Synthesize every offline gain for a model bank."""
    k1_list, s_list, h_list, k2_list, abar_list, knom_list = [], [], [], [], [], []
    for i, model in enumerate(bank.models):
        try:
            h = fault_projector(model.c_mat, model.l_mat)
            k1_list.append(feedback_gain(model, zeta, rho))
            s, _ = comp_gain(model.b_mat, model.l_mat)
            s_list.append(s)
            a_bar, k2 = observer_gain(model, h, obs_q)
            h_list.append(h)
            k2_list.append(k2)
            abar_list.append(a_bar)
            knom_list.append(nominal_observer_gain(model, obs_q))
        except DesignError as exc:
            raise DesignError(f"model {i}: {exc}") from exc
    gains = FtcGains(tuple(k1_list), tuple(s_list), zeta, rho)
    uio = UioDesign(tuple(h_list), tuple(k2_list), tuple(abar_list), tuple(knom_list))
    return gains, uio


def augmented_error_matrix(model: LocalModel, k1: np.ndarray, h_proj: np.ndarray,
                           a_bar: np.ndarray, k2: np.ndarray) -> np.ndarray:
    """Block upper-triangular closed-loop error matrix of the combined design.

    Top-left block: tracking error under the state feedback.  Bottom-right:
    estimation error of the decoupled observer.  The coupling enters only
    through the top-right block, so the spectrum is the union of the two
    diagonal blocks' spectra.
    """
    a, b, c, l = model.a_mat, model.b_mat, model.c_mat, model.l_mat
    n = a.shape[0]
    top = np.hstack([a - b @ k1, l @ h_proj @ c @ a])
    bottom = np.hstack([np.zeros((n, n)), a_bar - k2 @ c])
    return np.vstack([top, bottom])


def gains_to_doc(bank_doc: dict, gains: FtcGains, uio: UioDesign,
                 controller_type: str = "state_feedback") -> dict:
    """JSON document bundling a bank with its synthesized gains."""
    return {
        "schema": "trms-ftc/design-v1",
        "bank": bank_doc,
        "controller": {"type": controller_type, "zeta": gains.zeta, "rho": gains.rho},
        "gains": {
            "k1": [k.tolist() for k in gains.k1],
            "s_comp": [s.tolist() for s in gains.s_comp],
        },
        "uio": {
            "h_proj": [h.tolist() for h in uio.h_proj],
            "k2": [k.tolist() for k in uio.k2],
            "a_bar": [a.tolist() for a in uio.a_bar],
            "k_nom": [k.tolist() for k in uio.k_nom],
        },
    }

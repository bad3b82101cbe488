"""Bank of affine local models with convex blending weights.

Each local model is an affine expansion of the nonlinear plant around an
operating point,

    dx/dt = A x + B u + dX,      y = C x,

with a shared output matrix C across the bank and a per-model fault
distribution matrix L.  A scheduling variable (the pitch angle) selects the
blend through normalized Gaussian membership weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import plant
from .exceptions import DesignError
from .params import TrmsParams

DEFAULT_MEASURED_STATES = (0, 2, 3, 5)  # pitch, main motor state, yaw, tail motor state
DEFAULT_NODES = (-0.4, 0.0, 0.4)
DEFAULT_SIGMA = 0.25
FD_STEP = 1e-6


@dataclass(frozen=True)
class FaultSpec:
    """How measurements and faults enter a local model.

    measured_states: zero-based state indices selected by C.
    fault_input_channels: input columns of B that carry additive actuator
        faults (defines L when no explicit matrix is given).
    l_matrix: optional explicit n-by-s fault distribution matrix.
    """

    measured_states: tuple[int, ...] = DEFAULT_MEASURED_STATES
    fault_input_channels: tuple[int, ...] = (0, 1)
    l_matrix: np.ndarray | None = None

    def output_matrix(self, n: int) -> np.ndarray:
        c = np.zeros((len(self.measured_states), n))
        for row, idx in enumerate(self.measured_states):
            if not 0 <= idx < n:
                raise DesignError(f"measured state index {idx} outside 0..{n - 1}")
            c[row, idx] = 1.0
        return c

    def fault_matrix(self, b_mat: np.ndarray) -> np.ndarray:
        if self.l_matrix is not None:
            l = np.array(self.l_matrix, dtype=float)
            if l.ndim != 2 or l.shape[0] != b_mat.shape[0]:
                raise DesignError(f"explicit fault matrix must have {b_mat.shape[0]} rows")
            return l
        cols = list(self.fault_input_channels)
        if any(not 0 <= c < b_mat.shape[1] for c in cols):
            raise DesignError(f"fault input channels {cols} outside input range")
        return b_mat[:, cols].copy()


def _pbh_rank_ok(m_top: np.ndarray, m_side: np.ndarray, eigs: np.ndarray,
                 tol: float = 1e-8) -> bool:
    # PBH test over the closed right half plane: for every eigenvalue with
    # nonnegative real part, [lam*I - M | side] must keep full row rank.
    n = m_top.shape[0]
    for lam in eigs:
        if lam.real < -tol:
            continue
        pencil = np.hstack([lam * np.eye(n) - m_top, m_side])
        if np.linalg.matrix_rank(pencil, tol=1e-9 * max(1.0, np.abs(pencil).max())) < n:
            return False
    return True


def is_stabilizable(a_mat: np.ndarray, b_mat: np.ndarray) -> bool:
    return _pbh_rank_ok(a_mat, b_mat, np.linalg.eigvals(a_mat))


def is_detectable(a_mat: np.ndarray, c_mat: np.ndarray) -> bool:
    return _pbh_rank_ok(a_mat.T, c_mat.T, np.linalg.eigvals(a_mat))


@dataclass(frozen=True)
class LocalModel:
    """One affine local model and its operating point."""

    a_mat: np.ndarray
    b_mat: np.ndarray
    c_mat: np.ndarray
    delta_x: np.ndarray
    l_mat: np.ndarray
    op_state: np.ndarray
    op_input: np.ndarray

    def __post_init__(self):
        for name in ("a_mat", "b_mat", "c_mat", "delta_x", "l_mat",
                     "op_state", "op_input"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        n = self.a_mat.shape[0]
        m = self.b_mat.shape[1]
        p = self.c_mat.shape[0]
        s = self.l_mat.shape[1]
        if self.a_mat.shape != (n, n):
            raise DesignError("state matrix must be square")
        if self.b_mat.shape != (n, m) or self.c_mat.shape != (p, n):
            raise DesignError("input/output matrix dimensions inconsistent with the state matrix")
        if self.delta_x.shape != (n,) or self.l_mat.shape != (n, s):
            raise DesignError("affine offset or fault matrix dimensions inconsistent")
        if self.op_state.shape != (n,) or self.op_input.shape != (m,):
            raise DesignError("operating point dimensions inconsistent")
        if p < s:
            raise DesignError(f"need at least as many outputs as faults (p={p} < s={s})")
        if s and np.linalg.matrix_rank(self.c_mat @ self.l_mat) < s:
            raise DesignError(
                "C @ L is not full column rank: the fault directions are not "
                "separable from the measured outputs, so no fault projector exists")
        if not is_detectable(self.a_mat, self.c_mat):
            raise DesignError("(A, C) is not detectable at this operating point")
        if not is_stabilizable(self.a_mat, self.b_mat):
            raise DesignError("(A, B) is not stabilizable at this operating point")

    @property
    def n_states(self) -> int:
        return self.a_mat.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b_mat.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c_mat.shape[0]

    @property
    def n_faults(self) -> int:
        return self.l_mat.shape[1]


def linearize(params: TrmsParams, op_state, op_input,
              fault_spec: FaultSpec | None = None,
              fd_step: float = FD_STEP) -> LocalModel:
    """Affine local model by central finite differences of the plant dynamics."""
    fault_spec = fault_spec or FaultSpec()
    x0 = np.asarray(op_state, dtype=float)
    u0 = np.asarray(op_input, dtype=float)
    n, m = x0.size, u0.size

    a_mat = np.zeros((n, n))
    for j in range(n):
        h = fd_step * max(1.0, abs(x0[j]))
        xp, xm = x0.copy(), x0.copy()
        xp[j] += h
        xm[j] -= h
        a_mat[:, j] = (plant.dynamics(xp, u0, params)
                       - plant.dynamics(xm, u0, params)) / (2.0 * h)
    b_mat = np.zeros((n, m))
    for j in range(m):
        h = fd_step * max(1.0, abs(u0[j]))
        up, um = u0.copy(), u0.copy()
        up[j] += h
        um[j] -= h
        b_mat[:, j] = (plant.dynamics(x0, up, params)
                       - plant.dynamics(x0, um, params)) / (2.0 * h)

    delta_x = plant.dynamics(x0, u0, params) - a_mat @ x0 - b_mat @ u0
    c_mat = fault_spec.output_matrix(n)
    l_mat = fault_spec.fault_matrix(b_mat)
    return LocalModel(a_mat, b_mat, c_mat, delta_x, l_mat, x0, u0)


@dataclass(frozen=True)
class ModelBank:
    """Ordered local models with Gaussian scheduling over the pitch angle."""

    models: tuple[LocalModel, ...]
    scheduling_nodes: np.ndarray
    weight_width: float = DEFAULT_SIGMA

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "scheduling_nodes",
                           np.array(self.scheduling_nodes, dtype=float))
        if not self.models:
            raise DesignError("a model bank needs at least one local model")
        if self.scheduling_nodes.shape != (len(self.models),):
            raise DesignError("one scheduling node per model is required")
        if len(self.models) > 1 and not np.all(np.diff(self.scheduling_nodes) > 0):
            raise DesignError("scheduling nodes must be strictly increasing")
        if not self.weight_width > 0:
            raise DesignError("weight width must be strictly positive")
        shapes = {(m.n_states, m.n_inputs, m.n_outputs, m.n_faults) for m in self.models}
        if len(shapes) != 1:
            raise DesignError("all local models in a bank must share dimensions")

    def __len__(self) -> int:
        return len(self.models)

    @property
    def c_mat(self) -> np.ndarray:
        return self.models[0].c_mat


def weights(bank: ModelBank, xi: float) -> np.ndarray:
    """Convex membership vector at the scheduling value xi."""
    d = (xi - bank.scheduling_nodes) / bank.weight_width
    mu = np.exp(-0.5 * d * d)
    return mu / mu.sum()


def blend(bank: ModelBank, mu) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Convex combination (A, B, dX) of the bank under the weights mu."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (len(bank),):
        raise ValueError(f"expected {len(bank)} weights, got shape {mu.shape}")
    if abs(mu.sum() - 1.0) > 1e-9 or mu.min() < -1e-9:
        raise ValueError("weights must be convex: nonnegative and summing to one")
    a = sum(w * m.a_mat for w, m in zip(mu, bank.models))
    b = sum(w * m.b_mat for w, m in zip(mu, bank.models))
    dx = sum(w * m.delta_x for w, m in zip(mu, bank.models))
    return a, b, dx


def build_bank(params: TrmsParams,
               nodes=DEFAULT_NODES,
               sigma: float = DEFAULT_SIGMA,
               fault_spec: FaultSpec | None = None,
               yaw: float = 0.0) -> ModelBank:
    """Trim and linearize the plant at each scheduling pitch angle."""
    models = []
    for alpha_v in nodes:
        x_star, u_star = plant.trim(alpha_v, yaw, params)
        models.append(linearize(params, x_star, u_star, fault_spec))
    return ModelBank(tuple(models), np.asarray(nodes, dtype=float), sigma)


def bank_to_doc(bank: ModelBank) -> dict:
    """JSON-serializable bank document (matrices row-major)."""
    return {
        "schema": "trms-ftc/bank-v1",
        "nodes": bank.scheduling_nodes.tolist(),
        "sigma": bank.weight_width,
        "models": [
            {
                "a": m.a_mat.tolist(),
                "b": m.b_mat.tolist(),
                "c": m.c_mat.tolist(),
                "delta_x": m.delta_x.tolist(),
                "l": m.l_mat.tolist(),
                "op_state": m.op_state.tolist(),
                "op_input": m.op_input.tolist(),
            }
            for m in bank.models
        ],
    }


def bank_from_doc(doc: dict) -> ModelBank:
    """Rebuild a bank from its JSON document, re-running all validity checks."""
    try:
        models = tuple(
            LocalModel(m["a"], m["b"], m["c"], m["delta_x"], m["l"],
                       m["op_state"], m["op_input"])
            for m in doc["models"]
        )
        return ModelBank(models, doc["nodes"], float(doc["sigma"]))
    except KeyError as exc:
        raise DesignError(f"bank document is missing key {exc}") from exc

"""Closed-loop scenario execution: fault injection, orchestration, traces, metrics.

One scenario is one sequential loop over a uniform time grid.  Per step the
loop reads the plant output, computes the blend weights from the fault-free
estimate, forms the nominal and fault-tolerant commands, logs the sample,
then advances the plant and both observers by one RK4 step with all loop
signals held.  Everything is deterministic for a given configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from io import StringIO

import numpy as np

from . import ftc, observer, plant, synthesis
from .config import ScenarioConfig
from .exceptions import ConfigError
from .multimodel import ModelBank, build_bank, weights
from .params import TrmsParams


@dataclass(frozen=True)
class FaultProfile:
    """Deterministic fault signal description.

    channels are zero-based indices into the fault vector; amplitude is in
    volts for input-channel injection and follows the L convention otherwise.
    """

    kind: str = "none"
    channels: tuple[int, ...] = (0,)
    amplitude: float = 0.0
    t_start: float = 0.0
    t_stop: float = 0.0
    period: float = 1.0
    duty: float = 0.5

    def __post_init__(self):
        if self.kind not in ("none", "step", "intermittent", "ramp"):
            raise ConfigError(f"unknown fault kind {self.kind!r}")
        if not math.isfinite(self.amplitude):
            raise ConfigError("fault amplitude must be finite")
        if self.kind != "none":
            if not self.t_start < self.t_stop:
                raise ConfigError("fault window requires t_start < t_stop")
            if self.kind == "intermittent" and not self.period > 0:
                raise ConfigError("intermittent faults need a positive period")

    def validate_horizon(self, t_end: float):
        if self.kind != "none" and self.t_stop > t_end:
            raise ConfigError("fault t_stop must not exceed the scenario horizon")


def fault_signal(profile: FaultProfile, t: float, n_faults: int) -> np.ndarray:
    """Fault vector at time t."""
    f = np.zeros(n_faults)
    if profile.kind == "none" or not profile.t_start <= t < profile.t_stop:
        return f
    if profile.kind == "step":
        level = profile.amplitude
    elif profile.kind == "ramp":
        level = profile.amplitude * (t - profile.t_start) / (profile.t_stop - profile.t_start)
    else:  # intermittent: square pulses, on at the leading edge
        phase = (t - profile.t_start) % profile.period
        level = profile.amplitude if phase < profile.duty * profile.period else 0.0
    for ch in profile.channels:
        if not 0 <= ch < n_faults:
            raise ConfigError(f"fault channel {ch + 1} outside 1..{n_faults}")
        f[ch] = level
    return f


@dataclass(frozen=True)
class SimTrace:
    """Uniform-grid record of one closed-loop run."""

    t: np.ndarray          # (n,)
    x: np.ndarray          # (n, 6) plant state
    x_hat: np.ndarray      # (n, 6) fault-free estimate
    x_hat_f: np.ndarray    # (n, 6) faulty-plant estimate
    ref: np.ndarray        # (n, 2) pitch/yaw references
    u: np.ndarray          # (n, 2) applied command
    f: np.ndarray          # (n, s) true fault
    f_hat: np.ndarray      # (n, s) fault estimate

    def __post_init__(self):
        n = self.t.shape[0]
        for name in ("x", "x_hat", "x_hat_f", "ref", "u", "f", "f_hat"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"trace column {name} length mismatch")

    @property
    def n_faults(self) -> int:
        return self.f.shape[1]

    def header(self) -> str:
        s = self.n_faults
        cols = (["t"]
                + [f"x{i}" for i in range(1, 7)]
                + [f"xh{i}" for i in range(1, 7)]
                + [f"xf{i}" for i in range(1, 7)]
                + ["ref_av", "ref_ah", "u_v", "u_h"]
                + [f"f{i}" for i in range(1, s + 1)]
                + [f"fhat{i}" for i in range(1, s + 1)])
        return ",".join(cols)

    def to_csv(self, path_or_buf) -> None:
        data = np.column_stack([self.t, self.x, self.x_hat, self.x_hat_f,
                                self.ref, self.u, self.f, self.f_hat])
        np.savetxt(path_or_buf, data, fmt="%.9g", delimiter=",",
                   header=self.header(), comments="")

    def to_csv_text(self) -> str:
        buf = StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def trace_from_csv(path_or_buf) -> SimTrace:
    if isinstance(path_or_buf, str):
        with open(path_or_buf, "r", encoding="utf-8") as fh:
            return trace_from_csv(fh)
    header = path_or_buf.readline().strip()
    cols = header.split(",")
    fixed = (["t"]
             + [f"x{i}" for i in range(1, 7)]
             + [f"xh{i}" for i in range(1, 7)]
             + [f"xf{i}" for i in range(1, 7)]
             + ["ref_av", "ref_ah", "u_v", "u_h"])
    if cols[:len(fixed)] != fixed:
        raise ConfigError("trace header does not match the expected column layout")
    extra = cols[len(fixed):]
    if len(extra) % 2 != 0:
        raise ConfigError("trace fault columns are not paired with estimates")
    s = len(extra) // 2
    expect = [f"f{i}" for i in range(1, s + 1)] + [f"fhat{i}" for i in range(1, s + 1)]
    if extra != expect:
        raise ConfigError("trace fault column names do not match the expected layout")
    data = np.loadtxt(path_or_buf, delimiter=",", ndmin=2)
    if data.shape[0] == 0:
        raise ConfigError("trace holds no samples")
    k = len(fixed)
    return SimTrace(data[:, 0], data[:, 1:7], data[:, 7:13], data[:, 13:19],
                    data[:, 19:21], data[:, 21:23],
                    data[:, k:k + s], data[:, k + s:k + 2 * s])


@dataclass(frozen=True)
class Metrics:
    """Windowed tracking and estimation quality figures.

    Window-less quantities are None when their window is empty.
    """

    rms_pitch_pre: float | None
    rms_pitch_post: float | None
    rms_yaw_pre: float | None
    rms_yaw_post: float | None
    fault_rms: float | None
    settle_pitch: float | None
    settle_yaw: float | None
    sat_duty_main: float
    sat_duty_tail: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _rms(values: np.ndarray) -> float | None:
    if values.size == 0:
        return None
    return float(np.sqrt(np.mean(values ** 2)))


def _settle_time(t: np.ndarray, err: np.ndarray, band: float) -> float | None:
    outside = np.where(np.abs(err) > band)[0]
    if outside.size == 0:
        return float(t[0])
    if outside[-1] + 1 >= t.size:
        return None
    return float(t[outside[-1] + 1])


def compute_metrics(trace: SimTrace, profile: FaultProfile | None = None,
                    u_sat: float = 2.5, band: float = 0.02) -> Metrics:
    """Windowed RMS errors split at the fault onset.

    Without a profile the split point is inferred from the first nonzero
    logged fault sample; a fault-free trace gets a single pre window.
    """
    if trace.t.size == 0:
        raise ValueError("metrics need a nonempty trace")
    t_split = None
    if profile is not None and profile.kind != "none":
        t_split = profile.t_start
    elif np.any(trace.f != 0.0):
        t_split = float(trace.t[np.argmax(np.any(trace.f != 0.0, axis=1))])

    e_pitch = trace.ref[:, 0] - trace.x[:, 0]
    e_yaw = trace.ref[:, 1] - trace.x[:, 3]
    if t_split is None:
        pre = np.ones(trace.t.size, dtype=bool)
        post = np.zeros(trace.t.size, dtype=bool)
    else:
        pre = trace.t < t_split
        post = ~pre

    fault_rms = None
    if trace.n_faults:
        fault_rms = _rms(np.linalg.norm(trace.f - trace.f_hat, axis=1))

    lim = u_sat * (1.0 - 1e-9)
    return Metrics(
        rms_pitch_pre=_rms(e_pitch[pre]),
        rms_pitch_post=_rms(e_pitch[post]),
        rms_yaw_pre=_rms(e_yaw[pre]),
        rms_yaw_post=_rms(e_yaw[post]),
        fault_rms=fault_rms,
        settle_pitch=_settle_time(trace.t, e_pitch, band),
        settle_yaw=_settle_time(trace.t, e_yaw, band),
        sat_duty_main=float(np.mean(np.abs(trace.u[:, 0]) >= lim)),
        sat_duty_tail=float(np.mean(np.abs(trace.u[:, 1]) >= lim)),
    )


def profile_from_config(cfg: ScenarioConfig) -> FaultProfile:
    fc = cfg.fault
    return FaultProfile(kind=fc.kind,
                        channels=tuple(c - 1 for c in fc.channels),
                        amplitude=fc.amplitude,
                        t_start=fc.t_start, t_stop=fc.t_stop,
                        period=fc.period, duty=fc.duty)


def _resolve_initial_state(cfg: ScenarioConfig, params: TrmsParams,
                           reference: ftc.Reference,
                           cache: ftc.TrimCache) -> np.ndarray:
    spec = cfg.sim.initial_state
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    if isinstance(spec, dict):
        av, ah = spec["trim"]
        return cache.get(float(av), float(ah))[0].copy()
    av, ah = reference.at(0.0)
    return cache.get(av, ah)[0].copy()


def run_scenario(cfg: ScenarioConfig) -> SimTrace:
    """Execute one closed-loop fault-injection scenario.

    Synthesis failures and infeasible trims surface before the first step.
    """
    params = cfg.trms_params()
    bank = build_bank(params, nodes=cfg.bank.nodes, sigma=cfg.bank.sigma,
                      fault_spec=cfg.bank.fault_spec())
    zeta, rho = cfg.controller.knobs()
    gains, uio = synthesis.design_gains(bank, zeta=zeta, rho=rho)
    profile = profile_from_config(cfg)
    profile.validate_horizon(cfg.sim.t_end)

    reference = cfg.sim.references.reference()
    cache = ftc.TrimCache(params)
    for av, ah in sorted(reference.values()):
        cache.get(av, ah)  # fail on infeasible references before t = 0

    dt = cfg.sim.dt
    n_steps = int(round(cfg.sim.t_end / dt))
    n_faults = bank.models[0].n_faults
    s_dim = n_faults
    x0 = _resolve_initial_state(cfg, params, reference, cache)

    c_mat = bank.c_mat
    p_dim = c_mat.shape[0]
    n_models = len(bank)
    nodes = bank.scheduling_nodes
    inv_two_sigma2 = 0.5 / (bank.weight_width ** 2)

    a_stack = np.stack([m.a_mat for m in bank.models])
    b_stack = np.stack([m.b_mat for m in bank.models])
    l_stack = np.stack([m.l_mat for m in bank.models])
    dx_stack = np.stack([m.delta_x for m in bank.models])
    h_stack = np.stack(uio.h_proj)
    k1_stack = np.stack(gains.k1)
    s_stack = np.stack(gains.s_comp)
    k2_stack = np.stack(uio.k2)
    knom_stack = np.stack(uio.k_nom)
    m_uio_stack = a_stack - k2_stack @ c_mat
    m_nom_stack = a_stack - knom_stack @ c_mat
    # flattened views for fast per-step blending (mu @ 2d, then reshape)
    k1_flat = np.ascontiguousarray(k1_stack.reshape(n_models, -1))
    s_flat = np.ascontiguousarray(s_stack.reshape(n_models, -1))
    h_flat = np.ascontiguousarray(h_stack.reshape(n_models, -1))
    m_uio_flat = np.ascontiguousarray(m_uio_stack.reshape(n_models, -1))
    m_nom_flat = np.ascontiguousarray(m_nom_stack.reshape(n_models, -1))

    # per-step reference values and their trims
    t_grid = np.arange(n_steps + 1) * dt
    ref_arr = np.empty((n_steps + 1, 2))
    x_star_arr = np.empty((n_steps + 1, 6))
    u_star_arr = np.empty((n_steps + 1, 2))
    for k, t in enumerate(t_grid):
        av, ah = reference.at(float(t))
        ref_arr[k] = (av, ah)
        xs, us = cache.get(av, ah)
        x_star_arr[k] = xs
        u_star_arr[k] = us
    f_arr = np.empty((n_steps + 1, s_dim))
    for k, t in enumerate(t_grid):
        f_arr[k] = fault_signal(profile, float(t), s_dim)

    noise_std = cfg.sim.noise.std
    rng = np.random.default_rng(cfg.sim.noise.seed) if noise_std > 0 else None
    tau_f = cfg.sim.tau_f
    filt_decay = math.exp(-dt / tau_f)
    filt_gain = filt_decay * dt / (tau_f * tau_f)
    u_lim = params.u_sat
    compensation = cfg.controller.compensation
    frozen = cfg.sim.plant == "frozen"
    input_injection = cfg.sim.injection == "input"
    fault_input_cols = tuple(c - 1 for c in cfg.bank.fault_input_channels)

    # logs
    x_log = np.empty((n_steps + 1, 6))
    xh_log = np.empty((n_steps + 1, 6))
    xf_log = np.empty((n_steps + 1, 6))
    u_log = np.empty((n_steps + 1, 2))
    fhat_log = np.empty((n_steps + 1, s_dim))

    x = x0.copy()
    x_tuple = tuple(x.tolist())
    x_hat = x0.copy()
    x_hat_f = x0.copy()
    f_hat = np.zeros(s_dim)
    y0 = c_mat @ x0
    filt_y = y0.copy()
    filt_dy = np.zeros(p_dim)
    filt_w = np.zeros(s_dim)
    filt_w2 = np.zeros(s_dim)
    obs_mat = np.zeros((12, 12))
    obs_vec = np.zeros(12)
    est_state = np.zeros(12)

    for k in range(n_steps + 1):
        y = c_mat @ x
        if rng is not None:
            y = y + noise_std * rng.standard_normal(p_dim)

        d = (x_hat[0] - nodes)
        mu = np.exp(-inv_two_sigma2 * d * d)
        mu /= mu.sum()

        k1_mu = (mu @ k1_flat).reshape(2, 6)
        u_nom = np.clip(u_star_arr[k] - k1_mu @ (x_hat - x_star_arr[k]), -u_lim, u_lim)
        u_f = u_nom + k1_mu @ (x_hat - x_hat_f)
        if compensation:
            u_f = u_f - (mu @ s_flat).reshape(2, s_dim) @ f_hat
        u_f = np.clip(u_f, -u_lim, u_lim)

        x_log[k] = x
        xh_log[k] = x_hat
        xf_log[k] = x_hat_f
        u_log[k] = u_f
        fhat_log[k] = f_hat

        if k == n_steps:
            break
        f_now = f_arr[k]

        # plant advance with held command and fault
        if input_injection:
            u_eff = u_f.copy()
            for j, col in enumerate(fault_input_cols):
                u_eff[col] += f_now[j]
            dist = (0.0,) * 6
        else:
            d_true = (x[0] - nodes)
            mu_true = np.exp(-inv_two_sigma2 * d_true * d_true)
            mu_true /= mu_true.sum()
            dist = tuple(np.tensordot(mu_true, l_stack, axes=1) @ f_now)
            u_eff = u_f
        if frozen:
            mdl = bank.models[0]
            c_vec = mdl.b_mat @ u_eff + mdl.delta_x + np.asarray(dist)
            x = observer.affine_rk4(mdl.a_mat, c_vec, x, dt)
        else:
            x_tuple = plant._rk4(tuple(x.tolist()), u_eff[0], u_eff[1], dt, params, dist)
            x = np.array(x_tuple)

        # both observers advance together (block-diagonal affine system);
        # the faulty-channel estimator uses u_f and the lagged f_hat, the
        # fault-free one the nominal command
        bu = b_stack @ u_f
        pred = (a_stack @ x_hat_f + bu + dx_stack) @ c_mat.T
        w_pred = mu @ np.einsum("isp,ip->is", h_stack, pred)
        obs_mat[:6, :6] = (mu @ m_uio_flat).reshape(6, 6)
        obs_mat[6:, 6:] = (mu @ m_nom_flat).reshape(6, 6)
        obs_vec[:6] = mu @ (bu + (l_stack @ f_hat) + dx_stack + (k2_stack @ y))
        obs_vec[6:] = mu @ ((b_stack @ u_nom) + dx_stack + (knom_stack @ y))
        est_state[:6] = x_hat_f
        est_state[6:] = x_hat
        est = observer.affine_rk4(obs_mat, obs_vec, est_state, dt)
        x_hat_f = est[:6]
        x_hat = est[6:]

        # matched filters: measured derivative vs model prediction
        dev = filt_y - y
        filt_y = y + filt_decay * dev
        filt_dy = filt_decay * filt_dy - filt_gain * dev
        dw = filt_w - w_pred
        filt_w = w_pred + filt_decay * dw
        filt_w2 = w_pred + filt_decay * ((dt / tau_f) * dw + (filt_w2 - w_pred))
        f_hat = (mu @ h_flat).reshape(s_dim, p_dim) @ filt_dy - filt_w2

    return SimTrace(t_grid, x_log, xh_log, xf_log, ref_arr, u_log,
                    f_arr, fhat_log)

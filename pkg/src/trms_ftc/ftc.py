"""Tracking command and fault-tolerant control augmentation.

The nominal command is a trim feedforward plus blended state feedback on the
fault-free estimate.  The fault-tolerant command adds the blended
compensation term -S f_hat and a correction K1 (x_hat - x_hat_f) pulling the
faulty plant back toward the fault-free trajectory.  Saturation is applied
after augmentation; there is no anti-windup.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from . import plant
from .multimodel import ModelBank
from .params import TrmsParams
from .synthesis import FtcGains


@dataclass(frozen=True)
class Reference:
    """Piecewise-constant reference angles given as (time, value) breakpoints.

    Breakpoint times must be nondecreasing and start at or before t = 0.
    """

    alpha_v: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    alpha_h: tuple[tuple[float, float], ...] = ((0.0, 0.0),)

    def __post_init__(self):
        for name in ("alpha_v", "alpha_h"):
            pts = tuple((float(t), float(v)) for t, v in getattr(self, name))
            if not pts:
                raise ValueError(f"reference {name} needs at least one breakpoint")
            times = [t for t, _ in pts]
            if times != sorted(times):
                raise ValueError(f"reference {name} breakpoints must be time-sorted")
            if times[0] > 0.0:
                raise ValueError(f"reference {name} must define a value at t = 0")
            object.__setattr__(self, name, pts)

    @staticmethod
    def _eval(pts, t: float) -> float:
        idx = bisect_right([bp[0] for bp in pts], t) - 1
        return pts[max(idx, 0)][1]

    def at(self, t: float) -> tuple[float, float]:
        return self._eval(self.alpha_v, t), self._eval(self.alpha_h, t)

    def values(self) -> set[tuple[float, float]]:
        """All (alpha_v, alpha_h) pairs the schedule can produce."""
        vs = {v for _, v in self.alpha_v}
        hs = {h for _, h in self.alpha_h}
        return {(v, h) for v in vs for h in hs}


class TrimCache:
    """Memoizes trim solutions per (pitch, yaw) reference pair."""

    def __init__(self, params: TrmsParams):
        self._params = params
        self._cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}

    def get(self, alpha_v: float, alpha_h: float) -> tuple[np.ndarray, np.ndarray]:
        key = (alpha_v, alpha_h)
        if key not in self._cache:
            self._cache[key] = plant.trim(alpha_v, alpha_h, self._params)
        return self._cache[key]


def blended_gain(gains: FtcGains, mu) -> np.ndarray:
    """Convex combination of the per-model feedback gains."""
    return sum(w * k for w, k in zip(np.asarray(mu, dtype=float), gains.k1))


def nominal_control(gains: FtcGains, bank: ModelBank, mu, x_hat,
                    alpha_v_ref: float, alpha_h_ref: float,
                    params: TrmsParams, trim_cache: TrimCache | None = None) -> np.ndarray:
    """Saturated tracking command u = u*(ref) - K1(mu) (x_hat - x*(ref))."""
    cache = trim_cache if trim_cache is not None else TrimCache(params)
    x_star, u_star = cache.get(alpha_v_ref, alpha_h_ref)
    k1 = blended_gain(gains, mu)
    u = u_star - k1 @ (np.asarray(x_hat, dtype=float) - x_star)
    return plant.saturate(u, params.u_sat)


def ftc_augment(gains: FtcGains, mu, u_nom, f_hat, x_hat, x_hat_f,
                u_sat: float, compensation: bool = True) -> np.ndarray:
    """Fault-tolerant command built on top of the nominal one.

    With compensation disabled only the -S f_hat term is dropped; the
    estimate-correction term stays, which is the baseline used for paired
    fault-injection comparisons.
    """
    mu = np.asarray(mu, dtype=float)
    f_hat = np.asarray(f_hat, dtype=float)
    dx = np.asarray(x_hat, dtype=float) - np.asarray(x_hat_f, dtype=float)
    u = np.asarray(u_nom, dtype=float).copy()
    for w, k1, s in zip(mu, gains.k1, gains.s_comp):
        u = u + w * (k1 @ dx)
        if compensation:
            u = u - w * (s @ f_hat)
    return plant.saturate(u, u_sat)

"""Physical parameters of the twin-rotor rig.

The defaults reproduce the manufacturer-derived constant set for the
bench-top twin rotor: composite mechanical constants, inertias, motor
time constants and gains, viscous friction, and the two pairs of
rotor-speed / thrust polynomials.  Every field can be overridden through
a flat key-value JSON document (see :func:`params_from_dict`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

from .exceptions import ConfigError

# Rotor-speed and thrust maps, stored as polynomial coefficients in
# descending powers with the constant term omitted (both maps send 0 to 0).
MAIN_SPEED_COEFFS = (90.90, 599.73, -129.26, -1238.64, 63.45, 1238.41)
MAIN_THRUST_COEFFS = (-3.48e-12, 1.09e-9, 4.123e-6, -1.632e-4, 9.544e-2)
TAIL_SPEED_COEFFS = (2020.0, 194.69, -4283.15, -262.87, 3796.83)
TAIL_THRUST_COEFFS = (-3.0e-14, 1.595e-11, 2.511e-7, -1.808e-4, 0.8080)


@dataclass(frozen=True)
class TrmsParams:
    """Constant set for the twin-rotor plant.

    Attributes:
        a_const..h_const: composite mechanical constants (kg m^2).
        s_f: balance scale (dimensionless thrust-to-torque fudge factor).
        j_v: vertical-plane inertia sum (kg m^2).
        j_mr, j_tr: main/tail motor-propeller inertias (kg m^2).
        l_m, l_t: main/tail beam lengths (m).
        t_mr, t_tr: main/tail rotor time constants (s).
        k_mr, k_tr: motor static gains.
        k_v, k_h: viscous friction coefficients.
        g: gravitational acceleration (m/s^2).
        u_sat: symmetric actuator voltage limit (V).
        *_coeffs: rotor speed / thrust polynomials, descending powers,
            no constant term.  The tail thrust linear coefficient is an
            order of magnitude above the main one; it is kept as published
            and can be overridden through configuration.
    """

    a_const: float = 0.0946875
    b_const: float = 0.11046
    c_const: float = 0.01986
    d_const: float = 0.04988
    e_const: float = 0.004745
    f_const: float = 0.006230
    h_const: float = 0.048210
    s_f: float = 0.000843318
    j_v: float = 0.055448
    j_mr: float = 0.000016543
    j_tr: float = 0.0000265
    l_m: float = 0.24
    l_t: float = 0.25
    t_mr: float = 1.432
    t_tr: float = 0.3842
    k_mr: float = 1.0
    k_tr: float = 1.0
    k_v: float = 0.0095
    k_h: float = 0.00545371
    g: float = 9.81
    u_sat: float = 2.5
    main_speed_coeffs: tuple[float, ...] = MAIN_SPEED_COEFFS
    main_thrust_coeffs: tuple[float, ...] = MAIN_THRUST_COEFFS
    tail_speed_coeffs: tuple[float, ...] = TAIL_SPEED_COEFFS
    tail_thrust_coeffs: tuple[float, ...] = TAIL_THRUST_COEFFS

    def __post_init__(self):
        for name in ("j_v", "j_mr", "j_tr", "t_mr", "t_tr", "l_m", "l_t", "g"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"parameter {name!r} must be strictly positive")
        if self.u_sat <= 0.0:
            raise ConfigError("parameter 'u_sat' must be strictly positive")
        for name in ("main_speed_coeffs", "main_thrust_coeffs",
                     "tail_speed_coeffs", "tail_thrust_coeffs"):
            coeffs = tuple(float(c) for c in getattr(self, name))
            if not all(math.isfinite(c) for c in coeffs):
                raise ConfigError(f"parameter {name!r} contains non-finite values")
            object.__setattr__(self, name, coeffs)
        # yaw inertia D cos^2 + E sin^2 + F must stay positive for every pitch
        if min(self.d_const, self.e_const) + self.f_const <= 0.0:
            raise ConfigError("horizontal inertia d/e/f constants admit a non-positive inertia")


_FIELD_NAMES = {f.name for f in fields(TrmsParams)}


def params_from_dict(overrides: dict | None, base: TrmsParams | None = None) -> TrmsParams:
    """Build a parameter set from a flat override dict.

    Keys must be TrmsParams field names; absent keys keep the defaults of
    ``base`` (or the stock constants).  Unknown keys are rejected so typos
    fail loudly.
    """
    base = base if base is not None else TrmsParams()
    if not overrides:
        return base
    unknown = set(overrides) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
    cleaned = {}
    for key, value in overrides.items():
        if key.endswith("_coeffs"):
            cleaned[key] = tuple(float(v) for v in value)
        else:
            cleaned[key] = float(value)
    return replace(base, **cleaned)


def load_params(path: str) -> TrmsParams:
    """Read a flat JSON override file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("parameter file must hold a JSON object")
    return params_from_dict(doc)

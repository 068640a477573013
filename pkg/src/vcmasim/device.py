"""Macrospin MTJ device model: parameters, effective-field terms, resistance
and spin current.

Magnetization arrays use the component axis first, so every function accepts
either a single vector of shape ``(3,)`` or a batch of shape ``(3, n)``.
Axis convention: x is the short in-plane axis, y the long in-plane axis and
z the film normal.
"""
from dataclasses import asdict, dataclass, field, fields, replace
import math

import numpy as np
from scipy import constants

from .magnetostatics import elliptical_cylinder_factors

MU_0 = constants.mu_0
HBAR = constants.hbar
K_B = constants.k
Q_E = constants.e
MU_B = constants.physical_constants["Bohr magneton"][0]

#: (Nx, Ny, Nz) of the 40 x 70 x 0.9 nm elliptical free layer, from the
#: magnetostatic surface-charge quadrature.  Regression constant.
TABLE_I_DEMAG = (0.038469406893872536, 0.017541166996440045, 0.943989426109687)


class InvalidParameterError(ValueError):
    """Raised for physically meaningless device or solver parameters."""


@dataclass(frozen=True)
class DeviceParams:
    """Free-layer geometry, material constants and electrical calibration.

    Defaults are the nominal device: 40 x 70 x 0.9 nm elliptical free layer,
    1.3 nm oxide, Ms = 1257.3 kA/m, alpha = 0.075, 300 K,
    xi = 200 fJ/(V m), Ki = 0.9267 mJ/m^2.  ``polarization``,
    ``r_p`` and ``r_ap`` are calibration knobs with no measured source; the
    defaults come from the calibration pass in ``demos/calibration.py``.

    ``demag`` overrides the magnetostatic factors; leave it ``None`` to use
    the elliptical-cylinder values for the given geometry.
    """

    width: float = 40e-9
    length: float = 70e-9
    t_fl: float = 0.9e-9
    t_ox: float = 1.3e-9
    ms: float = 1257.3e3
    alpha: float = 0.075
    temperature: float = 300.0
    xi: float = 200e-15
    k_i: float = 0.9267e-3
    polarization: float = 0.6
    r_p: float = 7e3
    r_ap: float = 56e3
    pinned: tuple = (0.0, 0.0, 1.0)
    demag: tuple | None = field(default=None)

    def __post_init__(self):
        for name in ("width", "length", "t_fl", "t_ox", "ms", "xi", "k_i"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive, got {value!r}")
        if not (math.isfinite(self.temperature) and self.temperature >= 0):
            raise InvalidParameterError(f"temperature must be >= 0, got {self.temperature!r}")
        if not 0 <= self.alpha < 1:
            raise InvalidParameterError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if not 0 < self.polarization < 1:
            raise InvalidParameterError(f"polarization must lie in (0, 1), got {self.polarization!r}")
        if not 0 < self.r_p < self.r_ap:
            raise InvalidParameterError("resistances must satisfy 0 < r_p < r_ap")
        pinned = tuple(float(c) for c in self.pinned)
        if len(pinned) != 3 or abs(math.sqrt(sum(c * c for c in pinned)) - 1.0) > 1e-12:
            raise InvalidParameterError(f"pinned direction must be a unit 3-vector, got {self.pinned!r}")
        object.__setattr__(self, "pinned", pinned)
        if self.demag is not None:
            demag = tuple(float(n) for n in self.demag)
            if len(demag) != 3 or min(demag) < 0 or abs(sum(demag) - 1.0) > 1e-9:
                raise InvalidParameterError(f"demag factors must be >= 0 and sum to 1, got {self.demag!r}")
            object.__setattr__(self, "demag", demag)

    # derived quantities
    @property
    def area(self):
        return math.pi / 4.0 * self.width * self.length

    @property
    def volume(self):
        return self.area * self.t_fl

    @property
    def n_spins(self):
        return self.ms * self.volume / MU_B

    @property
    def gamma(self):
        """Gyromagnetic ratio 2 mu_B mu_0 / hbar in m/(A s)."""
        return 2.0 * MU_B * MU_0 / HBAR

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        d = asdict(self)
        d["pinned"] = list(self.pinned)
        d["demag"] = None if self.demag is None else list(self.demag)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(f"unknown device parameter(s): {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("pinned", "demag"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def demag_factors(params):
    """Diagonal demagnetizing tensor (Nx, Ny, Nz) of the free layer."""
    if params.demag is not None:
        return params.demag
    return elliptical_cylinder_factors(params.width, params.length, params.t_fl)


def _column(vec, like):
    """Broadcast a fixed 3-vector against a (3,) or (3, n) array."""
    return np.asarray(vec, dtype=float).reshape((3,) + (1,) * (np.ndim(like) - 1))


def demag_field(m, params):
    """Shape-anisotropy field -Ms N m in A/m."""
    m = np.asarray(m, dtype=float)
    return -params.ms * _column(demag_factors(params), m) * m


def k_eff(u, params):
    """Voltage-modulated interfacial anisotropy Ki - xi U / t_ox (J/m^2)."""
    return params.k_i - params.xi * u / params.t_ox


def anisotropy_field_coefficient(u, params):
    """2 Ki_eff(U) / (mu0 Ms t_fl); the VCMA field is this times m_z z-hat."""
    return 2.0 * k_eff(u, params) / (MU_0 * params.ms * params.t_fl)


def anisotropy_field(m, u, params):
    """Interfacial perpendicular anisotropy field including the VCMA shift."""
    m = np.asarray(m, dtype=float)
    h = np.zeros_like(m)
    h[2] = anisotropy_field_coefficient(u, params) * m[2]
    return h


def deterministic_field(m, u, params):
    """Demag plus VCMA anisotropy field (no thermal term)."""
    return demag_field(m, params) + anisotropy_field(m, u, params)


def thermal_sigma(params, dt):
    """Per-component standard deviation of the thermal field for step ``dt``."""
    if not dt > 0:
        raise InvalidParameterError(f"time step must be positive, got {dt!r}")
    a = params.alpha
    return math.sqrt(a / (1.0 + a * a) * 2.0 * K_B * params.temperature
                     / (params.gamma * MU_0 * params.ms * params.volume * dt))


def thermal_field(params, dt, g):
    """Thermal field sigma * g for standard-normal samples ``g``."""
    return thermal_sigma(params, dt) * np.asarray(g, dtype=float)


def resistance(m, params):
    """Junction resistance from a two-state conductance interpolation."""
    m = np.asarray(m, dtype=float)
    p = params.pinned
    cos = p[0] * m[0] + p[1] * m[1] + p[2] * m[2]
    g = 0.5 * (1.0 + cos) / params.r_p + 0.5 * (1.0 - cos) / params.r_ap
    return 1.0 / g


def spin_current(u, m, params):
    """Spin current vector P U / R(m) along the pinned direction (A).

    Positive U drives the free layer toward the pinned direction.
    """
    m = np.asarray(m, dtype=float)
    amp = params.polarization * u / resistance(m, params)
    return _column(params.pinned, m) * amp


def energy(m, u, params):
    """Magnetic energy (J) of the demag and interfacial anisotropy terms."""
    m = np.asarray(m, dtype=float)
    nx, ny, nz = demag_factors(params)
    shape = 0.5 * MU_0 * params.ms ** 2 * params.volume * (nx * m[0] ** 2 + ny * m[1] ** 2 + nz * m[2] ** 2)
    return shape - k_eff(u, params) * params.area * m[2] ** 2


def effective_demag_z(u, params):
    """Net perpendicular demag coefficient Nz - Hk(U)/Ms.

    The south pole is stable along axis i while this is below N_i, so its
    crossings of Ny and Nx bound the voltage window of robust precession.
    """
    return demag_factors(params)[2] - anisotropy_field_coefficient(u, params) / params.ms


def critical_voltages(params):
    """Voltages at which the pole loses stability along y and along x."""
    nx, ny, nz = demag_factors(params)
    h0 = anisotropy_field_coefficient(0.0, params) / params.ms
    slope = h0 * params.xi / (params.k_i * params.t_ox)
    # Nz - h0 + slope*U = N_i
    return (ny - nz + h0) / slope, (nx - nz + h0) / slope

"""Demagnetizing factors of a uniformly magnetized elliptical cylinder.

The factors come from the magnetostatic self-energy of the surface charges.
Faces normal to z carry sigma = +-Ms; the lateral wall carries
sigma = Ms (n . e_i) for in-plane magnetization along e_i.  For each
direction the self-energy is reduced to a two-dimensional quadrature with an
integrable (at most logarithmic) singularity.

Lengths are rescaled by the largest dimension before integrating so the
quadrature sees O(1) numbers; the factors are scale invariant.
"""
from functools import lru_cache

import numpy as np
from scipy import integrate

_QUAD = dict(epsabs=0.0, limit=400)


def _strip_kernel(d, t):
    """Double line integral of 1/r over two parallel segments of length t
    separated by d:  int_0^t int_0^t dz dz' / sqrt(d^2 + (z-z')^2)."""
    # t*asinh(t/d) - (sqrt(t^2+d^2) - d), written without cancellation
    return 2.0 * (t * np.arcsinh(t / d) - t * t / (np.sqrt(t * t + d * d) + d))


def _lens_area(u):
    """Overlap area of two unit disks whose centres are u apart."""
    if u >= 2.0:
        return 0.0
    return 2.0 * np.arccos(u / 2.0) - (u / 2.0) * np.sqrt(4.0 - u * u)


def _inplane_factor(a, b, t, axis):
    area = np.pi * a * b

    def integrand(delta, theta):
        theta2 = theta + delta
        d = np.hypot(a * (np.cos(theta) - np.cos(theta2)),
                     b * (np.sin(theta) - np.sin(theta2)))
        if d == 0.0:
            return 0.0
        if axis == 0:
            w = b * b * np.cos(theta) * np.cos(theta2)
        else:
            w = a * a * np.sin(theta) * np.sin(theta2)
        return w * _strip_kernel(d, t)

    def inner(theta):
        # log singularity at delta = 0 sits on the split point
        lo = integrate.quad(integrand, -np.pi, 0.0, args=(theta,), epsrel=1e-12, **_QUAD)[0]
        hi = integrate.quad(integrand, 0.0, np.pi, args=(theta,), epsrel=1e-12, **_QUAD)[0]
        return lo + hi

    total = integrate.quad(inner, 0.0, 2.0 * np.pi, epsrel=1e-11, **_QUAD)[0]
    return total / (4.0 * np.pi * area * t)


def _normal_factor(a, b, t):
    area = np.pi * a * b

    def inner(phi):
        k = np.sqrt(np.cos(phi) ** 2 / a ** 2 + np.sin(phi) ** 2 / b ** 2)
        f = lambda rho: (1.0 - rho / np.sqrt(rho * rho + t * t)) * a * b * _lens_area(rho * k)
        rho_max = 2.0 / k
        pts = [p for p in (t, 10.0 * t) if p < rho_max]
        return integrate.quad(f, 0.0, rho_max, points=pts or None, epsrel=1e-12, **_QUAD)[0]

    total = integrate.quad(inner, 0.0, 2.0 * np.pi, epsrel=1e-11, **_QUAD)[0]
    return total / (2.0 * np.pi * area * t)


@lru_cache(maxsize=64)
def elliptical_cylinder_factors(width, length, thickness):
    """Return (Nx, Ny, Nz) for an elliptical cylinder.

    ``width`` is the in-plane diameter along x, ``length`` along y and
    ``thickness`` along z.  Any positive unit may be used.
    """
    if min(width, length, thickness) <= 0:
        raise ValueError("elliptical cylinder dimensions must be positive")
    scale = max(width, length, thickness)
    a, b, t = width / 2 / scale, length / 2 / scale, thickness / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        nx = _inplane_factor(a, b, t, 0)
        ny = _inplane_factor(a, b, t, 1)
        nz = _normal_factor(a, b, t)
    return float(nx), float(ny), float(nz)

"""Compiled stochastic Heun kernel for batches of independent trials.

Mirrors ``dynamics.heun_step`` operation for operation on scalars.  Each trial
is advanced independently, so results do not depend on batch composition.
"""
import numba
import numpy as np

from .device import Q_E, anisotropy_field_coefficient, demag_factors, thermal_sigma


def kernel_constants(params, u, dt):
    """Flat float64 vector of everything the kernel needs at voltage ``u``."""
    nx, ny, nz = demag_factors(params)
    ms = params.ms
    p = params.pinned
    sigma = thermal_sigma(params, dt) if params.temperature > 0 else 0.0
    return np.array([
        -ms * nx, -ms * ny, -ms * nz + anisotropy_field_coefficient(u, params),
        params.gamma, 1.0 / (Q_E * params.n_spins), params.polarization * u,
        1.0 / params.r_p, 1.0 / params.r_ap, p[0], p[1], p[2],
        params.alpha, sigma, dt, 1.0 / (1.0 + params.alpha ** 2),
    ])


@numba.njit(cache=True, inline="always")
def _rhs(mx, my, mz, hx, hy, hz, dx, dy, dz, g, s, pu, gp, gap, px, py, pz, al, inv):
    # total field: diagonal demag + anisotropy, plus the thermal sample
    hx = dx * mx + hx
    hy = dy * my + hy
    hz = dz * mz + hz
    cos = px * mx + py * my + pz * mz
    amp = pu * (0.5 * (1.0 + cos) * gp + 0.5 * (1.0 - cos) * gap)
    ix = amp * px
    iy = amp * py
    iz = amp * pz
    # I_s x m
    bx = iy * mz - iz * my
    by = iz * mx - ix * mz
    bz = ix * my - iy * mx
    ax = -g * (my * hz - mz * hy) + s * (my * bz - mz * by)
    ay = -g * (mz * hx - mx * hz) + s * (mz * bx - mx * bz)
    az = -g * (mx * hy - my * hx) + s * (mx * by - my * bx)
    return ((ax + al * (my * az - mz * ay)) * inv,
            (ay + al * (mz * ax - mx * az)) * inv,
            (az + al * (mx * ay - my * ax)) * inv)


@numba.njit(cache=True, nogil=True)
def advance(m, c, normals, n_steps, exit_mz, exit_phi, exit_step, step0):
    """Advance every column of ``m`` (3, n) by ``n_steps`` Heun steps in place.

    ``normals`` is (n, >= n_steps, 3) or empty for zero temperature.  When
    ``exit_mz`` is finite, the first step at which m_z rises to ``exit_mz`` is
    stored in ``exit_step`` (global index ``step0 + i + 1``) together with the
    azimuth in ``exit_phi``; trials already marked are skipped.
    """
    n = m.shape[1]
    dx, dy, dz, g, s, pu, gp, gap, px_, py_, pz_, al, sigma, dt, inv = (
        c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], c[9], c[10], c[11], c[12], c[13], c[14])
    noisy = normals.shape[0] > 0
    watch = exit_mz == exit_mz
    for j in range(n):
        mx = m[0, j]
        my = m[1, j]
        mz = m[2, j]
        for i in range(n_steps):
            if noisy:
                hx = sigma * normals[j, i, 0]
                hy = sigma * normals[j, i, 1]
                hz = sigma * normals[j, i, 2]
            else:
                hx = 0.0
                hy = 0.0
                hz = 0.0
            f0x, f0y, f0z = _rhs(mx, my, mz, hx, hy, hz, dx, dy, dz, g, s, pu, gp, gap, px_, py_, pz_, al, inv)
            qx = mx + dt * f0x
            qy = my + dt * f0y
            qz = mz + dt * f0z
            f1x, f1y, f1z = _rhs(qx, qy, qz, hx, hy, hz, dx, dy, dz, g, s, pu, gp, gap, px_, py_, pz_, al, inv)
            mx = mx + 0.5 * dt * (f0x + f1x)
            my = my + 0.5 * dt * (f0y + f1y)
            mz = mz + 0.5 * dt * (f0z + f1z)
            inv_norm = 1.0 / np.sqrt(mx * mx + my * my + mz * mz)
            mx = mx * inv_norm
            my = my * inv_norm
            mz = mz * inv_norm
            if watch and exit_step[j] < 0 and mz >= exit_mz:
                exit_step[j] = step0 + i + 1
                exit_phi[j] = np.arctan2(my, mx)
        m[0, j] = mx
        m[1, j] = my
        m[2, j] = mz

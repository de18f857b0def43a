"""Compiled geometry kernels for ray casting and disc/segment contact."""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def ray_cast(segments, ox, oy, angles, max_range):
    """Nearest hit distance along each ray, capped at ``max_range``."""
    k = angles.shape[0]
    out = np.empty(k)
    for r in range(k):
        dx = math.cos(angles[r])
        dy = math.sin(angles[r])
        best = max_range
        for m in range(segments.shape[0]):
            ex = segments[m, 2] - segments[m, 0]
            ey = segments[m, 3] - segments[m, 1]
            denom = dx * ey - dy * ex
            if abs(denom) <= 1e-12:
                continue
            wx = segments[m, 0] - ox[r]
            wy = segments[m, 1] - oy[r]
            t = (wx * ey - wy * ex) / denom
            s = (wx * dy - wy * dx) / denom
            if t >= 0.0 and 0.0 <= s <= 1.0 and t < best:
                best = t
        out[r] = best
    return out


@njit(cache=True)
def nearest_segment(segments, x, y):
    """(distance, normal x, normal y) from a point to the closest segment."""
    best = np.inf
    nx = 0.0
    ny = 0.0
    for m in range(segments.shape[0]):
        px = segments[m, 0]
        py = segments[m, 1]
        ex = segments[m, 2] - px
        ey = segments[m, 3] - py
        ee = ex * ex + ey * ey
        u = 0.0
        if ee > 1e-18:
            u = ((x - px) * ex + (y - py) * ey) / ee
            u = min(1.0, max(0.0, u))
        qx = x - (px + u * ex)
        qy = y - (py + u * ey)
        d = math.sqrt(qx * qx + qy * qy)
        if d < best:
            best = d
            if d > 1e-12:
                nx = qx / d
                ny = qy / d
            else:
                ln = math.sqrt(max(ee, 1e-18))
                nx = -ey / ln
                ny = ex / ln
    return best, nx, ny


@njit(cache=True)
def perimeter_rays(segments, x, y, theta, radius, angles, max_range):
    """Ray distances for sensors mounted on a disc rim at body-frame ``angles``."""
    k = angles.shape[0]
    ox = np.empty(k)
    oy = np.empty(k)
    bearings = np.empty(k)
    for r in range(k):
        b = angles[r] + theta
        bearings[r] = b
        ox[r] = x + radius * math.cos(b)
        oy[r] = y + radius * math.sin(b)
    return ray_cast(segments, ox, oy, bearings, max_range)


@njit(cache=True)
def exp_response(d, d0, g0, d1, g1, g_max, max_range):
    """Exponential distance response through (d0, g0) and (d1, g1), zero past ``max_range``."""
    out = np.empty(d.shape[0])
    ratio = g1 / g0
    for r in range(d.shape[0]):
        if d[r] > max_range:
            out[r] = 0.0
        else:
            g = g0 * ratio ** ((d[r] - d0) / (d1 - d0))
            out[r] = min(g_max, max(0.0, g))
    return out

"""Planar chord functions, the chord bound on the transform, and rolling.

The chord at depth delta below the support line in direction theta controls
the transform magnitude: |transform(rho theta)| is at most diameter/(2 rho)
times the two chords at depth 1/(2 rho).  A body that rolls unimpeded inside
a disc has all its chords dominated by the disc's, which yields the
|freq|^{-3/2} decay without any smoothness assumption.
"""

from __future__ import annotations

import math

import numpy as np

from .bodies import Ellipsoid, PlanarSupportBody, _golden_max

_CHORD_BISECT_ITERS = 60
_ROLL_TOL = 1e-9


def _require_planar(body):
    if body.dimension != 2:
        raise ValueError("chord geometry is planar only")


def chord_length(body, depth, direction):
    """Length of the chord perpendicular to ``direction`` at given depth.

    The chord is the slice { x in body : x . u = h(u) - depth }; depth 0
    touches the boundary (length 0) and depths beyond the width give 0.
    """
    _require_planar(body)
    if depth < 0.0:
        raise ValueError("depth must be nonnegative")
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    theta = math.atan2(u[1], u[0])
    width = body.support(u) + body.support(-u)
    # Tangency slices are single points; report their length-0 exactly rather
    # than the sqrt(machine-eps) blur a root solve would produce.
    if depth == 0.0 or depth >= width:
        return 0.0
    level = body.support(u) - depth

    # Boundary point at normal angle psi projected on u is strictly monotone
    # on each side of theta, so one bisection per side finds the endpoints.
    def proj(psi):
        return body.boundary_at_angle(psi) @ u

    lo, hi = theta, theta + math.pi
    for _ in range(_CHORD_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if proj(mid) > level:
            lo = mid
        else:
            hi = mid
    end_a = body.boundary_at_angle(0.5 * (lo + hi))
    lo, hi = theta - math.pi, theta
    for _ in range(_CHORD_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if proj(mid) > level:
            hi = mid
        else:
            lo = mid
    end_b = body.boundary_at_angle(0.5 * (lo + hi))
    return float(np.linalg.norm(end_a - end_b))


def disc_chord_length(radius, depth):
    """Closed form 2 sqrt(depth (2 radius - depth)) for a disc, 0 past width."""
    if depth < 0.0:
        raise ValueError("depth must be nonnegative")
    if depth >= 2.0 * radius:
        return 0.0
    return 2.0 * math.sqrt(depth * (2.0 * radius - depth))


def chord_fourier_bound(body, rho, direction):
    """Chord bound for |transform(rho * direction)|.

    Evaluates diameter/(2 rho) * (chord(1/(2 rho), u) + chord(1/(2 rho), -u))
    exactly as written.
    """
    _require_planar(body)
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    u = np.asarray(direction, dtype=float)
    depth = 1.0 / (2.0 * rho)
    lam = chord_length(body, depth, u) + chord_length(body, depth, -u)
    return body.diameter / (2.0 * rho) * lam


def max_curvature_radius(body):
    """Largest radius of curvature of the boundary (planar bodies)."""
    _require_planar(body)
    if isinstance(body, Ellipsoid):
        a = float(np.max(body.semi_axes))
        b = float(np.min(body.semi_axes))
        return a * a / b
    if isinstance(body, PlanarSupportBody):
        grid = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        rho = body.curvature_radius_at_angle(grid)
        i = int(np.argmax(rho))
        step = 2.0 * math.pi / 4096
        _, best = _golden_max(
            lambda t: float(body.curvature_radius_at_angle(t)),
            grid[i] - step, grid[i] + step, tol=1e-13,
        )
        return max(best, float(rho[i]))
    raise TypeError(f"no curvature-radius rule for {type(body).__name__}")


def can_roll_in_disc(body, disc_radius):
    """Whether the body rolls unimpeded inside a disc of the given radius.

    Uses the curvature criterion: rolling holds exactly when the body's
    largest radius of curvature does not exceed the disc radius.  The
    boundary case counts as rolling, so a disc rolls inside itself.
    """
    _require_planar(body)
    if disc_radius <= 0.0:
        raise ValueError("disc radius must be positive")
    return max_curvature_radius(body) <= disc_radius + _ROLL_TOL

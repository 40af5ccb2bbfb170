"""Bounded convex domains described through their support data.

Two concrete body classes are provided.  ``Ellipsoid`` covers axis-aligned
ellipsoids (and balls/discs as the equal-axes case) in any dimension d >= 2
with closed-form geometry.  ``PlanarSupportBody`` covers smooth planar convex
bodies whose support function is a finite trigonometric polynomial; positive
radius of curvature is checked at construction, so every instance satisfies
the positive-curvature hypothesis required by the asymptotic machinery.

All bodies are immutable after construction and every query is pure, so
instances can be shared freely between threads.
"""

from __future__ import annotations

import json
import math

import numpy as np

# Unit-direction tolerance and the grid used for construction-time scans.
DIRECTION_TOL = 1e-12
ANGLE_GRID = 4096


def unit_vector(v):
    """Normalize ``v`` to a unit direction; rejects the zero vector."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


def is_unit_vector(v, tol=DIRECTION_TOL):
    return abs(float(np.linalg.norm(np.asarray(v, dtype=float))) - 1.0) <= tol


def unit_ball_volume(d):
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _golden_max(f, a, b, tol=1e-12, iters=80):
    """Golden-section maximization of a scalar function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a < tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    xm = 0.5 * (a + b)
    return xm, f(xm)


class ConvexBody:
    """Interface shared by all body classes.

    Concrete bodies expose the dimension, volume, diameter, the support
    function (positively 1-homogeneous: ``support(v) = |v| * support(v/|v|)``),
    the boundary point with prescribed outward unit normal, the Gaussian
    curvature at that point, and closed-set membership for batches of points.
    """

    dimension: int

    @property
    def volume(self):
        raise NotImplementedError

    @property
    def diameter(self):
        raise NotImplementedError

    def support(self, v):
        """sup over the body of v . y, for an arbitrary nonzero vector v."""
        raise NotImplementedError

    def support_batch(self, vectors):
        vectors = np.asarray(vectors, dtype=float)
        return np.array([self.support(v) for v in vectors])

    def boundary_point(self, u):
        """The unique boundary point whose outward unit normal is u."""
        raise NotImplementedError

    def gauss_curvature(self, u):
        """Gaussian curvature at ``boundary_point(u)`` (positive)."""
        raise NotImplementedError

    def membership(self, points):
        """Closed-set membership for an (m, d) array; returns a bool array."""
        raise NotImplementedError

    def is_point_symmetric(self, tol=1e-9):
        raise NotImplementedError

    @property
    def body_id(self):
        raise NotImplementedError

    # Planar conveniences (d == 2 only): the boundary parametrized by the
    # outward normal angle, and its radius of curvature.
    def boundary_at_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        if u.ndim == 1:
            return self.boundary_point(u)
        return np.array([self.boundary_point(ui) for ui in u])

    def curvature_radius_at_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 0:
            return 1.0 / self.gauss_curvature(np.array([math.cos(theta), math.sin(theta)]))
        return np.array([
            1.0 / self.gauss_curvature(np.array([math.cos(t), math.sin(t)]))
            for t in theta
        ])


def contains(body, point, scale=1.0, shift=None):
    """Whether ``point`` lies in the closed set scale*body - shift.

    The closed-body convention is used throughout: boundary points count as
    inside.  Translations placing a lattice point exactly on the boundary form
    a measure-zero set, so norm estimates are unaffected, while a fixed
    convention keeps counting deterministic.
    """
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    point = np.asarray(point, dtype=float)
    d = body.dimension
    if point.shape != (d,):
        raise ValueError(f"point must have shape ({d},)")
    if shift is None:
        shift = np.zeros(d)
    shift = np.asarray(shift, dtype=float)
    return bool(body.membership(((point + shift) / scale)[None, :])[0])


class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid { y : sum ((y_i - c_i)/a_i)^2 <= 1 }."""

    def __init__(self, semi_axes, center=None):
        axes = np.asarray(semi_axes, dtype=float)
        if axes.ndim != 1 or len(axes) < 2:
            raise ValueError("need at least two semi-axes")
        if np.any(axes <= 0.0):
            raise ValueError("semi-axes must be positive")
        self.semi_axes = axes
        self.dimension = len(axes)
        if center is None:
            center = np.zeros(self.dimension)
        self.center = np.asarray(center, dtype=float)
        if self.center.shape != (self.dimension,):
            raise ValueError("center dimension mismatch")
        self._volume = unit_ball_volume(self.dimension) * float(np.prod(axes))
        self._diameter = 2.0 * float(np.max(axes))

    @property
    def volume(self):
        return self._volume

    @property
    def diameter(self):
        return self._diameter

    @property
    def is_centered_ball(self):
        return bool(np.all(self.semi_axes == self.semi_axes[0]) and not self.center.any())

    def support(self, v):
        v = np.asarray(v, dtype=float)
        return float(v @ self.center) + float(np.linalg.norm(self.semi_axes * v))

    def support_batch(self, vectors):
        vectors = np.asarray(vectors, dtype=float)
        return vectors @ self.center + np.linalg.norm(vectors * self.semi_axes, axis=-1)

    def boundary_point(self, u):
        u = unit_vector(u)
        h0 = float(np.linalg.norm(self.semi_axes * u))
        return self.center + (self.semi_axes ** 2) * u / h0

    def gauss_curvature(self, u):
        u = unit_vector(u)
        h0 = float(np.linalg.norm(self.semi_axes * u))
        return h0 ** (self.dimension + 1) / float(np.prod(self.semi_axes ** 2))

    def membership(self, points):
        points = np.asarray(points, dtype=float)
        t = (points - self.center) / self.semi_axes
        return np.einsum("...i,...i->...", t, t) <= 1.0

    def is_point_symmetric(self, tol=1e-9):
        return True

    @property
    def body_id(self):
        # comma-free so the id can sit in a CSV column
        axes = "x".join(f"{a:g}" for a in self.semi_axes)
        if self.center.any():
            ctr = "x".join(f"{c:g}" for c in self.center)
            return f"ellipsoid[{axes}]@[{ctr}]"
        return f"ellipsoid[{axes}]"

    def __repr__(self):
        return f"Ellipsoid(semi_axes={self.semi_axes.tolist()}, center={self.center.tolist()})"


def unit_ball(dimension):
    return Ellipsoid(np.ones(dimension))


def unit_disc():
    return unit_ball(2)


class PlanarSupportBody(ConvexBody):
    """Planar convex body with trigonometric-polynomial support function.

    ``h(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta)`` over the
    harmonics supplied as (k, a_k, b_k) triples.  The first harmonic encodes a
    pure translation, so it is stripped at construction: this recenters the
    body with its Steiner point at the origin, which is the canonical
    centering assumed by the symmetric-body constructions.

    Construction rejects data whose radius of curvature h + h'' fails to stay
    positive on a dense angular grid, so instances always have smooth boundary
    with strictly positive curvature.
    """

    dimension = 2

    def __init__(self, c0, harmonics=()):
        if c0 <= 0.0:
            raise ValueError("constant support term must be positive")
        self.c0 = float(c0)
        ks, cos_c, sin_c = [], [], []
        for k, a_k, b_k in harmonics:
            k = int(k)
            if k < 1:
                raise ValueError("harmonic order must be >= 1")
            if k == 1:
                # Steiner-point centering: the first harmonic is a translation.
                continue
            ks.append(k)
            cos_c.append(float(a_k))
            sin_c.append(float(b_k))
        self.orders = np.asarray(ks, dtype=int)
        self.cos_coeffs = np.asarray(cos_c, dtype=float)
        self.sin_coeffs = np.asarray(sin_c, dtype=float)

        grid = np.linspace(0.0, 2.0 * math.pi, ANGLE_GRID, endpoint=False)
        rho = self.curvature_radius_at_angle(grid)
        if np.min(rho) <= 0.0:
            raise ValueError(
                "support data is not convex: radius of curvature reaches "
                f"{np.min(rho):.3e}"
            )
        k2 = self.orders ** 2
        self._volume = math.pi * self.c0 ** 2 + 0.5 * math.pi * float(
            np.sum((1.0 - k2) * (self.cos_coeffs ** 2 + self.sin_coeffs ** 2))
        )
        self._diameter = self._max_width()

    # -- angular evaluations ------------------------------------------------

    def support_at_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        kt = np.multiply.outer(theta, self.orders)
        return self.c0 + np.cos(kt) @ self.cos_coeffs + np.sin(kt) @ self.sin_coeffs

    def support_derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        kt = np.multiply.outer(theta, self.orders)
        return -np.sin(kt) @ (self.orders * self.cos_coeffs) + np.cos(kt) @ (
            self.orders * self.sin_coeffs
        )

    def curvature_radius_at_angle(self, theta):
        # rho = h + h''; the k-th harmonic contributes a factor (1 - k^2).
        theta = np.asarray(theta, dtype=float)
        kt = np.multiply.outer(theta, self.orders)
        w = 1.0 - self.orders ** 2
        return self.c0 + np.cos(kt) @ (w * self.cos_coeffs) + np.sin(kt) @ (w * self.sin_coeffs)

    def boundary_at_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        h = self.support_at_angle(theta)
        hp = self.support_derivative(theta)
        x = h * np.cos(theta) - hp * np.sin(theta)
        y = h * np.sin(theta) + hp * np.cos(theta)
        return np.stack([x, y], axis=-1)

    def _max_width(self):
        grid = np.linspace(0.0, math.pi, ANGLE_GRID, endpoint=False)
        width = self.support_at_angle(grid) + self.support_at_angle(grid + math.pi)
        i = int(np.argmax(width))
        step = math.pi / ANGLE_GRID

        def w(t):
            return float(self.support_at_angle(t) + self.support_at_angle(t + math.pi))

        _, best = _golden_max(w, grid[i] - step, grid[i] + step, tol=1e-12)
        return max(best, float(width[i]))

    # -- ConvexBody interface -------------------------------------------------

    @property
    def volume(self):
        return self._volume

    @property
    def diameter(self):
        return self._diameter

    def support(self, v):
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ValueError("zero vector has no support value")
        return n * float(self.support_at_angle(math.atan2(v[1], v[0])))

    def support_batch(self, vectors):
        vectors = np.asarray(vectors, dtype=float)
        n = np.linalg.norm(vectors, axis=-1)
        theta = np.arctan2(vectors[..., 1], vectors[..., 0])
        return n * self.support_at_angle(theta)

    def boundary_point(self, u):
        u = unit_vector(u)
        return self.boundary_at_angle(math.atan2(u[1], u[0]))

    def gauss_curvature(self, u):
        u = unit_vector(u)
        rho = float(self.curvature_radius_at_angle(math.atan2(u[1], u[0])))
        return 1.0 / rho

    def membership(self, points, refine_rounds=3):
        """Closed membership via the support criterion max_theta (q.u - h) <= 0.

        The margin function is maximized on a coarse angular grid and then
        sharpened by a few rounds of local grid refinement, which brings the
        maximum to ~1e-12 absolute accuracy for desk-scale bodies.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        grid = np.linspace(0.0, 2.0 * math.pi, 1024, endpoint=False)
        h = self.support_at_angle(grid)
        margins = points[:, 0:1] * np.cos(grid) + points[:, 1:2] * np.sin(grid) - h
        best = np.argmax(margins, axis=1)
        theta = grid[best]
        half = 2.0 * math.pi / 1024
        for _ in range(refine_rounds):
            local = theta[:, None] + np.linspace(-half, half, 33)
            m = (
                points[:, 0:1] * np.cos(local)
                + points[:, 1:2] * np.sin(local)
                - self.support_at_angle(local)
            )
            pick = np.argmax(m, axis=1)
            theta = np.take_along_axis(local, pick[:, None], axis=1)[:, 0]
            half /= 16.0
        final = (
            points[:, 0] * np.cos(theta)
            + points[:, 1] * np.sin(theta)
            - self.support_at_angle(theta)
        )
        return final <= 1e-12

    def is_point_symmetric(self, tol=1e-9):
        grid = np.linspace(0.0, math.pi, 2048, endpoint=False)
        gap = self.support_at_angle(grid) - self.support_at_angle(grid + math.pi)
        return bool(np.max(np.abs(gap)) <= tol)

    @property
    def body_id(self):
        parts = [f"{self.c0:g}"]
        for k, a, b in zip(self.orders, self.cos_coeffs, self.sin_coeffs):
            parts.append(f"{k}:{a:g}x{b:g}")
        return "planar[" + ";".join(parts) + "]"

    def __repr__(self):
        harm = [(int(k), float(a), float(b)) for k, a, b in
                zip(self.orders, self.cos_coeffs, self.sin_coeffs)]
        return f"PlanarSupportBody(c0={self.c0}, harmonics={harm})"


# Reference asymmetric body: the odd third harmonic is the minimal smooth
# perturbation of the disc that breaks point symmetry while keeping
# rho = 1 - 0.4 cos(3 theta) > 0.
def asymmetric_reference_body():
    return PlanarSupportBody(1.0, [(3, 0.05, 0.0)])


def body_from_config(doc):
    """Build a body from a JSON document (string or parsed dict).

    Recognized forms:
      {"kind": "ellipsoid", "semi_axes": [...], "center": [...]}
      {"kind": "planar_support", "c0": ..., "harmonics": [[k, a_k, b_k], ...]}
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("body config must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "ellipsoid":
        return Ellipsoid(doc["semi_axes"], doc.get("center"))
    if kind == "planar_support":
        return PlanarSupportBody(doc["c0"], doc.get("harmonics", ()))
    raise ValueError(f"unknown body kind: {kind!r}")

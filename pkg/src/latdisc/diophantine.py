"""Simultaneous Diophantine approximation and exceptional dilation radii.

The pigeonhole principle guarantees that for any reals a_1..a_m and any
positive integer j some integer r in [j, j^(m+1)] puts every r*a_k within 1/j
of an integer.  The search here is an exhaustive first-witness scan: at desk
scale (j <= 20, m <= 3 gives at most ~1.6e5 candidates) exactness and
simplicity beat lattice-reduction cleverness.

For a symmetric positive-curvature body in dimension d = 1 (mod 4), applying
the search to the support values at integer frequencies up to a cutoff
produces dilation radii at which every low-frequency spectral coefficient is
damped by a small sine factor, which is what makes the normalized discrepancy
norm dip.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .fourier import shell_multiplicities

# Beyond 2^40 the fractional part of a double loses the ~1e-12 resolution the
# nearest-integer distance needs.
PRECISION_ALARM = 2.0 ** 40
DEFAULT_SEARCH_BUDGET = 4_000_000
_SCAN_CHUNK = 1 << 16
ALPHA_DEDUP_TOL = 1e-12
ALPHA_DEGENERACY_TOL = 1e-9


class SearchBudgetExceeded(RuntimeError):
    """The first-witness scan ran out of its candidate budget.

    Carries how far the scan got and the best simultaneous distance seen, so
    callers can report how hopeless (or close) the search was.
    """

    def __init__(self, j, m, scanned, range_size, best_distance, best_r):
        self.j = j
        self.m = m
        self.scanned = scanned
        self.range_size = range_size
        self.best_distance = best_distance
        self.best_r = best_r
        super().__init__(
            f"no witness among the first {scanned} of ~{format_huge(range_size)} "
            f"candidates (j={j}, m={m}); best max-distance {best_distance:.4f} "
            f"at r={best_r}, needed < {1.0 / j:.4f}"
        )


def format_huge(n):
    """Render an arbitrarily large integer as a power of ten."""
    digits = len(str(n))
    if digits <= 15:
        return str(n)
    return f"10^{digits - 1}"


def nearest_integer_distance(x):
    """Distance from x to the nearest integer, in [0, 1/2]; vectorized."""
    x = np.asarray(x, dtype=float)
    d = np.abs(x - np.rint(x))
    return float(d) if d.ndim == 0 else d


@dataclass(frozen=True)
class DirichletCertificate:
    """A verified witness of the simultaneous-approximation guarantee."""

    j: int
    alphas: tuple
    r: int
    achieved: float

    def __post_init__(self):
        m = len(self.alphas)
        if not (self.j <= self.r <= self.j ** (m + 1)):
            raise ValueError(f"witness r={self.r} outside [{self.j}, {self.j}^{m + 1}]")
        if not self.achieved < 1.0 / self.j:
            raise ValueError(
                f"achieved distance {self.achieved} is not below 1/j = {1.0 / self.j}"
            )

    def to_json(self):
        return json.dumps(
            {
                "j": self.j,
                "alphas": list(self.alphas),
                "r": self.r,
                "achieved": self.achieved,
            }
        )


def verify_certificate(cert):
    """Independent re-check of a certificate with plain Python arithmetic."""
    m = len(cert.alphas)
    if not (cert.j <= cert.r <= cert.j ** (m + 1)):
        return False
    worst = max(abs(cert.r * a - round(cert.r * a)) for a in cert.alphas)
    return worst < 1.0 / cert.j and math.isclose(worst, cert.achieved, rel_tol=0, abs_tol=1e-12)


def dirichlet_search(alphas, j, max_candidates=DEFAULT_SEARCH_BUDGET):
    """First integer r in [j, j^(m+1)] with max_k ||r a_k|| < 1/j.

    The guarantee makes exhaustion of the full range a hard error (it would
    mean broken arithmetic); exhaustion of ``max_candidates`` before the range
    ends raises SearchBudgetExceeded instead, since first witnesses normally
    appear after roughly (j/2)^m candidates.
    """
    alphas = tuple(float(a) for a in alphas)
    m = len(alphas)
    if m < 1:
        raise ValueError("need at least one alpha")
    j = int(j)
    if j < 1:
        raise ValueError("j must be a positive integer")
    if any(abs(a) > PRECISION_ALARM for a in alphas):
        raise ValueError("an |alpha| above 2^40 defeats double-precision distances")
    range_size = j ** (m + 1) - j + 1
    target = 1.0 / j
    arr = np.asarray(alphas)
    scanned = 0
    best = math.inf
    best_r = 0
    start = j
    # keep each candidate-by-alpha product around 8M entries
    chunk = max(256, min(_SCAN_CHUNK, 8_000_000 // m))
    while scanned < min(range_size, max_candidates):
        stop = min(start + chunk, j ** (m + 1) + 1, start + (max_candidates - scanned))
        r = np.arange(start, stop, dtype=np.float64)
        prod = np.outer(r, arr)
        dist = np.abs(prod - np.rint(prod)).max(axis=1)
        hits = np.nonzero(dist < target)[0]
        if len(hits):
            i = int(hits[0])
            return DirichletCertificate(j=j, alphas=alphas, r=int(r[i]), achieved=float(dist[i]))
        i = int(np.argmin(dist))
        if dist[i] < best:
            best = float(dist[i])
            best_r = int(r[i])
        scanned += len(r)
        start = stop
    if scanned >= range_size:
        raise RuntimeError(
            "exhausted the guaranteed range without a witness; "
            "this indicates an arithmetic or precision bug"
        )
    raise SearchBudgetExceeded(j, m, scanned, range_size, best, best_r)


def build_alpha_set(body, max_norm, max_lattice_points=30_000_000):
    """Distinct support values at integer frequencies 0 < |n| <= max_norm.

    The value attached to a frequency n is the support function at n, which
    is |n| times the support in direction n/|n|; for the unit ball these are
    just the distinct norms sqrt(k).  Values are deduplicated to 1e-12.  A
    body producing a value below 1e-9 is rejected: that means the centering
    is degenerate and the construction breaks down.
    """
    if max_norm < 1:
        raise ValueError("max_norm must be >= 1")
    d = body.dimension
    if getattr(body, "is_centered_ball", False):
        radius = float(body.semi_axes[0])
        max_k = int(math.floor(max_norm ** 2))
        mult = shell_multiplicities(d, max_k)
        ks = np.nonzero(mult[1:])[0] + 1
        values = radius * np.sqrt(ks.astype(float))
    else:
        k = int(math.floor(max_norm))
        if (2 * k + 1) ** d > max_lattice_points:
            raise ValueError(
                f"enumerating (2*{k}+1)^{d} lattice points exceeds the memory cap"
            )
        axes = [np.arange(-k, k + 1)] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1).astype(float)
        nsq = np.einsum("ij,ij->i", pts, pts)
        pts = pts[(nsq > 0) & (nsq <= max_norm ** 2)]
        values = body.support_batch(pts)
    if np.any(np.abs(values) < ALPHA_DEGENERACY_TOL):
        raise ValueError("a support value vanishes at an integer frequency; recenter the body")
    values = np.sort(values)
    keep = np.empty(len(values), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(values) > ALPHA_DEDUP_TOL
    return values[keep]


def curvature_asymmetry(body, max_norm=8):
    """Largest curvature mismatch |K^(-1/2)(s(n)) - K^(-1/2)(s(-n))| on a shell.

    For non-symmetric bodies this is bounded away from zero at some integer
    frequency, which forces the spectral lower bound; the scan radius is a
    pragmatic default, not a canonical choice.
    """
    d = body.dimension
    k = int(math.floor(max_norm))
    axes = [np.arange(-k, k + 1)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1).astype(float)
    nsq = np.einsum("ij,ij->i", pts, pts)
    pts = pts[(nsq > 0) & (nsq <= max_norm ** 2)]
    worst = 0.0
    for n in pts:
        u = n / np.linalg.norm(n)
        gap = abs(
            body.gauss_curvature(u) ** -0.5 - body.gauss_curvature(-u) ** -0.5
        )
        worst = max(worst, float(gap))
    return worst


def dip_exponent(p, d):
    """beta = 2p / (2d - pd + p); positive exactly when p < 2d/(d-1)."""
    denom = 2.0 * d - p * d + p
    if denom <= 0.0:
        raise ValueError(f"p={p} is not below the critical exponent 2d/(d-1)")
    return 2.0 * p / denom


@dataclass(frozen=True)
class ExceptionalRadiusPlan:
    """A dilation radius with certified damping of low spectral frequencies.

    ``sine_values`` are |sin(2 pi R alpha)| for each alpha in the set; each is
    bounded by 2 pi * achieved < 2 pi / j, the predicted damping factor of the
    corresponding coefficient.  ``log_form_value`` restates the 1/j dip factor
    through the inverse of t^(beta d) log t at R (with unit constant), and is
    NaN when R is too small for the iterated logarithm.
    """

    p: float
    dimension: int
    beta: float
    frequency_cutoff: float
    spec_cutoff: float              # the theoretical cutoff floor(j^beta)
    alphas: tuple
    certificate: DirichletCertificate
    predicted_dip_factor: float
    sine_bound: float
    sine_values: tuple
    log_form_value: float

    @property
    def radius(self):
        return float(self.certificate.r)

    def to_json(self):
        return json.dumps(
            {
                "p": self.p,
                "dimension": self.dimension,
                "beta": self.beta,
                "frequency_cutoff": self.frequency_cutoff,
                "spec_cutoff": self.spec_cutoff,
                "alphas": list(self.alphas),
                "certificate": json.loads(self.certificate.to_json()),
                "predicted_dip_factor": self.predicted_dip_factor,
                "sine_bound": self.sine_bound,
                "sine_values": list(self.sine_values),
                "log_form_value": self.log_form_value,
            }
        )


def exceptional_radius_plan(body, p, j, *, allow_any_dimension=False,
                            max_frequency=None,
                            search_budget=DEFAULT_SEARCH_BUDGET):
    """Construct the dilation radius R_j damping all frequencies up to a cutoff.

    The theoretical cutoff is j^beta with beta = 2p/(2d - pd + p).  For the
    reference unit ball in R^5 that cutoff makes the witness search
    combinatorially hopeless at desk scale (hundreds of rationally independent
    constraints), so ``max_frequency`` may override the cutoff for
    demonstrations; the plan records both numbers.

    Requires a point-symmetric body, dimension d = 1 (mod 4) unless
    ``allow_any_dimension`` (exploration elsewhere is useful but the dip claim
    needs the dimension condition), and 2 <= p < 2d/(d-1).
    """
    d = body.dimension
    if not body.is_point_symmetric():
        raise ValueError("exceptional radii need a point-symmetric body")
    if d % 4 != 1 and not allow_any_dimension:
        raise ValueError(
            f"dimension {d} is not 1 (mod 4); pass allow_any_dimension=True "
            "for exploratory runs"
        )
    if not 2.0 <= p:
        raise ValueError("p must be at least 2")
    beta = dip_exponent(p, d)   # validates p < 2d/(d-1)
    j = int(j)
    if j < 1:
        raise ValueError("j must be a positive integer")
    spec_cutoff = max(1.0, float(math.floor(j ** beta)))
    cutoff = spec_cutoff if max_frequency is None else float(max_frequency)
    alphas = build_alpha_set(body, cutoff)
    cert = dirichlet_search(alphas, j, max_candidates=search_budget)
    r = cert.r
    sines = np.abs(np.sin(2.0 * math.pi * r * np.asarray(alphas)))
    loglog = math.log(math.log(r)) if r > 1 and math.log(r) > 1 else float("nan")
    if loglog and loglog > 0.0:
        log_form = (math.log(r) / loglog) ** (-1.0 / (beta * d))
    else:
        log_form = float("nan")
    return ExceptionalRadiusPlan(
        p=float(p),
        dimension=d,
        beta=beta,
        frequency_cutoff=cutoff,
        spec_cutoff=spec_cutoff,
        alphas=tuple(float(a) for a in alphas),
        certificate=cert,
        predicted_dip_factor=1.0 / j,
        sine_bound=2.0 * math.pi / j,
        sine_values=tuple(float(s) for s in sines),
        log_form_value=log_form,
    )

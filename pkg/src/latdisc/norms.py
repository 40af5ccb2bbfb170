"""Quasi-norm estimators on discrepancy fields and spectral sequences.

Fields carry the empirical probability measure (weight 1/S per sample);
sequences carry the counting measure on the integer lattice, possibly with
shell multiplicities.  Weak norms are computed exactly on these measures via
order statistics: the supremum over thresholds is attained at sample values,
so sorting gives the exact value in O(S log S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _magnitudes(values):
    m = np.abs(np.asarray(values, dtype=complex)).astype(float)
    if m.size == 0:
        raise ValueError("empty input")
    return m


def lp_norm(values, p):
    """(mean |v|^p)^(1/p) on the empirical probability measure."""
    if p <= 0.0:
        raise ValueError("p must be positive")
    m = _magnitudes(values)
    return float(np.mean(m ** p) ** (1.0 / p))


def weak_lp_norm(values, p):
    """sup_t t (fraction{|v| > t})^(1/p), exactly, via order statistics."""
    if p <= 0.0:
        raise ValueError("p must be positive")
    m = np.sort(_magnitudes(values))[::-1]
    k = np.arange(1, len(m) + 1, dtype=float)
    return float(np.max(m * (k / len(m)) ** (1.0 / p)))


def sup_norm(values):
    """Largest sample magnitude."""
    return float(np.max(_magnitudes(values)))


def counting_lp_norm(values, q, multiplicities=None):
    """(sum mult |v|^q)^(1/q) on the counting measure."""
    if q <= 0.0:
        raise ValueError("q must be positive")
    m = _magnitudes(values)
    if multiplicities is None:
        return float(np.sum(m ** q) ** (1.0 / q))
    return float(np.sum(multiplicities * m ** q) ** (1.0 / q))


def counting_weak_lp_norm(values, q, multiplicities=None):
    """sup_t t (#{|v| > t})^(1/q) on the counting measure, exactly."""
    if q <= 0.0:
        raise ValueError("q must be positive")
    m = _magnitudes(values)
    if multiplicities is None:
        multiplicities = np.ones(len(m))
    order = np.argsort(m)[::-1]
    cum = np.cumsum(np.asarray(multiplicities, dtype=float)[order])
    return float(np.max(m[order] * cum ** (1.0 / q)))


@dataclass(frozen=True)
class NormReport:
    """Estimated quasi-norms of a discrepancy field at one exponent."""

    body_id: str
    scale: float
    p: float
    strong: float
    weak: float
    sup: float
    sample_count: int
    stderr_pth_power: float     # Monte Carlo standard error of strong**p

    def csv_row(self):
        return (
            f"{self.body_id},{self.scale!r},{self.p!r},{self.strong!r},"
            f"{self.weak!r},{self.sup!r},{self.sample_count},"
            f"{self.stderr_pth_power!r}"
        )

    @property
    def stderr_norm(self):
        """Delta-method standard error of the norm itself."""
        if self.strong == 0.0:
            return 0.0
        return self.stderr_pth_power / (self.p * self.strong ** (self.p - 1.0))


NORM_CSV_HEADER = "body,R,p,strong,weak,sup,samples,stderr"


def estimate_norms(field, p):
    """NormReport for a field at exponent p (strong, weak and sup together)."""
    m = field.magnitudes()
    powers = m ** p
    stderr = float(np.std(powers, ddof=1) / math.sqrt(len(powers))) if len(powers) > 1 else 0.0
    return NormReport(
        body_id=field.body_id,
        scale=field.scale,
        p=p,
        strong=float(np.mean(powers) ** (1.0 / p)),
        weak=weak_lp_norm(m, p),
        sup=float(np.max(m)),
        sample_count=len(m),
        stderr_pth_power=stderr,
    )


@dataclass(frozen=True)
class KeyLemmaReport:
    """Both quantitative-inclusion inequalities evaluated on one field.

    On a probability measure, with W the weak-p norm and M the sup norm:
      (1)  ||f||_p^p        <=  1 + p W^p log_+(M)
      (2)  ||f||_s^s        <=  s/(s-p) W^p M^(s-p)        (p < s)
    Both sides are returned; callers assert the inequalities.
    """

    p: float
    s: float
    lhs_p: float
    rhs_p: float
    lhs_s: float
    rhs_s: float

    @property
    def holds(self):
        slack = 1.0 + 1e-12   # float roundoff only; the inequalities are exact
        return self.lhs_p <= self.rhs_p * slack and self.lhs_s <= self.rhs_s * slack


def check_key_lemma(values, p, s):
    """Evaluate the two quantitative-inclusion inequalities on sample values."""
    if s <= p:
        raise ValueError("need p < s")
    m = _magnitudes(np.asarray(values if not hasattr(values, "values") else values.values))
    weak_p = weak_lp_norm(m, p)
    sup = float(np.max(m))
    lhs_p = float(np.mean(m ** p))
    rhs_p = 1.0 + p * weak_p ** p * max(math.log(sup), 0.0) if sup > 0 else 1.0
    lhs_s = float(np.mean(m ** s))
    rhs_s = s / (s - p) * weak_p ** p * sup ** (s - p)
    return KeyLemmaReport(p=p, s=s, lhs_p=lhs_p, rhs_p=rhs_p, lhs_s=lhs_s, rhs_s=rhs_s)


def fourier_series_discrepancy(seq, shift):
    """Truncated Fourier synthesis of the discrepancy at translation x.

    Sums value(n) exp(2 pi i n.x) over the stored shell.  The imaginary part
    must vanish by Hermitian symmetry; a residue above 1e-6 signals a broken
    sequence and raises.
    """
    if seq.by_shells:
        raise ValueError("synthesis needs explicit frequency vectors")
    if len(seq.values) == 0:
        raise ValueError("empty sequence")
    shift = np.asarray(shift, dtype=float)
    phases = np.exp(2j * math.pi * (seq.frequencies.astype(float) @ shift))
    total = complex(np.sum(seq.values * phases))
    if abs(total.imag) >= 1e-6:
        raise AssertionError(
            f"imaginary residue {total.imag:.3e} in Fourier synthesis; "
            "sequence violates Hermitian symmetry"
        )
    return total.real


@dataclass(frozen=True)
class HausdorffYoungReport:
    """Side-by-side norms for the transform-domain comparisons at one (R, p).

    Carries the field L^p and Weak-L^p estimates, the truncated dual-exponent
    sequence norms with the analytic tail bound (infinite when the tail
    exponent does not sum), and the largest coefficient magnitude.  The weak
    comparison constant is not derived from interpolation theory; only the
    empirical ratio is reported.
    """

    p: float
    q: float
    field_lp: float
    field_weak_lp: float
    seq_lq_truncated: float
    seq_lq_tail_bound: float
    seq_weak_lq: float
    sup_coefficient: float

    @property
    def weak_ratio(self):
        return self.field_weak_lp / self.seq_weak_lq

    def csv_row(self):
        return (
            f"{self.p!r},{self.q!r},{self.field_lp!r},{self.field_weak_lp!r},"
            f"{self.seq_lq_truncated!r},{self.seq_lq_tail_bound!r},"
            f"{self.seq_weak_lq!r},{self.sup_coefficient!r}"
        )


def hausdorff_young_check(field, seq, p):
    """Assemble the norm comparisons between a field and its spectrum.

    Callers assert (a) field L^p <= truncated sequence l^q + tail + sampling
    tolerance, and (b) the largest coefficient <= field L^p + tolerance.
    Requires p >= 2 and matching (body, scale) on both inputs.
    """
    if p < 2.0:
        raise ValueError("comparison needs p >= 2")
    if field.body_id != seq.body_id or field.scale != seq.scale:
        raise ValueError("field and sequence describe different experiments")
    q = p / (p - 1.0) if p > 1.0 else math.inf
    mags = field.magnitudes()
    return HausdorffYoungReport(
        p=p,
        q=q,
        field_lp=lp_norm(mags, p),
        field_weak_lp=weak_lp_norm(mags, p),
        seq_lq_truncated=counting_lp_norm(seq.values, q, seq.multiplicities),
        seq_lq_tail_bound=seq.tail_lq_bound(q),
        seq_weak_lq=counting_weak_lp_norm(seq.values, q, seq.multiplicities),
        sup_coefficient=seq.sup_value(),
    )

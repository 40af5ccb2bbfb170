"""Batch experiment drivers: R-sweeps, exponent fits, and dip experiments.

Everything here is reproducible from (config, seed): per-R seeds are spawned
deterministically from the master seed, rows are emitted in schedule order,
and CSV output is byte-identical across reruns.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .counting import discrepancy_field, make_batch_counter
from .diophantine import exceptional_radius_plan
from .fourier import spectral_sequence
from .norms import (NORM_CSV_HEADER, estimate_norms, hausdorff_young_check,
                    lp_norm)

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one norm-estimation sweep over dilation scales."""

    body_config: dict
    r_schedule: tuple
    p_values: tuple
    samples: int
    seed: int
    shell: int = 64

    def __post_init__(self):
        if len(self.r_schedule) == 0:
            raise ValueError("empty schedule")
        if any(b <= a for a, b in zip(self.r_schedule, self.r_schedule[1:])):
            raise ValueError("R schedule must be strictly increasing")
        if self.samples < 100:
            raise ValueError("need at least 100 samples per scale")
        if self.shell < 8:
            raise ValueError("spectral shell must be >= 8")


def default_r_schedule(r_min=8.0, r_max=128.0):
    """Half-octave schedule 1.01 * 2^(k/2), offset so that no lattice point
    sits exactly on a boundary at zero shift."""
    out = []
    k = 0
    while True:
        r = 1.01 * 2.0 ** (k / 2.0)
        if r > r_max:
            break
        if r >= r_min:
            out.append(r)
        k += 1
    return tuple(out)


def _per_scale_seeds(seed, count):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def refine_sup(body, scale, start, width=0.02, sweeps=2):
    """Sharpen a Monte Carlo sup-norm estimate by local golden search.

    Runs a golden-section maximization of |discrepancy| along each coordinate
    around the best sample.  The discrepancy is piecewise constant in the
    translation, so this only ever improves the estimate; the result is still
    a lower bound on the true sup norm.
    """
    counter = make_batch_counter(body, scale)
    volume_term = scale ** body.dimension * body.volume

    def value(x):
        counts, _ = counter(np.mod(x, 1.0)[None, :])
        return abs(float(counts[0]) - volume_term)

    x = np.array(start, dtype=float)
    best = value(x)
    for _ in range(sweeps):
        for axis in range(body.dimension):
            a = x[axis] - width
            b = x[axis] + width

            def along(t):
                y = x.copy()
                y[axis] = t
                return value(y)

            lo, hi = a, b
            t1 = hi - _GOLDEN * (hi - lo)
            t2 = lo + _GOLDEN * (hi - lo)
            f1, f2 = along(t1), along(t2)
            for _ in range(24):
                if f1 < f2:
                    lo, t1, f1 = t1, t2, f2
                    t2 = lo + _GOLDEN * (hi - lo)
                    f2 = along(t2)
                else:
                    hi, t2, f2 = t2, t1, f1
                    t1 = hi - _GOLDEN * (hi - lo)
                    f1 = along(t1)
            tm = 0.5 * (lo + hi)
            fm = along(tm)
            if fm > best:
                best = fm
                x[axis] = tm
    return best


def run_sweep(body, config):
    """NormReports for every (R, p) of the schedule, in schedule order.

    For each scale a fresh Monte Carlo field is drawn from a per-scale seed
    spawned off the master seed; the sup estimate gets the local refinement on
    top of the sample maximum.
    """
    rows = []
    seeds = _per_scale_seeds(config.seed, len(config.r_schedule))
    for scale, scale_seed in zip(config.r_schedule, seeds):
        fld = discrepancy_field(body, scale, samples=config.samples, seed=scale_seed)
        best_idx = int(np.argmax(fld.magnitudes()))
        refined_sup = refine_sup(body, scale, fld.shifts[best_idx])
        for p in config.p_values:
            rep = estimate_norms(fld, p)
            rep = type(rep)(
                body_id=rep.body_id, scale=rep.scale, p=rep.p, strong=rep.strong,
                weak=rep.weak, sup=max(rep.sup, refined_sup),
                sample_count=rep.sample_count, stderr_pth_power=rep.stderr_pth_power,
            )
            rows.append(rep)
    return rows


def spectral_comparison_sweep(body, config):
    """Transform-domain comparison reports per (R, p >= 2) of a sweep.

    Rebuilds the same per-scale fields as ``run_sweep`` (same spawned seeds)
    and pairs each with its spectral sequence on the configured shell.
    """
    reports = {}
    seeds = _per_scale_seeds(config.seed, len(config.r_schedule))
    for scale, scale_seed in zip(config.r_schedule, seeds):
        fld = discrepancy_field(body, scale, samples=config.samples, seed=scale_seed)
        seq = spectral_sequence(body, scale, config.shell)
        for p in config.p_values:
            if p >= 2.0:
                reports[(scale, p)] = hausdorff_young_check(fld, seq, p)
    return reports


def sweep_csv(rows):
    buf = io.StringIO()
    buf.write(NORM_CSV_HEADER + "\n")
    for r in rows:
        buf.write(r.csv_row() + "\n")
    return buf.getvalue()


def gnuplot_script(csv_path, columns=("strong",)):
    """A companion gnuplot script for a sweep table (log-log norm vs R)."""
    idx = {"strong": 4, "weak": 5, "sup": 6}
    lines = [
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel 'R'",
        "set ylabel 'norm'",
        "set key left top",
    ]
    plots = [f"'{csv_path}' every ::1 using 2:{idx[c]} with linespoints title '{c}'"
             for c in columns]
    lines.append("plot " + ", ".join(plots))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law fit of a norm column against the scale."""

    slope: float
    intercept: float
    residual_rms: float
    r_window: tuple
    points: int


def fit_exponent(rows, p, column="strong", log_deflation=0.0, r_min=8.0):
    """Slope of log(norm) vs log(R) over rows at exponent p.

    ``log_deflation`` divides the norm by log(R)^gamma before fitting, for
    comparisons whose predicted growth carries a logarithmic factor.  Scales
    below ``r_min`` are excluded: small-R transients pollute asymptotic
    slopes.
    """
    sel = [r for r in rows if r.p == p and r.scale >= r_min]
    if len(sel) < 4:
        raise ValueError("need at least 4 rows to fit an exponent")
    scales = np.array([r.scale for r in sel])
    vals = np.array([getattr(r, column) for r in sel], dtype=float)
    if np.any(vals <= 0.0):
        raise ValueError("norm column must be positive for a log fit")
    y = np.log(vals) - log_deflation * np.log(np.log(scales))
    x = np.log(scales)
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), res, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ np.array([slope, intercept])
    rms = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return ExponentFit(
        slope=float(slope), intercept=float(intercept), residual_rms=rms,
        r_window=(float(scales.min()), float(scales.max())), points=len(sel),
    )


@dataclass(frozen=True)
class DipRow:
    """One scale evaluated inside a dip experiment."""

    j: int
    scale: float
    exceptional: bool
    norm: float
    normalized: float

    def csv_row(self):
        return (
            f"{self.j},{self.scale!r},{int(self.exceptional)},"
            f"{self.norm!r},{self.normalized!r}"
        )


DIP_CSV_HEADER = "j,R,exceptional,norm,normalized"


@dataclass(frozen=True)
class DipResult:
    rows: tuple
    ratios: dict                 # j -> normalized-at-R_j / median(random)
    plans: dict                  # j -> ExceptionalRadiusPlan

    def to_csv(self):
        buf = io.StringIO()
        buf.write(DIP_CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(r.csv_row() + "\n")
        return buf.getvalue()


def dip_experiment(body, p, j_list, *, samples, seed, random_count=20,
                   max_frequency=None, allow_any_dimension=False,
                   search_budget=None):
    """Compare the normalized norm at certified radii against random radii.

    For each j the certified radius R_j is constructed, the normalized norm
    R^-(d-1)/2 ||D||_p is estimated there and at ``random_count`` seeded
    uniform radii from the same decade, and the ratio to the random median is
    recorded.  The dip is guaranteed only along a subsequence, so the ratio is
    reported either way.  Radii below 2 are skipped with a notice.
    """
    d = body.dimension
    exponent = (d - 1) / 2.0
    rows = []
    ratios = {}
    plans = {}
    kwargs = {}
    if search_budget is not None:
        kwargs["search_budget"] = search_budget
    seeds = _per_scale_seeds(seed, len(j_list))
    for j, j_seed in zip(j_list, seeds):
        plan = exceptional_radius_plan(
            body, p, j, allow_any_dimension=allow_any_dimension,
            max_frequency=max_frequency, **kwargs,
        )
        plans[j] = plan
        r_j = plan.radius
        if r_j < 2.0:
            log.warning("skipping j=%d: certified radius %.3g is below 2", j, r_j)
            continue
        rng = np.random.default_rng(j_seed)
        decade_lo = 10.0 ** math.floor(math.log10(r_j))
        decade_hi = 10.0 * decade_lo
        lo = max(2.0, decade_lo)
        randoms = lo + (decade_hi - lo) * rng.random(random_count)
        sample_seeds = _per_scale_seeds(j_seed, random_count + 1)

        def normalized(scale, field_seed):
            fld = discrepancy_field(body, scale, samples=samples, seed=field_seed)
            return lp_norm(fld.values, p) * scale ** -exponent

        at_rj = normalized(r_j, sample_seeds[0])
        rows.append(DipRow(j=j, scale=r_j, exceptional=True, norm=at_rj * r_j ** exponent,
                           normalized=at_rj))
        rand_values = []
        for scale, s in zip(randoms, sample_seeds[1:]):
            val = normalized(float(scale), s)
            rand_values.append(val)
            rows.append(DipRow(j=j, scale=float(scale), exceptional=False,
                               norm=val * float(scale) ** exponent, normalized=val))
        ratios[j] = at_rj / float(np.median(rand_values))
    return DipResult(rows=tuple(rows), ratios=ratios, plans=plans)

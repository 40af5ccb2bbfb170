"""Command-line driver for counting, spectra, norm sweeps and dip experiments.

Exit codes: 0 on success, 1 on input errors, 2 when an assertion-style check
(asymptotic remainder ratio, chord bound) fails.  All randomness flows from
the single --seed flag.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import chords as chords_mod
from . import diophantine as dio
from .bodies import body_from_config
from .counting import count_points, discrepancy, discrepancy_field
from .fourier import indicator_fourier, leading_term_along_ray, _direction_fan, spectral_sequence
from .norms import NORM_CSV_HEADER, estimate_norms
from .sweeps import (DIP_CSV_HEADER, SweepConfig, default_r_schedule, dip_experiment,
                     fit_exponent, gnuplot_script, run_sweep, sweep_csv)


class CheckFailure(Exception):
    """A verification-style command found a violation (exit code 2)."""


def _load_body(spec):
    text = spec.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return body_from_config(text)


def _float_list(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _int_list(text):
    return tuple(int(t) for t in text.split(",") if t.strip())


def _write_out(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_count(args):
    body = _load_body(args.body)
    x = _float_list(args.x) if args.x else None
    print(count_points(body, args.R, x))


def _cmd_discrepancy(args):
    body = _load_body(args.body)
    x = _float_list(args.x) if args.x else None
    print(repr(discrepancy(body, args.R, x)))


def _cmd_field(args):
    body = _load_body(args.body)
    if args.grid is not None:
        fld = discrepancy_field(body, args.R, grid=args.grid)
    else:
        fld = discrepancy_field(body, args.R, samples=args.samples, seed=args.seed)
    _write_out(args.out, fld.to_csv())


def _cmd_norms(args):
    body = _load_body(args.body)
    fld = discrepancy_field(body, args.R, samples=args.samples, seed=args.seed)
    lines = [NORM_CSV_HEADER]
    for p in _float_list(args.p):
        lines.append(estimate_norms(fld, p).csv_row())
    _write_out(args.out, "\n".join(lines) + "\n")


def _cmd_fourier(args):
    body = _load_body(args.body)
    seq = spectral_sequence(body, args.R, args.shell)
    _write_out(args.out, seq.to_csv())


def _cmd_asymptotic_check(args):
    body = _load_body(args.body)
    lo_win = (20.0, 40.0)
    hi_win = (100.0, 200.0)
    power = (body.dimension + 1) / 2.0 + 1.0
    worst = {lo_win: 0.0, hi_win: 0.0}
    for u in _direction_fan(body.dimension, args.directions):
        for win in (lo_win, hi_win):
            rhos = np.geomspace(win[0], win[1], args.radii)
            exact = np.array([indicator_fourier(body, rho * u) for rho in rhos])
            lead = leading_term_along_ray(body, u, rhos)
            resid = np.abs(exact - lead) * rhos ** power
            worst[win] = max(worst[win], float(resid.max()))
    ratio = worst[hi_win] / worst[lo_win]
    print(f"residual*rho^{power:g}: low={worst[lo_win]!r} high={worst[hi_win]!r} "
          f"ratio={ratio!r}")
    if ratio > 2.0:
        raise CheckFailure(f"remainder ratio {ratio:.3f} exceeds 2")


def _cmd_chords(args):
    body = _load_body(args.body)
    rhos = np.geomspace(2.0, 200.0, args.radii)
    dirs = _direction_fan(2, args.directions)
    lines = ["rho,theta_x,theta_y,transform,bound"]
    violations = 0
    for u in dirs:
        for rho in rhos:
            mag = float(abs(indicator_fourier(body, rho * u)))
            bound = chords_mod.chord_fourier_bound(body, float(rho), u)
            if mag > bound:
                violations += 1
            lines.append(
                f"{float(rho)!r},{float(u[0])!r},{float(u[1])!r},{mag!r},{bound!r}"
            )
    _write_out(args.out, "\n".join(lines) + "\n")
    if violations:
        raise CheckFailure(f"{violations} chord-bound violations")


def _cmd_dirichlet(args):
    if args.alphas:
        alphas = _float_list(args.alphas)
    elif args.body:
        body = _load_body(args.body)
        alphas = tuple(dio.build_alpha_set(body, args.max_norm))
    else:
        raise ValueError("provide --alphas or --body with --max-norm")
    cert = dio.dirichlet_search(alphas, args.j)
    if not dio.verify_certificate(cert):
        raise CheckFailure("certificate failed independent verification")
    print(cert.to_json())


def _cmd_sweep(args):
    body = _load_body(args.body)
    schedule = _float_list(args.R_schedule) if args.R_schedule else default_r_schedule()
    config = SweepConfig(
        body_config={}, r_schedule=schedule, p_values=_float_list(args.p),
        samples=args.samples, seed=args.seed, shell=args.shell,
    )
    rows = run_sweep(body, config)
    text = sweep_csv(rows)
    _write_out(args.out, text)
    if args.gnuplot and args.out:
        Path(str(args.out) + ".gp").write_text(gnuplot_script(args.out))


def _cmd_dip(args):
    body = _load_body(args.body)
    result = dip_experiment(
        body, args.p, _int_list(args.j), samples=args.samples, seed=args.seed,
        max_frequency=args.max_frequency,
        allow_any_dimension=args.allow_any_dimension,
    )
    _write_out(args.out, result.to_csv())
    for j, ratio in result.ratios.items():
        print(f"j={j}: R_j={result.plans[j].radius:g} dip_ratio={ratio!r}",
              file=sys.stderr)


def _cmd_fit(args):
    from .norms import NormReport
    rows = []
    text = Path(args.table).read_text().splitlines()
    for line in text[1:]:
        # Body ids may contain commas; the numeric columns never do.
        parts = line.rsplit(",", 7)
        if len(parts) < 8:
            continue
        rows.append(NormReport(
            body_id=parts[0], scale=float(parts[1]), p=float(parts[2]),
            strong=float(parts[3]), weak=float(parts[4]), sup=float(parts[5]),
            sample_count=int(parts[6]), stderr_pth_power=float(parts[7]),
        ))
    fit = fit_exponent(rows, args.p, column=args.column,
                       log_deflation=args.gamma, r_min=args.r_min)
    print(f"slope={fit.slope!r} intercept={fit.intercept!r} "
          f"residual_rms={fit.residual_rms!r} window={fit.r_window} n={fit.points}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latdisc",
        description="Lattice-point discrepancy experiments for convex bodies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **flags):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        if flags.get("body", True):
            p.add_argument("--body", required=True,
                           help="body config: inline JSON or a path to a JSON file")
        return p

    p = add("count", _cmd_count)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--x", help="translation, comma separated")

    p = add("discrepancy", _cmd_discrepancy)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--x")

    p = add("field", _cmd_field)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--out")

    p = add("norms", _cmd_norms)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = add("fourier", _cmd_fourier)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--shell", type=int, default=64)
    p.add_argument("--out")

    p = add("asymptotic-check", _cmd_asymptotic_check)
    p.add_argument("--directions", type=int, default=16)
    p.add_argument("--radii", type=int, default=160)

    p = add("chords", _cmd_chords)
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--radii", type=int, default=20)
    p.add_argument("--out")

    p = add("dirichlet", _cmd_dirichlet, body=False)
    p.add_argument("--body")
    p.add_argument("--alphas", help="explicit alphas, comma separated")
    p.add_argument("--max-norm", type=float, default=2.0)
    p.add_argument("--j", type=int, required=True)

    p = add("sweep", _cmd_sweep)
    p.add_argument("--R-schedule", help="comma-separated scales; default half-octave")
    p.add_argument("--p", default="2")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shell", type=int, default=64)
    p.add_argument("--out")
    p.add_argument("--gnuplot", action="store_true",
                   help="also write <out>.gp with a companion plot script")

    p = add("dip", _cmd_dip)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--j", required=True, help="comma-separated j values")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-frequency", type=float,
                   help="override the theoretical frequency cutoff")
    p.add_argument("--allow-any-dimension", action="store_true")
    p.add_argument("--out")

    p = add("fit", _cmd_fit, body=False)
    p.add_argument("--table", required=True, help="sweep CSV to fit")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--column", default="strong", choices=["strong", "weak", "sup"])
    p.add_argument("--gamma", type=float, default=0.0,
                   help="log-deflation exponent applied before fitting")
    p.add_argument("--r-min", type=float, default=8.0)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError, dio.SearchBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

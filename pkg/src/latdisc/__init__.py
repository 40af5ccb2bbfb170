"""Lattice-point discrepancy of dilated, translated convex bodies.

Counts integer points in scaled translates R*body - x exactly, estimates the
L^p / Weak-L^p / sup norms of the discrepancy over the translation torus,
evaluates the Fourier transform of body indicators together with its
stationary-phase asymptotics and chord bounds, and constructs certified
dilation radii at which the normalized discrepancy norm dips.
"""

from .bodies import (ConvexBody, Ellipsoid, PlanarSupportBody,
                     asymmetric_reference_body, body_from_config, contains,
                     unit_ball, unit_disc, unit_vector)
from .chords import (can_roll_in_disc, chord_fourier_bound, chord_length,
                     disc_chord_length, max_curvature_radius)
from .counting import (DiscrepancyField, count_batch, count_points,
                       count_points_box_scan, discrepancy, discrepancy_field)
from .diophantine import (DirichletCertificate, ExceptionalRadiusPlan,
                          SearchBudgetExceeded, build_alpha_set,
                          curvature_asymmetry, dip_exponent, dirichlet_search,
                          exceptional_radius_plan, nearest_integer_distance,
                          verify_certificate)
from .fourier import (SpectralSequence, boundary_quadrature_fourier,
                      decay_constant, ellipsoid_fourier, indicator_fourier,
                      lattice_tail_sum_bound, leading_term,
                      leading_term_along_ray, shell_multiplicities,
                      spectral_sequence)
from .norms import (HausdorffYoungReport, KeyLemmaReport, NormReport,
                    check_key_lemma, counting_lp_norm, counting_weak_lp_norm,
                    estimate_norms, fourier_series_discrepancy,
                    hausdorff_young_check, lp_norm, sup_norm, weak_lp_norm)
from .sweeps import (DipResult, ExponentFit, SweepConfig, default_r_schedule,
                     dip_experiment, fit_exponent, run_sweep, sweep_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

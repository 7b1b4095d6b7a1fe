"""Numerical laboratory for the torsion problem -Laplace(u) = 1 on planar
convex domains, with and without a small circular hole: boundary-fitted
harmonic solves, closed-form oracles, critical-point analysis of the
torsion function, and the small-hole asymptotics of its Hessian at the
maximum point."""

from .asymptotics import (AsymptoticInputs, XepsPrediction, predict_capacity,
                          predict_gradient, predict_hessian,
                          predict_hessian_at_max, predict_limit_lambda_max,
                          predict_u, predict_xeps, theorem_a_rhs)
from .geometry import (BoundarySample, Disk, Domain, Ellipse, PuncturedDomain,
                       StarDomain, boundary_sample, format_domain, format_hole,
                       parse_domain, parse_hole)
from .harness import (CSV_HEADER, SweepConfig, SweepRow, emit,
                      extrapolate_log_limit, fit_rate, format_eps_ladder,
                      parse_eps_ladder, parse_rows, sweep, verify)
from .mfs import (DEFAULT_CONFIG, GreenFunction, HarmonicSolution,
                  IllPosedConfiguration, MfsConfig, SingularEvaluation,
                  capacity_numeric, green_numeric, solve_dirichlet)
from .torsion import (EPS_GUARDRAIL, CriticalPoint, EpsilonGuardrailError,
                      MaximumNotFound, SpectralReport, TorsionSolution,
                      find_critical_points, k_epsilon, k_epsilon_gradient,
                      l_epsilon_numeric, select_maximum, solve_torsion,
                      solve_torsion_punctured, spectral_report)

__version__ = "0.1.0"

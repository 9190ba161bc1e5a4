"""Curvature and CMC-slice stability of 3-d warped product manifolds.

The metric under study is dt^2 + h(t)^2 dw^2 on I x S^2, where dw^2 is the
round metric.  Everything reduces to the warping function h and its first
two derivatives: the tangential curvature (1 - h'^2)/h^2, the radial
curvature -h''/h, slice mean curvature h'/h, Jacobi spectra of the slices,
and the flat rotational embedding when the tangential curvature keeps a
sign.  See the individual modules for details.
"""

from .csvout import g17, write_csv
from .curvature import (CurvatureState, RadialMonotonicity, curvature_state,
                        dss_curvatures_in_r, radial_monotonicity_condition,
                        ricci_eigenvalues, ricci_infimum, ricci_normal,
                        ricci_normal_forms, riemann_apply,
                        rn_curvatures_in_r, scalar_curvature,
                        sectional_curvature)
from .embedding import (FlatEmbedding, SecondForm, build_embedding,
                        mean_vector_norm, second_form_closed,
                        second_form_numeric)
from .errors import (EmbeddingError, HypothesisViolated, IntegrationError,
                     InvalidParameters, OutOfDomain, WarpstabError)
from .oracle import (CoordMetric, OracleReport, bianchi_residual,
                     christoffel_fd, metric_from_model, ricci_from_riemann,
                     riemann_fd, sectional_fd, verify_model)
from .quadrature import (SphereRule, cumulative_integral, gauss_legendre,
                         integrate_slice, panel_integral, sphere_rule)
from .stability import (EPS_WINDOW_HI, EPS_WINDOW_LO, C0Result,
                        GeneralThresholds, QSumInput, SliceIntegrals,
                        SliceReport, StabilityWindow, Supremum, ThresholdCheck,
                        c0, codim1_ii_terms, delta_thresholds,
                        eps_window_check, general_threshold, h2_threshold,
                        p_a_poly, p_poly, qsum, qsum_general,
                        slice_integral_checks, slice_monotonicity,
                        slice_report, slice_threshold_radius,
                        slice_threshold_radius_closed, stab_main_threshold,
                        thm_slice_hypothesis)
from .warping import (ClosedFormModel, DeSitterSchwarzschild,
                      FirstIntegralModel, ProfileModel, ReissnerNordstrom,
                      SpaceForm, Trajectory, default_cap, dss_domain,
                      ellipsoid_model, hyperboloid_model, integrate_h,
                      profile_reparametrize, rn_s0, space_form_h)

__version__ = "0.1.0"

__all__ = [
    "C0Result", "ClosedFormModel", "CoordMetric",
    "CurvatureState", "DeSitterSchwarzschild", "EPS_WINDOW_HI",
    "EPS_WINDOW_LO", "EmbeddingError", "FirstIntegralModel", "FlatEmbedding",
    "GeneralThresholds", "HypothesisViolated", "IntegrationError",
    "InvalidParameters", "OracleReport", "OutOfDomain", "ProfileModel",
    "QSumInput", "RadialMonotonicity", "ReissnerNordstrom", "SecondForm",
    "SliceIntegrals",
    "SliceReport", "SpaceForm", "SphereRule", "StabilityWindow", "Supremum",
    "ThresholdCheck", "Trajectory", "WarpstabError", "bianchi_residual",
    "build_embedding", "c0", "christoffel_fd",
    "codim1_ii_terms", "cumulative_integral", "curvature_state",
    "default_cap", "delta_thresholds", "dss_curvatures_in_r", "dss_domain",
    "ellipsoid_model", "eps_window_check", "g17", "gauss_legendre",
    "general_threshold", "h2_threshold", "hyperboloid_model",
    "integrate_h", "integrate_slice", "mean_vector_norm",
    "metric_from_model", "p_a_poly", "p_poly", "panel_integral",
    "profile_reparametrize", "qsum", "qsum_general",
    "radial_monotonicity_condition", "ricci_eigenvalues",
    "ricci_from_riemann", "ricci_infimum", "ricci_normal",
    "ricci_normal_forms", "riemann_apply", "riemann_fd",
    "rn_curvatures_in_r", "rn_s0", "scalar_curvature", "second_form_closed",
    "second_form_numeric", "sectional_curvature", "sectional_fd",
    "slice_integral_checks", "slice_monotonicity", "slice_report",
    "slice_threshold_radius", "slice_threshold_radius_closed",
    "space_form_h", "sphere_rule", "stab_main_threshold",
    "thm_slice_hypothesis", "verify_model", "write_csv",
]

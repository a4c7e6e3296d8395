#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pdcshape/model.hpp"
#include "pdcshape/oracle.hpp"

namespace pdcshape {

/// Rates from the Bessel series or the quadrature oracle, same normalization.
CorrelationCurve sample_curve(const PhysicalParams& params, const CosinePhaseFilter& filter,
                              std::span<const double> tau_grid, Method method,
                              double trunc_tol = 1e-12,
                              const oracle::QuadratureSettings& quad = {});

struct TauMaxResult {
  double tau_max_fs = 0.0;
  double rate_at_max = 0.0;
  double refinement_width_fs = 0.0;
};

struct TauMaxSearch {
  std::optional<double> search_halfwidth_fs;  // default M * beta + 5 T
  double grid_step_fs = 0.5;
  double refine_tol_fs = 0.01;
  double trunc_tol = 1e-12;
};

/// Global maximum of the coincidence rate over tau: coarse scan on a grid
/// symmetric about 0, then golden-section refinement of each candidate.
/// Throws SearchError if the maximum sits on the window edge.
TauMaxResult find_tau_max(const PhysicalParams& params, const CosinePhaseFilter& filter,
                          const TauMaxSearch& search = {});

struct SweepResult {
  std::vector<double> beta_values;
  std::vector<double> tau_max_values;
  std::vector<double> rates;
};

/// beta_start + i * beta_step up to and including beta_end. Points are
/// evaluated concurrently but the result is independent of scheduling.
SweepResult sweep_beta(const PhysicalParams& params, double alpha, double beta_start,
                       double beta_end, double beta_step, const TauMaxSearch& search = {});

/// Mean spacing of same-direction zero crossings of tau_max(beta).
double oscillation_period(const SweepResult& sweep);

std::vector<CorrelationCurve> alpha_family(const PhysicalParams& params, double beta,
                                           std::span<const double> alphas,
                                           std::span<const double> tau_grid,
                                           Method method = Method::series);

struct Lobe {
  double center_fs;
  double height;
  double prominence;
};

struct LobeReport {
  std::vector<Lobe> lobes;
  double threshold = 0.0;
};

/// Strict local maxima above min_height (default 1% of the curve maximum),
/// merging maxima closer than T/4. Center and height come from a parabola
/// through the three samples around each maximum.
LobeReport detect_lobes(const CorrelationCurve& curve,
                        std::optional<double> min_height = std::nullopt);

/// Trapezoid integral of the rate over tau in fs. Grid must be uniform and
/// the edge rates below 1e-10 of the maximum.
double total_coincidence_integral(const CorrelationCurve& curve);

/// Full width at half maximum of a single-peaked curve, by linear
/// interpolation between samples.
double full_width_half_max(const CorrelationCurve& curve);

}  // namespace pdcshape

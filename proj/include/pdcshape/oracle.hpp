#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pdcshape/model.hpp"

// Direct numerical integration of the pre-integration two-photon amplitude
// over the signal detuning nu. Used as an independent check of the Bessel
// series: nothing here relies on the Jacobi-Anger expansion.
namespace pdcshape::oracle {

struct QuadratureSettings {
  double halfwidth_folds = 6.0;  // nu_max = 2 * folds / T
  int initial_points = 1024;
  int max_points = 1 << 20;
  double rel_tolerance = 1e-11;
  // Reinstate the dropped unit-modulus factors (rates must not change).
  std::optional<GlobalPhaseLedger> global_phases;

  void validate() const;
};

struct QuadratureResult {
  Complex amplitude;  // normalized to the unfiltered tau = 0 value
  double error_estimate = 0.0;  // |last - previous| after normalization
  int points = 0;
  std::vector<double> refinement_diffs;  // successive-estimate differences
};

/// exp(i nu tau) exp(-(T/2)^2 nu^2) exp(i alpha cos(beta omega_0/2 - beta nu)),
/// times the global phases when given.
Complex integrand(const PhysicalParams& params, const CosinePhaseFilter& filter, double nu,
                  double tau_fs, const std::optional<GlobalPhaseLedger>& global_phases = std::nullopt);

/// Composite trapezoid rule on [-nu_max, nu_max], doubling the point count
/// until successive estimates agree. Throws ConvergenceError at max_points.
QuadratureResult amplitude_quadrature(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                      double tau_fs, const QuadratureSettings& settings = {});

double count_rate_quadrature(const PhysicalParams& params, const CosinePhaseFilter& filter,
                             double tau_fs, const QuadratureSettings& settings = {});

/// Longitudinal mismatch k0 - k1 cos(theta) - k2 cos(theta) in 1/m, with
/// k1,2 = k* +- nu/u and k0 = 2 k* cos(theta). Identically zero.
double phase_mismatch_linearized(const PhysicalParams& params, double nu);

/// sinc(mismatch * eps_3); 1 when no crystal length is configured.
double phase_matching_factor(const PhysicalParams& params, double nu);

CorrelationCurve sample_curve_quadrature(const PhysicalParams& params,
                                         const CosinePhaseFilter& filter,
                                         std::span<const double> tau_grid,
                                         const QuadratureSettings& settings = {});

struct DeviationReport {
  double max_abs_diff = 0.0;
  double tau_at_max_fs = 0.0;
  std::size_t points = 0;
};

DeviationReport compare_methods(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                std::span<const double> tau_grid,
                                const QuadratureSettings& settings = {},
                                double trunc_tol = 1e-12);

}  // namespace pdcshape::oracle

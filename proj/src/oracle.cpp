#include "pdcshape/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdcshape/errors.hpp"
#include "pdcshape/parallel.hpp"

namespace pdcshape::oracle {
namespace {

// Integrand with the parameter-derived constants hoisted out.
struct Kernel {
  double half_t;
  double half_omega;
  double depth;
  double beta;
  double global_phase = 0.0;

  Kernel(const PhysicalParams& params, const CosinePhaseFilter& filter,
         const std::optional<GlobalPhaseLedger>& phases)
      : half_t(0.5 * characteristic_time(params)),
        half_omega(0.5 * pump_angular_frequency(params)),
        depth(filter.depth),
        beta(filter.mod_frequency_fs) {
    if (phases) {
      global_phase = -half_omega * phases->detection_time_sum_fs + phases->spatial_phase_rad;
    }
  }

  Complex operator()(double nu, double tau_fs) const {
    const double gaussian = std::exp(-(half_t * nu) * (half_t * nu));
    const double phase =
        nu * tau_fs + depth * std::cos(beta * half_omega - beta * nu) + global_phase;
    return std::polar(gaussian, phase);
  }
};

struct Trapezoid {
  Complex value;
  double diff = 0.0;
  int points = 0;
  std::vector<double> diffs;
};

// Unnormalized integral of the integrand over [-nu_max, nu_max].
Trapezoid integrate(const PhysicalParams& params, const CosinePhaseFilter& filter, double tau_fs,
                    const QuadratureSettings& settings, std::optional<GlobalPhaseLedger> phases) {
  const double t_char = characteristic_time(params);
  const double nu_max = 2.0 * settings.halfwidth_folds / t_char;
  const double scale = 2.0 * std::sqrt(std::numbers::pi) / t_char;

  // Fastest oscillation across the window must be resolved from the start.
  const double guard = 40.0 * nu_max * std::max(std::abs(tau_fs), filter.mod_frequency_fs) /
                       (2.0 * std::numbers::pi);
  int intervals = settings.initial_points;
  while (intervals <= guard) {
    if (intervals > settings.max_points / 2) {
      throw ParameterError("quadrature resolution guard exceeds max_points at tau = " +
                           std::to_string(tau_fs));
    }
    intervals *= 2;
  }

  const Kernel kernel(params, filter, phases);
  auto f = [&](double nu) { return kernel(nu, tau_fs); };

  double h = 2.0 * nu_max / intervals;
  Complex sum = 0.5 * (f(-nu_max) + f(nu_max));
  for (int j = 1; j < intervals; ++j) sum += f(-nu_max + j * h);
  Complex estimate = h * sum;

  Trapezoid out;
  double previous_abs = std::nan("");
  while (true) {
    if (intervals * 2 > settings.max_points) {
      throw ConvergenceError("quadrature did not converge at tau = " + std::to_string(tau_fs) +
                                 " fs with " + std::to_string(intervals) + " points",
                             previous_abs, std::abs(estimate));
    }
    previous_abs = std::abs(estimate);
    // Midpoints of the current panels.
    for (int j = 0; j < intervals; ++j) sum += f(-nu_max + (j + 0.5) * h);
    intervals *= 2;
    h *= 0.5;
    const Complex refined = h * sum;
    const double diff = std::abs(refined - estimate);
    out.diffs.push_back(diff / scale);
    estimate = refined;
    if (diff < settings.rel_tolerance * std::max(std::abs(refined), scale)) break;
  }
  out.value = estimate;
  out.diff = out.diffs.back();
  out.points = intervals + 1;
  return out;
}

Complex anchor(const PhysicalParams& params, const QuadratureSettings& settings) {
  return integrate(params, CosinePhaseFilter{}, 0.0, settings, std::nullopt).value;
}

QuadratureResult normalized(const Trapezoid& raw, Complex anchor_value) {
  return {raw.value / anchor_value, raw.diff, raw.points, raw.diffs};
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(std::isfinite(halfwidth_folds) && halfwidth_folds > 0.0)) {
    throw ParameterError("quadrature halfwidth_folds must be > 0");
  }
  if (initial_points < 64) throw ParameterError("quadrature initial_points must be >= 64");
  if (max_points < initial_points) throw ParameterError("quadrature max_points < initial_points");
  if (!(rel_tolerance > 0.0 && rel_tolerance <= 1e-6)) {
    throw ParameterError("quadrature rel_tolerance must lie in (0, 1e-6]");
  }
}

Complex integrand(const PhysicalParams& params, const CosinePhaseFilter& filter, double nu,
                  double tau_fs, const std::optional<GlobalPhaseLedger>& global_phases) {
  filter.validate();
  return Kernel(params, filter, global_phases)(nu, tau_fs);
}

QuadratureResult amplitude_quadrature(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                      double tau_fs, const QuadratureSettings& settings) {
  params.validate();
  filter.validate();
  settings.validate();
  if (!std::isfinite(tau_fs)) throw ParameterError("tau must be finite");
  return normalized(integrate(params, filter, tau_fs, settings, settings.global_phases),
                    anchor(params, settings));
}

double count_rate_quadrature(const PhysicalParams& params, const CosinePhaseFilter& filter,
                             double tau_fs, const QuadratureSettings& settings) {
  return std::norm(amplitude_quadrature(params, filter, tau_fs, settings).amplitude);
}

double phase_mismatch_linearized(const PhysicalParams& params, double nu) {
  params.validate();
  const double u = params.group_velocity_m_s * 1e-15;  // m/fs
  const double cos_theta = std::cos(params.emission_angle_deg * std::numbers::pi / 180.0);
  const double k_star = 0.5 * pump_angular_frequency(params) / u;  // 1/m
  const double k_pump = 2.0 * k_star * cos_theta;                 // exact degenerate matching

  // Expand around the phase-matched point: the constant parts cancel by the
  // matching condition and the nu/u parts cancel between signal and idler.
  const double constant_part = k_pump - 2.0 * k_star * cos_theta;
  const double linear_part = (nu / u) * cos_theta - (nu / u) * cos_theta;
  return constant_part - linear_part;
}

double phase_matching_factor(const PhysicalParams& params, double nu) {
  if (!params.crystal_half_length_mm) return 1.0;
  const double arg = phase_mismatch_linearized(params, nu) * (*params.crystal_half_length_mm * 1e-3);
  return arg == 0.0 ? 1.0 : std::sin(arg) / arg;
}

CorrelationCurve sample_curve_quadrature(const PhysicalParams& params,
                                         const CosinePhaseFilter& filter,
                                         std::span<const double> tau_grid,
                                         const QuadratureSettings& settings) {
  params.validate();
  filter.validate();
  settings.validate();
  validate_tau_grid(tau_grid);
  const Complex anchor_value = anchor(params, settings);
  CorrelationCurve curve{{tau_grid.begin(), tau_grid.end()}, {}, Method::quadrature, params, filter};
  curve.rates.assign(tau_grid.size(), 0.0);
  detail::parallel_for(tau_grid.size(), [&](std::size_t i) {
    const Trapezoid raw = integrate(params, filter, tau_grid[i], settings, settings.global_phases);
    curve.rates[i] = std::norm(raw.value / anchor_value);
  });
  return curve;
}

DeviationReport compare_methods(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                std::span<const double> tau_grid,
                                const QuadratureSettings& settings, double trunc_tol) {
  const CorrelationCurve series = sample_curve_series(params, filter, tau_grid, trunc_tol);
  const CorrelationCurve quad = sample_curve_quadrature(params, filter, tau_grid, settings);
  DeviationReport report{0.0, tau_grid.front(), tau_grid.size()};
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    const double d = std::abs(series.rates[i] - quad.rates[i]);
    if (d > report.max_abs_diff) {
      report.max_abs_diff = d;
      report.tau_at_max_fs = tau_grid[i];
    }
  }
  return report;
}

}  // namespace pdcshape::oracle

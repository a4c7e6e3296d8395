#include "pdcshape/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdcshape/errors.hpp"
#include "pdcshape/specfun.hpp"

namespace pdcshape {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// exp(-x) underflows to zero past this.
constexpr double kMaxExponent = 745.0;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

// i^m for any integer m.
Complex i_pow(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require(std::isfinite(pump_wavelength_nm) && pump_wavelength_nm > 0.0,
          "pump wavelength must be > 0");
  require(std::isfinite(light_speed_m_s) && light_speed_m_s > 0.0, "light speed must be > 0");
  require(std::isfinite(group_velocity_m_s) && group_velocity_m_s > 0.0 &&
              group_velocity_m_s < light_speed_m_s,
          "group velocity must lie in (0, light speed)");
  require(std::isfinite(beam_param_um) && beam_param_um > 0.0, "beam parameter must be > 0");
  require(std::isfinite(emission_angle_deg) && emission_angle_deg > 0.0 &&
              emission_angle_deg < 90.0,
          "emission angle must lie in (0, 90) degrees");
  if (crystal_half_length_mm) {
    require(std::isfinite(*crystal_half_length_mm) && *crystal_half_length_mm > 0.0,
            "crystal half-length must be > 0");
  }
}

void CosinePhaseFilter::validate() const {
  require(std::isfinite(depth) && depth >= 0.0, "modulation depth must be finite and >= 0");
  require(std::isfinite(mod_frequency_fs) && mod_frequency_fs >= 0.0,
          "modulation frequency must be finite and >= 0");
}

double characteristic_time(const PhysicalParams& params) {
  params.validate();
  const double eps_m = params.beam_param_um * 1e-6;
  const double seconds =
      2.0 * eps_m * std::sin(params.emission_angle_deg * kDegToRad) / params.group_velocity_m_s;
  return seconds * 1e15;
}

double pump_angular_frequency(const PhysicalParams& params) {
  params.validate();
  const double per_second =
      2.0 * std::numbers::pi * params.light_speed_m_s / (params.pump_wavelength_nm * 1e-9);
  return per_second * 1e-15;
}

double filter_phase(const CosinePhaseFilter& filter, double omega) {
  filter.validate();
  require(std::isfinite(omega) && omega >= 0.0, "filter_phase: omega must be >= 0");
  return filter.depth * std::cos(filter.mod_frequency_fs * omega);
}

SeriesTruncation truncation_for(const CosinePhaseFilter& filter, double tol) {
  filter.validate();
  require(tol > 0.0 && tol <= 1e-3, "truncation tolerance must lie in (0, 1e-3]");
  if (filter.depth == 0.0) return {0, tol};

  const int turning = static_cast<int>(std::ceil(filter.depth));
  const int table_order = std::min(
      kMaxBesselOrder, turning + 40 + static_cast<int>(std::ceil(10.0 * std::cbrt(filter.depth))));
  const BesselTable table = bessel_j_table(filter.depth, table_order);
  for (int m = 0; m + 3 <= table_order; ++m) {
    if (m + 1 <= turning) continue;
    if (std::abs(table[m + 1]) < tol && std::abs(table[m + 2]) < tol &&
        std::abs(table[m + 3]) < tol) {
      return {m, tol};
    }
  }
  throw ParameterError("truncation_for: modulation depth too large for the Bessel table");
}

SeriesAmplitude::SeriesAmplitude(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                 const SeriesTruncation& trunc)
    : t_char_(characteristic_time(params)),
      beta_(filter.mod_frequency_fs),
      max_order_(trunc.max_order) {
  filter.validate();
  require(trunc.max_order >= 0 && trunc.max_order <= kMaxBesselOrder,
          "series truncation order out of range");
  const double half_omega = 0.5 * pump_angular_frequency(params);
  const BesselTable table = bessel_j_table(filter.depth, max_order_);
  coeffs_.resize(2 * static_cast<std::size_t>(max_order_) + 1);
  for (int m = -max_order_; m <= max_order_; ++m) {
    const int k = std::abs(m);
    const double jm = (m < 0 && k % 2 != 0) ? -table[k] : table[k];
    const double phase = m * beta_ * half_omega;
    coeffs_[static_cast<std::size_t>(m + max_order_)] =
        i_pow(m) * jm * Complex(std::cos(phase), std::sin(phase));
  }
}

Complex SeriesAmplitude::amplitude(double tau_fs) const {
  Complex sum{0.0, 0.0};
  const double inv_t = 1.0 / t_char_;
  for (int m = -max_order_; m <= max_order_; ++m) {
    const double x = (tau_fs - m * beta_) * inv_t;
    const double e = x * x;
    if (e > kMaxExponent) continue;
    sum += coeffs_[static_cast<std::size_t>(m + max_order_)] * std::exp(-e);
  }
  return sum;
}

SeriesAmplitude SeriesAmplitude::conjugated_phases() const {
  SeriesAmplitude out;
  out.t_char_ = t_char_;
  out.beta_ = beta_;
  out.max_order_ = max_order_;
  out.coeffs_.resize(coeffs_.size());
  for (int m = -max_order_; m <= max_order_; ++m) {
    // c_m = i^m J_m e^{i m phi}; replace e^{i m phi} by e^{-i m phi}.
    const Complex c = coeffs_[static_cast<std::size_t>(m + max_order_)];
    const Complex bare = c * std::conj(i_pow(m));  // J_m e^{i m phi}, since |i^m| = 1
    out.coeffs_[static_cast<std::size_t>(m + max_order_)] = i_pow(m) * std::conj(bare);
  }
  return out;
}

Complex amplitude_series(const PhysicalParams& params, const CosinePhaseFilter& filter,
                         const SeriesTruncation& trunc, double tau_fs) {
  return SeriesAmplitude(params, filter, trunc).amplitude(tau_fs);
}

double count_rate(const PhysicalParams& params, const CosinePhaseFilter& filter,
                  const SeriesTruncation& trunc, double tau_fs) {
  return SeriesAmplitude(params, filter, trunc).rate(tau_fs);
}

void validate_tau_grid(std::span<const double> tau_grid) {
  require(!tau_grid.empty(), "tau grid is empty");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    require(std::isfinite(tau_grid[i]), "tau grid contains a non-finite value");
    if (i > 0) require(tau_grid[i] > tau_grid[i - 1], "tau grid must be strictly increasing");
  }
}

CorrelationCurve sample_curve_series(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                     std::span<const double> tau_grid, double trunc_tol) {
  validate_tau_grid(tau_grid);
  const SeriesAmplitude series(params, filter, truncation_for(filter, trunc_tol));
  CorrelationCurve curve{{tau_grid.begin(), tau_grid.end()}, {}, Method::series, params, filter};
  curve.rates.reserve(tau_grid.size());
  for (double tau : tau_grid) curve.rates.push_back(series.rate(tau));
  return curve;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  require(n >= 1, "linspace needs at least one point");
  require(std::isfinite(lo) && std::isfinite(hi), "linspace bounds must be finite");
  if (n == 1) return {lo};
  require(hi > lo, "linspace needs hi > lo");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  out.back() = hi;
  return out;
}

}  // namespace pdcshape

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace pdcshape {

using Complex = std::complex<double>;

// Internal units: time in fs, angular frequency in rad/fs. Lengths and
// speeds are stored in the units they are configured in and converted when
// a derived quantity is requested.
struct PhysicalParams {
  double pump_wavelength_nm = 350.0;
  double group_velocity_m_s = 2e8;
  double beam_param_um = 100.0;  // pump transverse Gaussian parameter; radius is this / sqrt(2)
  double emission_angle_deg = 15.0;  // signal and idler share this angle
  std::optional<double> crystal_half_length_mm;
  double light_speed_m_s = 3e8;

  /// Throws ParameterError if any invariant is violated.
  void validate() const;
};

/// Idler spectral phase alpha * cos(beta * omega).
struct CosinePhaseFilter {
  double depth = 0.0;         // alpha, rad
  double mod_frequency_fs = 0.0;  // beta, fs

  void validate() const;
};

struct SeriesTruncation {
  int max_order = 0;
  double tail_tolerance = 1e-12;
};

// Factors dropped from the amplitude before taking |.|^2. They are unit
// modulus and independent of tau: exp(-i (omega_0/2)(t1 + t2)) and
// exp(i (k1* r1 + k2* r2)) with r1 = r2. The quadrature oracle can put them
// back to show that rates do not change.
struct GlobalPhaseLedger {
  double detection_time_sum_fs = 0.0;  // t1 + t2
  double spatial_phase_rad = 0.0;      // k1* r1 + k2* r2
};

enum class Method { series, quadrature };

struct CorrelationCurve {
  std::vector<double> tau_grid;  // fs, tau = t2 - t1
  std::vector<double> rates;     // normalized so the unfiltered peak is 1
  Method method = Method::series;
  PhysicalParams params;
  CosinePhaseFilter filter;
};

/// Envelope width T = 2 eps_perp sin(theta) / u, in fs.
double characteristic_time(const PhysicalParams& params);

/// omega_0 = 2 pi c / lambda_0 in rad/fs.
double pump_angular_frequency(const PhysicalParams& params);

double filter_phase(const CosinePhaseFilter& filter, double omega);

/// Smallest M past the Bessel turning point with |J_{M+1..M+3}(alpha)| < tol.
SeriesTruncation truncation_for(const CosinePhaseFilter& filter, double tol = 1e-12);

/// Precomputed Bessel-series amplitude
///   A(tau) = sum_{|m|<=M} i^m J_m(alpha) exp(i m beta omega_0/2) exp(-(tau - m beta)^2 / T^2).
/// Cheap to evaluate repeatedly at different tau.
class SeriesAmplitude {
 public:
  SeriesAmplitude(const PhysicalParams& params, const CosinePhaseFilter& filter,
                  const SeriesTruncation& trunc);

  Complex amplitude(double tau_fs) const;
  double rate(double tau_fs) const { return std::norm(amplitude(tau_fs)); }

  /// Reflected variant: every exp(i m beta omega_0/2) is conjugated.
  SeriesAmplitude conjugated_phases() const;

  double characteristic_time_fs() const { return t_char_; }
  int max_order() const { return max_order_; }
  std::span<const Complex> coefficients() const { return coeffs_; }

 private:
  SeriesAmplitude() = default;

  double t_char_ = 1.0;
  double beta_ = 0.0;
  int max_order_ = 0;
  std::vector<Complex> coeffs_;  // index m + M
};

Complex amplitude_series(const PhysicalParams& params, const CosinePhaseFilter& filter,
                         const SeriesTruncation& trunc, double tau_fs);

double count_rate(const PhysicalParams& params, const CosinePhaseFilter& filter,
                  const SeriesTruncation& trunc, double tau_fs);

/// Grid must be non-empty, finite and strictly increasing.
void validate_tau_grid(std::span<const double> tau_grid);

/// Series-method curve. For the quadrature method see oracle::sample_curve_quadrature
/// or the dispatching sample_curve in analysis.hpp.
CorrelationCurve sample_curve_series(const PhysicalParams& params, const CosinePhaseFilter& filter,
                                     std::span<const double> tau_grid, double trunc_tol = 1e-12);

/// n evenly spaced points on [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace pdcshape

#include <doctest.h>

#include <cmath>
#include <complex>
#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pdcshape/errors.hpp"
#include "pdcshape/model.hpp"
#include "pdcshape/oracle.hpp"
#include "pdcshape/specfun.hpp"

using namespace pdcshape;

namespace {
const PhysicalParams kDefaults{};
}

TEST_CASE("characteristic time") {
  CHECK(std::abs(characteristic_time(kDefaults) - 258.819) < 1e-3);

  PhysicalParams wide = kDefaults;
  wide.beam_param_um *= 2.0;
  CHECK(characteristic_time(wide) == doctest::Approx(2.0 * characteristic_time(kDefaults)).epsilon(1e-14));

  PhysicalParams near_normal = kDefaults;
  near_normal.emission_angle_deg = 89.999999;
  // sin(90 deg) / sin(15 deg) scaling of 258.819 fs
  CHECK(std::abs(characteristic_time(near_normal) - 1000.0) < 0.01);
}

TEST_CASE("pump angular frequency") {
  CHECK(std::abs(pump_angular_frequency(kDefaults) - 5.385587) < 1e-6);
  CHECK(std::abs(0.5 * pump_angular_frequency(kDefaults) - 2.692794) < 1e-6);
  PhysicalParams red = kDefaults;
  red.pump_wavelength_nm = 700.0;
  CHECK(pump_angular_frequency(red) == doctest::Approx(0.5 * pump_angular_frequency(kDefaults)).epsilon(1e-15));
}

TEST_CASE("parameter invariants") {
  auto rejects = [](auto mutate) {
    PhysicalParams p = kDefaults;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), ParameterError);
  };
  rejects([](PhysicalParams& p) { p.emission_angle_deg = 0.0; });
  rejects([](PhysicalParams& p) { p.emission_angle_deg = 90.0; });
  rejects([](PhysicalParams& p) { p.group_velocity_m_s = 3e8; });
  rejects([](PhysicalParams& p) { p.group_velocity_m_s = -1.0; });
  rejects([](PhysicalParams& p) { p.pump_wavelength_nm = 0.0; });
  rejects([](PhysicalParams& p) { p.beam_param_um = std::nan(""); });
  rejects([](PhysicalParams& p) { p.crystal_half_length_mm = -1.0; });
  CHECK_THROWS_AS((CosinePhaseFilter{-1.0, 50.0}.validate()), ParameterError);
  CHECK_THROWS_AS((CosinePhaseFilter{1.0, -5.0}.validate()), ParameterError);
  CHECK_THROWS_AS((CosinePhaseFilter{INFINITY, 5.0}.validate()), ParameterError);
}

TEST_CASE("filter phase") {
  CHECK(filter_phase({0.0, 50.0}, 1.234) == 0.0);
  CHECK(filter_phase({2.0, 0.0}, 2.692794) == 2.0);
  CHECK(std::abs(filter_phase({2.0, 50.0}, 2.692794) - (-1.802)) < 1e-3);
  CHECK_THROWS_AS(filter_phase({2.0, 50.0}, -1.0), ParameterError);
}

TEST_CASE("series truncation") {
  CHECK(truncation_for({0.0, 50.0}, 1e-12).max_order == 0);
  // Power-series values: |J_15..17(2)| are the first three below 1e-12.
  const int m2 = truncation_for({2.0, 50.0}, 1e-12).max_order;
  CHECK(m2 == 14);
  CHECK(truncation_for({10.0, 50.0}, 1e-12).max_order > m2);
  CHECK_THROWS_AS(truncation_for({2.0, 50.0}, 0.0), ParameterError);
  CHECK_THROWS_AS(truncation_for({2.0, 50.0}, 1e-2), ParameterError);

  for (double alpha : {0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
    const SeriesTruncation t = truncation_for({alpha, 0.0}, 1e-12);
    double tail = 0.0;
    for (int m = t.max_order + 1; m < t.max_order + 60; ++m) tail += 2.0 * std::abs(test::bessel_power_series(m, alpha));
    CHECK(tail < 1e-12 * 2.0);
  }
}

TEST_CASE("series amplitude examples") {
  const SeriesTruncation none = truncation_for({0.0, 0.0});
  CHECK(amplitude_series(kDefaults, {0.0, 0.0}, none, 0.0) == Complex(1.0, 0.0));

  const CosinePhaseFilter flat{2.0, 0.0};
  const Complex a = amplitude_series(kDefaults, flat, truncation_for(flat), 0.0);
  CHECK(std::abs(a - std::polar(1.0, 2.0)) < 1e-9);

  const CosinePhaseFilter wide{2.0, 1000.0};
  const Complex lobe = amplitude_series(kDefaults, wide, truncation_for(wide), 1000.0);
  CHECK(std::abs(std::abs(lobe) - 0.576725) < 1e-3);
  const double quad = std::abs(oracle::amplitude_quadrature(kDefaults, wide, 1000.0).amplitude);
  CHECK(std::abs(std::abs(lobe) - quad) < 1e-9);
}

TEST_CASE("count rate examples") {
  const double t_char = characteristic_time(kDefaults);
  const CosinePhaseFilter off{0.0, 50.0};
  CHECK(count_rate(kDefaults, off, truncation_for(off), 0.0) == 1.0);
  CHECK(std::abs(count_rate(kDefaults, off, truncation_for(off), t_char) - std::exp(-2.0)) < 1e-9);
  CHECK(std::abs(count_rate(kDefaults, off, truncation_for(off), 258.819) - 0.135335) < 1e-6);

  const CosinePhaseFilter inert{5.0, 0.0};
  for (double tau = -900.0; tau <= 900.0; tau += 37.5) {
    CHECK(std::abs(count_rate(kDefaults, inert, truncation_for(inert), tau) -
                   count_rate(kDefaults, off, truncation_for(off), tau)) <= 1e-12);
  }
}

TEST_CASE("closed form without modulation on random grids") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> beta(0.0, 2000.0);
  std::uniform_real_distribution<double> tau(-2000.0, 2000.0);
  const double t_char = characteristic_time(kDefaults);
  for (int trial = 0; trial < 50; ++trial) {
    const CosinePhaseFilter f{0.0, beta(rng)};
    const SeriesAmplitude s(kDefaults, f, truncation_for(f));
    for (int k = 0; k < 40; ++k) {
      const double t = tau(rng);
      CHECK(std::abs(s.rate(t) - test::gaussian_rate(t, t_char)) <= 1e-12);
    }
  }
}

TEST_CASE("conjugating the modulation phases reflects the curve") {
  for (double alpha : {1.0, 2.0, 10.0}) {
    for (double beta : {25.0, 50.0, 53.0, 300.0}) {
      const CosinePhaseFilter f{alpha, beta};
      const SeriesAmplitude s(kDefaults, f, truncation_for(f));
      const SeriesAmplitude r = s.conjugated_phases();
      for (double tau = -1500.0; tau <= 1500.0; tau += 12.5) {
        CHECK(std::abs(s.rate(tau) - r.rate(-tau)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("truncation stability and rate bound") {
  for (double alpha : {1.0, 2.0, 5.0, 10.0}) {
    for (double beta : {25.0, 53.0, 300.0}) {
      const CosinePhaseFilter f{alpha, beta};
      const SeriesTruncation t = truncation_for(f);
      const SeriesAmplitude base(kDefaults, f, t);
      const SeriesAmplitude doubled(kDefaults, f, {2 * t.max_order, t.tail_tolerance});
      double abs_sum = 0.0;
      for (int m = -2 * t.max_order; m <= 2 * t.max_order; ++m) abs_sum += std::abs(bessel_j(m, alpha));
      for (double tau = -4000.0; tau <= 4000.0; tau += 20.0) {
        const double r = base.rate(tau);
        CHECK(std::abs(r - doubled.rate(tau)) <= 1e-10);
        CHECK(r >= 0.0);
        CHECK(r <= abs_sum * abs_sum);
      }
    }
  }
}

TEST_CASE("sample_curve_series") {
  const double t_char = characteristic_time(kDefaults);
  const std::vector<double> grid{-t_char, 0.0, t_char};
  const CorrelationCurve c = sample_curve_series(kDefaults, {0.0, 10.0}, grid);
  CHECK(c.method == Method::series);
  CHECK(std::abs(c.rates[0] - std::exp(-2.0)) < 1e-12);
  CHECK(c.rates[1] == 1.0);
  CHECK(std::abs(c.rates[2] - std::exp(-2.0)) < 1e-12);

  const auto fine = linspace(-600.0, 600.0, 2401);
  const CorrelationCurve f = sample_curve_series(kDefaults, {2.0, 50.0}, fine);
  const auto top = std::max_element(f.rates.begin(), f.rates.end()) - f.rates.begin();
  CHECK(f.tau_grid[static_cast<std::size_t>(top)] < 0.0);

  CHECK_THROWS_AS(sample_curve_series(kDefaults, {0.0, 0.0}, std::vector<double>{}), ParameterError);
  CHECK_THROWS_AS(sample_curve_series(kDefaults, {0.0, 0.0}, std::vector<double>{1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(sample_curve_series(kDefaults, {0.0, 0.0}, std::vector<double>{2.0, 1.0}), ParameterError);
}

TEST_CASE("linspace") {
  const auto g = linspace(-1.0, 1.0, 5);
  CHECK(g == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(linspace(3.0, 3.0, 1) == std::vector<double>{3.0});
  CHECK_THROWS_AS(linspace(1.0, 0.0, 3), ParameterError);
}

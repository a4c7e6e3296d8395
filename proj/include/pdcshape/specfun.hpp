#pragma once

#include <vector>

namespace pdcshape {

/// Integer-order Bessel functions of the first kind J_0(x)..J_max_order(x).
struct BesselTable {
  double argument = 0.0;
  int max_order = 0;
  std::vector<double> values;

  double operator[](int m) const { return values[static_cast<std::size_t>(m)]; }
};

inline constexpr int kMaxBesselOrder = 1000;

/// Evaluates J_0..J_max_order at x >= 0 by normalized downward recurrence.
/// Throws ParameterError for non-finite or negative x and for max_order
/// outside [0, 1000].
BesselTable bessel_j_table(double x, int max_order);

/// J_m(x) for any integer m, using J_{-m} = (-1)^m J_m.
double bessel_j(int m, double x);

}  // namespace pdcshape

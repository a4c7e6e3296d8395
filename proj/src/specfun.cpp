#include "pdcshape/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pdcshape/errors.hpp"

namespace pdcshape {
namespace {

constexpr double kRescaleThreshold = 1e250;
constexpr double kAgreementTolerance = 1e-14;
constexpr int kMaxStartOrder = 1 << 16;

void validate(double x, int max_order) {
  if (!std::isfinite(x) || x < 0.0) {
    throw ParameterError("bessel_j: argument must be finite and >= 0, got " + std::to_string(x));
  }
  if (max_order < 0 || max_order > kMaxBesselOrder) {
    throw ParameterError("bessel_j: order out of range [0, 1000]: " + std::to_string(max_order));
  }
}

// Miller's algorithm: run J_{m-1} = (2m/x) J_m - J_{m+1} down from `start`
// with arbitrary seed, then fix the scale with J_0 + 2 sum J_{2k} = 1.
std::vector<double> downward_run(double x, int max_order, int start) {
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  double next = 0.0;   // J_{m+1}
  double cur = 1e-300; // J_m
  double even_sum = 0.0;
  for (int m = start; m >= 1; --m) {
    const double prev = (2.0 * m / x) * cur - next;
    next = cur;
    cur = prev;
    // cur now holds the (unnormalized) J_{m-1}
    const int order = m - 1;
    if (order <= max_order) out[static_cast<std::size_t>(order)] = cur;
    if (order % 2 == 0) even_sum += (order == 0 ? cur : 2.0 * cur);
    if (std::abs(cur) > kRescaleThreshold) {
      const double s = 1.0 / kRescaleThreshold;
      cur *= s;
      next *= s;
      even_sum *= s;
      for (int k = order; k <= max_order; ++k) {
        if (k >= 0) out[static_cast<std::size_t>(k)] *= s;
      }
    }
  }
  for (auto& v : out) v /= even_sum;
  return out;
}

}  // namespace

BesselTable bessel_j_table(double x, int max_order) {
  validate(x, max_order);
  BesselTable table{x, max_order, std::vector<double>(static_cast<std::size_t>(max_order) + 1, 0.0)};
  if (x == 0.0) {
    table.values[0] = 1.0;
    return table;
  }

  int start = max_order + std::max(20, static_cast<int>(std::ceil(x)));
  if (start % 2 != 0) ++start;
  std::vector<double> previous = downward_run(x, max_order, start);
  while (start < kMaxStartOrder) {
    start *= 2;
    std::vector<double> current = downward_run(x, max_order, start);
    double diff = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      diff = std::max(diff, std::abs(current[i] - previous[i]));
    }
    previous = std::move(current);
    if (diff <= kAgreementTolerance) break;
  }
  table.values = std::move(previous);
  return table;
}

double bessel_j(int m, double x) {
  const int order = std::abs(m);
  const double value = bessel_j_table(x, order)[order];
  return (m < 0 && order % 2 != 0) ? -value : value;
}

}  // namespace pdcshape

#include "pdcshape/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdcshape/errors.hpp"
#include "pdcshape/parallel.hpp"

namespace pdcshape {
namespace {

constexpr double kTieTolerance = 1e-12;
// Coarse-grid maxima this close to the best sample are all refined, since
// sampling can hide up to ~(step/T)^2 of the true peak height.
constexpr double kCandidateFraction = 1e-3;
constexpr double kInvGolden = 0.6180339887498949;

struct Bracket {
  double center;
  double rate;
  double width;
};

template <class Rate>
Bracket golden_section_max(const Rate& rate, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double span = hi - lo;
    const double x1 = hi - kInvGolden * span;
    const double x2 = lo + kInvGolden * span;
    const double f1 = rate(x1);
    const double f2 = rate(x2);
    if (f1 > f2) {
      hi = x2;
    } else if (f1 < f2) {
      lo = x1;
    } else {
      // Equal values: the maximum of a unimodal function lies between them.
      lo = x1;
      hi = x2;
    }
  }
  const double center = 0.5 * (lo + hi);
  return {center, rate(center), hi - lo};
}

// True if a should be reported in preference to b.
bool better_peak(const Bracket& a, const Bracket& b) {
  if (std::abs(a.rate - b.rate) > kTieTolerance) return a.rate > b.rate;
  if (std::abs(a.center) != std::abs(b.center)) return std::abs(a.center) < std::abs(b.center);
  return a.center < b.center;
}

double vertex_offset(double xl, double yl, double xc, double yc, double xr, double yr,
                     double* height) {
  // Parabola through three points; returns the vertex abscissa.
  const double dl = xl - xc;
  const double dr = xr - xc;
  const double sl = (yl - yc) / dl;
  const double sr = (yr - yc) / dr;
  const double curvature = (sr - sl) / (dr - dl);  // a in y = yc + b d + a d^2
  const double slope = sl - curvature * dl;
  if (curvature >= 0.0) {
    *height = yc;
    return xc;
  }
  const double d = -slope / (2.0 * curvature);
  *height = yc + slope * d + curvature * d * d;
  return xc + d;
}

}  // namespace

CorrelationCurve sample_curve(const PhysicalParams& params, const CosinePhaseFilter& filter,
                              std::span<const double> tau_grid, Method method, double trunc_tol,
                              const oracle::QuadratureSettings& quad) {
  if (method == Method::quadrature) {
    return oracle::sample_curve_quadrature(params, filter, tau_grid, quad);
  }
  return sample_curve_series(params, filter, tau_grid, trunc_tol);
}

TauMaxResult find_tau_max(const PhysicalParams& params, const CosinePhaseFilter& filter,
                          const TauMaxSearch& search) {
  if (!(search.grid_step_fs > 0.0 && search.grid_step_fs <= 1.0)) {
    throw ParameterError("grid step must lie in (0, 1] fs");
  }
  if (!(search.refine_tol_fs > 0.0 && search.refine_tol_fs <= 0.01)) {
    throw ParameterError("refine tolerance must lie in (0, 0.01] fs");
  }
  const SeriesTruncation trunc = truncation_for(filter, search.trunc_tol);
  const SeriesAmplitude series(params, filter, trunc);
  const double t_char = series.characteristic_time_fs();
  const double halfwidth = search.search_halfwidth_fs.value_or(
      trunc.max_order * filter.mod_frequency_fs + 5.0 * t_char);
  if (!(std::isfinite(halfwidth) && halfwidth > search.grid_step_fs)) {
    throw ParameterError("search halfwidth must exceed the grid step");
  }

  const auto n = static_cast<long>(std::ceil(halfwidth / search.grid_step_fs));
  const std::size_t count = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> rates(count);
  for (std::size_t k = 0; k < count; ++k) {
    rates[k] = series.rate(static_cast<double>(static_cast<long>(k) - n) * search.grid_step_fs);
  }
  const auto top = std::max_element(rates.begin(), rates.end());
  const double best_sample = *top;
  if (top == rates.begin() || top == rates.end() - 1) {
    throw SearchError("rate maximum lies on the search window edge (halfwidth " +
                      std::to_string(halfwidth) + " fs)");
  }

  auto rate = [&](double tau) { return series.rate(tau); };
  std::optional<Bracket> best;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    if (rates[k] < rates[k - 1] || rates[k] < rates[k + 1]) continue;
    if (rates[k] < best_sample * (1.0 - kCandidateFraction)) continue;
    const double tau = static_cast<double>(static_cast<long>(k) - n) * search.grid_step_fs;
    const Bracket b = golden_section_max(rate, tau - search.grid_step_fs,
                                         tau + search.grid_step_fs, 0.25 * search.refine_tol_fs);
    if (!best || better_peak(b, *best)) best = b;
  }
  // best exists: the interior argmax is itself a candidate.
  double tau_max = best->center;
  if (tau_max == 0.0) tau_max = 0.0;  // drop negative zero
  return {tau_max, best->rate, best->width};
}

SweepResult sweep_beta(const PhysicalParams& params, double alpha, double beta_start,
                       double beta_end, double beta_step, const TauMaxSearch& search) {
  if (!(std::isfinite(beta_start) && std::isfinite(beta_end) && beta_start >= 0.0 &&
        beta_start < beta_end)) {
    throw ParameterError("sweep needs 0 <= beta_start < beta_end");
  }
  if (!(std::isfinite(beta_step) && beta_step > 0.0)) {
    throw ParameterError("sweep needs beta_step > 0");
  }
  params.validate();
  CosinePhaseFilter{alpha, 0.0}.validate();

  const auto steps = static_cast<std::size_t>(std::floor((beta_end - beta_start) / beta_step + 1e-9));
  SweepResult out;
  out.beta_values.resize(steps + 1);
  out.tau_max_values.resize(steps + 1);
  out.rates.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    out.beta_values[i] = beta_start + static_cast<double>(i) * beta_step;
  }
  detail::parallel_for(steps + 1, [&](std::size_t i) {
    const double beta = out.beta_values[i];
    try {
      const TauMaxResult r = find_tau_max(params, {alpha, beta}, search);
      out.tau_max_values[i] = r.tau_max_fs;
      out.rates[i] = r.rate_at_max;
    } catch (const SearchError& e) {
      throw SearchError(std::string(e.what()) + " at beta = " + std::to_string(beta) + " fs");
    }
  });
  return out;
}

double oscillation_period(const SweepResult& sweep) {
  const auto& beta = sweep.beta_values;
  const auto& tau = sweep.tau_max_values;
  if (beta.size() != tau.size()) throw ParameterError("sweep arrays differ in length");

  std::vector<double> up;
  std::vector<double> down;
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] == 0.0) continue;
    if (last && (tau[*last] < 0.0) != (tau[i] < 0.0)) {
      const double b0 = beta[*last];
      const double b1 = beta[i];
      const double t0 = tau[*last];
      const double t1 = tau[i];
      const double crossing = b0 + (b1 - b0) * t0 / (t0 - t1);
      (t0 < 0.0 ? up : down).push_back(crossing);
    }
    last = i;
  }
  if (up.size() + down.size() < 3) {
    throw InsufficientDataError("oscillation_period needs at least 3 zero crossings, found " +
                                std::to_string(up.size() + down.size()));
  }
  double span = 0.0;
  std::size_t intervals = 0;
  for (const auto* xs : {&up, &down}) {
    if (xs->size() < 2) continue;
    span += xs->back() - xs->front();
    intervals += xs->size() - 1;
  }
  return span / static_cast<double>(intervals);
}

std::vector<CorrelationCurve> alpha_family(const PhysicalParams& params, double beta,
                                           std::span<const double> alphas,
                                           std::span<const double> tau_grid, Method method) {
  std::vector<CorrelationCurve> curves;
  curves.reserve(alphas.size());
  for (double alpha : alphas) {
    curves.push_back(sample_curve(params, {alpha, beta}, tau_grid, method));
  }
  return curves;
}

LobeReport detect_lobes(const CorrelationCurve& curve, std::optional<double> min_height) {
  const auto& x = curve.tau_grid;
  const auto& y = curve.rates;
  if (x.size() != y.size() || x.size() < 3) {
    throw ParameterError("detect_lobes needs at least 3 samples");
  }
  const double t_char = characteristic_time(curve.params);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] - x[i - 1] > t_char / 20.0) {
      throw ResolutionError("curve step " + std::to_string(x[i] - x[i - 1]) +
                            " fs exceeds T/20 = " + std::to_string(t_char / 20.0) + " fs");
    }
  }

  const double peak = *std::max_element(y.begin(), y.end());
  LobeReport report;
  report.threshold = min_height.value_or(0.01 * peak);

  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > report.threshold)) continue;

    double left_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      left_min = std::min(left_min, y[j]);
    }
    double right_min = y[i];
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      if (y[j] > y[i]) break;
      right_min = std::min(right_min, y[j]);
    }
    double height = y[i];
    const double center = vertex_offset(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1], &height);
    Lobe lobe{center, height, height - std::max(left_min, right_min)};

    if (!report.lobes.empty() && lobe.center_fs - report.lobes.back().center_fs < t_char / 4.0) {
      if (lobe.height > report.lobes.back().height) report.lobes.back() = lobe;
      continue;
    }
    report.lobes.push_back(lobe);
  }
  return report;
}

double total_coincidence_integral(const CorrelationCurve& curve) {
  const auto& x = curve.tau_grid;
  const auto& y = curve.rates;
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("integral needs at least 2 samples");
  }
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - step) > 1e-6 * step) {
      throw ParameterError("integral needs a uniform tau grid");
    }
  }
  const double peak = *std::max_element(y.begin(), y.end());
  if (y.front() >= 1e-10 * peak || y.back() >= 1e-10 * peak) {
    throw WindowError("rate at the tau window edges has not decayed below 1e-10 of the maximum");
  }
  double sum = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) sum += y[i];
  return sum * step;
}

double full_width_half_max(const CorrelationCurve& curve) {
  const auto& x = curve.tau_grid;
  const auto& y = curve.rates;
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[top];
  std::size_t l = top;
  while (l > 0 && y[l] >= half) --l;
  std::size_t r = top;
  while (r + 1 < y.size() && y[r] >= half) ++r;
  if (y[l] >= half || y[r] >= half) {
    throw WindowError("curve does not fall below half maximum on both sides");
  }
  auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
  };
  return cross(r - 1, r) - cross(l, l + 1);
}

}  // namespace pdcshape

// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-pdcshape-binary>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pdcshape/analysis.hpp"
#include "pdcshape/cli_io.hpp"
#include "pdcshape/errors.hpp"
#include "pdcshape/parallel.hpp"
#include "pdcshape/specfun.hpp"

using namespace pdcshape;
namespace fs = std::filesystem;

namespace {

const PhysicalParams kDefaults{};
constexpr std::array<double, 5> kAlphas{0.0, 1.0, 2.0, 5.0, 10.0};
constexpr std::array<double, 6> kBetas{0.0, 25.0, 50.0, 53.0, 300.0, 1000.0};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  cli::RunConfig config;
  const auto rows = cli::validation_matrix(config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.report.max_abs_diff);
  o.require(rows.size() == kAlphas.size() * kBetas.size(), "30 (alpha, beta) pairs");
  o.require(worst <= 1e-8, "max |series - quadrature| = " + fmt("%.3e", worst) + " <= 1e-8");
  o.require(seconds <= 60.0, "runtime " + fmt("%.1f", seconds) + " s <= 60 s");
  return o;
}

Outcome closed_form_baseline() {
  Outcome o;
  const double t_char = characteristic_time(kDefaults);
  o.require(std::abs(t_char - 258.819) <= 1e-3, "T = " + fmt("%.4f", t_char) + " fs");
  const auto grid = linspace(-1500.0, 1500.0, 30001);
  const CorrelationCurve c = sample_curve(kDefaults, {0.0, 0.0}, grid, Method::series);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, std::abs(c.rates[i] - test::gaussian_rate(grid[i], t_char)));
  }
  o.require(worst <= 1e-12, "max |rate - exp(-2 tau^2/T^2)| = " + fmt("%.2e", worst));
  const double fwhm = full_width_half_max(c);
  o.require(std::abs(fwhm - 304.7) <= 0.1, "FWHM = " + fmt("%.3f", fwhm) + " fs");
  return o;
}

Outcome figure2() {
  Outcome o;
  const SweepResult s = sweep_beta(kDefaults, 2.0, 48.0, 53.0, 0.01);
  const auto [lo, hi] = std::minmax_element(s.tau_max_values.begin(), s.tau_max_values.end());
  o.require(*lo < 0.0 && *hi > 0.0,
            "tau_max spans [" + fmt("%.2f", *lo) + ", " + fmt("%.2f", *hi) + "] fs");
  int crossings = 0;
  double prev = 0.0;
  for (double t : s.tau_max_values) {
    if (t == 0.0) continue;
    if (prev != 0.0 && (prev < 0.0) != (t < 0.0)) ++crossings;
    prev = t;
  }
  o.require(crossings >= 2, std::to_string(crossings) + " zero crossings >= 2");
  const double extreme = std::max(std::abs(*lo), std::abs(*hi));
  o.require(extreme >= 80.0 && extreme <= 130.0,
            "max |tau_max| = " + fmt("%.2f", extreme) + " in [80, 130] fs");
  const double period = oscillation_period(s);
  o.require(std::abs(period - 2.33) <= 0.12, "period = " + fmt("%.4f", period) + " fs");
  return o;
}

Outcome figure3() {
  Outcome o;
  const double zero = find_tau_max(kDefaults, {0.0, 50.0}).tau_max_fs;
  o.require(std::abs(zero) <= 0.05, "alpha=0 tau_max = " + fmt("%.4f", zero));
  for (double alpha : {2.0, 10.0}) {
    const double at50 = find_tau_max(kDefaults, {alpha, 50.0}).tau_max_fs;
    const double at53 = find_tau_max(kDefaults, {alpha, 53.0}).tau_max_fs;
    o.require(at50 < 0.0, "alpha=" + fmt("%g", alpha) + " beta=50: " + fmt("%.2f", at50));
    o.require(at53 > 0.0, "alpha=" + fmt("%g", alpha) + " beta=53: " + fmt("%.2f", at53));
  }
  return o;
}

Outcome figure4() {
  Outcome o;
  const auto grid = linspace(-3500.0, 3500.0, 14001);
  const auto lobes_at = [&](double beta, std::optional<double> min_height = std::nullopt) {
    return detect_lobes(sample_curve(kDefaults, {2.0, beta}, grid, Method::series), min_height);
  };
  const std::size_t n50 = lobes_at(50.0).lobes.size();
  o.require(n50 == 1, "beta=50: " + std::to_string(n50) + " lobe(s)");
  const std::size_t n300 = lobes_at(300.0).lobes.size();
  o.require(n300 >= 2, "beta=300: " + std::to_string(n300) + " lobes");

  // m = 0, +-1, +-2; the m = +-3 lobes (ratio 0.050) sit below a 10% cut.
  const double j1 = test::bessel_power_series(1, 2.0);
  const LobeReport wide = lobes_at(1000.0, 0.1 * j1 * j1);
  o.require(wide.lobes.size() == 5, "beta=1000: " + std::to_string(wide.lobes.size()) + " lobes");
  if (wide.lobes.size() == 5) {
    double worst_center = 0.0;
    double worst_ratio = 0.0;
    const double tallest = std::max(wide.lobes[1].height, wide.lobes[3].height);
    for (std::size_t i = 0; i < 5; ++i) {
      const int m = static_cast<int>(i) - 2;
      const double jm = test::bessel_power_series(std::abs(m), 2.0);
      worst_center = std::max(worst_center, std::abs(wide.lobes[i].center_fs - 1000.0 * m));
      const double expected = (jm * jm) / (j1 * j1);
      worst_ratio = std::max(worst_ratio, std::abs(wide.lobes[i].height / tallest / expected - 1.0));
    }
    o.require(worst_center <= 5.0, "centers within " + fmt("%.3f", worst_center) + " fs of m*beta");
    o.require(worst_ratio <= 0.01, "height ratios within " + fmt("%.2e", worst_ratio) + " relative");
  }
  return o;
}

Outcome conservation() {
  Outcome o;
  const double t_char = characteristic_time(kDefaults);
  double lo = INFINITY;
  double hi = -INFINITY;
  double baseline = 0.0;
  for (double alpha : kAlphas) {
    for (double beta : kBetas) {
      const CosinePhaseFilter f{alpha, beta};
      const double h = truncation_for(f).max_order * beta + 8.0 * t_char;
      const auto grid = linspace(-h, h, static_cast<std::size_t>(std::ceil(2.0 * h)) + 1);
      const double value = total_coincidence_integral(sample_curve(kDefaults, f, grid, Method::series));
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      if (alpha == 0.0 && beta == 0.0) baseline = value;
    }
  }
  o.require(std::abs(baseline - 324.38) <= 0.01, "integral = " + fmt("%.4f", baseline) + " fs");
  o.require((hi - lo) / baseline <= 1e-6, "spread " + fmt("%.2e", (hi - lo) / baseline) + " relative");
  return o;
}

Outcome special_functions() {
  Outcome o;
  double series_err = 0.0;
  double recurrence_err = 0.0;
  double squares_err = 0.0;
  for (double x = 0.0; x <= 20.0; x += 0.125) {
    const BesselTable t = bessel_j_table(x, 80);
    for (int m = 0; m <= 40; ++m) {
      series_err = std::max(series_err, std::abs(t[m] - test::bessel_power_series(m, x)));
    }
    if (x > 0.0) {
      for (int m = 1; m < 80; ++m) {
        recurrence_err = std::max(recurrence_err, std::abs(t[m - 1] + t[m + 1] - (2.0 * m / x) * t[m]));
      }
    }
    double sq = 0.0;
    for (int m = -80; m <= 80; ++m) sq += bessel_j(m, x) * bessel_j(m, x);
    squares_err = std::max(squares_err, std::abs(sq - 1.0));
  }
  o.require(series_err <= 1e-12, "power series " + fmt("%.2e", series_err));
  o.require(recurrence_err <= 1e-12, "recurrence " + fmt("%.2e", recurrence_err));
  o.require(squares_err <= 1e-12, "sum of squares " + fmt("%.2e", squares_err));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome determinism(const std::string& binary) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "pdcshape_acceptance";
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"params", ""},
      {"curve", "--alpha 2 --beta 53"},
      {"curve", "--alpha 2 --beta 50 --method quadrature --points 241"},
      {"sweep-beta", "--beta-start 48 --beta-end 50 --beta-step 0.05"},
      {"tau-max", "--alpha 10 --beta 53"},
      {"lobes", "--beta 1000 --tau-min -3500 --tau-max 3500 --points 7001"},
      {"fig2", ""},
      {"fig3", ""},
      {"fig4", ""},
  };
  int index = 0;
  for (const auto& [cmd, args] : commands) {
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (std::to_string(index) + "_" + std::to_string(run) + ".csv");
      const std::string line = "\"" + binary + "\" " + cmd + " " + args + " --out \"" + out.string() + "\"";
      const int status = std::system(line.c_str());
      if (status != 0) {
        o.require(false, cmd + " exited with status " + std::to_string(status));
        continue;
      }
      std::string content;
      if (cmd == "fig3") {
        content = slurp(cli::suffixed_path(out.string(), "beta50")) +
                  slurp(cli::suffixed_path(out.string(), "beta53"));
      } else {
        content = slurp(out);
      }
      outputs.push_back(std::move(content));
    }
    if (outputs.size() == 2) {
      o.require(!outputs[0].empty() && outputs[0] == outputs[1], cmd + " byte-identical");
    }
    ++index;
  }

  // Worker count must not leak into results.
  set_parallelism(1);
  const SweepResult serial = sweep_beta(kDefaults, 2.0, 48.0, 53.0, 0.05);
  set_parallelism(8);
  const SweepResult parallel = sweep_beta(kDefaults, 2.0, 48.0, 53.0, 0.05);
  set_parallelism(0);
  const bool same = serial.tau_max_values == parallel.tau_max_values && serial.rates == parallel.rates;
  o.require(same, "sweep identical with 1 and 8 workers");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-pdcshape>\n");
    return 2;
  }
  const std::string binary = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 closed-form baseline", closed_form_baseline},
      {"3 figure 2 sweep", figure2},
      {"4 figure 3 signs", figure3},
      {"5 figure 4 lobes", figure4},
      {"6 conservation", conservation},
      {"7 special functions", special_functions},
      {"8 determinism", [&] { return determinism(binary); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

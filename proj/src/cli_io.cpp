#include "pdcshape/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdcshape/errors.hpp"

namespace pdcshape::cli {
namespace {

constexpr std::array<std::pair<std::string_view, Command>, 9> kCommands{{
    {"curve", Command::curve},
    {"sweep-beta", Command::sweep_beta},
    {"tau-max", Command::tau_max},
    {"lobes", Command::lobes},
    {"validate", Command::validate},
    {"fig2", Command::fig2},
    {"fig3", Command::fig3},
    {"fig4", Command::fig4},
    {"params", Command::params},
}};

// Flags exposed on the command line; everything else is config-file only.
const std::vector<std::string> kCliKeys{
    "alpha",      "beta",      "tau-min",  "tau-max",     "points",    "method",
    "beta-start", "beta-end",  "beta-step", "config",     "out",       "lambda-nm",
    "u",          "eps-perp-um", "theta-deg", "light-speed"};

const std::vector<std::string> kFileKeys{
    "alpha",          "beta",           "beta-end",       "beta-start",
    "beta-step",      "crystal-half-length-mm",           "eps-perp-um",
    "grid-step",      "lambda-nm",      "light-speed",    "method",
    "min-height",     "out",            "points",         "quad-folds",
    "quad-initial-points", "quad-max-points", "quad-rel-tol", "refine-tol",
    "search-halfwidth", "tau-max",      "tau-min",        "theta-deg",
    "truncation-tol", "u"};

constexpr std::array<double, 5> kValidationAlphas{0.0, 1.0, 2.0, 5.0, 10.0};
constexpr std::array<double, 6> kValidationBetas{0.0, 25.0, 50.0, 53.0, 300.0, 1000.0};
constexpr double kValidationStep = 10.0;

constexpr std::array<double, 3> kFig3Alphas{0.0, 2.0, 10.0};
constexpr std::array<double, 2> kFig3Betas{50.0, 53.0};
constexpr std::array<double, 3> kFig4Betas{50.0, 300.0, 1000.0};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw UsageError("invalid number for '" + key + "': '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("invalid integer for '" + key + "': '" + text + "'");
  }
  return value;
}

std::string join(std::span<const double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += format_number(v);
  }
  return out;
}

std::string beta_label(double beta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", beta);
  return buf;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [text, cmd] : kCommands) {
    if (text == name) return cmd;
  }
  return std::nullopt;
}

std::string_view command_name(Command command) {
  for (const auto& [text, cmd] : kCommands) {
    if (cmd == command) return text;
  }
  return "unknown";
}

const std::vector<std::string>& config_keys() { return kFileKeys; }

Settings parse_config_text(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (std::find(kFileKeys.begin(), kFileKeys.end(), key) == kFileKeys.end()) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    }
    if (!out.emplace(key, value).second) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig resolve_config(Command command, const Settings& cli, const Settings& file) {
  RunConfig cfg;
  cfg.command = command;

  Settings merged;
  switch (command) {
    case Command::fig3:
      merged = {{"tau-min", "-1000"}, {"tau-max", "1000"}, {"points", "4001"}};
      break;
    case Command::fig4:
      merged = {{"alpha", "2"}, {"tau-min", "-3500"}, {"tau-max", "3500"}, {"points", "7001"}};
      break;
    case Command::fig2:
      merged = {{"alpha", "2"}, {"beta-start", "48"}, {"beta-end", "53"}, {"beta-step", "0.01"}};
      break;
    default:
      break;
  }
  for (const auto& [k, v] : file) merged[k] = v;
  for (const auto& [k, v] : cli) {
    if (k == "config") continue;
    if (std::find(kFileKeys.begin(), kFileKeys.end(), k) == kFileKeys.end()) {
      throw UsageError("unknown option '--" + k + "'");
    }
    merged[k] = v;
  }

  auto num = [&](const char* key, double& target) {
    if (auto it = merged.find(key); it != merged.end()) target = parse_double(key, it->second);
  };
  auto optional_num = [&](const char* key, const char* unset, std::optional<double>& target) {
    if (auto it = merged.find(key); it != merged.end()) {
      if (it->second == unset) {
        target.reset();
      } else {
        target = parse_double(key, it->second);
      }
    }
  };
  auto count = [&](const char* key, auto& target, long long lo, long long hi) {
    if (auto it = merged.find(key); it != merged.end()) {
      const long long v = parse_integer(key, it->second);
      if (v < lo || v > hi) {
        throw UsageError("'" + std::string(key) + "' out of range [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
      }
      target = static_cast<std::remove_reference_t<decltype(target)>>(v);
    }
  };

  num("lambda-nm", cfg.params.pump_wavelength_nm);
  num("u", cfg.params.group_velocity_m_s);
  num("eps-perp-um", cfg.params.beam_param_um);
  num("theta-deg", cfg.params.emission_angle_deg);
  num("light-speed", cfg.params.light_speed_m_s);
  optional_num("crystal-half-length-mm", "none", cfg.params.crystal_half_length_mm);
  num("alpha", cfg.filter.depth);
  num("beta", cfg.filter.mod_frequency_fs);
  num("tau-min", cfg.tau_min_fs);
  num("tau-max", cfg.tau_max_fs);
  count("points", cfg.points, 2, 100'000'000);
  num("beta-start", cfg.beta_start_fs);
  num("beta-end", cfg.beta_end_fs);
  num("beta-step", cfg.beta_step_fs);
  num("truncation-tol", cfg.truncation_tol);
  num("grid-step", cfg.search.grid_step_fs);
  num("refine-tol", cfg.search.refine_tol_fs);
  optional_num("search-halfwidth", "auto", cfg.search.search_halfwidth_fs);
  num("quad-folds", cfg.quad.halfwidth_folds);
  count("quad-initial-points", cfg.quad.initial_points, 1, 1LL << 30);
  count("quad-max-points", cfg.quad.max_points, 1, 1LL << 30);
  num("quad-rel-tol", cfg.quad.rel_tolerance);
  optional_num("min-height", "auto", cfg.min_height);
  cfg.search.trunc_tol = cfg.truncation_tol;

  if (auto it = merged.find("method"); it != merged.end()) {
    if (it->second == "series") {
      cfg.method = Method::series;
    } else if (it->second == "quadrature") {
      cfg.method = Method::quadrature;
    } else {
      throw UsageError("method must be 'series' or 'quadrature', got '" + it->second + "'");
    }
  }
  if (auto it = merged.find("out"); it != merged.end()) cfg.out_path = it->second;

  try {
    cfg.params.validate();
    cfg.filter.validate();
    cfg.quad.validate();
    if (!(cfg.tau_min_fs < cfg.tau_max_fs)) throw ParameterError("tau-min must be < tau-max");
    if (!(cfg.beta_start_fs >= 0.0 && cfg.beta_start_fs < cfg.beta_end_fs)) {
      throw ParameterError("need 0 <= beta-start < beta-end");
    }
    if (!(cfg.beta_step_fs > 0.0)) throw ParameterError("beta-step must be > 0");
    if (!(cfg.truncation_tol > 0.0 && cfg.truncation_tol <= 1e-3)) {
      throw ParameterError("truncation-tol must lie in (0, 1e-3]");
    }
    if (!(cfg.search.grid_step_fs > 0.0 && cfg.search.grid_step_fs <= 1.0)) {
      throw ParameterError("grid-step must lie in (0, 1] fs");
    }
    if (!(cfg.search.refine_tol_fs > 0.0 && cfg.search.refine_tol_fs <= 0.01)) {
      throw ParameterError("refine-tol must lie in (0, 0.01] fs");
    }
    if (cfg.search.search_halfwidth_fs && !(*cfg.search.search_halfwidth_fs > 0.0)) {
      throw ParameterError("search-halfwidth must be > 0");
    }
    if (cfg.min_height && !(*cfg.min_height >= 0.0)) throw ParameterError("min-height must be >= 0");
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Settings RunConfig::metadata() const {
  Settings m;
  m["command"] = std::string(command_name(command));
  m["lambda-nm"] = format_number(params.pump_wavelength_nm);
  m["u"] = format_number(params.group_velocity_m_s);
  m["eps-perp-um"] = format_number(params.beam_param_um);
  m["theta-deg"] = format_number(params.emission_angle_deg);
  m["light-speed"] = format_number(params.light_speed_m_s);
  m["crystal-half-length-mm"] =
      params.crystal_half_length_mm ? format_number(*params.crystal_half_length_mm) : "none";
  m["alpha"] = format_number(filter.depth);
  m["beta"] = format_number(filter.mod_frequency_fs);
  m["tau-min"] = format_number(tau_min_fs);
  m["tau-max"] = format_number(tau_max_fs);
  m["points"] = std::to_string(points);
  m["method"] = method == Method::series ? "series" : "quadrature";
  m["beta-start"] = format_number(beta_start_fs);
  m["beta-end"] = format_number(beta_end_fs);
  m["beta-step"] = format_number(beta_step_fs);
  m["truncation-tol"] = format_number(truncation_tol);
  m["grid-step"] = format_number(search.grid_step_fs);
  m["refine-tol"] = format_number(search.refine_tol_fs);
  m["search-halfwidth"] =
      search.search_halfwidth_fs ? format_number(*search.search_halfwidth_fs) : "auto";
  m["quad-folds"] = format_number(quad.halfwidth_folds);
  m["quad-initial-points"] = std::to_string(quad.initial_points);
  m["quad-max-points"] = std::to_string(quad.max_points);
  m["quad-rel-tol"] = format_number(quad.rel_tolerance);
  m["min-height"] = min_height ? format_number(*min_height) : "auto";
  m["derived-characteristic-time-fs"] = format_number(characteristic_time(params));
  m["derived-pump-omega-rad-per-fs"] = format_number(pump_angular_frequency(params));
  return m;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

std::string render_csv(const Settings& metadata, const CsvTable& table) {
  std::string out;
  for (const auto& [key, value] : metadata) out += "# " + key + " = " + value + "\n";
  if (table.columns.empty()) return out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& content, const std::optional<std::string>& path,
               std::ostream& fallback) {
  if (!path) {
    fallback << content;
    fallback.flush();
    if (!fallback) throw IoError("failed writing CSV to output stream");
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + *path + "' for writing");
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  file.close();
  if (!file) throw IoError("failed writing '" + *path + "'");
}

CsvTable curve_table(const std::vector<CorrelationCurve>& curves,
                     const std::vector<std::string>& rate_columns) {
  if (curves.empty() || curves.size() != rate_columns.size()) {
    throw ParameterError("curve_table needs one column name per curve");
  }
  CsvTable table;
  table.columns.push_back("tau_fs");
  table.columns.insert(table.columns.end(), rate_columns.begin(), rate_columns.end());
  const auto& grid = curves.front().tau_grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& c : curves) row.push_back(c.rates.at(i));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable sweep_table(const SweepResult& sweep) {
  CsvTable table{{"beta_fs", "tau_max_fs", "rate_at_max"}, {}};
  for (std::size_t i = 0; i < sweep.beta_values.size(); ++i) {
    table.rows.push_back({sweep.beta_values[i], sweep.tau_max_values[i], sweep.rates[i]});
  }
  return table;
}

CsvTable lobe_table(const LobeReport& report) {
  CsvTable table{{"center_fs", "height", "prominence"}, {}};
  for (const auto& lobe : report.lobes) {
    table.rows.push_back({lobe.center_fs, lobe.height, lobe.prominence});
  }
  return table;
}

std::string suffixed_path(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash) ||
      dot == (slash == std::string::npos ? 0 : slash + 1)) {
    return path + "_" + suffix;
  }
  return path.substr(0, dot) + "_" + suffix + path.substr(dot);
}

std::vector<ValidationRow> validation_matrix(const RunConfig& config) {
  const double t_char = characteristic_time(config.params);
  std::vector<ValidationRow> rows;
  for (double alpha : kValidationAlphas) {
    for (double beta : kValidationBetas) {
      const CosinePhaseFilter filter{alpha, beta};
      const SeriesTruncation trunc = truncation_for(filter, config.truncation_tol);
      const double halfwidth = trunc.max_order * beta + 6.0 * t_char;
      const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * halfwidth / kValidationStep));
      const std::vector<double> grid = linspace(-halfwidth, halfwidth, intervals + 1);
      rows.push_back({alpha, beta,
                      oracle::compare_methods(config.params, filter, grid, config.quad,
                                              config.truncation_tol)});
    }
  }
  return rows;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Settings meta = config.metadata();
  const std::vector<double> grid = config.tau_grid();

  switch (config.command) {
    case Command::params:
      write_csv(render_csv(meta, {}), config.out_path, out);
      return exit_code::ok;

    case Command::curve: {
      const auto curve = sample_curve(config.params, config.filter, grid, config.method,
                                      config.truncation_tol, config.quad);
      write_csv(render_csv(meta, curve_table({curve}, {"rate"})), config.out_path, out);
      return exit_code::ok;
    }

    case Command::sweep_beta:
    case Command::fig2: {
      const SweepResult sweep =
          sweep_beta(config.params, config.filter.depth, config.beta_start_fs, config.beta_end_fs,
                     config.beta_step_fs, config.search);
      write_csv(render_csv(meta, sweep_table(sweep)), config.out_path, out);
      return exit_code::ok;
    }

    case Command::tau_max: {
      const TauMaxResult r = find_tau_max(config.params, config.filter, config.search);
      CsvTable table{{"alpha", "beta_fs", "tau_max_fs", "rate_at_max", "refinement_width_fs"},
                     {{config.filter.depth, config.filter.mod_frequency_fs, r.tau_max_fs,
                       r.rate_at_max, r.refinement_width_fs}}};
      write_csv(render_csv(meta, table), config.out_path, out);
      return exit_code::ok;
    }

    case Command::lobes: {
      const auto curve = sample_curve(config.params, config.filter, grid, config.method,
                                      config.truncation_tol, config.quad);
      const LobeReport report = detect_lobes(curve, config.min_height);
      meta["lobe-threshold"] = format_number(report.threshold);
      write_csv(render_csv(meta, lobe_table(report)), config.out_path, out);
      return exit_code::ok;
    }

    case Command::fig3: {
      meta["preset-alphas"] = join(kFig3Alphas);
      const std::string base = config.out_path.value_or("fig3.csv");
      std::vector<std::string> columns;
      for (double a : kFig3Alphas) columns.push_back("rate_alpha" + beta_label(a));
      for (double beta : kFig3Betas) {
        const auto curves = alpha_family(config.params, beta, kFig3Alphas, grid, config.method);
        Settings file_meta = meta;
        file_meta["beta"] = format_number(beta);
        write_csv(render_csv(file_meta, curve_table(curves, columns)),
                  suffixed_path(base, "beta" + beta_label(beta)), out);
      }
      return exit_code::ok;
    }

    case Command::fig4: {
      meta["preset-betas"] = join(kFig4Betas);
      std::vector<CorrelationCurve> curves;
      std::vector<std::string> columns;
      for (double beta : kFig4Betas) {
        curves.push_back(sample_curve(config.params, {config.filter.depth, beta}, grid,
                                      config.method, config.truncation_tol, config.quad));
        columns.push_back("rate_beta" + beta_label(beta));
      }
      write_csv(render_csv(meta, curve_table(curves, columns)), config.out_path, out);
      return exit_code::ok;
    }

    case Command::validate: {
      meta["validation-tolerance"] = format_number(kValidationTolerance);
      const auto rows = validation_matrix(config);
      CsvTable table{{"alpha", "beta_fs", "max_abs_diff", "tau_at_max_fs", "points"}, {}};
      bool pass = true;
      for (const auto& r : rows) {
        table.rows.push_back({r.alpha, r.beta_fs, r.report.max_abs_diff, r.report.tau_at_max_fs,
                              static_cast<double>(r.report.points)});
        if (!(r.report.max_abs_diff <= kValidationTolerance)) {
          pass = false;
          err << "validate: alpha=" << r.alpha << " beta=" << r.beta_fs
              << " fs max diff " << r.report.max_abs_diff << "\n";
        }
      }
      write_csv(render_csv(meta, table), config.out_path, out);
      return pass ? exit_code::ok : exit_code::validation;
    }
  }
  return exit_code::usage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coincidence-rate simulation of phase-filtered type-I down-converted photon pairs",
               "pdcshape"};
  std::string command_text;
  app.add_option("command", command_text,
                 "curve | sweep-beta | tau-max | lobes | validate | fig2 | fig3 | fig4 | params")
      ->required();
  std::map<std::string, std::string> raw;
  for (const auto& key : kCliKeys) {
    app.add_option_function<std::string>("--" + key, [&raw, key](const std::string& v) { raw[key] = v; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "pdcshape: " << e.what() << "\n";
    return exit_code::usage;
  }

  try {
    const auto command = parse_command(command_text);
    if (!command) throw UsageError("unknown command '" + command_text + "'");
    Settings file;
    if (auto it = raw.find("config"); it != raw.end()) file = read_config_file(it->second);
    const RunConfig config = resolve_config(*command, raw, file);
    return run_command(config, out, err);
  } catch (const UsageError& e) {
    err << "pdcshape: usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ParameterError& e) {
    err << "pdcshape: usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const IoError& e) {
    err << "pdcshape: I/O error: " << e.what() << "\n";
    return exit_code::io;
  } catch (const ConvergenceError& e) {
    err << "pdcshape: " << e.what() << " (last estimates " << e.previous_estimate() << ", "
        << e.last_estimate() << ")\n";
    return exit_code::numerical;
  } catch (const std::runtime_error& e) {
    err << "pdcshape: numerical error: " << e.what() << "\n";
    return exit_code::numerical;
  }
}

}  // namespace pdcshape::cli

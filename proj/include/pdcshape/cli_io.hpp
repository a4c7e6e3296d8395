#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdcshape/analysis.hpp"
#include "pdcshape/model.hpp"
#include "pdcshape/oracle.hpp"

namespace pdcshape::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int validation = 3;
inline constexpr int io = 4;
inline constexpr int numerical = 5;
}  // namespace exit_code

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { curve, sweep_beta, tau_max, lobes, validate, fig2, fig3, fig4, params };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command command);

// Raw `key -> value` strings from one configuration source.
using Settings = std::map<std::string, std::string>;

/// Every key accepted in a config file or as a `--key` flag.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, missing
/// `=`, and duplicate keys raise UsageError.
Settings parse_config_text(std::string_view text);
Settings read_config_file(const std::string& path);

struct RunConfig {
  Command command = Command::params;
  PhysicalParams params;
  CosinePhaseFilter filter{2.0, 50.0};
  double tau_min_fs = -600.0;
  double tau_max_fs = 600.0;
  std::size_t points = 2401;
  Method method = Method::series;
  double beta_start_fs = 48.0;
  double beta_end_fs = 53.0;
  double beta_step_fs = 0.01;
  std::optional<std::string> out_path;
  double truncation_tol = 1e-12;
  oracle::QuadratureSettings quad;
  TauMaxSearch search;
  std::optional<double> min_height;

  std::vector<double> tau_grid() const { return linspace(tau_min_fs, tau_max_fs, points); }

  /// Resolved settings as `key -> formatted value`, including derived
  /// constants. Keys sort lexicographically.
  Settings metadata() const;
};

/// Precedence: cli > file > per-command preset > built-in defaults.
/// Throws UsageError on malformed values or violated invariants.
RunConfig resolve_config(Command command, const Settings& cli, const Settings& file = {});

/// Scientific notation, 9 significant digits.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// `# key = value` lines (sorted by key), then the header row and data rows,
/// LF line endings.
std::string render_csv(const Settings& metadata, const CsvTable& table);

/// Writes to `path`, or to `fallback` when no path is given. Throws IoError.
void write_csv(const std::string& content, const std::optional<std::string>& path,
               std::ostream& fallback);

CsvTable curve_table(const std::vector<CorrelationCurve>& curves,
                     const std::vector<std::string>& rate_columns);
CsvTable sweep_table(const SweepResult& sweep);
CsvTable lobe_table(const LobeReport& report);

/// `<stem>_<suffix><ext>` next to `path`.
std::string suffixed_path(const std::string& path, const std::string& suffix);

struct ValidationRow {
  double alpha;
  double beta_fs;
  oracle::DeviationReport report;
};

/// Series vs quadrature over alpha in {0,1,2,5,10} x beta in
/// {0,25,50,53,300,1000} fs, each on a grid with spacing <= 10 fs that spans
/// every lobe.
std::vector<ValidationRow> validation_matrix(const RunConfig& config);
inline constexpr double kValidationTolerance = 1e-8;

/// Executes a resolved command. Returns the process exit code.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full front end: argv parsing, config resolution, error-to-exit mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdcshape::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcl/signals.hpp"
#include "tcl/simulator.hpp"

namespace tcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

std::string version_string();

/// Flat `section.key = value` text. `#` starts a comment. Duplicate keys are
/// rejected with their line number.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct ExperimentConfig {
  FleetConfig fleet;
  SimConfig sim;
  std::optional<std::filesystem::path> signal_path;
  std::optional<std::string> builtin_signal;  ///< "canonical" or "constant"
  double constant_pi = 1.0;
  int signal_repeat = 1;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> analyses{"tracking"};  ///< tracking, acf, convergence, doors
  std::size_t acf_max_lag = 100;
  std::vector<std::size_t> convergence_n;
  int convergence_repetitions = 1;
};

/// Builds a config from parsed key-values; unknown keys are rejected.
ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks the cross-field invariants (exactly one signal source, known
/// analyses, valid fleet and sim sections). Throws ValidationError.
void validate(const ExperimentConfig& cfg);

/// Canonical `key=value` listing of the effective configuration.
std::string canonical_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Resolves the signal source and extends it to cover the simulation horizon.
ReferenceSignal resolve_signal(const ExperimentConfig& cfg);

/// Columns of a trace file, in file order.
inline const std::vector<std::string> kTraceColumns{
    "time_s", "aggregate_w", "target_w", "error_w_per_device", "mean_z", "n_on"};

struct TraceTable {
  std::map<std::string, std::string> header;  ///< from `# key=value` lines
  std::map<std::string, std::vector<double>> columns;
  std::size_t n_devices = 0;

  const std::vector<double>& column(const std::string& name) const;
};

void write_trace(const std::filesystem::path& path, const TraceSet& trace,
                 std::span<const double> target, const std::map<std::string, std::string>& header);
TraceTable read_trace(const std::filesystem::path& path);

/// Runs the configured experiment and writes trace.csv, error.csv,
/// summary.json and any requested analysis tables to cfg.output_dir.
/// Returns an exit code; diagnostics go to `log`.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);

struct AnalyzeOptions {
  std::vector<std::filesystem::path> traces;
  std::filesystem::path output_dir = "analysis";
  bool tracking = true;
  bool acf = false;
  std::size_t acf_max_lag = 100;
  bool convergence = false;
};

/// Re-derives analyses from trace files written by cmd_run.
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& log);

/// Entry point shared by the tclsim binary and the tests.
int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcl::cli

#include "tcl/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcl/analysis.hpp"
#include "tcl/errors.hpp"

#ifndef TCL_VERSION
#define TCL_VERSION "0.0.0"
#endif

namespace tcl::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto s = trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto s = trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("config key '" + key + "': expected a non-negative integer, got '" +
                          value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto s = trim(value);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValidationError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

bool has_analysis(const ExperimentConfig& cfg, const std::string& name) {
  return std::find(cfg.analyses.begin(), cfg.analyses.end(), name) != cfg.analyses.end();
}

void write_error_series(const std::filesystem::path& path, const ErrorSeries& err,
                        const std::map<std::string, std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  out << "time_s,error_w_per_device\n";
  for (std::size_t i = 0; i < err.times.size(); ++i) {
    out << format_double(err.times[i]) << ',' << format_double(err.error_w_per_device[i]) << '\n';
  }
}

void write_acf(const std::filesystem::path& path, const Autocorrelation& acf,
               const std::map<std::string, std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  out << "# band=" << format_double(acf.band) << '\n';
  out << "lag,acf,significant\n";
  for (std::size_t k = 0; k < acf.acf.size(); ++k) {
    out << k << ',' << format_double(acf.acf[k]) << ',' << (acf.significant(k) ? 1 : 0) << '\n';
  }
}

void write_convergence(const std::filesystem::path& path, const ConvergenceTable& table,
                       const std::map<std::string, std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  if (table.log_log_slope) out << "# log_log_slope=" << format_double(*table.log_log_slope) << '\n';
  out << "n_devices,std_w_per_device\n";
  for (const auto& row : table.rows) {
    out << row.n_devices << ',' << format_double(row.std_w_per_device) << '\n';
  }
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

std::string version_string() { return std::string("tclsim ") + TCL_VERSION; }

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (!kv.emplace(key, value).second) throw ParseError("duplicate key '" + key + "'", line_no);
  }
  return kv;
}

ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "fleet.n_devices") {
      cfg.fleet.n_devices = to_uint(key, value);
    } else if (key == "fleet.hetero_lo") {
      cfg.fleet.hetero_lo = to_double(key, value);
    } else if (key == "fleet.hetero_hi") {
      cfg.fleet.hetero_hi = to_double(key, value);
    } else if (key == "fleet.w") {
      cfg.fleet.w = to_double(key, value);
    } else if (key == "fleet.model_error") {
      cfg.fleet.model_error_mode = parse_model_error_mode(value);
    } else if (key == "fleet.seed") {
      cfg.fleet.master_seed = to_uint(key, value);
    } else if (key == "model.alpha") {
      cfg.fleet.nominal.alpha = to_double(key, value);
    } else if (key == "model.p_on") {
      cfg.fleet.nominal.p_on = to_double(key, value);
    } else if (key == "model.t_off") {
      cfg.fleet.nominal.t_off = to_double(key, value);
    } else if (key == "model.t_on") {
      cfg.fleet.nominal.t_on = to_double(key, value);
    } else if (key == "model.t_min") {
      cfg.fleet.nominal.t_min = to_double(key, value);
    } else if (key == "model.t_max") {
      cfg.fleet.nominal.t_max = to_double(key, value);
    } else if (key == "sim.step_s") {
      cfg.sim.step_s = to_double(key, value);
    } else if (key == "sim.horizon_s") {
      cfg.sim.horizon_s = to_double(key, value);
    } else if (key == "sim.skip_probability") {
      cfg.sim.skip_probability = to_double(key, value);
    } else if (key == "sim.door_rate_per_day") {
      const double rate = to_double(key, value);
      cfg.sim.door_profile = rate > 0.0 ? constant_door_profile(rate) : std::vector<double>{};
    } else if (key == "sim.door_profile") {
      cfg.sim.door_profile.clear();
      for (const auto& item : split_list(value)) {
        cfg.sim.door_profile.push_back(to_double(key, item));
      }
    } else if (key == "sim.door_duration_s") {
      cfg.sim.door_duration_s = to_double(key, value);
    } else if (key == "sim.door_alpha_factor") {
      cfg.sim.door_alpha_factor = to_double(key, value);
    } else if (key == "sim.controlled") {
      cfg.sim.controlled = to_bool(key, value);
    } else if (key == "sim.threads") {
      cfg.sim.threads = static_cast<unsigned>(to_uint(key, value));
    } else if (key == "sim.record_per_device") {
      cfg.sim.record_per_device = to_bool(key, value);
    } else if (key == "signal.path") {
      cfg.signal_path = value;
    } else if (key == "signal.builtin") {
      cfg.builtin_signal = value;
    } else if (key == "signal.constant_pi") {
      cfg.constant_pi = to_double(key, value);
    } else if (key == "signal.repeat") {
      cfg.signal_repeat = static_cast<int>(to_uint(key, value));
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "analysis.list") {
      cfg.analyses = split_list(value);
    } else if (key == "analysis.acf_max_lag") {
      cfg.acf_max_lag = to_uint(key, value);
    } else if (key == "analysis.convergence_n") {
      cfg.convergence_n.clear();
      for (const auto& item : split_list(value)) cfg.convergence_n.push_back(to_uint(key, item));
    } else if (key == "analysis.convergence_repetitions") {
      cfg.convergence_repetitions = static_cast<int>(to_uint(key, value));
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  try {
    return config_from_key_values(parse_key_values(in));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void validate(const ExperimentConfig& cfg) {
  tcl::validate(cfg.fleet);
  tcl::validate(cfg.sim);
  if (cfg.signal_path.has_value() == cfg.builtin_signal.has_value()) {
    throw ValidationError("exactly one of signal.path and signal.builtin must be set");
  }
  if (cfg.builtin_signal && *cfg.builtin_signal != "canonical" &&
      *cfg.builtin_signal != "constant") {
    throw ValidationError("unknown builtin signal '" + *cfg.builtin_signal +
                          "' (expected canonical|constant)");
  }
  if (cfg.signal_path && !std::filesystem::exists(*cfg.signal_path)) {
    throw ValidationError("signal file '" + cfg.signal_path->string() + "' does not exist");
  }
  if (cfg.signal_repeat < 1) throw ValidationError("signal.repeat must be >= 1");
  for (const auto& a : cfg.analyses) {
    if (a != "tracking" && a != "acf" && a != "convergence" && a != "doors") {
      throw ValidationError("unknown analysis '" + a + "'");
    }
  }
  if (has_analysis(cfg, "convergence") && cfg.convergence_n.empty()) {
    throw ValidationError("convergence analysis needs analysis.convergence_n");
  }
  if (has_analysis(cfg, "doors") && cfg.sim.door_profile.empty()) {
    throw ValidationError("doors analysis needs a door profile (sim.door_rate_per_day)");
  }
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  const auto& f = cfg.fleet;
  kv["fleet.n_devices"] = std::to_string(f.n_devices);
  kv["fleet.hetero_lo"] = format_double(f.hetero_lo);
  kv["fleet.hetero_hi"] = format_double(f.hetero_hi);
  kv["fleet.w"] = format_double(f.w);
  kv["fleet.model_error"] = to_string(f.model_error_mode);
  kv["fleet.seed"] = std::to_string(f.master_seed);
  kv["model.alpha"] = format_double(f.nominal.alpha);
  kv["model.p_on"] = format_double(f.nominal.p_on);
  kv["model.t_off"] = format_double(f.nominal.t_off);
  kv["model.t_on"] = format_double(f.nominal.t_on);
  kv["model.t_min"] = format_double(f.nominal.t_min);
  kv["model.t_max"] = format_double(f.nominal.t_max);
  const auto& s = cfg.sim;
  kv["sim.step_s"] = format_double(s.step_s);
  kv["sim.horizon_s"] = format_double(s.horizon_s);
  kv["sim.skip_probability"] = format_double(s.skip_probability);
  std::vector<std::string> profile;
  for (double r : s.door_profile) profile.push_back(format_double(r));
  kv["sim.door_profile"] = join(profile);
  kv["sim.door_duration_s"] = format_double(s.door_duration_s);
  kv["sim.door_alpha_factor"] = format_double(s.door_alpha_factor);
  kv["sim.controlled"] = s.controlled ? "true" : "false";
  if (cfg.signal_path) kv["signal.path"] = cfg.signal_path->string();
  if (cfg.builtin_signal) kv["signal.builtin"] = *cfg.builtin_signal;
  kv["signal.constant_pi"] = format_double(cfg.constant_pi);
  kv["signal.repeat"] = std::to_string(cfg.signal_repeat);
  kv["analysis.list"] = join(cfg.analyses);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReferenceSignal resolve_signal(const ExperimentConfig& cfg) {
  const double horizon = cfg.sim.horizon_s;
  if (cfg.signal_path) {
    const ReferenceSignal loaded = load_signal(*cfg.signal_path);
    return ReferenceSignal(loaded.breakpoints(), std::max(loaded.horizon(), horizon));
  }
  if (*cfg.builtin_signal == "constant") {
    return ReferenceSignal::constant(cfg.constant_pi, horizon);
  }
  const ReferenceSignal canonical = canonical_test_signal();
  const int needed = static_cast<int>(std::ceil(horizon / canonical.horizon() - 1e-9));
  return canonical.repeated(std::max(cfg.signal_repeat, std::max(needed, 1)));
}

const std::vector<double>& TraceTable::column(const std::string& name) const {
  const auto it = columns.find(name);
  if (it == columns.end()) throw ParseError("trace is missing column '" + name + "'", 0);
  return it->second;
}

void write_trace(const std::filesystem::path& path, const TraceSet& trace,
                 std::span<const double> target,
                 const std::map<std::string, std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  out << "# n_devices=" << trace.n_devices << '\n';
  out << "# sum_p0_w=" << format_double(trace.sum_p0) << '\n';
  out << join(kTraceColumns) << '\n';
  const double n = static_cast<double>(trace.n_devices);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(trace.times[i]) << ',' << format_double(trace.aggregate_power[i]) << ','
        << format_double(target[i]) << ','
        << format_double((trace.aggregate_power[i] - target[i]) / n) << ','
        << format_double(trace.mean_z[i]) << ',' << trace.n_on[i] << '\n';
  }
}

TraceTable read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file '" + path.string() + "'");
  TraceTable table;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) table.header[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (names.empty()) {
      names = split_list(line);
      for (const auto& n : names) table.columns[n];
      continue;
    }
    const auto fields = split_list(line);
    if (fields.size() != names.size()) {
      throw ParseError(path.string() + ": expected " + std::to_string(names.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc{} || ptr != fields[i].data() + fields[i].size()) {
        throw ParseError(path.string() + ": non-numeric value '" + fields[i] + "' in column '" +
                             names[i] + "'",
                         line_no);
      }
      table.columns[names[i]].push_back(v);
    }
  }
  if (names.empty()) throw ParseError(path.string() + ": trace has no column header", 0);
  if (const auto it = table.header.find("n_devices"); it != table.header.end()) {
    table.n_devices = to_uint("n_devices", it->second);
  }
  return table;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    validate(cfg);
    const ReferenceSignal signal = resolve_signal(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    std::map<std::string, std::string> header{{"version", version_string()},
                                              {"config_hash", config_hash(cfg)},
                                              {"master_seed", std::to_string(cfg.fleet.master_seed)}};

    const auto started = std::chrono::steady_clock::now();
    const Fleet fleet = build_fleet(cfg.fleet);
    const TraceSet trace = run_simulation(fleet, signal, cfg.sim);

    nlohmann::json summary;
    std::vector<double> target = trace.target_power;
    if (has_analysis(cfg, "doors")) {
      SimConfig twin = cfg.sim;
      twin.controlled = false;
      const TraceSet baseline = run_simulation(fleet, signal, twin);
      target = door_target_power(baseline.times, baseline.aggregate_power, signal, trace.sum_p0);
      write_trace(cfg.output_dir / "baseline_trace.csv", baseline, baseline.target_power, header);
      const double base_mean =
          std::accumulate(baseline.aggregate_power.begin(), baseline.aggregate_power.end(), 0.0) /
          static_cast<double>(baseline.size());
      summary["doors"] = {{"baseline_mean_w_per_device", base_mean / trace.n_devices},
                          {"baseline_increase_fraction", base_mean / trace.sum_p0 - 1.0},
                          {"door_events", baseline.door_events}};
      summary["target"] = "door_baseline";
    } else {
      summary["target"] = "pi_times_sum_p0";
    }
    const ErrorSeries err =
        tracking_error(trace.times, trace.aggregate_power, target, trace.n_devices);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    write_trace(cfg.output_dir / "trace.csv", trace, target, header);
    write_error_series(cfg.output_dir / "error.csv", err, header);

    if (has_analysis(cfg, "acf")) {
      const Autocorrelation acf = autocorrelation(err.error_w_per_device, cfg.acf_max_lag);
      write_acf(cfg.output_dir / "acf.csv", acf, header);
    }
    if (has_analysis(cfg, "convergence")) {
      const ConvergenceTable table = convergence_scan(
          cfg.convergence_n, cfg.convergence_repetitions, cfg.fleet, cfg.sim, signal);
      write_convergence(cfg.output_dir / "convergence.csv", table, header);
      summary["convergence_slope"] =
          table.log_log_slope ? nlohmann::json(*table.log_log_slope) : nlohmann::json(nullptr);
    }

    double max_above = 0.0, max_below = 0.0;
    for (double v : trace.max_above_tmax) max_above = std::max(max_above, v);
    for (double v : trace.max_below_tmin) max_below = std::max(max_below, v);

    for (const auto& [k, v] : header) summary[k] = v;
    summary["n_devices"] = trace.n_devices;
    summary["records"] = trace.size();
    summary["sum_p0_w"] = trace.sum_p0;
    summary["std_w_per_device"] = err.std_w_per_device;
    summary["rms_w_per_device"] = err.rms_w_per_device;
    summary["runtime_s"] = runtime;
    summary["controller_calls"] = trace.controller_calls;
    summary["energy_clip_events"] = trace.energy_clip_events;
    summary["power_clip_events"] = trace.power_clip_events;
    summary["forced_switches"] = trace.forced_switches;
    summary["max_above_tmax_c"] = max_above;
    summary["max_below_tmin_c"] = max_below;

    std::ofstream out(cfg.output_dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << summary.dump(2) << '\n';
    log << "wrote " << cfg.output_dir.string() << " (std " << err.std_w_per_device
        << " W/device, " << runtime << " s)\n";
    return kExitOk;
  });
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    if (opts.traces.empty()) throw ValidationError("analyze needs at least one --trace");
    std::filesystem::create_directories(opts.output_dir);
    std::vector<double> ns, stds;
    ConvergenceTable table;
    for (const auto& path : opts.traces) {
      const TraceTable t = read_trace(path);
      if (t.n_devices == 0) throw ParseError(path.string() + ": header lacks n_devices", 0);
      const ErrorSeries err =
          tracking_error(t.column("time_s"), t.column("aggregate_w"), t.column("target_w"),
                         t.n_devices);
      std::map<std::string, std::string> header = t.header;
      header["source"] = path.filename().string();
      const std::string stem = path.stem().string();
      if (opts.tracking) write_error_series(opts.output_dir / (stem + "_error.csv"), err, header);
      if (opts.acf) {
        write_acf(opts.output_dir / (stem + "_acf.csv"),
                  autocorrelation(err.error_w_per_device, opts.acf_max_lag), header);
      }
      ConvergenceRow row;
      row.n_devices = t.n_devices;
      row.std_w_per_device = err.std_w_per_device;
      row.per_repetition = {err.std_w_per_device};
      table.rows.push_back(row);
      ns.push_back(static_cast<double>(t.n_devices));
      stds.push_back(err.std_w_per_device);
      log << path.string() << ": n=" << t.n_devices << " std=" << err.std_w_per_device
          << " W/device\n";
    }
    if (opts.convergence) {
      table.log_log_slope = log_log_slope(ns, stds);
      write_convergence(opts.output_dir / "convergence.csv", table,
                        {{"version", version_string()}});
    }
    return kExitOk;
  });
}

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralised aggregate power control of thermostatic loads"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "simulate a controlled fleet and write traces");
  std::optional<std::string> config_path, signal, model_error, out_dir;
  std::optional<std::size_t> devices;
  std::optional<double> step_s, horizon_s, skip_prob, door_rate;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  run->add_option("--config", config_path, "key=value experiment config");
  run->add_option("--signal", signal, "signal file, or 'canonical' / 'constant:<pi>'");
  run->add_option("--devices", devices, "number of appliances");
  run->add_option("--step-s", step_s, "controller step (s)");
  run->add_option("--horizon-s", horizon_s, "simulated time (s)");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--skip-prob", skip_prob, "probability of skipping a controller call");
  run->add_option("--door-rate-per-day", door_rate, "door openings per appliance per day");
  run->add_option("--model-error", model_error, "known|common|random")
      ->check(CLI::IsMember({"known", "common", "random"}));
  run->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* analyze = app.add_subcommand("analyze", "derive analyses from written traces");
  AnalyzeOptions aopts;
  std::vector<std::string> trace_paths;
  bool no_tracking = false;
  analyze->add_option("--trace", trace_paths, "trace.csv written by run")->required();
  analyze->add_option("--out", aopts.output_dir, "output directory");
  analyze->add_flag("--acf", aopts.acf, "autocorrelation of the tracking error");
  analyze->add_option("--max-lag", aopts.acf_max_lag, "largest ACF lag (records)");
  analyze->add_flag("--convergence", aopts.convergence, "std versus population size table");
  analyze->add_flag("--no-tracking", no_tracking, "skip the error-series output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*run) {
    ExperimentConfig cfg;
    const int status = guarded(err, [&] {
      if (config_path) cfg = load_config(*config_path);
      if (signal) {
        cfg.signal_path.reset();
        cfg.builtin_signal.reset();
        if (*signal == "canonical") {
          cfg.builtin_signal = "canonical";
        } else if (signal->rfind("constant:", 0) == 0) {
          cfg.builtin_signal = "constant";
          cfg.constant_pi = to_double("--signal", signal->substr(9));
        } else {
          cfg.signal_path = *signal;
        }
      }
      if (devices) cfg.fleet.n_devices = *devices;
      if (step_s) cfg.sim.step_s = *step_s;
      if (horizon_s) cfg.sim.horizon_s = *horizon_s;
      if (seed) cfg.fleet.master_seed = *seed;
      if (out_dir) cfg.output_dir = *out_dir;
      if (skip_prob) cfg.sim.skip_probability = *skip_prob;
      if (door_rate) {
        cfg.sim.door_profile =
            *door_rate > 0.0 ? constant_door_profile(*door_rate) : std::vector<double>{};
      }
      if (model_error) cfg.fleet.model_error_mode = parse_model_error_mode(*model_error);
      if (threads) cfg.sim.threads = *threads;
      return kExitOk;
    });
    if (status != kExitOk) return status;
    return cmd_run(cfg, err);
  }

  for (const auto& p : trace_paths) aopts.traces.emplace_back(p);
  aopts.tracking = !no_tracking;
  return cmd_analyze(aopts, err);
}

}  // namespace tcl::cli

#include "tcl/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "tcl/errors.hpp"

namespace tcl {

ReferenceSignal::ReferenceSignal(std::vector<Breakpoint> breakpoints, double horizon)
    : breakpoints_(std::move(breakpoints)), horizon_(horizon) {
  if (breakpoints_.empty()) throw ValidationError("reference signal has no breakpoints");
  if (breakpoints_.front().t_start != 0.0) {
    throw ValidationError("reference signal must start at t = 0");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const Breakpoint& b = breakpoints_[i];
    if (!std::isfinite(b.pi) || !(b.pi > 0.0)) {
      throw ValidationError("reference signal value must be positive (breakpoint " +
                            std::to_string(i) + ")");
    }
    if (i > 0 && !(b.t_start > breakpoints_[i - 1].t_start)) {
      throw ValidationError("reference signal times must be strictly increasing (breakpoint " +
                            std::to_string(i) + ")");
    }
  }
  if (!std::isfinite(horizon_) || horizon_ < breakpoints_.back().t_start) {
    throw ValidationError("reference signal horizon precedes its last breakpoint");
  }
}

ReferenceSignal ReferenceSignal::constant(double pi, double horizon) {
  return ReferenceSignal({{0.0, pi}}, horizon);
}

double ReferenceSignal::value_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw ValidationError("time " + std::to_string(t) + " outside reference signal [0, " +
                          std::to_string(horizon_) + "]");
  }
  // last breakpoint with t_start < t; t == 0 falls on the first
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t,
                             [](const Breakpoint& b, double v) { return b.t_start < v; });
  if (it == breakpoints_.begin()) return it->pi;
  return std::prev(it)->pi;
}

double ReferenceSignal::value_after(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw ValidationError("time " + std::to_string(t) + " outside reference signal [0, " +
                          std::to_string(horizon_) + "]");
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.t_start; });
  return std::prev(it)->pi;
}

double ReferenceSignal::integral() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double end = i + 1 < breakpoints_.size() ? breakpoints_[i + 1].t_start : horizon_;
    sum += breakpoints_[i].pi * (end - breakpoints_[i].t_start);
  }
  return sum;
}

ReferenceSignal ReferenceSignal::repeated(int count) const {
  if (count < 1) throw ValidationError("repeat count must be at least 1");
  std::vector<Breakpoint> out;
  out.reserve(breakpoints_.size() * static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    const double shift = horizon_ * r;
    for (const Breakpoint& b : breakpoints_) {
      if (!out.empty() && out.back().pi == b.pi) continue;
      out.push_back({b.t_start + shift, b.pi});
    }
  }
  return ReferenceSignal(std::move(out), horizon_ * count);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ReferenceSignal parse_signal(std::istream& in, double horizon) {
  std::vector<Breakpoint> points;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;

    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError("expected '<seconds>,<pi>'", line_no);
    }
    const auto t = parse_double(view.substr(0, comma));
    const auto pi = parse_double(view.substr(comma + 1));
    if (!t || !pi) {
      if (!seen_content) {  // header line
        seen_content = true;
        continue;
      }
      throw ParseError("non-numeric field in '" + std::string(view) + "'", line_no);
    }
    seen_content = true;
    points.push_back({*t, *pi});
  }
  if (points.empty()) throw ParseError("signal file contains no breakpoints", 0);
  const double h = horizon > 0.0 ? horizon : points.back().t_start;
  return ReferenceSignal(std::move(points), h);
}

ReferenceSignal load_signal(const std::filesystem::path& path, double horizon) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open signal file '" + path.string() + "'");
  try {
    return parse_signal(in, horizon);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

ReferenceSignal canonical_test_signal() {
  constexpr double hour = 3600.0;
  constexpr double resolution = 10.0;
  std::vector<Breakpoint> b;
  b.push_back({0.0, 1.0});
  b.push_back({0.5 * hour, 0.7});
  b.push_back({1.0 * hour, 1.3});
  for (int k = 0; k < 6; ++k) {
    b.push_back({1.5 * hour + 600.0 * k, k % 2 == 0 ? 1.25 : 0.75});
  }
  const int samples = static_cast<int>(1.5 * hour / resolution);
  for (int k = 0; k < samples; ++k) {
    const double t = 2.5 * hour + resolution * k;
    const double pi = 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * (t - 2.5 * hour) / hour);
    if (b.back().pi == pi) continue;
    b.push_back({t, pi});
  }
  if (b.back().pi != 1.0) b.push_back({4.0 * hour, 1.0});
  return ReferenceSignal(std::move(b), 5.0 * hour);
}

}  // namespace tcl

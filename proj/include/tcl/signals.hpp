#pragma once

#include <filesystem>
#include <istream>
#include <vector>

namespace tcl {

struct Breakpoint {
  double t_start = 0.0;  ///< s
  double pi = 1.0;

  bool operator==(const Breakpoint&) const = default;
};

/// Piecewise-constant dimensionless power reference.
///
/// A breakpoint (t, pi) makes `pi` effective for times strictly after t: the
/// value at a breakpoint time still belongs to the preceding segment. The
/// first breakpoint sits at t = 0 and also defines the value at t = 0.
class ReferenceSignal {
 public:
  /// Validates: non-empty, first t_start == 0, strictly increasing times,
  /// pi > 0 and finite, horizon >= last t_start. Throws ValidationError.
  ReferenceSignal(std::vector<Breakpoint> breakpoints, double horizon);

  /// Constant reference over [0, horizon].
  static ReferenceSignal constant(double pi, double horizon);

  /// Value on the interval that ends at t (left limit). Throws
  /// ValidationError outside [0, horizon].
  double value_at(double t) const;

  /// Value for the interval that starts at t (right limit), i.e. what a
  /// controller invoked at t must apply next.
  double value_after(double t) const;

  /// Integral of the signal over [0, horizon].
  double integral() const noexcept;

  /// The same signal repeated `count` times back to back.
  ReferenceSignal repeated(int count) const;

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
  double horizon() const noexcept { return horizon_; }

 private:
  std::vector<Breakpoint> breakpoints_;
  double horizon_;
};

/// Parses `<seconds>,<pi>` lines. `#` starts a comment, blank lines are
/// skipped and a non-numeric first line is taken as a header. The horizon is
/// the last breakpoint time unless `horizon` is positive.
ReferenceSignal parse_signal(std::istream& in, double horizon = 0.0);
ReferenceSignal load_signal(const std::filesystem::path& path, double horizon = 0.0);

/// Five-hour test reference at 10 s resolution: steps down and up, a square
/// wave, a sampled sinusoid and a recovery period at 1.
ReferenceSignal canonical_test_signal();

}  // namespace tcl

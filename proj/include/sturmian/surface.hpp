#pragma once

#include "sturmian/contfrac.hpp"
#include "sturmian/fractal.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>

namespace sturmian {

struct escaped_overflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

struct TriplePoint {
  double x1 = 0, x2 = 0, x3 = 0;

  TriplePoint() = default;
  TriplePoint(double a, double b, double c);

  double max_norm() const;
  friend bool operator==(const TriplePoint&, const TriplePoint&) = default;
};

inline const std::array<TriplePoint, 4>& singular_points() {
  static const std::array<TriplePoint, 4> p{TriplePoint{1, 1, 1}, TriplePoint{-1, -1, 1}, TriplePoint{1, -1, -1},
                                            TriplePoint{-1, 1, -1}};
  return p;
}

struct FrickeLevel {
  double lambda = 0;
  explicit FrickeLevel(double lam);
  double level() const { return 1.0 + lambda * lambda / 4.0; }
};

TriplePoint trace_map_apply(unsigned a, const TriplePoint& p);
TriplePoint trace_map_inverse(unsigned a, const TriplePoint& p);
double fricke(const TriplePoint& p);
TriplePoint spectral_line_point(double lambda, double E);

enum class OrbitStatus { bounded, escaped, left_region };
const char* to_string(OrbitStatus s);

struct OrbitResult {
  OrbitStatus status = OrbitStatus::bounded;
  std::size_t steps = 0;
  double max_norm = 0;
  std::optional<std::size_t> exit_index;
};

struct SurvivalRegionSpec {
  double rho = 0.1;
  double bound = 1.0;
  SurvivalRegionSpec(double rho, double bound);
  static SurvivalRegionSpec for_lambda(double rho, double lambda) { return {rho, 1.0 + lambda}; }
  bool outside(double x1, double x2, double x3) const;
};

inline constexpr double default_escape_threshold = 10.0;

OrbitResult orbit_classify(const TriplePoint& p, const ContinuedFraction& digits, std::size_t max_steps,
                           double escape_threshold = default_escape_threshold,
                           const std::optional<SurvivalRegionSpec>& region = std::nullopt);

struct SpectrumOptions {
  double resolution = 1e-3;
  std::size_t max_steps = 1000;
  double escape_threshold = default_escape_threshold;
  unsigned threads = 0;  // 0 = default pool size
};

struct SpectrumResult {
  IntervalSet set;
  std::size_t undecided_cells = 0;  // grid energies still bounded when the budget ran out
  std::size_t grid_points = 0;
  std::size_t evaluations = 0;
};

SpectrumResult spectrum_estimate(double lambda, const ContinuedFraction& digits, const SpectrumOptions& opt);

struct SurvivalResult {
  IntervalSet set;
  std::size_t undecided_cells = 0;
  std::size_t grid_points = 0;
  std::size_t evaluations = 0;
  bool empty = false;
};

// Survival set on the spectral line, intersected with `spectrum` so the result
// is always contained in it.
SurvivalResult survival_set(double lambda, const SurvivalRegionSpec& region, const ContinuedFraction& digits,
                            const SpectrumOptions& opt, const IntervalSet& spectrum);
SurvivalResult survival_set(double lambda, const SurvivalRegionSpec& region, const ContinuedFraction& digits,
                            const SpectrumOptions& opt);

}  // namespace sturmian

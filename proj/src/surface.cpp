#include "sturmian/surface.hpp"
#include "sturmian/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <vector>

namespace sturmian {

TriplePoint::TriplePoint(double a, double b, double c) : x1(a), x2(b), x3(c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
    throw std::invalid_argument("TriplePoint coordinates must be finite");
}

double TriplePoint::max_norm() const { return std::max({std::fabs(x1), std::fabs(x2), std::fabs(x3)}); }

FrickeLevel::FrickeLevel(double lam) : lambda(lam) {
  if (!(lam >= 0) || !std::isfinite(lam)) throw std::invalid_argument("lambda must be finite and >= 0");
}

namespace {

// T_a = G^a o H in place
inline void step(unsigned a, double& x1, double& x2, double& x3) {
  std::swap(x2, x3);
  for (unsigned i = 0; i < a; ++i) {
    double n1 = 2 * x1 * x3 - x2;
    x2 = x1;
    x1 = n1;
  }
}

}  // namespace

TriplePoint trace_map_apply(unsigned a, const TriplePoint& p) {
  if (a == 0) throw std::invalid_argument("digit must be >= 1");
  double x1 = p.x1, x2 = p.x2, x3 = p.x3;
  step(a, x1, x2, x3);
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x3)) throw escaped_overflow("escaped-overflow");
  return {x1, x2, x3};
}

TriplePoint trace_map_inverse(unsigned a, const TriplePoint& p) {
  if (a == 0) throw std::invalid_argument("digit must be >= 1");
  double x1 = p.x1, x2 = p.x2, x3 = p.x3;
  for (unsigned i = 0; i < a; ++i) {
    double n2 = 2 * x2 * x3 - x1;
    x1 = x2;
    x2 = n2;
  }
  std::swap(x2, x3);
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x3)) throw escaped_overflow("escaped-overflow");
  return {x1, x2, x3};
}

double fricke(const TriplePoint& p) {
  return p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3 - 2 * p.x1 * p.x2 * p.x3;
}

TriplePoint spectral_line_point(double lambda, double E) { return {(E - lambda) / 2, E / 2, 1.0}; }

const char* to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::bounded: return "bounded-up-to-budget";
    case OrbitStatus::escaped: return "escaped";
    case OrbitStatus::left_region: return "left-survival-region";
  }
  return "?";
}

SurvivalRegionSpec::SurvivalRegionSpec(double r, double b) : rho(r), bound(b) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("rho must lie in (0,1) so the balls are disjoint");
  if (!(b > 0)) throw std::invalid_argument("region bound must be positive");
}

bool SurvivalRegionSpec::outside(double x1, double x2, double x3) const {
  if (std::max({std::fabs(x1), std::fabs(x2), std::fabs(x3)}) > bound) return true;
  const double r2 = rho * rho;
  for (const auto& p : singular_points()) {
    double d1 = x1 - p.x1, d2 = x2 - p.x2, d3 = x3 - p.x3;
    if (d1 * d1 + d2 * d2 + d3 * d3 < r2) return true;
  }
  return false;
}

namespace {

OrbitResult run_orbit(double x1, double x2, double x3, const std::vector<digit_t>& digits, std::size_t max_steps,
                      double threshold, const SurvivalRegionSpec* region) {
  OrbitResult r;
  double prev = std::max({std::fabs(x1), std::fabs(x2), std::fabs(x3)});
  r.max_norm = prev;
  if (region && region->outside(x1, x2, x3)) {
    r.status = OrbitStatus::left_region;
    r.exit_index = 0;
    return r;
  }
  int over = 0;
  const std::size_t n = std::min(max_steps, digits.size());
  for (std::size_t k = 1; k <= n; ++k) {
    step(digits[k - 1], x1, x2, x3);
    r.steps = k;
    double m = std::max({std::fabs(x1), std::fabs(x2), std::fabs(x3)});
    if (!std::isfinite(m)) m = std::numeric_limits<double>::infinity();
    r.max_norm = std::max(r.max_norm, m);
    if (region && region->outside(x1, x2, x3)) {
      r.status = OrbitStatus::left_region;
      r.exit_index = k;
      return r;
    }
    if (m > threshold && m > prev) {
      if (++over >= 2 || std::isinf(m)) {
        r.status = OrbitStatus::escaped;
        return r;
      }
    } else {
      over = 0;
    }
    prev = m;
  }
  r.status = OrbitStatus::bounded;
  return r;
}

}  // namespace

OrbitResult orbit_classify(const TriplePoint& p, const ContinuedFraction& digits, std::size_t max_steps,
                           double escape_threshold, const std::optional<SurvivalRegionSpec>& region) {
  if (max_steps == 0) throw std::invalid_argument("max_steps must be >= 1");
  if (!(escape_threshold > 2)) throw std::invalid_argument("escape threshold must exceed 2");
  auto d = digits.prefix(max_steps);
  return run_orbit(p.x1, p.x2, p.x3, d, max_steps, escape_threshold, region ? &*region : nullptr);
}

namespace {

using depth_t = long long;
constexpr depth_t kNever = std::numeric_limits<depth_t>::max();

// Exit time along the spectral line: escape step, or first step outside the
// survival region; kNever when the budget runs out first.
class ExitTime {
public:
  ExitTime(double lambda, std::vector<digit_t> digits, std::size_t max_steps, double threshold,
           std::optional<SurvivalRegionSpec> region)
      : lambda_(lambda), digits_(std::move(digits)), max_steps_(std::min(max_steps, digits_.size())),
        threshold_(threshold), region_(region) {}

  // only needs to decide whether the exit time exceeds `cap`
  depth_t operator()(double E, depth_t cap = kNever) const {
    evals_.fetch_add(1, std::memory_order_relaxed);
    std::size_t budget = max_steps_;
    if (cap != kNever && cap >= 0) budget = std::min<std::size_t>(budget, static_cast<std::size_t>(cap) + 1);
    auto r = run_orbit((E - lambda_) / 2, E / 2, 1.0, digits_, budget, threshold_, region_ ? &*region_ : nullptr);
    switch (r.status) {
      case OrbitStatus::escaped: return static_cast<depth_t>(r.steps);
      case OrbitStatus::left_region: return static_cast<depth_t>(*r.exit_index);
      case OrbitStatus::bounded: break;
    }
    return kNever;
  }

  std::size_t evaluations() const { return evals_.load(); }

private:
  double lambda_;
  std::vector<digit_t> digits_;
  std::size_t max_steps_;
  double threshold_;
  std::optional<SurvivalRegionSpec> region_;
  mutable std::atomic<std::size_t> evals_{0};
};

struct Sample {
  double E;
  depth_t t;
};

// A connected run of {t > depth}: samples strictly inside, boundary estimates le/re
// (outer ends of the final bisection brackets) and the current sample spacing.
struct Run {
  std::vector<Sample> s;
  double le, re;
  depth_t depth;
  double h;
};

enum class DeadEnd { keep, drop };

class LeafRefiner {
public:
  LeafRefiner(const ExitTime& f, double resolution, DeadEnd policy)
      : f_(f), res_(resolution), tol_(resolution / 16), policy_(policy) {}

  // Expands one run; leaves go to `out`, children to `next`.
  void expand(Run run, std::vector<Interval>& out, std::vector<Run>& next) const {
    if (run.re - run.le <= res_) {
      out.push_back({run.le, run.re});
      return;
    }
    depth_t m = kNever;
    for (const auto& x : run.s) m = std::min(m, x.t);
    if (m == kNever) {
      out.push_back({run.le, run.re});
      return;
    }
    bool plateau = std::all_of(run.s.begin(), run.s.end(), [m](const Sample& x) { return x.t == m; });
    if (plateau) {
      // every sample leaves at the same step; look between them before giving up
      if (run.h / 2 < res_ / 8) {
        if (policy_ == DeadEnd::keep) out.push_back({run.le, run.re});
        return;
      }
      std::vector<Sample> finer;
      finer.reserve(2 * run.s.size() + 1);
      double prev = run.le;
      for (const auto& x : run.s) {
        double mid = 0.5 * (prev + x.E);
        finer.push_back({mid, f_(mid)});
        finer.push_back(x);
        prev = x.E;
      }
      double mid = 0.5 * (prev + run.re);
      finer.push_back({mid, f_(mid)});
      run.s = std::move(finer);
      run.h /= 2;
      next.push_back(std::move(run));
      return;
    }
    std::size_t i = 0;
    double prev_out = run.le;
    while (i < run.s.size()) {
      if (run.s[i].t <= m) {
        prev_out = run.s[i].E;
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < run.s.size() && run.s[j].t > m) ++j;
      double next_out = j < run.s.size() ? run.s[j].E : run.re;
      Run child;
      child.le = boundary(prev_out, run.s[i].E, m);
      child.re = boundary(next_out, run.s[j - 1].E, m);
      child.depth = m;
      child.h = run.h;
      child.s.assign(run.s.begin() + static_cast<std::ptrdiff_t>(i), run.s.begin() + static_cast<std::ptrdiff_t>(j));
      next.push_back(std::move(child));
      i = j;
    }
  }

  void drain(Run run, std::vector<Interval>& out) const {
    std::vector<Run> stack;
    stack.push_back(std::move(run));
    std::vector<Run> next;
    while (!stack.empty()) {
      Run r = std::move(stack.back());
      stack.pop_back();
      next.clear();
      expand(std::move(r), out, next);
      for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(std::move(*it));
    }
  }

private:
  // bisection on "t > depth"; returns the outer end (ties toward inclusion)
  double boundary(double out, double in, depth_t depth) const {
    for (int k = 0; k < 40 && std::fabs(in - out) > tol_; ++k) {
      double mid = 0.5 * (in + out);
      if (f_(mid, depth) > depth) in = mid;
      else out = mid;
    }
    return out;
  }

  const ExitTime& f_;
  double res_, tol_;
  DeadEnd policy_;
};

struct LeafResult {
  std::vector<Interval> leaves;
  std::size_t undecided = 0;
  std::size_t grid = 0;
};

LeafResult refine_exit_time(const ExitTime& f, double lambda, double resolution, DeadEnd policy, unsigned threads) {
  const double lo = -3 - lambda, hi = 3 + lambda;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / resolution)) + 1;
  LeafResult res;
  res.grid = n;
  Run top;
  top.s.resize(n);
  top.le = lo - resolution;
  top.re = lo + static_cast<double>(n) * resolution;
  top.depth = -1;
  top.h = resolution;
  parallel_for(n, [&](std::size_t i) {
    double E = lo + static_cast<double>(i) * resolution;
    top.s[i] = {E, f(E)};
  }, threads);
  for (const auto& x : top.s) res.undecided += x.t == kNever;

  if (threads == 0) threads = default_thread_count();
  LeafRefiner refiner(f, resolution, policy);
  // breadth-first until there is enough independent work, then finish each run alone
  std::vector<Run> frontier;
  frontier.push_back(std::move(top));
  const std::size_t want = threads > 1 ? 16 * threads : 1;
  for (int round = 0; round < 64 && frontier.size() < want && !frontier.empty(); ++round) {
    std::vector<Run> next;
    for (auto& r : frontier) refiner.expand(std::move(r), res.leaves, next);
    frontier = std::move(next);
  }
  std::vector<std::vector<Interval>> parts(frontier.size());
  parallel_for(frontier.size(), [&](std::size_t i) { refiner.drain(std::move(frontier[i]), parts[i]); }, threads);
  for (auto& p : parts) res.leaves.insert(res.leaves.end(), p.begin(), p.end());
  return res;
}

void check_options(double lambda, const SpectrumOptions& opt) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(opt.resolution > 0) || opt.resolution > 1) throw std::invalid_argument("resolution must lie in (0,1]");
  if (opt.max_steps == 0) throw std::invalid_argument("max_steps must be >= 1");
  if (!(opt.escape_threshold > 2)) throw std::invalid_argument("escape threshold must exceed 2");
}

}  // namespace

SpectrumResult spectrum_estimate(double lambda, const ContinuedFraction& digits, const SpectrumOptions& opt) {
  check_options(lambda, opt);
  ExitTime f(lambda, digits.prefix(opt.max_steps), opt.max_steps, opt.escape_threshold, std::nullopt);
  auto leaves = refine_exit_time(f, lambda, opt.resolution, DeadEnd::keep, opt.threads);
  SpectrumResult out;
  out.set = IntervalSet(std::move(leaves.leaves), 1e-12).clip(-2 - lambda, 2 + lambda);
  out.undecided_cells = leaves.undecided;
  out.grid_points = leaves.grid;
  out.evaluations = f.evaluations();
  return out;
}

SurvivalResult survival_set(double lambda, const SurvivalRegionSpec& region, const ContinuedFraction& digits,
                            const SpectrumOptions& opt, const IntervalSet& spectrum) {
  check_options(lambda, opt);
  ExitTime f(lambda, digits.prefix(opt.max_steps), opt.max_steps, opt.escape_threshold, region);
  auto leaves = refine_exit_time(f, lambda, opt.resolution, DeadEnd::drop, opt.threads);
  SurvivalResult out;
  out.set = IntervalSet(std::move(leaves.leaves), 1e-12).clip(-2 - lambda, 2 + lambda).intersect(spectrum);
  out.undecided_cells = leaves.undecided;
  out.grid_points = leaves.grid;
  out.evaluations = f.evaluations();
  out.empty = out.set.empty();
  return out;
}

SurvivalResult survival_set(double lambda, const SurvivalRegionSpec& region, const ContinuedFraction& digits,
                            const SpectrumOptions& opt) {
  auto spec = spectrum_estimate(lambda, digits, opt);
  auto out = survival_set(lambda, region, digits, opt, spec.set);
  out.evaluations += spec.evaluations;
  return out;
}

}  // namespace sturmian

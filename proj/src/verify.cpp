#include "sturmian/verify.hpp"

#include "sturmian/contfrac.hpp"
#include "sturmian/fractal.hpp"
#include "sturmian/surface.hpp"
#include "sturmian/torus.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sturmian {

namespace {

VerifyCheck check(std::string name, double value, double bound, bool passed, std::string detail = {}) {
  return {std::move(name), passed, value, bound, std::move(detail)};
}

double drift_scale(const TriplePoint& p) {
  return p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3 + 2 * std::fabs(p.x1 * p.x2 * p.x3);
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(std::uint64_t seed, unsigned threads) {
  std::vector<VerifyCheck> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2, 2), unit(0, 1);

  {
    double rel = 0, inv = 0;
    for (int i = 0; i < 2000; ++i) {
      TriplePoint p(box(rng), box(rng), box(rng));
      for (unsigned a = 1; a <= 5; ++a) {
        auto q = trace_map_apply(a, p);
        rel = std::max(rel, std::fabs(fricke(q) - fricke(p)) / drift_scale(q));
        auto b = trace_map_inverse(a, q);  // rounding grows with the products x_i x_j
        inv = std::max(inv, std::max({std::fabs(b.x1 - p.x1), std::fabs(b.x2 - p.x2), std::fabs(b.x3 - p.x3)}) /
                                std::pow(std::max(1.0, q.max_norm()), 2));
      }
    }
    out.push_back(check("fricke_relative_drift", rel, 1e-14, rel < 1e-14));
    out.push_back(check("trace_map_inverse", inv, 1e-14, inv < 1e-14));
  }
  {
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
      Vec2 p(unit(rng), unit(rng));
      for (unsigned a = 1; a <= 5; ++a) {
        auto l = semiconjugacy_F(DigitMatrix(a).apply_mod1(p));
        auto r = trace_map_apply(a, semiconjugacy_F(p));
        worst = std::max({worst, std::fabs(l.x1 - r.x1), std::fabs(l.x2 - r.x2), std::fabs(l.x3 - r.x3)});
      }
    }
    out.push_back(check("semiconjugacy_residual", worst, 1e-12, worst < 1e-12));
  }
  {
    double worst = 0;
    for (unsigned a = 1; a <= 50; ++a) {
      DigitMatrix m(a);
      worst = std::max({worst, std::fabs(m.mu_u() + m.mu_s() - a) / a, std::fabs(m.mu_u() * m.mu_s() + 1)});
    }
    out.push_back(check("eigenvalue_identities", worst, 1e-14, worst < 1e-14));
  }
  {
    std::uniform_int_distribution<int> len(1, 20), dig(1, 3);
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      std::vector<digit_t> d(len(rng));
      for (auto& x : d) x = dig(rng);
      ok = stable_slope_exact(d) == rational(-1) / evaluate(d);
    }
    double gold = std::fabs(stable_slope(std::vector<digit_t>(30, 1)) + (1 + std::sqrt(5.0)) / 2);
    out.push_back(check("stable_slope_exact", ok ? 0 : 1, 0, ok));
    out.push_back(check("stable_slope_golden", gold, 1e-9, gold < 1e-9));
  }
  {
    bool ok = true;
    double worst_min = 1e9;
    ConeSpec c(0.05);
    for (unsigned a = 1; a <= 10; ++a) {
      auto r = cone_check(c, a, 1024);
      ok &= r.invariant && r.min_expansion >= c.mu_bar - 1e-12 && r.max_expansion <= DigitMatrix(a).mu_u() + 1e-12;
      worst_min = std::min(worst_min, r.min_expansion - c.mu_bar);
    }
    out.push_back(check("cone_invariance_beta_0.05", worst_min, -1e-12, ok));
  }
  {
    bool ok = true;
    std::ostringstream why;
    for (const char* spec : {"golden", "(1,2)*", "silver"}) {
      auto cf = ContinuedFraction::parse(spec);
      auto conv = convergents(cf, 16);
      long double alpha = cf.value(60);
      for (std::size_t k = 1; k + 1 < conv.size(); ++k) {
        auto qk = static_cast<std::uint64_t>(conv[k].q), qk1 = static_cast<std::uint64_t>(conv[k - 1].q);
        for (std::uint64_t r = 1; r <= cf.digit(k + 2); ++r) {
          std::uint64_t n = (r + 1) * qk + qk1 - 1;
          if (n > 200) break;
          auto g = three_distance_gaps(alpha, n);
          double bound = 1.0 / double(qk1) + 1.0 / double(qk);
          if (g.size() > 2 || g.back() > bound) {
            ok = false;
            why << spec << " n=" << n << ' ';
          }
        }
      }
    }
    out.push_back(check("three_distance", ok ? 0 : 1, 0, ok, why.str()));
  }
  {
    auto cb = covering_bound({1, 2}, 0.05);
    std::uniform_int_distribution<int> dig(1, 2);
    bool ok = true;
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
      std::vector<digit_t> d(64);
      for (auto& x : d) x = dig(rng);
      auto alpha = static_cast<long double>(static_cast<double>(evaluate(d)));
      std::vector<double> pts;
      for (std::uint64_t m = 1; m <= cb.n; ++m) {
        long double v = m * alpha;
        pts.push_back(static_cast<double>(v - std::floor(v)));
      }
      std::sort(pts.begin(), pts.end());
      double gap = 1 - pts.back() + pts.front();
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) gap = std::max(gap, pts[i + 1] - pts[i]);
      worst = std::max(worst, gap / 2);
      ok &= gap / 2 < 0.05;
    }
    out.push_back(check("covering_bound", worst, 0.05, ok));
  }
  {
    std::vector<BasicInterval<rational>> iv{{rational(0), rational(1)}};
    for (int s = 0; s < 6; ++s) {
      std::vector<BasicInterval<rational>> nx;
      for (auto& x : iv) {
        rational t = (x.right - x.left) / 3;
        nx.push_back({x.left, x.left + t});
        nx.push_back({x.right - t, x.right});
      }
      iv = std::move(nx);
    }
    auto th = thickness(BasicIntervalSet<rational>(iv));
    bool ok = !th.infinite && th.tau == 1;
    out.push_back(check("thickness_middle_thirds", static_cast<double>(th.tau), 1, ok));
  }
  {
    auto fit = box_dimension(IntervalSet({{-2, 2}}), geometric_scales(0.5, 1e-4));
    out.push_back(check("box_dimension_interval", fit.dim, 1, std::fabs(fit.dim - 1) < 0.02));
  }
  {
    SpectrumOptions o;
    o.resolution = 1e-2;
    o.max_steps = 500;
    o.threads = threads;
    auto r = spectrum_estimate(0, ContinuedFraction::parse("golden"), o);
    double h = r.set.size() == 1 ? std::max(std::fabs(r.set[0].left + 2), std::fabs(r.set[0].right - 2)) : 1e9;
    out.push_back(check("free_spectrum", h, 2e-2, h < 2e-2));
  }
  {
    PerturbedMap m1(0, 1, 0.01), m2(0, 2, 0.01);
    auto rep = property_c_verify({&m1, &m2}, ConeSpec(ConeSpec::initial_beta()), 24, 0.1, threads);
    out.push_back(check("property_c_linear", static_cast<double>(rep.cone_violations + rep.bound_violations), 0,
                        rep.passed()));
  }
  {
    auto r = common_orbit_check(0.05, ContinuedFraction::parse("golden"), 100);
    out.push_back(check("common_orbit", r.max_deviation, 1e-9, r.equal && r.orbit_size <= 16));
  }
  return out;
}

}  // namespace sturmian

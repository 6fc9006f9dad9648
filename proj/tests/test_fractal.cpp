#include "sturmian/fractal.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace sturmian;
using rational = boost::multiprecision::cpp_rational;

namespace {

template <class T>
std::vector<BasicInterval<T>> cantor(int stages, T keep_num, T keep_den) {
  std::vector<BasicInterval<T>> iv{{T(0), T(1)}};
  for (int s = 0; s < stages; ++s) {
    std::vector<BasicInterval<T>> nx;
    for (auto& x : iv) {
      T t = (x.right - x.left) * keep_num / keep_den;
      nx.push_back({x.left, x.left + t});
      nx.push_back({x.right - t, x.right});
    }
    iv = std::move(nx);
  }
  return iv;
}

// smallest number of eps-boxes covering the set, by a greedy sweep
std::size_t greedy_cover(const IntervalSet& s, double eps) {
  std::size_t n = 0;
  double reach = -INFINITY;
  for (const auto& iv : s.intervals()) {
    double x = std::max(iv.left, reach);
    if (x > iv.right) continue;
    while (x <= iv.right) {
      ++n;
      reach = x + eps;
      x = reach;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("interval set normalisation") {
  IntervalSet s({{3, 4}, {0, 1}, {1, 2}, {5, 6}}, 0.0);
  REQUIRE(s.size() == 3);
  CHECK(s[0].left == 0);
  CHECK(s[0].right == 2);
  CHECK(measure(s) == 4);
  CHECK(IntervalSet({{0, 1}, {1.05, 2}}, 0.1).size() == 1);
  CHECK(measure(IntervalSet()) == 0);
  CHECK(measure(IntervalSet({{-2, 2}})) == 4);
  CHECK(s.contains(1.5));
  CHECK_FALSE(s.contains(2.5));
  CHECK_THROWS(IntervalSet({{1, 0}}));
}

TEST_CASE("intersection, subset and dilation") {
  IntervalSet a({{0, 2}, {3, 5}}), b({{1, 4}});
  auto c = a.intersect(b);
  REQUIRE(c.size() == 2);
  CHECK(c[0].left == 1);
  CHECK(c[1].right == 4);
  CHECK(c.subset_of(a));
  CHECK(c.subset_of(b));
  CHECK_FALSE(a.subset_of(b));
  CHECK(a.dilate(0.5).size() == 1);
  CHECK(a.clip(1, 10).hull().left == 1);
}

TEST_CASE("gap presentation and bridges") {
  auto s2 = BasicIntervalSet<rational>(cantor<rational>(2, 1, 3));
  auto p = presentation(s2);
  REQUIRE(p.gaps.size() == 3);
  CHECK(p.gaps[0].length() == rational(1) / 3);
  CHECK(p.gaps[1].length() == rational(1) / 9);
  CHECK(p.gaps[2].length() == rational(1) / 9);
  CHECK(p.bridges[0].first == rational(1) / 3);
  CHECK(p.bridges[0].second == rational(1) / 3);
  CHECK(p.bridges[1].first == rational(1) / 9);

  CHECK(presentation(IntervalSet({{0, 1}})).gaps.empty());
  auto h = presentation(IntervalSet({{0, 0.25}, {0.75, 1}}));
  REQUIRE(h.gaps.size() == 1);
  CHECK(h.gaps[0].left == 0.25);
  CHECK(h.bridges[0].first == 0.25);
  CHECK(h.bridges[0].second == 0.25);
}

TEST_CASE("thickness oracles") {
  for (int k = 1; k <= 8; ++k) {
    auto th = thickness(BasicIntervalSet<rational>(cantor<rational>(k, 1, 3)));
    CHECK_FALSE(th.infinite);
    CHECK(th.tau == 1);
    CHECK(std::fabs(th.dim_lower - std::log(2.0) / std::log(3.0)) < 1e-12);
  }
  auto half = thickness(BasicIntervalSet<rational>(cantor<rational>(1, 1, 4)));
  CHECK(half.tau == rational(1) / 2);
  CHECK(std::fabs(half.dim_lower - 0.5) < 1e-12);
  auto one = thickness(IntervalSet({{-2, 2}}));
  CHECK(one.infinite);
  CHECK(std::isinf(one.tau_value()));
  CHECK(one.dim_lower == 1);
}

TEST_CASE("dim_lower is monotone in tau") {
  double prev = 0;
  for (double t = 0.01; t < 50; t *= 1.3) {
    double d = dim_lower_from_tau(t);
    CHECK(d > prev);
    prev = d;
  }
  CHECK(dim_lower_from_tau(1.0) == std::log(2.0) / std::log(3.0));
}

TEST_CASE("presentation thickness matches exhaustive search on small sets") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> ng(1, 6), len(1, 40);
  for (int t = 0; t < 300; ++t) {
    int gaps = ng(rng);
    std::vector<BasicInterval<rational>> iv;
    rational x = 0;
    for (int i = 0; i <= gaps; ++i) {
      rational l = x, r = x + len(rng);
      iv.push_back({l, r});
      x = r + len(rng);
    }
    BasicIntervalSet<rational> s(iv);
    CHECK(thickness(s).tau == thickness_exhaustive(s).tau);
  }
  CHECK_THROWS(thickness_exhaustive(BasicIntervalSet<rational>(cantor<rational>(3, 1, 3))));
}

TEST_CASE("thickness is invariant under affine maps") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> len(1, 30);
  for (int t = 0; t < 50; ++t) {
    std::vector<BasicInterval<rational>> iv;
    rational x = 0;
    for (int i = 0; i < 8; ++i) {
      iv.push_back({x, x + len(rng)});
      x = iv.back().right + len(rng);
    }
    BasicIntervalSet<rational> s(iv);
    auto a = s.affine(rational(len(rng)) / 7, rational(-len(rng)));
    CHECK(thickness(a).tau == thickness(s).tau);
  }
}

TEST_CASE("box counting") {
  auto fit = box_dimension(IntervalSet({{-2, 2}}), geometric_scales(0.5, 1e-4));
  CHECK(std::fabs(fit.dim - 1) < 0.02);

  IntervalSet c10(cantor<double>(10, 1.0, 3.0));
  auto cf = box_dimension(c10, geometric_scales(0.1, 3.0 * std::pow(3.0, -10)));
  CHECK(std::fabs(cf.dim - std::log(2.0) / std::log(3.0)) < 0.02);
  for (double e : {0.1, 0.01, 0.003}) {
    // aligned boxes need at most twice the optimal cover plus one
    auto n = box_count(c10, e);
    auto g = greedy_cover(c10, e);
    CHECK(n >= g);
    CHECK(n <= 2 * g + 1);
  }

  std::vector<Interval> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({i * 0.01, i * 0.01});
  auto pf = box_dimension(IntervalSet(pts), geometric_scales(1e-3, 1e-6));
  CHECK(pf.dim < 0.1);
  CHECK(measure(IntervalSet(cantor<double>(5, 1.0, 3.0))) == doctest::Approx(std::pow(2.0 / 3.0, 5)));
  CHECK_THROWS(box_dimension(IntervalSet({{0, 1}}), {0.1}));
}

#include "sturmian/contfrac.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace sturmian;

namespace {

// plain floor/reciprocal loop, no error tracking
std::vector<digit_t> naive_expand(long double x, std::size_t n) {
  std::vector<digit_t> d;
  for (std::size_t k = 0; k < n; ++k) {
    long double y = 1.0L / x;
    long double a = std::floor(y);
    d.push_back(static_cast<digit_t>(a));
    x = y - a;
  }
  return d;
}

// sorted distinct arc lengths by brute force, 0..n inclusive
std::vector<double> brute_gaps(long double alpha, std::size_t n) {
  std::vector<long double> pts;
  for (std::size_t m = 0; m <= n; ++m) {
    long double v = m * alpha;
    pts.push_back(v - std::floor(v));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> arcs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) arcs.push_back(double(pts[i + 1] - pts[i]));
  arcs.push_back(double(1 - pts.back() + pts.front()));
  std::sort(arcs.begin(), arcs.end());
  std::vector<double> out;
  for (double a : arcs)
    if (out.empty() || a - out.back() > 1e-12) out.push_back(a);
  return out;
}

double max_circle_gap(long double alpha, std::uint64_t n) {
  std::vector<double> pts;
  for (std::uint64_t m = 1; m <= n; ++m) {
    long double v = m * alpha;
    pts.push_back(double(v - std::floor(v)));
  }
  std::sort(pts.begin(), pts.end());
  double gap = 1 - pts.back() + pts.front();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) gap = std::max(gap, pts[i + 1] - pts[i]);
  return gap;
}

}  // namespace

TEST_CASE("parse digit strings") {
  auto g = ContinuedFraction::parse("golden");
  CHECK(g.mode() == DigitMode::periodic);
  CHECK(g.prefix(5) == std::vector<digit_t>{1, 1, 1, 1, 1});
  CHECK(ContinuedFraction::parse("silver").prefix(3) == std::vector<digit_t>{2, 2, 2});
  auto f = ContinuedFraction::parse("1,1,2");
  CHECK(f.mode() == DigitMode::finite);
  CHECK(f.length() == 3u);
  CHECK(f.prefix(10) == std::vector<digit_t>{1, 1, 2});
  CHECK_THROWS(f.digit(4));
  auto p = ContinuedFraction::parse("3,(1,2)*");
  CHECK(p.prefix(6) == std::vector<digit_t>{3, 1, 2, 1, 2, 1});
  CHECK(p.alphabet() == std::set<digit_t>{1, 2, 3});
  CHECK(ContinuedFraction::parse("(1,2)*").digit(4) == 2);
  for (const char* bad : {"", "1,x,(", "0,1", "(1,2", "1,,2", "()*", "1,2,"}) CHECK_THROWS_AS(ContinuedFraction::parse(bad), std::invalid_argument);
}

TEST_CASE("generator mode checks the alphabet") {
  auto cf = ContinuedFraction::generated([](std::size_t k) { return digit_t(k % 3 == 0 ? 2 : 1); }, {1, 2});
  CHECK(cf.prefix(6) == std::vector<digit_t>{1, 1, 2, 1, 1, 2});
  auto bad = ContinuedFraction::generated([](std::size_t k) { return digit_t(k); }, {1, 2});
  CHECK(bad.digit(2) == 2);
  CHECK_THROWS(bad.digit(3));
}

TEST_CASE("cf_expand fixed points and 80-bit oracle") {
  CHECK(cf_expand((std::sqrt(5.0L) - 1) / 2, 6) == std::vector<digit_t>(6, 1));
  CHECK(cf_expand(std::sqrt(2.0L) - 1, 4) == std::vector<digit_t>(4, 2));
  long double x = 1 / std::numbers::pi_v<long double>;
  CHECK(cf_expand(x, 4) == naive_expand(x, 4));
  CHECK(cf_expand(x, 4) == std::vector<digit_t>{3, 7, 15, 1});
}

TEST_CASE("cf_expand refuses rationals and exhausted precision") {
  CHECK_THROWS_AS(cf_expand(0.5L, 3), precision_error);
  CHECK_THROWS_AS(cf_expand((std::sqrt(5.0L) - 1) / 2, 200), precision_error);
  CHECK_THROWS_AS(cf_expand(1.5L, 3), std::invalid_argument);
}

TEST_CASE("convergents against direct evaluation") {
  auto c = convergents(ContinuedFraction::parse("golden"), 5);
  std::vector<int> q{1, 2, 3, 5, 8}, p{1, 1, 2, 3, 5};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(c[i].k == i + 1);
    CHECK(c[i].q == q[i]);
    CHECK(c[i].p == p[i]);
  }
  auto s = convergents(std::vector<digit_t>{2, 2, 2});
  CHECK(s[0].q == 2);
  CHECK(s[1].q == 5);
  CHECK(s[2].q == 12);
  CHECK(s[2].p == 5);

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len(1, 25), dig(1, 9);
  for (int t = 0; t < 200; ++t) {
    std::vector<digit_t> d(len(rng));
    for (auto& a : d) a = dig(rng);
    auto cv = convergents(d);
    for (std::size_t k = 1; k <= d.size(); ++k) {
      rational direct = evaluate(std::vector<digit_t>(d.begin(), d.begin() + k));
      CHECK(rational(cv[k - 1].p) / rational(cv[k - 1].q) == direct);
      // determinant identity p_k q_{k-1} - p_{k-1} q_k = (-1)^(k+1), with p_0 = 0, q_0 = 1
      bigint pp = k == 1 ? bigint(0) : cv[k - 2].p, qp = k == 1 ? bigint(1) : cv[k - 2].q;
      CHECK(cv[k - 1].q * pp - cv[k - 1].p * qp == (k % 2 ? -1 : 1));
    }
  }
}

TEST_CASE("cf value agrees with exact evaluation") {
  auto cf = ContinuedFraction::parse("3,(1,2)*");
  long double v = cf.value(40);
  CHECK(std::fabs(double(v - static_cast<long double>(evaluate(cf.prefix(40))))) < 1e-18);
  CHECK(std::fabs(double(ContinuedFraction::parse("golden").value() - (std::sqrt(5.0L) - 1) / 2)) < 1e-18);
}

TEST_CASE("three-distance gaps") {
  long double g = (std::sqrt(5.0L) - 1) / 2;
  auto one = three_distance_gaps(g, 1);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == doctest::Approx(double(1 - g)).epsilon(1e-15));
  CHECK(one[1] == doctest::Approx(double(g)).epsilon(1e-15));
  CHECK(three_distance_gaps(g, 4).size() == 2);

  long double a12 = ContinuedFraction::parse("(1,2)*").value(60);
  auto cv = convergents(std::vector<digit_t>{1, 2, 1, 2});
  // k = 3, r = 1: n = 2 q_3 + q_2 - 1
  std::size_t n = std::size_t(2 * cv[2].q + cv[1].q - 1);
  auto gaps = three_distance_gaps(a12, n);
  CHECK(gaps.size() <= 2);
  CHECK(gaps.back() <= 1.0 / double(cv[1].q) + 1.0 / double(cv[2].q));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int t = 0; t < 50; ++t) {
    long double a = u(rng);
    for (std::size_t m : {1u, 2u, 7u, 30u, 101u}) {
      auto got = three_distance_gaps(a, m);
      CHECK(got == brute_gaps(a, m));
      CHECK(got.size() <= 3);
    }
  }
}

TEST_CASE("covering bound") {
  auto small = covering_bound({1}, 0.6);
  CHECK(small.k == 4);
  CHECK(small.n == 12);

  auto c = covering_bound({1}, 0.3);
  long double g = (std::sqrt(5.0L) - 1) / 2;
  // every y on a 1000-point grid is within 0.3 of an orbit point
  std::vector<double> pts;
  for (std::uint64_t m = 1; m <= c.n; ++m) {
    long double v = m * g;
    pts.push_back(double(v - std::floor(v)));
  }
  for (int i = 0; i < 1000; ++i) {
    double y = i / 1000.0, best = 1;
    for (double p : pts) best = std::min({best, std::fabs(p - y), 1 - std::fabs(p - y)});
    CHECK(best < 0.3);
  }

  auto c12 = covering_bound({1, 2}, 0.05);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dig(1, 2);
  for (int t = 0; t < 100; ++t) {
    std::vector<digit_t> d(60);
    for (auto& x : d) x = dig(rng);
    CHECK(max_circle_gap(static_cast<long double>(evaluate(d)), c12.n) / 2 < 0.05);
  }
  CHECK_THROWS(covering_bound({}, 0.1));
  CHECK_THROWS(covering_bound({1}, 0));
}

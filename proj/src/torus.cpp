#include "sturmian/torus.hpp"
#include "sturmian/parallel.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace sturmian {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2 * kPi;
}  // namespace

DigitMatrix::DigitMatrix(unsigned digit) : a(digit) {
  if (digit == 0) throw std::invalid_argument("digit must be >= 1");
}

Mat2 DigitMatrix::matrix() const {
  Mat2 m;
  m << a, 1, 1, 0;
  return m;
}

Mat2 DigitMatrix::inverse() const {
  Mat2 m;
  m << 0, 1, 1, -static_cast<double>(a);
  return m;
}

double DigitMatrix::mu_u() const { return (a + std::sqrt(4.0 + double(a) * a)) / 2; }
// written as -1/mu_u to avoid cancellation
double DigitMatrix::mu_s() const { return -1.0 / mu_u(); }
Vec2 DigitMatrix::unstable_direction() const { return Vec2(mu_u(), 1).normalized(); }
Vec2 DigitMatrix::stable_direction() const { return Vec2(mu_s(), 1).normalized(); }
Vec2 DigitMatrix::apply_mod1(const Vec2& p) const { return wrap01(Vec2(a * p.x() + p.y(), p.x())); }

double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double wrap_half(double x) {
  double r = x - std::floor(x + 0.5);
  return r >= 0.5 ? r - 1.0 : r;
}

Vec2 wrap01(const Vec2& p) { return {wrap01(p.x()), wrap01(p.y())}; }
Vec2 wrap_half(const Vec2& p) { return {wrap_half(p.x()), wrap_half(p.y())}; }
double torus_distance(const Vec2& p, const Vec2& q) { return wrap_half(Vec2(p - q)).norm(); }

TriplePoint semiconjugacy_F(double x, double y) {
  return {std::cos(kTwoPi * (x + y)), std::cos(kTwoPi * x), std::cos(kTwoPi * y)};
}

namespace {

std::pair<bigint, bigint> stable_vector(const std::vector<digit_t>& digits) {
  if (digits.empty()) throw std::invalid_argument("empty digit list");
  bigint x = 0, y = 1;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it == 0) throw std::invalid_argument("digits must be positive");
    bigint nx = y;
    bigint ny = x - bigint(*it) * y;
    x = nx;
    y = ny;
  }
  return {x, y};
}

}  // namespace

rational stable_slope_exact(const std::vector<digit_t>& digits) {
  auto [x, y] = stable_vector(digits);
  return rational(y) / rational(x);  // the two-argument constructor is broken in Boost 1.74
}

double stable_slope(const std::vector<digit_t>& digits) {
  return static_cast<double>(stable_slope_exact(digits));
}

double direction_angle(const Vec2& v) {
  double t = std::atan2(v.y(), v.x());
  if (t < 0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

double projective_distance(double a, double b) {
  double d = std::fmod(std::fabs(a - b), kPi);
  return std::min(d, kPi - d);
}

DirectionMap matrix_direction_map(const Mat2& m) {
  return [m](double t) { return direction_angle(m * Vec2(std::cos(t), std::sin(t))); };
}

ProjectiveLimit projective_contract_limit(const std::function<DirectionMap(std::size_t)>& maps, double tol,
                                          double seed_angle, std::size_t max_steps) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  std::vector<DirectionMap> f;
  double prev = 0;
  for (std::size_t n = 1; n <= max_steps; ++n) {
    f.push_back(maps(n));
    double x = seed_angle;
    for (std::size_t k = n; k-- > 0;) x = f[k](x);
    if (n > 1 && projective_distance(x, prev) < tol) return {x, n};
    prev = x;
  }
  throw map_error("projective iteration did not converge; contraction hypothesis violated");
}

ConeSpec::ConeSpec(double b) : beta(b) {
  if (!(b > 0 && b <= 0.1)) throw std::invalid_argument("beta must lie in (0, 0.1]");
  v1 = Vec2(1, -b);
  v2 = Vec2(1, 1 + 2 * b);
  v0 = v1 + v2;
  mu_bar = std::sqrt((1 - b) * (1 - b) + 1) / std::sqrt(b * b + 1);
  theta0 = std::acos(v1.dot(v2) / (v1.norm() * v2.norm()));
}

double ConeSpec::initial_beta() {
  for (int k = 100; k >= 1; --k) {
    ConeSpec c(k / 1000.0);
    if (c.theta0 < kPi / 3 && c.mu_bar >= std::sqrt(2.0) - 0.01) return c.beta;
  }
  throw std::logic_error("no admissible initial beta");
}

Vec2 ConeSpec::coords(const Vec2& v) const {
  Mat2 b;
  b.col(0) = v1;
  b.col(1) = v2;
  return b.inverse() * v;
}

bool ConeSpec::in_unstable(const Vec2& v, bool open, double margin) const {
  double n = v.norm();
  if (!(n > 0)) return false;
  Vec2 c = coords(v / n);
  double p = c.x() * c.y();
  return open ? p > margin : p >= -1e-14;
}

bool ConeSpec::in_stable(const Vec2& w, bool open, double margin) const {
  return in_unstable(Vec2(w.y(), -w.x()), open, margin);
}

double ConeSpec::lipschitz_bound() const {
  const Vec2 s = stable_axis(), u = unstable_axis();
  double best = std::numeric_limits<double>::infinity();
  for (Vec2 w : {Vec2(beta, 1), Vec2(-(1 + 2 * beta), 1)}) best = std::min(best, std::fabs(w.dot(u) / w.dot(s)));
  return best;
}

ConeCheckReport cone_check(const ConeSpec& cone, unsigned a, std::size_t directions) {
  if (directions < 2) throw std::invalid_argument("need at least two directions");
  const Mat2 m = DigitMatrix(a).matrix();
  const Vec2 e1 = cone.v1.normalized(), e2 = cone.v2.normalized();
  ConeCheckReport r;
  r.min_expansion = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < directions; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(directions - 1);
    Vec2 v = ((1 - t) * e1 + t * e2).normalized();
    Vec2 w = m * v;
    double e = w.norm();
    r.min_expansion = std::min(r.min_expansion, e);
    r.max_expansion = std::max(r.max_expansion, e);
    if (r.invariant && !cone.in_unstable(w, true)) {
      r.invariant = false;
      r.violating_direction = v;
    }
  }
  return r;
}

namespace {

double radius_for_rho_uncached(double rho) {
  const auto& P = singular_points();
  const auto& Q = half_lattice_points();
  constexpr int kAngles = 720;
  // min over the circle of radius r about Q_i of |F - P_i|
  auto closest = [&](double r) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < kAngles; ++k) {
        double th = kTwoPi * k / kAngles;
        auto f = semiconjugacy_F(Q[i].x() + r * std::cos(th), Q[i].y() + r * std::sin(th));
        double d = std::hypot(f.x1 - P[i].x1, f.x2 - P[i].x2, f.x3 - P[i].x3);
        best = std::min(best, d);
      }
    return best;
  };
  double last_inside = 0;
  for (double r = 0.002; r <= 0.25; r += 0.002)
    if (closest(r) < rho) last_inside = r;
  if (last_inside >= 0.248) throw std::invalid_argument("rho too large for the torus model");
  double lo = last_inside, hi = last_inside + 0.002;
  for (int k = 0; k < 30; ++k) {
    double mid = 0.5 * (lo + hi);
    if (closest(mid) < rho) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace

double torus_radius_for_rho(double rho) {
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must lie in (0,1)");
  static std::mutex mu;
  static std::map<double, double> memo;
  std::lock_guard<std::mutex> lk(mu);
  auto it = memo.find(rho);
  if (it != memo.end()) return it->second;
  return memo[rho] = radius_for_rho_uncached(rho);
}

namespace {

struct Grad3 {
  double g1, g2, g3, n;
};

Grad3 fricke_normal(double x1, double x2, double x3) {
  double g1 = 2 * x1 - 2 * x2 * x3;
  double g2 = 2 * x2 - 2 * x1 * x3;
  double g3 = 2 * x3 - 2 * x1 * x2;
  double n = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
  if (!(n > 1e-14)) throw map_error("degenerate normal near a singular point");
  return {g1 / n, g2 / n, g3 / n, n};
}

// root of g on [0, hi] with g(0) and g(hi) of opposite sign; hi grows until bracketed
template <class G>
double root_along_line(G g, double hi, double tol) {
  double glo = g(0.0);
  if (glo == 0) return 0;
  double ghi = g(hi), prev = glo;
  for (int k = 0; k < 40 && (glo > 0) == (ghi > 0); ++k) {
    if (std::fabs(ghi) >= std::fabs(prev)) {
      // near-tangent line: the crossing window can sit between doubling steps
      auto sq = [&](double t) { double v = g(t); return (glo > 0) == (v > 0) ? std::fabs(v) : -std::fabs(v); };
      auto [tm, vm] = boost::math::tools::brent_find_minima(sq, 0.0, hi, 52);
      if (vm < 0) {
        hi = tm;
        ghi = g(tm);
      }
      break;
    }
    prev = ghi;
    hi *= 2;
    ghi = g(hi);
  }
  if ((glo > 0) == (ghi > 0)) throw map_error("normal-line projection failed to bracket the level set");
  double lo = 0;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double h = std::max(1e-9, std::fabs(t)) * 1e-7;
    double gt = g(t);
    if (gt == 0) return t;
    if ((gt > 0) == (glo > 0)) lo = t;
    else hi = t;
    double d = (g(t + h) - g(t - h)) / (2 * h);
    double nt = d != 0 ? t - gt / d : 0.5 * (lo + hi);
    if (!(nt > lo && nt < hi)) nt = 0.5 * (lo + hi);
    if (std::fabs(nt - t) <= tol * std::max(1.0, std::fabs(t)) || hi - lo <= tol) return nt;
    t = nt;
  }
  throw map_error("normal-line projection did not converge");
}

}  // namespace

PerturbedMap::PerturbedMap(double lambda, unsigned a, double rho, PerturbedMapParams params)
    : lambda_(lambda), a_(a), rho_(rho), params_(params) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (lambda > params.lambda_guard && !params.override_guard)
    throw std::invalid_argument("lambda above the guard; pass override to force");
  if (!(params.blend_inner > 0 && params.blend_inner < params.blend_outer && params.blend_outer < 0.1))
    throw std::invalid_argument("blend radii must satisfy 0 < inner < outer < 1/10");
  if (!(params.projection_tol > 0)) throw std::invalid_argument("projection tolerance must be positive");
  if (torus_radius_for_rho(rho) >= params.blend_inner)
    throw std::invalid_argument("removed neighbourhood does not fit inside the inner blend radius");
}

double PerturbedMap::blend_weight(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& q : half_lattice_points()) d = std::min(d, torus_distance(p, q));
  if (d <= params_.blend_inner) return 1;
  if (d >= params_.blend_outer) return 0;
  double u = (params_.blend_outer - d) / (params_.blend_outer - params_.blend_inner);
  return u * u * u * (10 - 15 * u + 6 * u * u);
}

TriplePoint PerturbedMap::to_level(const TriplePoint& y) const {
  if (lambda_ == 0) return y;
  const double level = 1 + lambda_ * lambda_ / 4;
  auto n = fricke_normal(y.x1, y.x2, y.x3);
  auto g = [&](double t) { return fricke({y.x1 + t * n.g1, y.x2 + t * n.g2, y.x3 + t * n.g3}) - level; };
  double t = root_along_line(g, std::max(lambda_, 1e-6), params_.projection_tol);
  return {y.x1 + t * n.g1, y.x2 + t * n.g2, y.x3 + t * n.g3};
}

TriplePoint PerturbedMap::to_zero(const TriplePoint& z) const {
  if (lambda_ == 0) return z;
  double y1 = z.x1, y2 = z.x2, y3 = z.x3;
  for (int it = 0; it < 200; ++it) {
    auto n = fricke_normal(y1, y2, y3);
    auto g = [&](double t) { return fricke({z.x1 - t * n.g1, z.x2 - t * n.g2, z.x3 - t * n.g3}) - 1.0; };
    double t = root_along_line(g, std::max(lambda_, 1e-6), params_.projection_tol);
    double n1 = z.x1 - t * n.g1, n2 = z.x2 - t * n.g2, n3 = z.x3 - t * n.g3;
    double step = std::max({std::fabs(n1 - y1), std::fabs(n2 - y2), std::fabs(n3 - y3)});
    y1 = n1;
    y2 = n2;
    y3 = n3;
    if (step <= params_.projection_tol) return {y1, y2, y3};
  }
  throw map_error("projection to the zero level did not converge");
}

Vec2 PerturbedMap::invert_F(const TriplePoint& y, const Vec2& hint) const {
  auto clamp = [](double c) { return std::clamp(c, -1.0, 1.0); };
  const double ax = std::acos(clamp(y.x2)) / kTwoPi, ay = std::acos(clamp(y.x3)) / kTwoPi;
  std::array<Vec2, 4> cand{Vec2(ax, ay), Vec2(-ax, -ay), Vec2(ax, -ay), Vec2(-ax, ay)};
  std::array<double, 4> res{};
  double best_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    res[i] = std::fabs(std::cos(kTwoPi * (cand[i].x() + cand[i].y())) - y.x1);
    best_res = std::min(best_res, res[i]);
  }
  int pick = -1;
  double d_pick = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    if (res[i] <= best_res + 1e-7) {
      double d = torus_distance(cand[i], hint);
      if (d < d_pick) {
        d_pick = d;
        pick = i;
      }
    }
  if (d_pick > params_.branch_window) throw map_error("no preimage branch within the window of the linear prediction");
  // another admissible preimage almost as close as the chosen one cannot be told apart;
  // below 1e-5 the candidates differ only by arccos conditioning near +-1 and the polish settles it
  for (int i = 0; i < 4; ++i) {
    if (i == pick || res[i] > best_res + 1e-7) continue;
    double sep = torus_distance(cand[i], cand[pick]);
    if (sep > 1e-5 && d_pick > 0.25 * sep) throw map_error("ambiguous preimage branch");
  }
  // Gauss-Newton polish against all three coordinates
  Vec2 p = cand[pick];
  auto resid = [&](const Vec2& q) {
    auto f = semiconjugacy_F(q);
    return Eigen::Vector3d(f.x1 - y.x1, f.x2 - y.x2, f.x3 - y.x3);
  };
  Eigen::Vector3d r = resid(p);
  for (int it = 0; it < 3; ++it) {
    Eigen::Matrix<double, 3, 2> J;
    double sxy = std::sin(kTwoPi * (p.x() + p.y()));
    J << -kTwoPi * sxy, -kTwoPi * sxy, -kTwoPi * std::sin(kTwoPi * p.x()), 0, 0, -kTwoPi * std::sin(kTwoPi * p.y());
    Vec2 dp = J.colPivHouseholderQr().solve(-r);
    if (!dp.allFinite()) break;
    Vec2 q = p + dp;
    Eigen::Vector3d rq = resid(q);
    if (rq.norm() >= r.norm()) break;
    p = q;
    r = rq;
  }
  return wrap01(p);
}

Vec2 PerturbedMap::raw(const Vec2& p) const {
  Vec2 lin = a_.apply_mod1(p);
  if (lambda_ == 0) return lin;
  auto z = to_level(semiconjugacy_F(p));
  auto w = trace_map_apply(a_.a, z);
  return invert_F(to_zero(w), lin);
}

Vec2 PerturbedMap::lift(const Vec2& p) const {
  Vec2 lin(a_.a * p.x() + p.y(), p.x());
  if (lambda_ == 0) return lin;
  double psi = blend_weight(p);
  if (psi >= 1) return lin;
  Vec2 corr = wrap_half(Vec2(raw(p) - lin));
  return lin + (1 - psi) * corr;
}

PropertyCReport property_c_verify(const std::vector<const PerturbedMap*>& maps, const ConeSpec& cone, std::size_t grid,
                                  double delta, unsigned threads, double fd_step, std::size_t directions) {
  if (maps.empty()) throw std::invalid_argument("no maps supplied");
  if (grid == 0 || directions < 2) throw std::invalid_argument("grid and direction counts must be positive");
  if (!(fd_step > 0 && fd_step <= 1e-6)) throw std::invalid_argument("finite-difference step must lie in (0, 1e-6]");
  PropertyCReport rep;
  rep.mu1 = cone.mu_bar;
  rep.mu2 = 0;
  for (auto* m : maps) rep.mu2 = std::max(rep.mu2, m->matrix().mu_u());
  rep.delta = delta;
  rep.grid_size = grid;

  std::vector<Vec2> ku, ks;
  const Vec2 e1 = cone.v1.normalized(), e2 = cone.v2.normalized();
  for (std::size_t i = 0; i < directions; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(directions - 1);
    Vec2 v = ((1 - t) * e1 + t * e2).normalized();
    ku.push_back(v);
    ks.push_back(Vec2(-v.y(), v.x()));
  }

  std::vector<PropertyCReport> rows(grid);
  parallel_for(grid, [&](std::size_t i) {
    PropertyCReport& r = rows[i];
    r.worst_expansion = r.worst_contraction = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid; ++j) {
      Vec2 p(static_cast<double>(i) / grid, static_cast<double>(j) / grid);
      for (auto* m : maps) {
        ++r.points_checked;
        Mat2 J;
        try {
          for (int k = 0; k < 2; ++k) {
            Vec2 e = Vec2::Zero();
            e[k] = fd_step;
            J.col(k) = (m->lift(p + e) - m->lift(p - e)) / (2 * fd_step);
          }
        } catch (const std::exception&) {
          ++r.evaluation_failures;
          continue;
        }
        if (!J.allFinite() || std::fabs(J.determinant()) < 1e-12) {
          ++r.evaluation_failures;
          continue;
        }
        Mat2 Jinv = J.inverse();
        bool cone_bad = false, bound_bad = false;
        for (const auto& v : ku) {
          Vec2 w = J * v;
          double e = w.norm();
          r.worst_expansion = std::min(r.worst_expansion, e);
          r.max_expansion = std::max(r.max_expansion, e);
          cone_bad |= !cone.in_unstable(w, true);
          bound_bad |= e < rep.mu1 - delta || e > rep.mu2 + delta;
        }
        for (const auto& v : ks) {
          Vec2 w = Jinv * v;
          double e = w.norm();
          r.worst_contraction = std::min(r.worst_contraction, e);
          cone_bad |= !cone.in_stable(w, true);
          bound_bad |= e < rep.mu1 - delta;
        }
        r.cone_violations += cone_bad;
        r.bound_violations += bound_bad;
      }
    }
  }, threads);

  rep.worst_expansion = rep.worst_contraction = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    rep.worst_expansion = std::min(rep.worst_expansion, r.worst_expansion);
    rep.worst_contraction = std::min(rep.worst_contraction, r.worst_contraction);
    rep.max_expansion = std::max(rep.max_expansion, r.max_expansion);
    rep.cone_violations += r.cone_violations;
    rep.bound_violations += r.bound_violations;
    rep.evaluation_failures += r.evaluation_failures;
    rep.points_checked += r.points_checked;
  }
  return rep;
}

bool overflow_check(const ConeSpec& cone, unsigned a, const PerturbedMap* perturbation, std::optional<ConeSpec> enlarged) {
  if (perturbation && perturbation->digit() != a) throw std::invalid_argument("perturbed map has a different digit");
  const ConeSpec K = enlarged ? *enlarged : ConeSpec(std::min(0.1, 2 * cone.beta));
  const double half = perturbation ? 0.1 : 1.0;
  const Vec2 s_ax = cone.stable_axis(), v_ax = cone.unstable_axis();
  const Mat2 A = DigitMatrix(a).matrix();
  constexpr int kSamples = 401;
  std::vector<Vec2> img(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    double t = -half + 2 * half * k / (kSamples - 1);
    Vec2 x = t * v_ax;
    img[k] = perturbation ? perturbation->lift(x) : Vec2(A * x);
  }
  auto outside = [&](const Vec2& p) { return std::max(std::fabs(p.dot(s_ax)), std::fabs(p.dot(v_ax))) > half; };
  if (!outside(img.front()) || !outside(img.back())) return false;
  for (int k = 0; k + 1 < kSamples; ++k)
    if (!K.in_unstable(img[k + 1] - img[k])) return false;
  return true;
}

double LipGraph::max_difference_quotient() const {
  double q = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) q = std::max(q, std::fabs((v[i + 1] - v[i]) / (s[i + 1] - s[i])));
  return q;
}

double LipGraph::slope_fit() const {
  double mx = 0, my = 0;
  const auto n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec2 p = point(i);
    mx += p.x();
    my += p.y();
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec2 p = point(i);
    sxx += (p.x() - mx) * (p.x() - mx);
    sxy += (p.x() - mx) * (p.y() - my);
  }
  return sxy / sxx;
}

double LipGraph::sup_distance_to_line(double slope) const {
  const Vec2 dir = Vec2(1, slope).normalized();
  const Vec2 nrm(-dir.y(), dir.x());
  double d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) d = std::max(d, std::fabs((point(i) - base).dot(nrm)));
  return d;
}

namespace {

double interp(const std::vector<double>& s, const std::vector<double>& v, double x) {
  const double h = s[1] - s[0];
  double u = (x - s.front()) / h;
  auto n = static_cast<std::ptrdiff_t>(s.size());
  auto i = static_cast<std::ptrdiff_t>(std::floor(u));
  i = std::clamp<std::ptrdiff_t>(i, 0, n - 2);
  double f = u - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

}  // namespace

LipGraph graph_transform_manifold(double lambda, const ContinuedFraction& digits, std::size_t m, std::size_t depth,
                                  double tol, const GraphTransformOptions& opt) {
  if (m == 0) throw std::invalid_argument("digit index m is 1-based");
  if (depth == 0) throw std::invalid_argument("depth must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (opt.samples_per_half < 2 || !(opt.half_length > 0 && opt.half_length <= 0.1))
    throw std::invalid_argument("bad chart sampling");
  if (auto len = digits.length(); len && *len < m + depth) throw std::invalid_argument("digit sequence too short");

  const ConeSpec cone(ConeSpec::initial_beta());
  LipGraph g;
  g.base = Vec2(0, 0);
  g.axis_s = cone.stable_axis();
  g.axis_v = cone.unstable_axis();
  g.half_length = opt.half_length;
  g.lipschitz_bound = cone.lipschitz_bound();
  const std::size_t n = 2 * opt.samples_per_half + 1;
  g.s.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    g.s[j] = -opt.half_length + opt.half_length * static_cast<double>(j) / static_cast<double>(opt.samples_per_half);
  g.s[opt.samples_per_half] = 0;

  std::map<digit_t, std::unique_ptr<PerturbedMap>> cache;
  auto map_for = [&](digit_t a) -> const PerturbedMap& {
    auto& p = cache[a];
    if (!p) p = std::make_unique<PerturbedMap>(lambda, a, opt.rho, opt.map_params);
    return *p;
  };

  const double bracket = 1.5 * opt.half_length;
  // pull the graph `next` back through the map for digit a
  auto gamma = [&](const PerturbedMap& T, const std::vector<double>& next) {
    std::vector<double> out(n, 0.0);
    parallel_for(n, [&](std::size_t j) {
      if (j == opt.samples_per_half) return;  // base point is fixed
      const double s = g.s[j];
      auto fn = [&](double v) {
        Vec2 x = g.base + s * g.axis_s + v * g.axis_v;
        Vec2 y = T.lift(x) - g.base;
        return y.dot(g.axis_v) - interp(g.s, next, y.dot(g.axis_s));
      };
      double flo = fn(-bracket), fhi = fn(bracket);
      if ((flo > 0) == (fhi > 0)) throw map_error("graph transform lost its root; coupling outside the verified range");
      boost::uintmax_t it = 100;
      auto r = boost::math::tools::toms748_solve(fn, -bracket, bracket, flo, fhi,
                                                 boost::math::tools::eps_tolerance<double>(48), it);
      out[j] = 0.5 * (r.first + r.second);
    }, opt.threads);
    return out;
  };

  std::vector<double> prev;
  for (std::size_t D = 1; D <= depth; ++D) {
    std::vector<double> phi(n, 0.0);
    for (std::size_t k = m + D + 1; k-- > m;) phi = gamma(map_for(digits.digit(k)), phi);
    if (!prev.empty()) {
      double diff = 0;
      for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::fabs(phi[j] - prev[j]));
      g.increments.push_back(diff);
      const auto& inc = g.increments;
      std::size_t c = inc.size();
      if (c >= 3 && inc[c - 1] > inc[c - 2] && inc[c - 2] > inc[c - 3] && diff > 10 * tol)
        throw map_error("graph transform is not contracting; coupling outside the verified range");
      g.v = phi;
      g.depth_used = D;
      if (diff < tol) break;
    } else {
      g.v = phi;
      g.depth_used = D;
    }
    prev = std::move(phi);
  }
  if (g.max_difference_quotient() > g.lipschitz_bound)
    throw map_error("stable graph left the Lipschitz class");
  return g;
}

CommonOrbitReport common_orbit_check(double lambda, const ContinuedFraction& digits, std::size_t n, double rho,
                                     const PerturbedMapParams& params) {
  std::map<digit_t, std::unique_ptr<PerturbedMap>> cache;
  Vec2 p(0.25, 0.25), q(0.25, 0.25);
  CommonOrbitReport r;
  std::vector<Vec2> seen{p};
  for (std::size_t k = 1; k <= n; ++k) {
    digit_t a = digits.digit(k);
    auto& T = cache[a];
    if (!T) T = std::make_unique<PerturbedMap>(lambda, a, rho, params);
    p = (*T)(p);
    q = DigitMatrix(a).apply_mod1(q);
    r.max_deviation = std::max(r.max_deviation, torus_distance(p, q));
    if (std::none_of(seen.begin(), seen.end(), [&](const Vec2& x) { return torus_distance(x, p) < 1e-9; }))
      seen.push_back(p);
  }
  r.equal = r.max_deviation < 1e-9;
  r.orbit_size = seen.size();
  return r;
}

Vec2 seed_curve_point(double lambda, double E, const PerturbedMap& any_map) {
  if (any_map.lambda() != lambda) throw std::invalid_argument("map built for another coupling");
  auto y = any_map.to_zero(spectral_line_point(lambda, E));
  auto clamp = [](double c) { return std::clamp(c, -1.0, 1.0); };
  double ax = std::acos(clamp(y.x2)) / kTwoPi, ay = std::acos(clamp(y.x3)) / kTwoPi;
  double rp = std::fabs(std::cos(kTwoPi * (ax + ay)) - y.x1);
  double rm = std::fabs(std::cos(kTwoPi * (ax - ay)) - y.x1);
  return {ax, rp <= rm ? ay : -ay};
}

DistortionResult distortion_ratio(double lambda, const std::vector<double>& energies, const ContinuedFraction& digits,
                                  std::size_t m, double rho, const PerturbedMapParams& params) {
  if (energies.size() < 3) throw std::invalid_argument("need at least three curve samples");
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  std::map<digit_t, std::unique_ptr<PerturbedMap>> cache;
  auto map_for = [&](digit_t a) -> const PerturbedMap& {
    auto& p = cache[a];
    if (!p) p = std::make_unique<PerturbedMap>(lambda, a, rho, params);
    return *p;
  };
  const PerturbedMap& first = map_for(digits.digit(1));
  const std::size_t N = energies.size();
  std::vector<Vec2> src(N), img(N);
  for (std::size_t i = 0; i < N; ++i) src[i] = seed_curve_point(lambda, energies[i], first);
  for (std::size_t i = 0; i < N; ++i) {
    Vec2 p = src[i];
    for (std::size_t k = 1; k <= m; ++k) p = map_for(digits.digit(k))(p);
    img[i] = p;
  }
  // unwrap both polylines by continuity
  auto unwrap = [](std::vector<Vec2>& c) {
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = c[i - 1] + wrap_half(Vec2(c[i] - c[i - 1]));
  };
  unwrap(src);
  unwrap(img);

  const ConeSpec cone(ConeSpec::initial_beta());
  const Vec2 s_ax = cone.stable_axis(), v_ax = cone.unstable_axis();
  DistortionResult out;
  bool boxed = false;
  const auto& Q = half_lattice_points();
  for (std::size_t i = 0; i < 4 && !boxed; ++i) {
    Vec2 off = wrap_half(Vec2(img[0] - Q[i]));
    bool inside = true;
    for (const auto& p : img) {
      Vec2 c = off + (p - img[0]);
      if (std::max(std::fabs(c.dot(s_ax)), std::fabs(c.dot(v_ax))) > 0.1) {
        inside = false;
        break;
      }
    }
    if (inside) {
      boxed = true;
      out.box_index = i;
    }
  }
  if (!boxed) throw std::domain_error("iterated curve leaves every chart box");

  auto arclen = [](const std::vector<Vec2>& c) {
    std::vector<double> L(c.size(), 0.0);
    for (std::size_t i = 1; i < c.size(); ++i) L[i] = L[i - 1] + (c[i] - c[i - 1]).norm();
    return L;
  };
  auto Ls = arclen(src), Li = arclen(img);
  double worst = 1;
  for (std::size_t j = 1; j + 1 < N; ++j) {
    double rs = Ls[j] / (Ls.back() - Ls[j]);
    double ri = Li[j] / (Li.back() - Li[j]);
    double q = ri / rs;
    worst = std::max({worst, q, 1 / q});
  }
  out.ratio = worst;
  return out;
}

}  // namespace sturmian

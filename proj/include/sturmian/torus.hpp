#pragma once

#include "sturmian/contfrac.hpp"
#include "sturmian/surface.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sturmian {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct map_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DigitMatrix {
  unsigned a;
  explicit DigitMatrix(unsigned a);
  Mat2 matrix() const;
  Mat2 inverse() const;  // ((0,1),(1,-a))
  double mu_u() const;
  double mu_s() const;
  Vec2 unstable_direction() const;  // unit
  Vec2 stable_direction() const;    // unit
  Vec2 apply_mod1(const Vec2& p) const;
};

double wrap01(double x);                        // into [0,1)
double wrap_half(double x);                     // into [-1/2,1/2)
Vec2 wrap01(const Vec2& p);
Vec2 wrap_half(const Vec2& p);
double torus_distance(const Vec2& p, const Vec2& q);

inline const std::array<Vec2, 4>& half_lattice_points() {
  static const std::array<Vec2, 4> q{Vec2(0, 0), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
  return q;
}

TriplePoint semiconjugacy_F(double x, double y);
inline TriplePoint semiconjugacy_F(const Vec2& p) { return semiconjugacy_F(p.x(), p.y()); }

// slope of A_{a_1}^{-1} ... A_{a_n}^{-1} (0,1)^T
double stable_slope(const std::vector<digit_t>& digits);
rational stable_slope_exact(const std::vector<digit_t>& digits);

// projective circle as angles in [0, pi)
using DirectionMap = std::function<double(double)>;
DirectionMap matrix_direction_map(const Mat2& m);
double direction_angle(const Vec2& v);
double projective_distance(double a, double b);

// Limit of f_1 o f_2 o ... o f_n (seed) as n grows; maps(k) returns f_k (k >= 1).
struct ProjectiveLimit {
  double angle;
  std::size_t steps;
};
ProjectiveLimit projective_contract_limit(const std::function<DirectionMap(std::size_t)>& maps, double tol,
                                          double seed_angle = 1.5707963267948966, std::size_t max_steps = 2000);

struct ConeSpec {
  double beta;
  Vec2 v1, v2, v0;  // v0 = v1 + v2
  double mu_bar;
  double theta0;

  explicit ConeSpec(double beta);
  static double initial_beta();  // opening below pi/3 and mu_bar >= sqrt(2) - 0.01

  // coefficients of v in the (v1, v2) basis
  Vec2 coords(const Vec2& v) const;
  bool in_unstable(const Vec2& v, bool open = false, double margin = 0) const;
  bool in_stable(const Vec2& v, bool open = false, double margin = 0) const;
  Vec2 unstable_axis() const { return v0.normalized(); }
  Vec2 stable_axis() const { return Vec2(-v0.y(), v0.x()).normalized(); }
  // |slope| bound of the stable boundary lines measured in (V-perp, V) chart coordinates
  double lipschitz_bound() const;
};

struct ConeCheckReport {
  bool invariant = true;
  double min_expansion = 0;
  double max_expansion = 0;
  std::optional<Vec2> violating_direction;
};

ConeCheckReport cone_check(const ConeSpec& cone, unsigned a, std::size_t directions = 4096);

struct PerturbedMapParams {
  double blend_inner = 0.045;
  double blend_outer = 0.09;
  double projection_tol = 1e-12;
  double branch_window = 0.05;
  double lambda_guard = 0.2;
  bool override_guard = false;
};

// smallest torus radius around the Q_i containing every point F maps into a rho-ball about a P_i
double torus_radius_for_rho(double rho);

class PerturbedMap {
public:
  PerturbedMap(double lambda, unsigned a, double rho, PerturbedMapParams params = {});

  double lambda() const { return lambda_; }
  unsigned digit() const { return a_.a; }
  double rho() const { return rho_; }
  const PerturbedMapParams& params() const { return params_; }
  const DigitMatrix& matrix() const { return a_; }

  Vec2 operator()(const Vec2& p) const { return wrap01(lift(p)); }
  // A p + wrapped correction, i.e. the unwrapped image next to the linear one
  Vec2 lift(const Vec2& p) const;
  // unblended conjugated map
  Vec2 raw(const Vec2& p) const;

  double blend_weight(const Vec2& p) const;  // psi: 1 near the Q_i, 0 far away

  // S_0 -> S_lambda along the outward normal, and back
  TriplePoint to_level(const TriplePoint& y) const;
  TriplePoint to_zero(const TriplePoint& z) const;
  TriplePoint F_lambda(const Vec2& p) const { return to_level(semiconjugacy_F(p)); }
  // point of the torus nearest `hint` whose F-image is y (y on S_0)
  Vec2 invert_F(const TriplePoint& y, const Vec2& hint) const;

private:
  double lambda_;
  DigitMatrix a_;
  double rho_;
  PerturbedMapParams params_;
};

struct PropertyCReport {
  double mu1 = 0, mu2 = 0, delta = 0;
  std::size_t grid_size = 0;
  double worst_expansion = 0;    // min |DT v|/|v| over sampled v in K^u
  double worst_contraction = 0;  // min |DT^{-1} w|/|w| over sampled w in K^s
  double max_expansion = 0;
  std::size_t cone_violations = 0;
  std::size_t bound_violations = 0;
  std::size_t evaluation_failures = 0;
  std::size_t points_checked = 0;
  bool passed() const { return cone_violations == 0 && bound_violations == 0 && evaluation_failures == 0; }
};

PropertyCReport property_c_verify(const std::vector<const PerturbedMap*>& maps, const ConeSpec& cone,
                                  std::size_t grid, double delta, unsigned threads = 0, double fd_step = 1e-6,
                                  std::size_t directions = 9);

bool overflow_check(const ConeSpec& cone, unsigned a, const PerturbedMap* perturbation = nullptr,
                    std::optional<ConeSpec> enlarged = std::nullopt);

struct LipGraph {
  Vec2 base;                   // base point Q in standard coordinates
  Vec2 axis_s, axis_v;         // unit V-perp and V
  double half_length = 0.1;
  std::vector<double> s;       // chart abscissae
  std::vector<double> v;       // graph values
  double lipschitz_bound = 0;
  std::size_t depth_used = 0;
  std::vector<double> increments;  // sup |R_D - R_{D-1}| per depth

  Vec2 point(std::size_t i) const { return base + s[i] * axis_s + v[i] * axis_v; }
  double max_difference_quotient() const;
  double slope_fit() const;  // least-squares dy/dx of the standard-coordinate points
  // sup distance of the sampled points from the line through base with the given slope
  double sup_distance_to_line(double slope) const;
};

struct GraphTransformOptions {
  std::size_t samples_per_half = 512;
  double half_length = 0.1;
  double rho = 0.01;
  PerturbedMapParams map_params{};
  unsigned threads = 0;
};

// digits are read from index m onwards (1-based)
LipGraph graph_transform_manifold(double lambda, const ContinuedFraction& digits, std::size_t m, std::size_t depth,
                                  double tol, const GraphTransformOptions& opt = {});

struct CommonOrbitReport {
  bool equal = true;
  std::size_t orbit_size = 0;
  double max_deviation = 0;
};

CommonOrbitReport common_orbit_check(double lambda, const ContinuedFraction& digits, std::size_t n,
                                     double rho = 0.01, const PerturbedMapParams& params = {});

// x in [0, 1/2] branch of the seed curve through the spectral line
Vec2 seed_curve_point(double lambda, double E, const PerturbedMap& any_map);

struct DistortionResult {
  double ratio = 1;
  std::size_t box_index = 0;  // Q_i whose chart box holds the image
};

// curve: energies sampled along the seed curve (increasing); maps applied with digits a_1..a_m
DistortionResult distortion_ratio(double lambda, const std::vector<double>& energies, const ContinuedFraction& digits,
                                  std::size_t m, double rho = 0.01, const PerturbedMapParams& params = {});

}  // namespace sturmian

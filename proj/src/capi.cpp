#include "sturmian/sturmian.h"

#include "sturmian/contfrac.hpp"
#include "sturmian/fractal.hpp"
#include "sturmian/surface.hpp"
#include "sturmian/torus.hpp"
#include "sturmian/verify.hpp"

#include <json.hpp>

#include <cstring>
#include <map>
#include <memory>
#include <string>

using namespace sturmian;
using json = nlohmann::json;

struct sturm_cf {
  ContinuedFraction cf;
};
struct sturm_intervals {
  IntervalSet set;
};
struct sturm_map {
  PerturbedMap map;
};
struct sturm_graph {
  LipGraph g;
};

namespace {

thread_local std::string g_last_error;

template <class F>
sturm_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return STURM_OK;
  } catch (const std::logic_error& e) {
    g_last_error = e.what();
    return STURM_E_ARG;
  } catch (const std::runtime_error& e) {
    g_last_error = e.what();
    return STURM_E_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STURM_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return STURM_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class T>
void need(const T* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string("null ") + what);
}

PerturbedMapParams map_params(const sturm_map_opts* o) {
  PerturbedMapParams p;
  if (o) {
    p.blend_inner = o->blend_inner;
    p.blend_outer = o->blend_outer;
    p.projection_tol = o->projection_tol;
    p.branch_window = o->branch_window;
    p.lambda_guard = o->lambda_guard;
    p.override_guard = o->override_guard != 0;
  }
  return p;
}

double map_rho(const sturm_map_opts* o) { return o ? o->rho : 0.01; }

SpectrumOptions spectrum_options(const sturm_spectrum_opts* o) {
  SpectrumOptions s;
  s.resolution = o->resolution;
  s.max_steps = o->max_steps;
  s.escape_threshold = o->escape_threshold;
  s.threads = o->threads;
  return s;
}

}  // namespace

extern "C" {

const char* sturm_last_error(void) { return g_last_error.c_str(); }
const char* sturm_version(void) { return "1.0.0"; }
void sturm_string_free(char* s) { std::free(s); }

sturm_status sturm_cf_parse(const char* spec, sturm_cf** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new sturm_cf{ContinuedFraction::parse(spec)};
  });
}

void sturm_cf_free(sturm_cf* cf) { delete cf; }

sturm_status sturm_cf_describe(const sturm_cf* cf, char** out) {
  return guard([&] {
    need(cf, "cf");
    need(out, "out");
    *out = dup_string(cf->cf.to_string());
  });
}

sturm_status sturm_cf_digits(const sturm_cf* cf, size_t n, unsigned* digits, size_t* written) {
  return guard([&] {
    need(cf, "cf");
    need(digits, "digits");
    auto d = cf->cf.prefix(n);
    std::copy(d.begin(), d.end(), digits);
    if (written) *written = d.size();
  });
}

sturm_status sturm_cf_value(const sturm_cf* cf, double* out) {
  return guard([&] {
    need(cf, "cf");
    need(out, "out");
    *out = static_cast<double>(cf->cf.value(64));
  });
}

sturm_status sturm_cf_expand(double x, size_t n, unsigned* digits) {
  return guard([&] {
    need(digits, "digits");
    auto d = cf_expand(x, n);
    std::copy(d.begin(), d.end(), digits);
  });
}

sturm_status sturm_convergents_json(const sturm_cf* cf, size_t n, char** out) {
  return guard([&] {
    need(cf, "cf");
    need(out, "out");
    json arr = json::array();
    for (const auto& c : convergents(cf->cf, n))
      arr.push_back({{"k", c.k}, {"p", c.p.str()}, {"q", c.q.str()}});
    *out = dup_string(arr.dump());
  });
}

sturm_status sturm_three_distance(double alpha, size_t n, double* lengths, size_t cap, size_t* count) {
  return guard([&] {
    need(count, "count");
    auto g = three_distance_gaps(alpha, n);
    *count = g.size();
    if (lengths) std::copy_n(g.begin(), std::min(cap, g.size()), lengths);
  });
}

sturm_status sturm_covering_bound(const unsigned* alphabet, size_t len, double eps, uint64_t* n) {
  return guard([&] {
    need(alphabet, "alphabet");
    need(n, "n");
    *n = covering_bound(std::set<digit_t>(alphabet, alphabet + len), eps).n;
  });
}

sturm_status sturm_trace_map(unsigned a, sturm_triple p, sturm_triple* out) {
  return guard([&] {
    need(out, "out");
    auto q = trace_map_apply(a, TriplePoint(p.x1, p.x2, p.x3));
    *out = {q.x1, q.x2, q.x3};
  });
}

double sturm_fricke(sturm_triple p) {
  return p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3 - 2 * p.x1 * p.x2 * p.x3;
}

sturm_triple sturm_spectral_line_point(double lambda, double energy) {
  return {(energy - lambda) / 2, energy / 2, 1.0};
}

sturm_status sturm_orbit_classify(double lambda, double energy, const sturm_cf* cf, size_t max_steps,
                                  double escape_threshold, double rho, double bound, sturm_orbit* out) {
  return guard([&] {
    need(cf, "cf");
    need(out, "out");
    FrickeLevel lvl(lambda);
    std::optional<SurvivalRegionSpec> region;
    if (rho > 0) region = SurvivalRegionSpec(rho, bound > 0 ? bound : 1 + lvl.lambda);
    auto r = orbit_classify(spectral_line_point(lambda, energy), cf->cf, max_steps, escape_threshold, region);
    out->status = static_cast<sturm_orbit_status>(r.status);
    out->steps = r.steps;
    out->max_norm = r.max_norm;
    out->exit_index = r.exit_index ? static_cast<long long>(*r.exit_index) : -1;
  });
}

void sturm_spectrum_opts_init(sturm_spectrum_opts* o) {
  if (!o) return;
  o->lambda = 0;
  o->resolution = 1e-3;
  o->max_steps = 1000;
  o->escape_threshold = default_escape_threshold;
  o->threads = 0;
}

sturm_status sturm_spectrum(const sturm_cf* cf, const sturm_spectrum_opts* o, sturm_intervals** out,
                            size_t* undecided) {
  return guard([&] {
    need(cf, "cf");
    need(o, "options");
    need(out, "out");
    auto r = spectrum_estimate(o->lambda, cf->cf, spectrum_options(o));
    if (undecided) *undecided = r.undecided_cells;
    *out = new sturm_intervals{std::move(r.set)};
  });
}

sturm_status sturm_survival(const sturm_cf* cf, const sturm_spectrum_opts* o, double rho, double bound,
                            sturm_intervals** out, size_t* undecided) {
  return guard([&] {
    need(cf, "cf");
    need(o, "options");
    need(out, "out");
    SurvivalRegionSpec region(rho, bound > 0 ? bound : 1 + o->lambda);
    auto r = survival_set(o->lambda, region, cf->cf, spectrum_options(o));
    if (undecided) *undecided = r.undecided_cells;
    *out = new sturm_intervals{std::move(r.set)};
  });
}

sturm_status sturm_intervals_new(const double* left, const double* right, size_t n, double gap_floor,
                                 sturm_intervals** out) {
  return guard([&] {
    need(out, "out");
    if (n) {
      need(left, "left");
      need(right, "right");
    }
    std::vector<Interval> iv;
    for (size_t i = 0; i < n; ++i) iv.push_back({left[i], right[i]});
    *out = new sturm_intervals{IntervalSet(std::move(iv), gap_floor)};
  });
}

void sturm_intervals_free(sturm_intervals* s) { delete s; }
size_t sturm_intervals_size(const sturm_intervals* s) { return s ? s->set.size() : 0; }

sturm_status sturm_intervals_get(const sturm_intervals* s, size_t i, double* left, double* right) {
  return guard([&] {
    need(s, "set");
    if (i >= s->set.size()) throw std::out_of_range("interval index out of range");
    if (left) *left = s->set[i].left;
    if (right) *right = s->set[i].right;
  });
}

double sturm_intervals_measure(const sturm_intervals* s) { return s ? measure(s->set) : 0.0; }

sturm_status sturm_thickness(const sturm_intervals* s, double dilate, double* tau, double* dim_lower) {
  return guard([&] {
    need(s, "set");
    if (dilate < 0) throw std::invalid_argument("dilation must be >= 0");
    auto r = thickness(dilate > 0 ? s->set.dilate(dilate) : s->set);
    if (tau) *tau = r.infinite ? -1.0 : r.tau;
    if (dim_lower) *dim_lower = r.dim_lower;
  });
}

sturm_status sturm_box_dimension(const sturm_intervals* s, const double* scales, size_t n, double* dim, double* r2) {
  return guard([&] {
    need(s, "set");
    need(scales, "scales");
    auto fit = box_dimension(s->set, std::vector<double>(scales, scales + n));
    if (dim) *dim = fit.dim;
    if (r2) *r2 = fit.r2;
  });
}

sturm_status sturm_semiconjugacy(double x, double y, sturm_triple* out) {
  return guard([&] {
    need(out, "out");
    auto p = semiconjugacy_F(x, y);
    *out = {p.x1, p.x2, p.x3};
  });
}

sturm_status sturm_stable_slope(const unsigned* digits, size_t n, double* slope, char** exact) {
  return guard([&] {
    need(digits, "digits");
    std::vector<digit_t> d(digits, digits + n);
    auto q = stable_slope_exact(d);
    if (slope) *slope = static_cast<double>(q);
    if (exact) *exact = dup_string(numerator(q).str() + "/" + denominator(q).str());
  });
}

double sturm_initial_beta(void) { return ConeSpec::initial_beta(); }

sturm_status sturm_cone_check(double beta, unsigned a, sturm_cone_report* out) {
  return guard([&] {
    need(out, "out");
    ConeSpec c(beta);
    auto r = cone_check(c, a);
    *out = {r.invariant ? 1 : 0, r.min_expansion, r.max_expansion, c.mu_bar};
  });
}

void sturm_map_opts_init(sturm_map_opts* o) {
  if (!o) return;
  PerturbedMapParams p;
  o->blend_inner = p.blend_inner;
  o->blend_outer = p.blend_outer;
  o->projection_tol = p.projection_tol;
  o->branch_window = p.branch_window;
  o->lambda_guard = p.lambda_guard;
  o->override_guard = p.override_guard ? 1 : 0;
  o->rho = 0.01;
}

sturm_status sturm_map_new(double lambda, unsigned a, const sturm_map_opts* o, sturm_map** out) {
  return guard([&] {
    need(out, "out");
    *out = new sturm_map{PerturbedMap(lambda, a, map_rho(o), map_params(o))};
  });
}

void sturm_map_free(sturm_map* m) { delete m; }

sturm_status sturm_map_eval(const sturm_map* m, double x, double y, double* ox, double* oy) {
  return guard([&] {
    need(m, "map");
    auto p = m->map(Vec2(x, y));
    if (ox) *ox = p.x();
    if (oy) *oy = p.y();
  });
}

sturm_status sturm_property_c(double lambda, const unsigned* alphabet, size_t len, size_t grid, double delta,
                              double beta, const sturm_map_opts* o, unsigned threads, char** json_out) {
  return guard([&] {
    need(alphabet, "alphabet");
    need(json_out, "json");
    std::vector<std::unique_ptr<PerturbedMap>> owned;
    std::vector<const PerturbedMap*> maps;
    for (size_t i = 0; i < len; ++i) {
      owned.push_back(std::make_unique<PerturbedMap>(lambda, alphabet[i], map_rho(o), map_params(o)));
      maps.push_back(owned.back().get());
    }
    ConeSpec cone(beta > 0 ? beta : ConeSpec::initial_beta());
    auto r = property_c_verify(maps, cone, grid, delta, threads);
    json j = {{"mu1", r.mu1},
              {"mu2", r.mu2},
              {"delta", r.delta},
              {"beta", cone.beta},
              {"grid_size", r.grid_size},
              {"worst_expansion", r.worst_expansion},
              {"worst_contraction", r.worst_contraction},
              {"max_expansion", r.max_expansion},
              {"cone_violations", r.cone_violations},
              {"bound_violations", r.bound_violations},
              {"evaluation_failures", r.evaluation_failures},
              {"points_checked", r.points_checked},
              {"passed", r.passed()}};
    *json_out = dup_string(j.dump());
  });
}

sturm_status sturm_stable_manifold(double lambda, const sturm_cf* cf, size_t m, size_t depth, double tol,
                                   const sturm_map_opts* o, unsigned threads, sturm_graph** out) {
  return guard([&] {
    need(cf, "cf");
    need(out, "out");
    GraphTransformOptions opt;
    opt.rho = map_rho(o);
    opt.map_params = map_params(o);
    opt.threads = threads;
    *out = new sturm_graph{graph_transform_manifold(lambda, cf->cf, m, depth, tol, opt)};
  });
}

void sturm_graph_free(sturm_graph* g) { delete g; }
size_t sturm_graph_size(const sturm_graph* g) { return g ? g->g.s.size() : 0; }

sturm_status sturm_graph_sample(const sturm_graph* g, size_t i, double* t, double* x, double* y) {
  return guard([&] {
    need(g, "graph");
    if (i >= g->g.s.size()) throw std::out_of_range("sample index out of range");
    auto p = g->g.point(i);
    if (t) *t = g->g.s[i];
    if (x) *x = p.x();
    if (y) *y = p.y();
  });
}

sturm_status sturm_graph_info(const sturm_graph* g, double* slope, size_t* depth_used, double* lipschitz,
                              double* last_increment) {
  return guard([&] {
    need(g, "graph");
    if (slope) *slope = g->g.slope_fit();
    if (depth_used) *depth_used = g->g.depth_used;
    if (lipschitz) *lipschitz = g->g.lipschitz_bound;
    if (last_increment) *last_increment = g->g.increments.empty() ? 0.0 : g->g.increments.back();
  });
}

sturm_status sturm_common_orbit(double lambda, const sturm_cf* cf, size_t n, const sturm_map_opts* o, int* equal,
                                size_t* orbit_size, double* max_deviation) {
  return guard([&] {
    need(cf, "cf");
    auto r = common_orbit_check(lambda, cf->cf, n, map_rho(o), map_params(o));
    if (equal) *equal = r.equal ? 1 : 0;
    if (orbit_size) *orbit_size = r.orbit_size;
    if (max_deviation) *max_deviation = r.max_deviation;
  });
}

sturm_status sturm_verify(uint64_t seed, unsigned threads, char** json_out) {
  bool all = true;
  auto st = guard([&] {
    need(json_out, "json");
    json checks = json::array();
    for (const auto& c : run_verify_suite(seed, threads)) {
      all &= c.passed;
      checks.push_back(
          {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}, {"detail", c.detail}});
    }
    *json_out = dup_string(json{{"passed", all}, {"seed", seed}, {"checks", checks}}.dump());
  });
  if (st == STURM_OK && !all) {
    g_last_error = "verification failures";
    return STURM_E_VERIFY;
  }
  return st;
}

}  // extern "C"

// Command-line front end over the C interface.
#include "sturmian/sturmian.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kVerify = 3 };

struct Failure {
  int code;
  std::string message;
};

void ensure(sturm_status st) {
  if (st == STURM_OK) return;
  int code = st == STURM_E_ARG ? kUsage : st == STURM_E_VERIFY ? kVerify : kNumeric;
  throw Failure{code, sturm_last_error()};
}

struct Config {
  std::string alpha = "golden";
  double lambda = 0;
  std::vector<double> lambda_list;
  double resolution = 1e-3;
  double rho = 0.3;
  bool rho_set = false;
  std::size_t max_steps = 1000;
  double escape_threshold = 10;
  double beta = 0;  // 0: initial beta
  std::size_t grid = 50;
  std::string output;
  std::string format;
  std::uint64_t seed = 1;
  // command specific
  double energy = 0;
  std::size_t n = 10;
  std::size_t depth = 50;
  std::size_t start = 1;
  double tol = 1e-8;
  double map_rho = 0.01;
  bool override_guard = false;
};

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CfHandle {
  sturm_cf* p = nullptr;
  explicit CfHandle(const std::string& spec) { ensure(sturm_cf_parse(spec.c_str(), &p)); }
  ~CfHandle() { sturm_cf_free(p); }
  std::string describe() const {
    char* s = nullptr;
    ensure(sturm_cf_describe(p, &s));
    std::string out = s;
    sturm_string_free(s);
    return out;
  }
};

struct SetHandle {
  sturm_intervals* p = nullptr;
  ~SetHandle() { sturm_intervals_free(p); }
};

json config_json(const std::string& command, const Config& c, const CfHandle& cf) {
  const char* env = std::getenv("STURMIAN_THREADS");
  json lam = c.lambda_list.empty() ? json(c.lambda) : json(c.lambda_list);
  return json{{"command", command},
              {"alpha", c.alpha},
              {"digits", cf.describe()},
              {"lambda", lam},
              {"resolution", c.resolution},
              {"rho", c.rho},
              {"max_steps", c.max_steps},
              {"escape_threshold", c.escape_threshold},
              {"beta", c.beta},
              {"grid", c.grid},
              {"format", c.format},
              {"seed", c.seed},
              {"energy", c.energy},
              {"n", c.n},
              {"depth", c.depth},
              {"m", c.start},
              {"tol", c.tol},
              {"map_rho", c.map_rho},
              {"override_guard", c.override_guard},
              {"threads_env", env ? json(env) : json(nullptr)}};
}

// csv to stdout or <output>.csv, json to stdout or <output>.json
void emit(const Config& c, const std::string& default_format, const std::string& csv, const json& summary) {
  std::string fmt = c.format.empty() ? default_format : c.format;
  if (!c.output.empty()) {
    std::ofstream(c.output + ".csv") << csv;
    std::ofstream(c.output + ".json") << summary.dump(2) << '\n';
    return;
  }
  if (fmt == "csv") std::cout << csv;
  else std::cout << summary.dump(2) << '\n';
}

std::string intervals_csv(const sturm_intervals* s) {
  std::ostringstream os;
  os << "left,right\n";
  for (std::size_t i = 0; i < sturm_intervals_size(s); ++i) {
    double l, r;
    ensure(sturm_intervals_get(s, i, &l, &r));
    os << num(l) << ',' << num(r) << '\n';
  }
  return os.str();
}

json intervals_json(const sturm_intervals* s) {
  json arr = json::array();
  for (std::size_t i = 0; i < sturm_intervals_size(s); ++i) {
    double l, r;
    ensure(sturm_intervals_get(s, i, &l, &r));
    arr.push_back({l, r});
  }
  return arr;
}

sturm_spectrum_opts spectrum_opts(const Config& c, double lambda) {
  sturm_spectrum_opts o;
  sturm_spectrum_opts_init(&o);
  o.lambda = lambda;
  o.resolution = c.resolution;
  o.max_steps = c.max_steps;
  o.escape_threshold = c.escape_threshold;
  return o;
}

sturm_map_opts map_opts(const Config& c) {
  sturm_map_opts o;
  sturm_map_opts_init(&o);
  o.rho = c.map_rho;
  o.override_guard = c.override_guard ? 1 : 0;
  return o;
}

std::vector<double> sweep_scales(double resolution) {
  std::vector<double> s;
  for (double e = 0.1; e >= 2 * resolution * (1 - 1e-12); e /= 2) s.push_back(e);
  return s;
}

int cmd_spectrum(const Config& c) {
  CfHandle cf(c.alpha);
  auto o = spectrum_opts(c, c.lambda);
  SetHandle s;
  std::size_t undecided = 0;
  ensure(sturm_spectrum(cf.p, &o, &s.p, &undecided));
  json j{{"lambda", c.lambda},
         {"digits", cf.describe()},
         {"resolution", c.resolution},
         {"intervals", intervals_json(s.p)},
         {"total_length", sturm_intervals_measure(s.p)},
         {"undecided_cells", undecided},
         {"config", config_json("spectrum", c, cf)}};
  emit(c, "csv", intervals_csv(s.p), j);
  return kOk;
}

int cmd_survival(const Config& c) {
  CfHandle cf(c.alpha);
  auto o = spectrum_opts(c, c.lambda);
  SetHandle s;
  std::size_t undecided = 0;
  ensure(sturm_survival(cf.p, &o, c.rho, 0, &s.p, &undecided));
  double tau = 0, dl = 0;
  if (sturm_intervals_size(s.p) > 0) ensure(sturm_thickness(s.p, 2 * c.resolution, &tau, &dl));
  json j{{"lambda", c.lambda},
         {"digits", cf.describe()},
         {"resolution", c.resolution},
         {"rho", c.rho},
         {"intervals", intervals_json(s.p)},
         {"total_length", sturm_intervals_measure(s.p)},
         {"undecided_cells", undecided},
         {"empty", sturm_intervals_size(s.p) == 0},
         {"tau", tau < 0 ? json("inf") : json(tau)},
         {"dim_lower", dl},
         {"config", config_json("survival", c, cf)}};
  emit(c, "csv", intervals_csv(s.p), j);
  return kOk;
}

int cmd_dimension_sweep(const Config& c) {
  CfHandle cf(c.alpha);
  std::vector<double> lams = c.lambda_list.empty() ? std::vector<double>{c.lambda} : c.lambda_list;
  for (std::size_t i = 1; i < lams.size(); ++i)
    if (lams[i] > lams[i - 1]) throw Failure{kUsage, "--lambda-list must be sorted in descending order"};
  const auto scales = sweep_scales(c.resolution);
  std::ostringstream csv;
  csv << "lambda,box_dim,tau,dim_lower,total_length,runtime";
  if (c.rho_set) csv << ",survival_tau,survival_dim_lower";
  csv << '\n';
  json rows = json::array();
  for (double lam : lams) {
    auto t0 = std::chrono::steady_clock::now();
    auto o = spectrum_opts(c, lam);
    SetHandle s;
    std::size_t undecided = 0;
    ensure(sturm_spectrum(cf.p, &o, &s.p, &undecided));
    double dim = 0, r2 = 0, tau = 0, dl = 0;
    ensure(sturm_box_dimension(s.p, scales.data(), scales.size(), &dim, &r2));
    ensure(sturm_thickness(s.p, 2 * c.resolution, &tau, &dl));
    double stau = 0, sdl = 0;
    if (c.rho_set) {
      SetHandle sv;
      ensure(sturm_survival(cf.p, &o, c.rho, 0, &sv.p, nullptr));
      if (sturm_intervals_size(sv.p) > 0) ensure(sturm_thickness(sv.p, 2 * c.resolution, &stau, &sdl));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double total = sturm_intervals_measure(s.p);
    csv << num(lam) << ',' << num(dim) << ',' << (tau < 0 ? "inf" : num(tau)) << ',' << num(dl) << ',' << num(total)
        << ',' << num(secs);
    if (c.rho_set) csv << ',' << (stau < 0 ? "inf" : num(stau)) << ',' << num(sdl);
    csv << '\n';
    json row{{"lambda", lam},
             {"box_dim", dim},
             {"box_r2", r2},
             {"tau", tau < 0 ? json("inf") : json(tau)},
             {"dim_lower", dl},
             {"total_length", total},
             {"undecided_cells", undecided},
             {"runtime", secs}};
    if (c.rho_set) {
      row["survival_tau"] = stau < 0 ? json("inf") : json(stau);
      row["survival_dim_lower"] = sdl;
    }
    rows.push_back(row);
  }
  json j{{"rows", rows}, {"config", config_json("dimension-sweep", c, cf)}};
  emit(c, "csv", csv.str(), j);
  return kOk;
}

int cmd_orbit(const Config& c) {
  CfHandle cf(c.alpha);
  sturm_orbit r;
  ensure(sturm_orbit_classify(c.lambda, c.energy, cf.p, c.max_steps, c.escape_threshold, c.rho_set ? c.rho : 0, 0,
                              &r));
  static const char* names[] = {"bounded-up-to-budget", "escaped", "left-survival-region"};
  json j{{"status", names[r.status]},
         {"steps", r.steps},
         {"max_norm", r.max_norm},
         {"exit_index", r.exit_index < 0 ? json(nullptr) : json(r.exit_index)},
         {"config", config_json("orbit", c, cf)}};
  std::ostringstream csv;
  csv << "status,steps,max_norm,exit_index\n"
      << names[r.status] << ',' << r.steps << ',' << num(r.max_norm) << ','
      << (r.exit_index < 0 ? std::string() : std::to_string(r.exit_index)) << '\n';
  emit(c, "json", csv.str(), j);
  return kOk;
}

int cmd_stable_manifold(const Config& c) {
  CfHandle cf(c.alpha);
  auto mo = map_opts(c);
  sturm_graph* g = nullptr;
  ensure(sturm_stable_manifold(c.lambda, cf.p, c.start, c.depth, c.tol, &mo, 0, &g));
  std::unique_ptr<sturm_graph, void (*)(sturm_graph*)> guard(g, sturm_graph_free);
  std::ostringstream csv;
  csv << "t,x,y\n";
  for (std::size_t i = 0; i < sturm_graph_size(g); ++i) {
    double t, x, y;
    ensure(sturm_graph_sample(g, i, &t, &x, &y));
    csv << num(t) << ',' << num(x) << ',' << num(y) << '\n';
  }
  double slope, lip, inc;
  std::size_t depth;
  ensure(sturm_graph_info(g, &slope, &depth, &lip, &inc));
  json j{{"slope", slope},
         {"depth_used", depth},
         {"lipschitz_bound", lip},
         {"last_increment", inc},
         {"samples", sturm_graph_size(g)},
         {"config", config_json("stable-manifold", c, cf)}};
  emit(c, "csv", csv.str(), j);
  return kOk;
}

int cmd_three_distance(const Config& c) {
  CfHandle cf(c.alpha);
  double alpha;
  ensure(sturm_cf_value(cf.p, &alpha));
  std::vector<double> len(3);
  std::size_t count = 0;
  ensure(sturm_three_distance(alpha, c.n, len.data(), len.size(), &count));
  len.resize(std::min<std::size_t>(count, len.size()));
  std::ostringstream csv;
  csv << "length\n";
  for (double l : len) csv << num(l) << '\n';
  json j{{"alpha", alpha}, {"n", c.n}, {"lengths", len}, {"count", count}, {"config", config_json("three-distance", c, cf)}};
  emit(c, "json", csv.str(), j);
  return kOk;
}

int cmd_verify(const Config& c, bool lambda_given) {
  CfHandle cf(c.alpha);
  char* raw = nullptr;
  sturm_status st = sturm_verify(c.seed, 0, &raw);
  if (st != STURM_OK && st != STURM_E_VERIFY) ensure(st);
  json j = json::parse(raw);
  sturm_string_free(raw);
  bool passed = j["passed"].get<bool>();
  json failures = json::array();
  for (const auto& ch : j["checks"])
    if (!ch["passed"].get<bool>()) failures.push_back(ch["name"]);

  double beta = c.beta > 0 ? c.beta : sturm_initial_beta();
  json cones = json::array();
  for (unsigned a = 1; a <= 10; ++a) {
    sturm_cone_report r;
    ensure(sturm_cone_check(beta, a, &r));
    bool ok = r.invariant && r.min_expansion >= r.mu_bar - 1e-12 &&
              r.max_expansion <= (a + std::sqrt(4.0 + a * a)) / 2 + 1e-12;
    cones.push_back({{"a", a}, {"invariant", r.invariant != 0}, {"min_expansion", r.min_expansion},
                     {"max_expansion", r.max_expansion}, {"passed", ok}});
    if (!ok) {
      passed = false;
      failures.push_back("cone_check_a" + std::to_string(a));
    }
  }
  j["cone_check"] = {{"beta", beta}, {"digits", cones}};

  if (lambda_given) {
    std::vector<unsigned> digits(64);
    std::size_t w = 0;
    ensure(sturm_cf_digits(cf.p, digits.size(), digits.data(), &w));
    std::vector<unsigned> alphabet;
    for (std::size_t i = 0; i < w; ++i)
      if (std::find(alphabet.begin(), alphabet.end(), digits[i]) == alphabet.end()) alphabet.push_back(digits[i]);
    std::sort(alphabet.begin(), alphabet.end());
    auto mo = map_opts(c);
    char* pc = nullptr;
    ensure(sturm_property_c(c.lambda, alphabet.data(), alphabet.size(), c.grid, 0.1, beta, &mo, 0, &pc));
    json pj = json::parse(pc);
    sturm_string_free(pc);
    if (!pj["passed"].get<bool>()) {
      passed = false;
      failures.push_back("property_c");
    }
    j["property_c"] = pj;
  }
  j["passed"] = passed;
  j["failures"] = failures;
  j["config"] = config_json("verify", c, cf);
  std::ostringstream csv;
  csv << "check,passed,value,bound\n";
  for (const auto& ch : j["checks"])
    csv << ch["name"].get<std::string>() << ',' << (ch["passed"].get<bool>() ? 1 : 0) << ','
        << num(ch["value"].get<double>()) << ',' << num(ch["bound"].get<double>()) << '\n';
  emit(c, "json", csv.str(), j);
  return passed ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sturmian Hamiltonian spectra via trace-map dynamics"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--alpha", c.alpha, "digit string: 1,1,2 | (1,2)* | 3,(1,2)* | golden | silver");
    sub->add_option("--lambda", c.lambda, "coupling constant")->check(CLI::NonNegativeNumber);
    sub->add_option("--resolution", c.resolution, "energy resolution")->check(CLI::PositiveNumber);
    sub->add_option("--rho", c.rho, "radius of the removed balls")->check(CLI::PositiveNumber);
    sub->add_option("--max-steps", c.max_steps, "orbit budget")->check(CLI::PositiveNumber);
    sub->add_option("--escape-threshold", c.escape_threshold, "escape threshold")->check(CLI::Range(2.0, 1e300));
    sub->add_option("--beta", c.beta, "cone parameter (default: initial beta)");
    sub->add_option("--grid", c.grid, "grid density for Property (C)")->check(CLI::PositiveNumber);
    sub->add_option("--output", c.output, "write <output>.csv and <output>.json");
    sub->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", c.seed, "seed for randomized suites");
  };

  auto* spectrum = app.add_subcommand("spectrum", "spectrum estimate on the spectral line");
  auto* sweep = app.add_subcommand("dimension-sweep", "box and thickness dimensions over a coupling list");
  auto* survival = app.add_subcommand("survival", "survival set outside the rho-balls");
  auto* orbit = app.add_subcommand("orbit", "classify one orbit of the spectral line");
  auto* manifold = app.add_subcommand("stable-manifold", "graph-transform local stable manifold at Q1");
  auto* three = app.add_subcommand("three-distance", "distinct arc lengths of the circle rotation");
  auto* verify = app.add_subcommand("verify", "invariant suite");
  for (auto* s : {spectrum, sweep, survival, orbit, manifold, three, verify}) common(s);
  sweep->add_option("--lambda-list", c.lambda_list, "descending coupling list")->delimiter(',');
  orbit->add_option("--energy,-E", c.energy, "energy on the spectral line");
  three->add_option("--n", c.n, "number of rotation steps")->check(CLI::PositiveNumber);
  manifold->add_option("--depth", c.depth, "maximal composition depth")->check(CLI::PositiveNumber);
  manifold->add_option("--m", c.start, "first digit index")->check(CLI::PositiveNumber);
  manifold->add_option("--tol", c.tol, "sup-norm stopping tolerance")->check(CLI::PositiveNumber);
  for (auto* s : {manifold, verify}) {
    s->add_option("--map-rho", c.map_rho, "rho used to size the blend region")->check(CLI::PositiveNumber);
    s->add_flag("--override-guard", c.override_guard, "allow lambda above the guard");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    for (auto* s : {sweep, survival, orbit})
      if (s->parsed()) c.rho_set = s->count("--rho") > 0 || s == survival;
    if (spectrum->parsed()) return cmd_spectrum(c);
    if (sweep->parsed()) return cmd_dimension_sweep(c);
    if (survival->parsed()) return cmd_survival(c);
    if (orbit->parsed()) return cmd_orbit(c);
    if (manifold->parsed()) return cmd_stable_manifold(c);
    if (three->parsed()) return cmd_three_distance(c);
    if (verify->parsed()) return cmd_verify(c, verify->count("--lambda") > 0);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}

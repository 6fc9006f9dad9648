#include "sturmian/contfrac.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace sturmian {

namespace {

std::vector<digit_t> parse_list(std::string_view s, std::string_view whole) {
  std::vector<digit_t> out;
  std::size_t i = 0;
  auto bad = [&] { return std::invalid_argument("bad digit string: '" + std::string(whole) + "'"); };
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) throw bad();
    unsigned long v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, v);
    if (ec != std::errc() || v == 0 || v > 1000000) throw bad();
    out.push_back(static_cast<digit_t>(v));
    i = j;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size()) {
      if (s[i] != ',') throw bad();
      ++i;
      if (i == s.size()) throw bad();
    }
  }
  return out;
}

std::string join(const std::vector<digit_t>& d) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
  return os.str();
}

}  // namespace

ContinuedFraction ContinuedFraction::finite(std::vector<digit_t> digits) {
  if (digits.empty()) throw std::invalid_argument("empty digit list");
  ContinuedFraction cf;
  cf.mode_ = DigitMode::finite;
  for (auto a : digits) {
    if (a == 0) throw std::invalid_argument("digits must be positive");
    cf.alphabet_.insert(a);
  }
  cf.head_ = std::move(digits);
  return cf;
}

ContinuedFraction ContinuedFraction::periodic(std::vector<digit_t> prefix, std::vector<digit_t> period) {
  if (period.empty()) throw std::invalid_argument("empty period");
  ContinuedFraction cf;
  cf.mode_ = DigitMode::periodic;
  for (auto a : prefix) {
    if (a == 0) throw std::invalid_argument("digits must be positive");
    cf.alphabet_.insert(a);
  }
  for (auto a : period) {
    if (a == 0) throw std::invalid_argument("digits must be positive");
    cf.alphabet_.insert(a);
  }
  cf.head_ = std::move(prefix);
  cf.period_ = std::move(period);
  return cf;
}

ContinuedFraction ContinuedFraction::generated(Generator gen, std::set<digit_t> alphabet) {
  if (!gen) throw std::invalid_argument("null generator");
  if (alphabet.empty() || alphabet.count(0)) throw std::invalid_argument("alphabet must be nonempty positive digits");
  ContinuedFraction cf;
  cf.mode_ = DigitMode::generator;
  cf.gen_ = std::move(gen);
  cf.alphabet_ = std::move(alphabet);
  return cf;
}

ContinuedFraction ContinuedFraction::parse(std::string_view spec) {
  std::string s;
  for (char c : spec)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "golden") return periodic({}, {1});
  if (s == "silver") return periodic({}, {2});
  if (s.empty()) throw std::invalid_argument("empty digit string");

  auto open = s.find('(');
  if (open == std::string::npos) {
    if (s.find_first_of(")*") != std::string::npos) throw std::invalid_argument("bad digit string: '" + s + "'");
    return finite(parse_list(s, spec));
  }
  if (s.size() < open + 3 || s.substr(s.size() - 2) != ")*" || s.find('(', open + 1) != std::string::npos)
    throw std::invalid_argument("bad digit string: '" + s + "'");
  std::vector<digit_t> head;
  if (open > 0) {
    if (s[open - 1] != ',') throw std::invalid_argument("bad digit string: '" + s + "'");
    head = parse_list(std::string_view(s).substr(0, open - 1), spec);
  }
  auto body = std::string_view(s).substr(open + 1, s.size() - open - 3);
  return periodic(std::move(head), parse_list(body, spec));
}

std::optional<std::size_t> ContinuedFraction::length() const {
  if (mode_ == DigitMode::finite) return head_.size();
  return std::nullopt;
}

digit_t ContinuedFraction::digit(std::size_t k) const {
  if (k == 0) throw std::out_of_range("digits are 1-based");
  switch (mode_) {
    case DigitMode::finite:
      if (k > head_.size()) throw std::out_of_range("past end of finite digit list");
      return head_[k - 1];
    case DigitMode::periodic:
      if (k <= head_.size()) return head_[k - 1];
      return period_[(k - 1 - head_.size()) % period_.size()];
    case DigitMode::generator: {
      digit_t a = gen_(k);
      if (!alphabet_.count(a)) throw std::domain_error("generator emitted digit outside alphabet");
      return a;
    }
  }
  return 0;
}

std::vector<digit_t> ContinuedFraction::prefix(std::size_t n) const {
  if (mode_ == DigitMode::finite) n = std::min(n, head_.size());
  std::vector<digit_t> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) out.push_back(digit(k));
  return out;
}

long double ContinuedFraction::value(std::size_t depth) const {
  auto d = prefix(depth);
  long double x = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) x = 1.0L / (static_cast<long double>(*it) + x);
  return x;
}

std::string ContinuedFraction::to_string() const {
  switch (mode_) {
    case DigitMode::finite: return join(head_);
    case DigitMode::periodic:
      return (head_.empty() ? "" : join(head_) + ",") + "(" + join(period_) + ")*";
    case DigitMode::generator: {
      std::vector<digit_t> a(alphabet_.begin(), alphabet_.end());
      return "generator{" + join(a) + "}";
    }
  }
  return {};
}

std::vector<digit_t> cf_expand(long double x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(x > 0 && x < 1)) throw std::invalid_argument("x must lie in (0,1)");
  constexpr long double eps = std::numeric_limits<long double>::epsilon();
  // err bounds the absolute error of the current remainder
  long double err = eps * x;
  std::vector<digit_t> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (x <= err) throw precision_error("rational-or-precision-exhausted");
    long double y = 1.0L / x;
    // relative error of x propagates to y, plus one rounding
    long double yerr = y * (err / x) + eps * y;
    long double a = std::floor(y);
    long double frac = y - a;
    if (frac <= yerr || 1.0L - frac <= yerr || a > 1e9L) throw precision_error("rational-or-precision-exhausted");
    out.push_back(static_cast<digit_t>(a));
    x = frac;
    err = yerr + eps * frac;
  }
  return out;
}

std::vector<ConvergentPair> convergents(const std::vector<digit_t>& digits) {
  std::vector<ConvergentPair> out;
  out.reserve(digits.size());
  bigint p_prev = 1, p = 0;  // p_{-1}, p_0
  bigint q_prev = 0, q = 1;  // q_{-1}, q_0
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] == 0) throw std::invalid_argument("digits must be positive");
    bigint pn = digits[k] * p + p_prev;
    bigint qn = digits[k] * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    out.push_back({k + 1, p, q});
  }
  return out;
}

std::vector<ConvergentPair> convergents(const ContinuedFraction& cf, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  return convergents(cf.prefix(n));
}

rational evaluate(const std::vector<digit_t>& digits) {
  if (digits.empty()) throw std::invalid_argument("empty digit list");
  rational x = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) x = rational(1) / (rational(*it) + x);
  return x;
}

std::vector<double> three_distance_gaps(long double alpha, std::size_t n, double dedup) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
  std::vector<long double> pts(n + 1);
  for (std::size_t m = 0; m <= n; ++m) {
    long double v = static_cast<long double>(m) * alpha;
    pts[m] = v - std::floor(v);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> arcs;
  arcs.reserve(n + 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) arcs.push_back(static_cast<double>(pts[i + 1] - pts[i]));
  arcs.push_back(static_cast<double>(1.0L - pts.back() + pts.front()));
  for (double a : arcs)
    if (a <= dedup) throw precision_error("rational-or-precision-exhausted");
  std::sort(arcs.begin(), arcs.end());
  std::vector<double> out;
  for (double a : arcs)
    if (out.empty() || a - out.back() > dedup) out.push_back(a);
  return out;
}

CoveringBound covering_bound(const std::set<digit_t>& alphabet, double eps) {
  if (alphabet.empty() || alphabet.count(0)) throw std::invalid_argument("alphabet must be nonempty positive digits");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const digit_t lo = *alphabet.begin(), hi = *alphabet.rbegin();
  // smallest-possible denominators bound the arc lengths, largest-possible ones bound n
  std::uint64_t qm_prev = 1, qm = lo;  // worst-case q_0, q_1
  std::uint64_t M_prev = 1, M = hi;
  std::size_t k = 1;
  while (!(1.0 / static_cast<double>(qm_prev) + 1.0 / static_cast<double>(qm) < eps)) {
    std::uint64_t qn = lo * qm + qm_prev;
    std::uint64_t Mn = hi * M + M_prev;
    if (Mn < M || Mn > (std::uint64_t{1} << 60)) throw std::overflow_error("covering bound exceeds 64-bit range");
    qm_prev = qm;
    qm = qn;
    M_prev = M;
    M = Mn;
    ++k;
  }
  return {k, 2 * M + M_prev - 1};
}

}  // namespace sturmian

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sturmian {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;
using digit_t = unsigned;

// Raised when a remainder falls below the error budget of the working precision.
struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DigitMode { finite, periodic, generator };

class ContinuedFraction {
public:
  using Generator = std::function<digit_t(std::size_t)>;  // k >= 1 -> a_k

  static ContinuedFraction finite(std::vector<digit_t> digits);
  static ContinuedFraction periodic(std::vector<digit_t> prefix, std::vector<digit_t> period);
  // alphabet must contain every digit the generator can emit; checked on access
  static ContinuedFraction generated(Generator gen, std::set<digit_t> alphabet);

  // "1,1,2", "(1,2)*", "3,(1,2)*", "golden", "silver"
  static ContinuedFraction parse(std::string_view spec);

  DigitMode mode() const { return mode_; }
  const std::set<digit_t>& alphabet() const { return alphabet_; }
  std::optional<std::size_t> length() const;

  digit_t digit(std::size_t k) const;                 // 1-based
  std::vector<digit_t> prefix(std::size_t n) const;   // shorter than n only in finite mode

  long double value(std::size_t depth = 64) const;    // truncation [a_1..a_depth]
  std::string to_string() const;

private:
  DigitMode mode_ = DigitMode::finite;
  std::vector<digit_t> head_;
  std::vector<digit_t> period_;
  Generator gen_;
  std::set<digit_t> alphabet_;
};

struct ConvergentPair {
  std::size_t k;
  bigint p;
  bigint q;
};

std::vector<digit_t> cf_expand(long double x, std::size_t n);

std::vector<ConvergentPair> convergents(const ContinuedFraction& cf, std::size_t n);
std::vector<ConvergentPair> convergents(const std::vector<digit_t>& digits);

// [a_1..a_n] evaluated from the tail
rational evaluate(const std::vector<digit_t>& digits);

// Distinct arc lengths cut on the circle by {m*alpha mod 1 : 0 <= m <= n}.
std::vector<double> three_distance_gaps(long double alpha, std::size_t n, double dedup = 1e-12);

struct CoveringBound {
  std::size_t k;
  std::uint64_t n;
};

// n such that {m*alpha : 1 <= m <= n} is eps-dense on the circle for every alpha
// with digits in the alphabet.
CoveringBound covering_bound(const std::set<digit_t>& alphabet, double eps);

}  // namespace sturmian

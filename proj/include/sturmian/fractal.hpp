#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sturmian {

template <class T>
struct BasicInterval {
  T left;
  T right;
  T length() const { return right - left; }
};

// Sorted, pairwise disjoint closed intervals with strictly positive gaps.
template <class T>
class BasicIntervalSet {
public:
  using interval_type = BasicInterval<T>;

  BasicIntervalSet() = default;

  // Sorts and merges; gaps of length <= gap_floor are closed up.
  explicit BasicIntervalSet(std::vector<interval_type> raw, T gap_floor = T(0)) {
    for (const auto& iv : raw)
      if (!(iv.left <= iv.right)) throw std::invalid_argument("interval with left > right");
    std::sort(raw.begin(), raw.end(), [](const interval_type& a, const interval_type& b) {
      return a.left < b.left || (a.left == b.left && a.right < b.right);
    });
    for (const auto& iv : raw) {
      if (!iv_.empty() && iv.left - iv_.back().right <= gap_floor) {
        if (iv.right > iv_.back().right) iv_.back().right = iv.right;
      } else {
        iv_.push_back(iv);
      }
    }
  }

  const std::vector<interval_type>& intervals() const { return iv_; }
  std::size_t size() const { return iv_.size(); }
  bool empty() const { return iv_.empty(); }
  const interval_type& operator[](std::size_t i) const { return iv_[i]; }

  interval_type hull() const {
    if (iv_.empty()) throw std::logic_error("hull of empty set");
    return {iv_.front().left, iv_.back().right};
  }

  bool contains(const T& x) const {
    auto it = std::upper_bound(iv_.begin(), iv_.end(), x, [](const T& v, const interval_type& iv) { return v < iv.left; });
    if (it == iv_.begin()) return false;
    return x <= std::prev(it)->right;
  }

  // every interval of *this lies inside one interval of other
  bool subset_of(const BasicIntervalSet& other) const {
    std::size_t j = 0;
    for (const auto& iv : iv_) {
      while (j < other.iv_.size() && other.iv_[j].right < iv.left) ++j;
      if (j == other.iv_.size() || other.iv_[j].left > iv.left || other.iv_[j].right < iv.right) return false;
    }
    return true;
  }

  BasicIntervalSet intersect(const BasicIntervalSet& other) const {
    std::vector<interval_type> out;
    std::size_t i = 0, j = 0;
    while (i < iv_.size() && j < other.iv_.size()) {
      T lo = std::max(iv_[i].left, other.iv_[j].left);
      T hi = std::min(iv_[i].right, other.iv_[j].right);
      if (lo <= hi) out.push_back({lo, hi});
      if (iv_[i].right < other.iv_[j].right) ++i;
      else ++j;
    }
    return BasicIntervalSet(std::move(out));
  }

  BasicIntervalSet clip(const T& lo, const T& hi) const {
    return intersect(BasicIntervalSet(std::vector<interval_type>{{lo, hi}}));
  }

  // closed delta-neighbourhood
  BasicIntervalSet dilate(const T& delta) const {
    std::vector<interval_type> out;
    out.reserve(iv_.size());
    for (const auto& iv : iv_) out.push_back({iv.left - delta, iv.right + delta});
    return BasicIntervalSet(std::move(out));
  }

  BasicIntervalSet affine(const T& scale, const T& shift) const {
    if (!(scale > T(0))) throw std::invalid_argument("scale must be positive");
    std::vector<interval_type> out;
    for (const auto& iv : iv_) out.push_back({iv.left * scale + shift, iv.right * scale + shift});
    return BasicIntervalSet(std::move(out));
  }

private:
  std::vector<interval_type> iv_;
};

using Interval = BasicInterval<double>;
using IntervalSet = BasicIntervalSet<double>;

template <class T>
T measure(const BasicIntervalSet<T>& s) {
  T total = T(0);
  for (const auto& iv : s.intervals()) total += iv.length();
  return total;
}

template <class T>
struct Gap {
  std::size_t after;  // gap lies between interval `after` and `after + 1`
  T left;
  T right;
  T length() const { return right - left; }
};

template <class T>
struct GapPresentation {
  BasicInterval<T> hull;
  std::vector<Gap<T>> gaps;             // presentation order
  std::vector<std::pair<T, T>> bridges;  // (left bridge, right bridge) per gap
};

// Decreasing gap length, ties broken by position.  The bridge at an endpoint of the
// k-th gap is the component of the hull minus the first k gaps containing that endpoint.
template <class T>
GapPresentation<T> presentation(const BasicIntervalSet<T>& s) {
  if (s.empty()) throw std::invalid_argument("presentation of empty set");
  const auto& iv = s.intervals();
  GapPresentation<T> out;
  out.hull = s.hull();
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) out.gaps.push_back({i, iv[i].right, iv[i + 1].left});
  std::stable_sort(out.gaps.begin(), out.gaps.end(),
                   [](const Gap<T>& a, const Gap<T>& b) { return a.length() > b.length(); });
  std::set<std::size_t> removed;
  out.bridges.reserve(out.gaps.size());
  for (const auto& g : out.gaps) {
    auto it = removed.insert(g.after).first;
    T lb = it == removed.begin() ? out.hull.left : iv[*std::prev(it) + 1].left;
    auto nx = std::next(it);
    T rb = nx == removed.end() ? out.hull.right : iv[*nx].right;
    out.bridges.emplace_back(g.left - lb, rb - g.right);
  }
  return out;
}

// bridges for an arbitrary gap order (order holds gap positions `after`)
template <class T>
std::vector<std::pair<T, T>> bridges_for_order(const BasicIntervalSet<T>& s, const std::vector<std::size_t>& order) {
  const auto& iv = s.intervals();
  const auto hull = s.hull();
  std::set<std::size_t> removed;
  std::vector<std::pair<T, T>> out;
  for (auto g : order) {
    auto it = removed.insert(g).first;
    T lb = it == removed.begin() ? hull.left : iv[*std::prev(it) + 1].left;
    auto nx = std::next(it);
    T rb = nx == removed.end() ? hull.right : iv[*nx].right;
    out.emplace_back(iv[g].right - lb, rb - iv[g + 1].left);
  }
  return out;
}

inline double dim_lower_from_tau(double tau) {
  if (std::isinf(tau)) return 1.0;
  if (tau <= 0) return 0.0;
  return std::log(2.0) / std::log(2.0 + 1.0 / tau);
}

template <class T>
struct ThicknessReport {
  bool infinite = true;  // no gaps
  T tau = T(0);          // meaningful when !infinite
  double dim_lower = 1.0;
  std::size_t witness_gap = 0;  // position `after` of the minimising gap
  bool witness_right = false;   // minimising bridge is on the right of the gap

  double tau_value() const {
    return infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(tau);
  }
};

template <class T>
ThicknessReport<T> thickness(const BasicIntervalSet<T>& s) {
  auto pres = presentation(s);
  ThicknessReport<T> r;
  for (std::size_t k = 0; k < pres.gaps.size(); ++k) {
    const auto& g = pres.gaps[k];
    const auto& [lb, rb] = pres.bridges[k];
    T len = g.length();
    T ql = lb / len, qr = rb / len;
    bool right = qr < ql;
    T q = right ? qr : ql;
    if (r.infinite || q < r.tau) {
      r.infinite = false;
      r.tau = q;
      r.witness_gap = g.after;
      r.witness_right = right;
    }
  }
  r.dim_lower = r.infinite ? 1.0 : dim_lower_from_tau(static_cast<double>(r.tau));
  return r;
}

// sup over every gap ordering of the inf ratio; only for small sets
template <class T>
ThicknessReport<T> thickness_exhaustive(const BasicIntervalSet<T>& s, std::size_t max_gaps = 6) {
  if (s.empty()) throw std::invalid_argument("thickness of empty set");
  const std::size_t ng = s.size() - 1;
  if (ng > max_gaps) throw std::invalid_argument("too many gaps for exhaustive thickness");
  ThicknessReport<T> best;
  if (ng == 0) return best;
  std::vector<std::size_t> order(ng);
  std::iota(order.begin(), order.end(), 0);
  bool first = true;
  do {
    auto br = bridges_for_order(s, order);
    T inf_q = T(0);
    for (std::size_t k = 0; k < ng; ++k) {
      T len = s[order[k] + 1].left - s[order[k]].right;
      T q = std::min(br[k].first, br[k].second) / len;
      if (k == 0 || q < inf_q) inf_q = q;
    }
    if (first || inf_q > best.tau) {
      best.infinite = false;
      best.tau = inf_q;
      first = false;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  best.dim_lower = dim_lower_from_tau(static_cast<double>(best.tau));
  return best;
}

struct BoxFit {
  double dim = 0;
  double r2 = 0;
  std::vector<double> scales;              // all scales supplied, coarse to fine
  std::vector<std::size_t> counts;         // box counts per supplied scale
  std::size_t first_used = 0;              // index of first scale kept in the fit
};

// halving ladder from coarse down to (and including) the last scale >= fine
std::vector<double> geometric_scales(double coarse, double fine, double factor = 2.0);

std::size_t box_count(const IntervalSet& s, double eps);

BoxFit box_dimension(const IntervalSet& s, std::vector<double> scales, unsigned threads = 1);

}  // namespace sturmian

#include "sturmian/fractal.hpp"
#include "sturmian/parallel.hpp"

namespace sturmian {

std::vector<double> geometric_scales(double coarse, double fine, double factor) {
  if (!(coarse > 0 && fine > 0 && coarse >= fine && factor > 1)) throw std::invalid_argument("bad scale range");
  std::vector<double> out;
  for (double e = coarse; e >= fine * (1 - 1e-12); e /= factor) out.push_back(e);
  return out;
}

std::size_t box_count(const IntervalSet& s, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("box size must be positive");
  if (s.empty()) return 0;
  const double origin = s.hull().left;
  std::size_t count = 0;
  long long last = -1;
  for (const auto& iv : s.intervals()) {
    auto a = static_cast<long long>(std::floor((iv.left - origin) / eps));
    auto b = static_cast<long long>(std::floor((iv.right - origin) / eps));
    if (a <= last) a = last + 1;
    if (b >= a) {
      count += static_cast<std::size_t>(b - a + 1);
      last = b;
    }
  }
  return count;
}

BoxFit box_dimension(const IntervalSet& s, std::vector<double> scales, unsigned threads) {
  if (s.empty()) throw std::invalid_argument("box dimension of empty set");
  std::sort(scales.begin(), scales.end(), std::greater<>());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  BoxFit fit;
  fit.scales = scales;
  fit.counts.assign(scales.size(), 0);
  parallel_for(scales.size(), [&](std::size_t i) { fit.counts[i] = box_count(s, scales[i]); }, threads);

  // Leading scales whose count matches the next finer one sit on the coarse plateau
  // and carry no slope information; a fully flat ladder is kept (finite sets).
  std::size_t first = 0;
  bool all_equal = std::adjacent_find(fit.counts.begin(), fit.counts.end(), std::not_equal_to<>()) == fit.counts.end();
  if (!all_equal)
    while (first + 1 < fit.counts.size() && fit.counts[first] == fit.counts[first + 1]) ++first;
  fit.first_used = first;
  const std::size_t m = scales.size() - first;
  if (m < 2) throw std::invalid_argument("too few usable scales for box dimension");

  double mx = 0, my = 0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::log(1.0 / scales[first + i]);
    ys[i] = std::log(static_cast<double>(fit.counts[first + i]));
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.dim = sxy / sxx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace sturmian

#include "cage/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cage {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(xs.size() - 1));
}

double welch_p_value(const std::vector<double>& sample_a,
                     const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    throw std::invalid_argument("welch_p_value needs at least two samples each");

  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double ma = mean(sample_a);
  const double mb = mean(sample_b);
  const double sa = sample_stddev(sample_a);
  const double sb = sample_stddev(sample_b);
  const double var_term = sa * sa / na + sb * sb / nb;

  if (var_term == 0.0) return ma == mb ? 1.0 : 0.0;

  const double t = (ma - mb) / std::sqrt(var_term);
  // Welch-Satterthwaite degrees of freedom
  const double df = var_term * var_term /
                    (std::pow(sa * sa / na, 2) / (na - 1.0) +
                     std::pow(sb * sb / nb, 2) / (nb - 1.0));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

namespace {

// average ranks, with values closer than tie_epsilon sharing one group
std::vector<double> average_ranks(const std::vector<double>& xs, double tie_epsilon) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] - xs[order[j]] <= tie_epsilon) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys,
                double tie_epsilon) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length samples, n >= 2");
  const std::vector<double> rx = average_ranks(xs, tie_epsilon);
  const std::vector<double> ry = average_ranks(ys, tie_epsilon);
  if (rx == ry) return 1.0;

  const double mx = mean(rx);
  const double my = mean(ry);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0.0 || vy == 0.0)
    throw std::invalid_argument("spearman undefined for constant ranks");
  return cov / std::sqrt(vx * vy);
}

}  // namespace cage

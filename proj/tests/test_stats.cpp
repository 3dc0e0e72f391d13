#include <doctest.h>
#include <stdexcept>

#include <cmath>

#include "cage/rng.hpp"
#include "cage/stats.hpp"

using namespace cage;

TEST_CASE("mean and sample stddev basics") {
  CHECK(mean({}) == 0.0);
  CHECK(mean({2.0, 4.0}) == doctest::Approx(3.0));
  CHECK(sample_stddev({5.0}) == 0.0);
  CHECK(sample_stddev({1.0, 3.0}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("welch p-value is one for identical samples") {
  const std::vector<double> xs = {-1.0, -2.0, -3.0, -4.0};
  CHECK(welch_p_value(xs, xs) == doctest::Approx(1.0));
}

TEST_CASE("welch p-value convention for zero-variance samples") {
  const std::vector<double> zeros(30, 0.0);
  const std::vector<double> tens(30, 10.0);
  CHECK(welch_p_value(zeros, zeros) == 1.0);
  CHECK(welch_p_value(zeros, tens) < 1e-6);
}

TEST_CASE("welch p-value is symmetric") {
  Rng rng(40);
  std::vector<double> a, b;
  for (int i = 0; i < 25; ++i) a.push_back(rng.uniform(-5.0, 0.0));
  for (int i = 0; i < 40; ++i) b.push_back(rng.uniform(-6.0, 1.0));
  CHECK(welch_p_value(a, b) == doctest::Approx(welch_p_value(b, a)).epsilon(1e-12));
}

TEST_CASE("welch p-value detects a clear separation") {
  Rng rng(41);
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) a.push_back(-20.0 + rng.uniform(-0.5, 0.5));
  for (int i = 0; i < 30; ++i) b.push_back(-10.0 + rng.uniform(-0.5, 0.5));
  CHECK(welch_p_value(a, b) < 1e-6);

  // overlapping samples from the same distribution are not significant
  std::vector<double> c, d;
  for (int i = 0; i < 30; ++i) c.push_back(rng.uniform(-1.0, 1.0));
  for (int i = 0; i < 30; ++i) d.push_back(rng.uniform(-1.0, 1.0));
  CHECK(welch_p_value(c, d) > 0.01);
}

TEST_CASE("welch p-value needs two samples per side") {
  CHECK_THROWS_AS(welch_p_value({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("welch matches a hand-computed equal-variance case") {
  // n = 2 per side keeps the arithmetic tractable: a = {0, 2}, b = {1, 5}
  // means 1 and 3, variances 2 and 8, t = -2 / sqrt(1 + 4) = -0.8944,
  // df = 25 / (1/1 + 16/1) ... computed with the Welch formula below
  const std::vector<double> a = {0.0, 2.0};
  const std::vector<double> b = {1.0, 5.0};
  const double p = welch_p_value(a, b);
  CHECK(p > 0.4);  // far from significant
  CHECK(p < 0.7);
}

TEST_CASE("spearman is exactly one for any monotone map") {
  const std::vector<double> xs = {-3.0, -1.0, -2.0, 0.0, -5.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(10.0 * x);
  CHECK(spearman(xs, ys) == 1.0);

  std::vector<double> cubes;
  for (double x : xs) cubes.push_back(x * x * x);
  CHECK(spearman(xs, cubes) == 1.0);
}

TEST_CASE("spearman is minus one for a reversed order") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys = {4.0, 3.0, 2.0, 1.0};
  CHECK(spearman(xs, ys) == doctest::Approx(-1.0));
}

TEST_CASE("spearman handles ties with average ranks") {
  const std::vector<double> xs = {1.0, 1.0, 2.0, 3.0};
  const std::vector<double> ys = {1.0, 1.0, 2.0, 3.0};
  CHECK(spearman(xs, ys) == 1.0);
  // a tie on one side only lowers the correlation below one
  const std::vector<double> zs = {1.0, 1.1, 2.0, 3.0};
  CHECK(spearman(xs, zs) < 1.0);
}

TEST_CASE("spearman tie tolerance recovers lattice ties") {
  // values that differ by float noise only
  const std::vector<double> xs = {1.0, 1.0 + 1e-12, 2.0, 3.0};
  const std::vector<double> ys = {10.0 + 1e-12, 10.0, 20.0, 30.0};
  CHECK(spearman(xs, ys, 1e-9) == 1.0);
}

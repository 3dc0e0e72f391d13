#pragma once

#include <vector>

namespace cage {

double mean(const std::vector<double>& xs);
// sample standard deviation (n - 1 denominator); 0 for n < 2
double sample_stddev(const std::vector<double>& xs);

// Two-sided Welch unequal-variance t-test p-value in [0, 1]. Both samples
// need at least two elements (std::invalid_argument otherwise). When both
// variances are zero the convention is 1.0 for equal means, 0.0 otherwise.
double welch_p_value(const std::vector<double>& sample_a,
                     const std::vector<double>& sample_b);

// Spearman rank correlation with average ranks over ties. `tie_epsilon`
// groups values whose gap is at most that much into one tie group, which
// recovers exact-arithmetic ties between lattice-valued scores summed in
// different orders. Identical rank vectors short-circuit to exactly 1.0.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys,
                double tie_epsilon = 0.0);

}  // namespace cage

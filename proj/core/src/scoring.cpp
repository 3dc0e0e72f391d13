#include "cage/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cage {

const char* to_string(ShapingScheme s) {
  switch (s) {
    case ShapingScheme::Baseline: return "baseline";
    case ShapingScheme::Normalised: return "normalised";
    case ShapingScheme::ScaledUp: return "scaled";
    case ShapingScheme::DisproportionateScaledUp: return "disproportionate";
    case ShapingScheme::SmallPositive: return "small-positive";
    case ShapingScheme::LargePositive: return "large-positive";
  }
  return "?";
}

bool parse_shaping_scheme(const std::string& text, ShapingScheme& out) {
  for (std::size_t i = 0; i < kShapingSchemeCount; ++i) {
    const auto s = static_cast<ShapingScheme>(i);
    if (text == to_string(s)) {
      out = s;
      return true;
    }
  }
  return false;
}

std::vector<double> StepPenalties::clauses() const {
  std::vector<double> out = privileged_criticalities;
  if (impacted) out.push_back(kImpactPenalty);
  if (restored) out.push_back(kRestorePenalty);
  return out;
}

double StepPenalties::base_sum() const {
  double sum = 0.0;
  for (double c : clauses()) sum += c;
  return sum;
}

namespace {

// the magnitude mapping tables, indexed over the base value set
// {0.0, -0.1, -1.0, -10.0}
double map_magnitude(double value, ShapingScheme scheme) {
  struct Row {
    double base;
    double normalised;
    double scaled;
    double disproportionate;
  };
  static constexpr Row kTable[] = {
      {0.0, 0.0, 0.0, 0.0},
      {-0.1, -0.01, -1.0, -0.1},
      {-1.0, -0.1, -10.0, -10.0},
      {-10.0, -1.0, -100.0, -100.0},
  };
  for (const Row& row : kTable) {
    if (value == row.base) {
      switch (scheme) {
        case ShapingScheme::Normalised: return row.normalised;
        case ShapingScheme::ScaledUp: return row.scaled;
        case ShapingScheme::DisproportionateScaledUp: return row.disproportionate;
        default: return value;
      }
    }
  }
  throw std::domain_error("reward value outside the base set: " +
                          std::to_string(value));
}

}  // namespace

double shape(double value, ShapingScheme scheme) {
  switch (scheme) {
    case ShapingScheme::Baseline:
      return value;
    case ShapingScheme::Normalised:
    case ShapingScheme::ScaledUp:
    case ShapingScheme::DisproportionateScaledUp:
      return map_magnitude(value, scheme);
    case ShapingScheme::SmallPositive:
      return value == 0.0 ? 0.1 : value;
    case ShapingScheme::LargePositive:
      return value == 0.0 ? 1.0 : value;
  }
  throw std::domain_error("unknown shaping scheme");
}

RewardPair make_reward_pair(const StepPenalties& penalties, ShapingScheme scheme) {
  RewardPair pair;
  pair.original = penalties.base_sum();
  switch (scheme) {
    case ShapingScheme::SmallPositive:
    case ShapingScheme::LargePositive:
      // positive injection applies to the whole-step reward when it is zero
      pair.augmented = pair.original == 0.0 ? shape(0.0, scheme) : pair.original;
      break;
    default: {
      double sum = 0.0;
      for (double clause : penalties.clauses()) sum += shape(clause, scheme);
      pair.augmented = sum;
      break;
    }
  }
  pair.augmented = std::max(pair.augmented, kStepRewardFloor);
  return pair;
}

double episode_score(const std::vector<RewardPair>& rewards, RewardChannel channel) {
  double sum = 0.0;
  for (const RewardPair& r : rewards)
    sum += channel == RewardChannel::Augmented ? r.augmented : r.original;
  return sum;
}

}  // namespace cage

#pragma once

#include <string>
#include <vector>

namespace cage {

// The six extrinsic reward schemes. Baseline is the unmodified penalty
// structure; the magnitude schemes remap each penalty clause before summing;
// the positive schemes inject a reward into otherwise-zero steps.
enum class ShapingScheme {
  Baseline,
  Normalised,
  ScaledUp,
  DisproportionateScaledUp,
  SmallPositive,
  LargePositive,
};
inline constexpr std::size_t kShapingSchemeCount = 6;

const char* to_string(ShapingScheme s);
// accepts the CLI spellings: baseline, normalised, scaled, disproportionate,
// small-positive, large-positive
bool parse_shaping_scheme(const std::string& text, ShapingScheme& out);

// (augmented, original) reward emitted every step; learning consumes the
// augmented channel, reporting always uses the original one.
struct RewardPair {
  double augmented = 0.0;
  double original = 0.0;
};

// One step's penalty sources before shaping: the criticality of every host
// the adversary holds privileged access on, whether the operational server
// was impacted, and whether the defender ran Restore.
struct StepPenalties {
  std::vector<double> privileged_criticalities;
  bool impacted = false;
  bool restored = false;

  // the per-clause base values: each criticality, -10 for impact, -1 for
  // restore
  std::vector<double> clauses() const;
  double base_sum() const;
};

inline constexpr double kImpactPenalty = -10.0;
inline constexpr double kRestorePenalty = -1.0;
// floor applied to the shaped per-step sum
inline constexpr double kStepRewardFloor = -100.0;

// Maps one base clause value {0.0, -0.1, -1.0, -10.0} under a scheme.
// Throws std::domain_error for values outside the base set under the
// magnitude schemes.
double shape(double value, ShapingScheme scheme);

// Shapes one step: magnitude schemes map clause-wise then sum, the positive
// schemes inject shape(0.0) when the whole-step base reward is zero; the
// result is floored at kStepRewardFloor.
RewardPair make_reward_pair(const StepPenalties& penalties, ShapingScheme scheme);

enum class RewardChannel { Augmented, Original };

double episode_score(const std::vector<RewardPair>& rewards, RewardChannel channel);

}  // namespace cage

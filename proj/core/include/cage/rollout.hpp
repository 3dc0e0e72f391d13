#pragma once

#include <cstddef>
#include <vector>

namespace cage {

// Trajectory storage consumed by the PPO (and ICM) updates. Records are
// appended in temporal order and the buffer is cleared after each update.
struct RolloutBuffer {
  struct Record {
    std::vector<double> observation;
    std::vector<double> next_observation;
    int action = 0;
    double log_prob = 0.0;
    double reward = 0.0;  // learning channel: augmented or ICM-combined
    double value = 0.0;
    bool terminal = false;
  };

  std::vector<Record> records;

  void add(Record r) { records.push_back(std::move(r)); }
  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  void clear() { records.clear(); }
};

struct AdvantageResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Bootstrapped generalized advantage estimate over the buffer, per episode
// segment. With lambda = 1 this is the discounted reward-to-go minus the
// stored value, plus the discounted bootstrap value for an unterminated
// tail (zero at a true episode end). Throws std::logic_error on an empty
// buffer.
AdvantageResult compute_advantages(const RolloutBuffer& buffer, double gamma,
                                   double lambda, double tail_bootstrap = 0.0);

}  // namespace cage

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cage/actions.hpp"
#include "cage/rng.hpp"
#include "cage/scoring.hpp"
#include "cage/topology.hpp"

namespace cage {

enum class AdversaryKind { Bline, Meander, Sleep };
const char* to_string(AdversaryKind a);
bool parse_adversary(const std::string& text, AdversaryKind& out);

enum class AccessLevel : std::uint8_t { None = 0, User = 1, Privileged = 2 };

struct HostState {
  AccessLevel access = AccessLevel::None;
  bool scanned_by_red = false;
  bool services_discovered = false;
  std::uint8_t decoys = 0;  // bitmask over DecoyKind
  bool impacted = false;    // operational server only, current step

  bool has_decoy(DecoyKind d) const {
    return decoys & (1u << static_cast<unsigned>(d));
  }
  void add_decoy(DecoyKind d) { decoys |= (1u << static_cast<unsigned>(d)); }

  bool operator==(const HostState&) const = default;
};

// Ground truth for one episode, including the defender's carried-forward
// access belief and the per-step activity scratch the observation is built
// from. Owned by exactly one episode at a time.
struct WorldState {
  std::vector<HostState> hosts;
  int foothold = -1;
  // per-subnet discovered-host bitmask (red's knowledge)
  std::array<std::uint16_t, kSubnetCount> red_knowledge{};
  int step_counter = 0;
  Rng rng;

  // defender belief over access, carried between steps
  std::vector<AccessLevel> blue_belief;
  // activity observed this step
  std::vector<std::uint8_t> scanned_this_step;
  std::vector<std::uint8_t> exploit_detected_this_step;
  bool impact_this_step = false;

  bool red_knows(Subnet s, int host) const {
    return red_knowledge[static_cast<std::size_t>(s)] & (1u << host);
  }
  void red_learn(Subnet s, int host) {
    red_knowledge[static_cast<std::size_t>(s)] |=
        static_cast<std::uint16_t>(1u << host);
  }

  bool operator==(const WorldState&) const = default;
};

// The defender's probabilistic view: 4 bits per host,
// [scanned-activity, exploited-activity, access-low, access-high] with the
// access pair encoding none=00, user=01, privileged=11 (10 never emitted).
struct Observation {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  void set_host(int host, bool scanned, bool exploited, AccessLevel belief);
  AccessLevel access_of(int host) const;
  bool scanned_bit(int host) const { return bits[4 * host] != 0; }
  bool exploited_bit(int host) const { return bits[4 * host + 1] != 0; }

  std::string to_hex() const;
  std::vector<double> to_doubles() const;

  bool operator==(const Observation&) const = default;
};

struct StepOutcome {
  Observation observation;
  RewardPair reward;
  RedAction red_action_taken;
  BlueAction blue_action_taken;
  bool done = false;
};

struct EngineConfig {
  double p_exploit = 0.9;   // success probability of a non-decoy exploit
  double p_escalate = 1.0;  // success probability of privilege escalation
  double p_detect = 0.95;   // detection probability of exploit activity
  double p_fail_restore = 0.1;
  double p_fail_remove = 0.1;
  ShapingScheme scheme = ShapingScheme::Baseline;
};

// Collects the penalty sources for the current step after both actions have
// resolved.
StepPenalties collect_penalties(const Topology& t, const WorldState& w,
                                BlueVerb blue_verb);
// Sum of the penalty clauses (criticality per privileged host, -10 on
// impact, -1 on restore); 0.0 when none apply.
double base_reward(const Topology& t, const WorldState& w, BlueVerb blue_verb);

// Turn-based episode driver: one red action and one blue action per step,
// red resolving first, reward computed on the post-transition state.
class Engine {
 public:
  Engine(Topology topology, EngineConfig config);

  Observation reset(AdversaryKind adversary, int episode_len, std::uint64_t seed);
  StepOutcome step(const BlueAction& blue);

  bool done() const { return world_.step_counter >= episode_len_; }
  const Topology& topology() const { return topology_; }
  const EngineConfig& config() const { return config_; }
  AdversaryKind adversary() const { return adversary_; }
  int episode_len() const { return episode_len_; }

  const WorldState& world() const { return world_; }
  WorldState& world() { return world_; }

  // exposed transition pieces, also used directly by tests
  // returns false when the action rolled an independent failure
  bool apply_blue(WorldState& w, const BlueAction& a) const;
  void apply_red(WorldState& w, const RedAction& a) const;
  // updates the defender belief from this step's detections and the blue
  // action, then renders the bit vector
  Observation observe(WorldState& w, const BlueAction& blue, bool blue_applied) const;

  // true iff some red-held host (access >= User) can reach the subnet
  bool red_can_reach(const WorldState& w, Subnet target) const;

 private:
  void validate_blue(const BlueAction& a) const;
  RedAction pick_red_action(WorldState& w) const;

  Topology topology_;
  EngineConfig config_;
  AdversaryKind adversary_ = AdversaryKind::Sleep;
  int episode_len_ = 0;
  WorldState world_;
};

// Per-step record of an episode, exported by the trace writer.
struct TraceStep {
  int step = 0;
  RedAction red;
  BlueAction blue;
  RewardPair reward;
  Observation observation;
};

}  // namespace cage

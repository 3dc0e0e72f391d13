#include "cage/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "cage/adversaries.hpp"

namespace cage {

const char* to_string(AdversaryKind a) {
  switch (a) {
    case AdversaryKind::Bline: return "bline";
    case AdversaryKind::Meander: return "meander";
    case AdversaryKind::Sleep: return "sleep";
  }
  return "?";
}

bool parse_adversary(const std::string& text, AdversaryKind& out) {
  for (AdversaryKind a :
       {AdversaryKind::Bline, AdversaryKind::Meander, AdversaryKind::Sleep}) {
    if (text == to_string(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

void Observation::set_host(int host, bool scanned, bool exploited,
                           AccessLevel belief) {
  bits[4 * host + 0] = scanned ? 1 : 0;
  bits[4 * host + 1] = exploited ? 1 : 0;
  // none=00, user=01, privileged=11; 10 is never emitted
  bits[4 * host + 2] = belief == AccessLevel::Privileged ? 1 : 0;
  bits[4 * host + 3] = belief == AccessLevel::None ? 0 : 1;
}

AccessLevel Observation::access_of(int host) const {
  const bool low = bits[4 * host + 2] != 0;
  const bool high = bits[4 * host + 3] != 0;
  if (low && high) return AccessLevel::Privileged;
  if (high) return AccessLevel::User;
  return AccessLevel::None;
}

std::string Observation::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4 && i + j < bits.size(); ++j)
      if (bits[i + j]) nibble |= 1u << (3 - j);  // bit 4k is the nibble MSB
    out.push_back(digits[nibble]);
  }
  return out;
}

std::vector<double> Observation::to_doubles() const {
  std::vector<double> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 1.0 : 0.0;
  return out;
}

StepPenalties collect_penalties(const Topology& t, const WorldState& w,
                                BlueVerb blue_verb) {
  StepPenalties p;
  for (const HostSpec& h : t.hosts())
    if (w.hosts[h.id].access == AccessLevel::Privileged)
      p.privileged_criticalities.push_back(h.criticality);
  p.impacted = w.impact_this_step;
  p.restored = blue_verb == BlueVerb::Restore;
  return p;
}

double base_reward(const Topology& t, const WorldState& w, BlueVerb blue_verb) {
  return collect_penalties(t, w, blue_verb).base_sum();
}

Engine::Engine(Topology topology, EngineConfig config)
    : topology_(std::move(topology)), config_(config) {}

Observation Engine::reset(AdversaryKind adversary, int episode_len,
                          std::uint64_t seed) {
  if (episode_len <= 0) throw std::invalid_argument("episode_len must be > 0");
  adversary_ = adversary;
  episode_len_ = episode_len;

  const std::size_t n = topology_.host_count();
  world_ = WorldState{};
  world_.rng = Rng(seed);
  world_.hosts.assign(n, HostState{});
  world_.blue_belief.assign(n, AccessLevel::None);
  world_.scanned_this_step.assign(n, 0);
  world_.exploit_detected_this_step.assign(n, 0);

  // the adversary starts with user access on a random internet-facing host
  const std::vector<int>& candidates = topology_.internet_facing_hosts();
  world_.foothold = candidates[world_.rng.uniform_int(candidates.size())];
  world_.hosts[world_.foothold].access = AccessLevel::User;
  world_.red_learn(topology_.host(world_.foothold).subnet, world_.foothold);

  // the initial observation reports a clean network
  Observation obs;
  obs.bits.assign(4 * n, 0);
  return obs;
}

bool Engine::red_can_reach(const WorldState& w, Subnet target) const {
  for (const HostSpec& h : topology_.hosts())
    if (w.hosts[h.id].access != AccessLevel::None &&
        topology_.subnet_reachable(h.subnet, target))
      return true;
  return false;
}

void Engine::apply_red(WorldState& w, const RedAction& a) const {
  switch (a.verb) {
    case RedVerb::DiscoverHosts: {
      if (!red_can_reach(w, a.subnet)) return;  // wasted, not an error
      for (const HostSpec& h : topology_.hosts())
        if (h.subnet == a.subnet) w.red_learn(a.subnet, h.id);
      return;
    }
    case RedVerb::DiscoverServices: {
      const HostSpec& h = topology_.host(a.host);
      if (!red_can_reach(w, h.subnet)) return;
      w.hosts[a.host].scanned_by_red = true;
      w.hosts[a.host].services_discovered = true;
      w.scanned_this_step[a.host] = 1;
      return;
    }
    case RedVerb::Exploit: {
      const HostSpec& h = topology_.host(a.host);
      if (!red_can_reach(w, h.subnet)) return;
      HostState& hs = w.hosts[a.host];
      for (std::size_t i = 0; i < kDecoyKindCount; ++i) {
        const auto d = static_cast<DecoyKind>(i);
        if (hs.has_decoy(d) && service_of(d) == a.service) {
          // exploiting a decoy service fails and is always revealed
          w.exploit_detected_this_step[a.host] = 1;
          return;
        }
      }
      if (!h.runs_service(a.service)) return;  // no such service, wasted
      const bool success = w.rng.bernoulli(config_.p_exploit);
      const bool detected = w.rng.bernoulli(config_.p_detect);
      if (detected) w.exploit_detected_this_step[a.host] = 1;
      if (success && hs.access == AccessLevel::None)
        hs.access = AccessLevel::User;
      return;
    }
    case RedVerb::Escalate: {
      topology_.host(a.host);  // bounds check
      HostState& hs = w.hosts[a.host];
      if (hs.access != AccessLevel::User) return;
      if (w.rng.bernoulli(config_.p_escalate))
        hs.access = AccessLevel::Privileged;
      return;
    }
    case RedVerb::Impact: {
      const int op = topology_.operational_server();
      HostState& hs = w.hosts[op];
      if (hs.access != AccessLevel::Privileged) return;
      hs.impacted = true;
      w.impact_this_step = true;
      return;
    }
  }
}

void Engine::validate_blue(const BlueAction& a) const {
  if (a.verb == BlueVerb::Monitor) return;
  topology_.host(a.host);  // throws on a bad index
}

bool Engine::apply_blue(WorldState& w, const BlueAction& a) const {
  validate_blue(a);
  switch (a.verb) {
    case BlueVerb::Monitor:
    case BlueVerb::Analyse:
      // no ground-truth change; both only affect the observation
      return true;
    case BlueVerb::Remove: {
      if (!w.rng.bernoulli(1.0 - config_.p_fail_remove)) return false;
      HostState& hs = w.hosts[a.host];
      // silently ineffective once the adversary has escalated; the foothold
      // can never be cleared below user
      if (hs.access == AccessLevel::User && a.host != w.foothold)
        hs.access = AccessLevel::None;
      return true;
    }
    case BlueVerb::Restore: {
      if (!w.rng.bernoulli(1.0 - config_.p_fail_restore)) return false;
      HostState& hs = w.hosts[a.host];
      hs = HostState{};  // initial configuration: no decoys, no flags
      if (a.host == w.foothold) hs.access = AccessLevel::User;
      return true;
    }
    case BlueVerb::Decoy: {
      HostState& hs = w.hosts[a.host];
      if (topology_.host(a.host).runs_service(service_of(a.decoy)))
        return true;  // cannot mimic a service already running
      hs.add_decoy(a.decoy);  // re-placing is a no-op
      return true;
    }
  }
  return true;
}

Observation Engine::observe(WorldState& w, const BlueAction& blue,
                            bool blue_applied) const {
  const std::size_t n = topology_.host_count();
  // belief update: a detected exploit implies at least user access; Analyse
  // reports the exact level; Restore clears the belief
  for (std::size_t h = 0; h < n; ++h)
    if (w.exploit_detected_this_step[h] && w.blue_belief[h] == AccessLevel::None)
      w.blue_belief[h] = AccessLevel::User;
  if (blue_applied && blue.verb == BlueVerb::Analyse)
    w.blue_belief[blue.host] = w.hosts[blue.host].access;
  if (blue_applied && blue.verb == BlueVerb::Restore)
    w.blue_belief[blue.host] = AccessLevel::None;

  Observation obs;
  obs.bits.assign(4 * n, 0);
  for (std::size_t h = 0; h < n; ++h)
    obs.set_host(static_cast<int>(h), w.scanned_this_step[h] != 0,
                 w.exploit_detected_this_step[h] != 0, w.blue_belief[h]);
  return obs;
}

RedAction Engine::pick_red_action(WorldState& w) const {
  const RedView view = make_red_view(topology_, w);
  return red_policy(adversary_, view, w.rng);
}

StepOutcome Engine::step(const BlueAction& blue) {
  if (done()) throw std::logic_error("step() on a finished episode");
  validate_blue(blue);

  WorldState& w = world_;
  std::fill(w.scanned_this_step.begin(), w.scanned_this_step.end(), 0);
  std::fill(w.exploit_detected_this_step.begin(),
            w.exploit_detected_this_step.end(), 0);
  w.impact_this_step = false;
  for (HostState& hs : w.hosts) hs.impacted = false;

  const RedAction red = pick_red_action(w);
  apply_red(w, red);
  const bool blue_applied = apply_blue(w, blue);

  StepOutcome out;
  out.red_action_taken = red;
  out.blue_action_taken = blue;
  out.reward = make_reward_pair(collect_penalties(topology_, w, blue.verb),
                                config_.scheme);
  w.step_counter += 1;
  out.done = done();
  out.observation = observe(w, blue, blue_applied);
  return out;
}

}  // namespace cage

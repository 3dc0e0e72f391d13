#pragma once

#include <vector>

#include "cage/actions.hpp"
#include "cage/engine.hpp"
#include "cage/rng.hpp"
#include "cage/topology.hpp"

namespace cage {

// What the red agent can legitimately see: its own knowledge and the results
// of its past actions. Bline additionally reads the static topology (prior
// knowledge of the layout); Meander restricts itself to discovered hosts.
struct RedView {
  const Topology* topology = nullptr;
  const WorldState* world = nullptr;
  int foothold = -1;

  AccessLevel access(int host) const { return world->hosts[host].access; }
  bool services_discovered(int host) const {
    return world->hosts[host].services_discovered;
  }
  bool knows(int host) const {
    return world->red_knows(topology->host(host).subnet, host);
  }
  // services visible on a discovered host: the live list, decoys included
  // and indistinguishable from real services
  std::vector<ServiceKind> visible_services(int host) const;
};

RedView make_red_view(const Topology& t, const WorldState& w);

// Fixed exploit preference; red always exploits the highest-priority visible
// service, which is what makes an outranking decoy an effective trap.
int exploit_priority(ServiceKind s);
// highest-priority service visible on a discovered host
ServiceKind red_preferred_service(const RedView& v, int host);

// Always a no-op: re-scans the foothold subnet, which reveals nothing new to
// the defender and never changes the reward.
RedAction sleep_policy(const RedView& v);

// Staged kill chain using prior topology knowledge: discover services on a
// randomly chosen enterprise server, exploit and escalate it, then do the
// same to the operational server, then impact every step. On disruption the
// earliest incomplete stage is retried.
RedAction bline_policy(const RedView& v, Rng& rng);

// Frontier exploration without prior knowledge: discovers hosts in the
// current subnet, then walks each known host (in random order) through
// discover-services / exploit / escalate until the whole subnet is
// privileged before advancing; impacts once the operational server is
// privileged.
RedAction meander_policy(const RedView& v, Rng& rng);

RedAction red_policy(AdversaryKind kind, const RedView& v, Rng& rng);

}  // namespace cage

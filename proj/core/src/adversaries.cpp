#include "cage/adversaries.hpp"

#include <algorithm>
#include <stdexcept>

namespace cage {

std::vector<ServiceKind> RedView::visible_services(int host) const {
  std::vector<ServiceKind> out = topology->host(host).services;
  const HostState& hs = world->hosts[host];
  for (std::size_t i = 0; i < kDecoyKindCount; ++i) {
    const auto d = static_cast<DecoyKind>(i);
    if (hs.has_decoy(d)) out.push_back(service_of(d));
  }
  return out;
}

RedView make_red_view(const Topology& t, const WorldState& w) {
  RedView v;
  v.topology = &t;
  v.world = &w;
  v.foothold = w.foothold;
  return v;
}

int exploit_priority(ServiceKind s) {
  switch (s) {
    case ServiceKind::Femitter: return 7;
    case ServiceKind::Tomcat: return 6;
    case ServiceKind::Smss: return 5;
    case ServiceKind::Svchost: return 4;
    case ServiceKind::Sshd: return 3;
    case ServiceKind::HarakaSmtp: return 2;
    case ServiceKind::Apache: return 1;
    case ServiceKind::Default: return 0;
  }
  return -1;
}

ServiceKind red_preferred_service(const RedView& v, int host) {
  const std::vector<ServiceKind> services = v.visible_services(host);
  if (services.empty()) throw std::logic_error("host exposes no services");
  return *std::max_element(services.begin(), services.end(),
                           [](ServiceKind a, ServiceKind b) {
                             return exploit_priority(a) < exploit_priority(b);
                           });
}

RedAction sleep_policy(const RedView& v) {
  return RedAction::discover_hosts(v.topology->host(v.foothold).subnet);
}

namespace {

// the next action in a host's capture chain, or nullopt-equivalent via found
bool capture_step(const RedView& v, int host, RedAction& out) {
  if (v.access(host) == AccessLevel::Privileged) return false;
  if (!v.services_discovered(host)) {
    out = RedAction::discover_services(host);
  } else if (v.access(host) == AccessLevel::None) {
    out = RedAction::exploit(host, red_preferred_service(v, host));
  } else {
    out = RedAction::escalate(host);
  }
  return true;
}

}  // namespace

RedAction bline_policy(const RedView& v, Rng& rng) {
  const Topology& t = *v.topology;
  const int op = t.operational_server();

  // stage 4: impact forever once the operational server is privileged
  if (v.access(op) == AccessLevel::Privileged) return RedAction::impact();

  // stage 2: continue against an enterprise server with discovered services,
  // preferring the one with the most progress
  std::vector<int> enterprise;
  for (const HostSpec& h : t.hosts())
    if (h.kind == HostKind::EnterpriseServer) enterprise.push_back(h.id);

  int target = -1;
  for (int h : enterprise) {
    if (!v.services_discovered(h) && v.access(h) == AccessLevel::None) continue;
    if (target < 0 || static_cast<int>(v.access(h)) > static_cast<int>(v.access(target)))
      target = h;
  }
  if (target < 0) {
    // stage 1: pick a server (the randomized element) and scan it
    return RedAction::discover_services(
        enterprise[rng.uniform_int(enterprise.size())]);
  }
  RedAction next;
  if (capture_step(v, target, next)) return next;

  // stage 3: the pivot host is privileged, work on the operational server
  if (capture_step(v, op, next)) return next;
  return RedAction::impact();
}

RedAction meander_policy(const RedView& v, Rng& rng) {
  const Topology& t = *v.topology;
  const int op = t.operational_server();
  if (v.access(op) == AccessLevel::Privileged) return RedAction::impact();

  static constexpr Subnet kOrder[] = {Subnet::User, Subnet::Enterprise,
                                      Subnet::Operational};
  for (Subnet subnet : kOrder) {
    std::vector<int> members;
    for (const HostSpec& h : t.hosts())
      if (h.subnet == subnet) members.push_back(h.id);

    // scan the subnet before anything else in it
    const bool all_known = std::all_of(members.begin(), members.end(),
                                       [&](int h) { return v.knows(h); });
    if (!all_known) return RedAction::discover_hosts(subnet);

    std::vector<int> pending;
    for (int h : members)
      if (v.access(h) != AccessLevel::Privileged) pending.push_back(h);
    if (pending.empty()) continue;  // subnet complete, advance

    const int target = pending[rng.uniform_int(pending.size())];
    RedAction next;
    capture_step(v, target, next);
    return next;
  }
  return RedAction::impact();
}

RedAction red_policy(AdversaryKind kind, const RedView& v, Rng& rng) {
  switch (kind) {
    case AdversaryKind::Sleep: return sleep_policy(v);
    case AdversaryKind::Bline: return bline_policy(v, rng);
    case AdversaryKind::Meander: return meander_policy(v, rng);
  }
  throw std::logic_error("unknown adversary");
}

}  // namespace cage

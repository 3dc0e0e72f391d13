#pragma once

#include <cstdint>
#include <string>

#include "cage/topology.hpp"

namespace cage {

// The seven decoy services the defender can stand up. Values align with the
// matching ServiceKind so the two enums convert trivially.
enum class DecoyKind : std::uint8_t {
  Apache = 0,
  Femitter,
  HarakaSmtp,
  Smss,
  Sshd,
  Svchost,
  Tomcat,
};
inline constexpr std::size_t kDecoyKindCount = 7;

inline ServiceKind service_of(DecoyKind d) {
  return static_cast<ServiceKind>(static_cast<std::uint8_t>(d));
}
const char* to_string(DecoyKind d);
bool parse_decoy_kind(const std::string& text, DecoyKind& out);

enum class BlueVerb : std::uint8_t { Monitor, Analyse, Remove, Restore, Decoy };
inline constexpr std::size_t kBlueVerbCount = 5;
const char* to_string(BlueVerb v);

struct BlueAction {
  BlueVerb verb = BlueVerb::Monitor;
  int host = -1;                       // unused for Monitor
  DecoyKind decoy = DecoyKind::Apache; // used only for Decoy

  static BlueAction monitor() { return {}; }
  static BlueAction analyse(int host) { return {BlueVerb::Analyse, host, DecoyKind::Apache}; }
  static BlueAction remove(int host) { return {BlueVerb::Remove, host, DecoyKind::Apache}; }
  static BlueAction restore(int host) { return {BlueVerb::Restore, host, DecoyKind::Apache}; }
  static BlueAction place_decoy(int host, DecoyKind kind) {
    return {BlueVerb::Decoy, host, kind};
  }

  bool operator==(const BlueAction& o) const {
    if (verb != o.verb) return false;
    if (verb == BlueVerb::Monitor) return true;
    if (host != o.host) return false;
    return verb != BlueVerb::Decoy || decoy == o.decoy;
  }
};

std::string to_string(const BlueAction& a, const Topology& t);

enum class RedVerb : std::uint8_t {
  DiscoverHosts,    // scan a subnet for hosts
  DiscoverServices, // scan a known host for services
  Exploit,          // exploit a named service on a host
  Escalate,         // escalate user access to privileged
  Impact,           // disrupt the operational server
};

struct RedAction {
  RedVerb verb = RedVerb::Impact;
  Subnet subnet = Subnet::User;        // DiscoverHosts only
  int host = -1;                       // host-targeted verbs
  ServiceKind service = ServiceKind::Default; // Exploit only

  static RedAction discover_hosts(Subnet s) {
    RedAction a;
    a.verb = RedVerb::DiscoverHosts;
    a.subnet = s;
    return a;
  }
  static RedAction discover_services(int host) {
    RedAction a;
    a.verb = RedVerb::DiscoverServices;
    a.host = host;
    return a;
  }
  static RedAction exploit(int host, ServiceKind svc) {
    RedAction a;
    a.verb = RedVerb::Exploit;
    a.host = host;
    a.service = svc;
    return a;
  }
  static RedAction escalate(int host) {
    RedAction a;
    a.verb = RedVerb::Escalate;
    a.host = host;
    return a;
  }
  static RedAction impact() { return RedAction{}; }

  bool operator==(const RedAction& o) const {
    if (verb != o.verb) return false;
    switch (verb) {
      case RedVerb::DiscoverHosts: return subnet == o.subnet;
      case RedVerb::DiscoverServices:
      case RedVerb::Escalate: return host == o.host;
      case RedVerb::Exploit: return host == o.host && service == o.service;
      case RedVerb::Impact: return true;
    }
    return false;
  }
};

std::string to_string(const RedAction& a, const Topology& t);

}  // namespace cage

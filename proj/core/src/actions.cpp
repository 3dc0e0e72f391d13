#include "cage/actions.hpp"

namespace cage {

const char* to_string(DecoyKind d) { return to_string(service_of(d)); }

bool parse_decoy_kind(const std::string& text, DecoyKind& out) {
  for (std::size_t i = 0; i < kDecoyKindCount; ++i) {
    const auto d = static_cast<DecoyKind>(i);
    if (text == to_string(d)) {
      out = d;
      return true;
    }
  }
  return false;
}

const char* to_string(BlueVerb v) {
  switch (v) {
    case BlueVerb::Monitor: return "monitor";
    case BlueVerb::Analyse: return "analyse";
    case BlueVerb::Remove: return "remove";
    case BlueVerb::Restore: return "restore";
    case BlueVerb::Decoy: return "decoy";
  }
  return "?";
}

std::string to_string(const BlueAction& a, const Topology& t) {
  std::string s = to_string(a.verb);
  if (a.verb == BlueVerb::Monitor) return s;
  s += ' ';
  s += t.host(a.host).name;
  if (a.verb == BlueVerb::Decoy) {
    s += ' ';
    s += to_string(a.decoy);
  }
  return s;
}

std::string to_string(const RedAction& a, const Topology& t) {
  switch (a.verb) {
    case RedVerb::DiscoverHosts:
      return std::string("discover_hosts ") + to_string(a.subnet);
    case RedVerb::DiscoverServices:
      return "discover_services " + t.host(a.host).name;
    case RedVerb::Exploit:
      return "exploit " + t.host(a.host).name + ' ' + to_string(a.service);
    case RedVerb::Escalate:
      return "escalate " + t.host(a.host).name;
    case RedVerb::Impact:
      return "impact";
  }
  return "?";
}

}  // namespace cage

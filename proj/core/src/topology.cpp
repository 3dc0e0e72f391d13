#include "cage/topology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cage {

const char* to_string(Subnet s) {
  switch (s) {
    case Subnet::User: return "user";
    case Subnet::Enterprise: return "enterprise";
    case Subnet::Operational: return "operational";
  }
  return "?";
}

const char* to_string(HostKind k) {
  switch (k) {
    case HostKind::UserHost: return "user_host";
    case HostKind::EnterpriseServer: return "enterprise_server";
    case HostKind::Defender: return "defender";
    case HostKind::OperationalServer: return "operational_server";
    case HostKind::OperationalHost: return "operational_host";
  }
  return "?";
}

const char* to_string(ServiceKind s) {
  switch (s) {
    case ServiceKind::Apache: return "apache";
    case ServiceKind::Femitter: return "femitter";
    case ServiceKind::HarakaSmtp: return "haraka_smtp";
    case ServiceKind::Smss: return "smss";
    case ServiceKind::Sshd: return "sshd";
    case ServiceKind::Svchost: return "svchost";
    case ServiceKind::Tomcat: return "tomcat";
    case ServiceKind::Default: return "default";
  }
  return "?";
}

namespace {

template <typename E, std::size_t N>
bool parse_enum(const std::string& text, const std::array<E, N>& values, E& out) {
  for (E v : values) {
    if (text == to_string(v)) {
      out = v;
      return true;
    }
  }
  return false;
}

}  // namespace

bool parse_subnet(const std::string& text, Subnet& out) {
  static constexpr std::array<Subnet, 3> all = {Subnet::User, Subnet::Enterprise,
                                                Subnet::Operational};
  return parse_enum(text, all, out);
}

bool parse_host_kind(const std::string& text, HostKind& out) {
  static constexpr std::array<HostKind, 5> all = {
      HostKind::UserHost, HostKind::EnterpriseServer, HostKind::Defender,
      HostKind::OperationalServer, HostKind::OperationalHost};
  return parse_enum(text, all, out);
}

bool parse_service_kind(const std::string& text, ServiceKind& out) {
  static constexpr std::array<ServiceKind, kServiceKindCount> all = {
      ServiceKind::Apache, ServiceKind::Femitter, ServiceKind::HarakaSmtp,
      ServiceKind::Smss,   ServiceKind::Sshd,     ServiceKind::Svchost,
      ServiceKind::Tomcat, ServiceKind::Default};
  return parse_enum(text, all, out);
}

bool HostSpec::runs_service(ServiceKind s) const {
  return std::find(services.begin(), services.end(), s) != services.end();
}

Topology::Topology(std::vector<HostSpec> hosts) : hosts_(std::move(hosts)) {
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    const HostSpec& h = hosts_[i];
    if (h.id != static_cast<int>(i))
      throw std::invalid_argument("host ids must be dense and in order");
    if (h.criticality < -1.0 || h.criticality > -0.1)
      throw std::invalid_argument("criticality outside [-1.0, -0.1]: " + h.name);
    if (h.internet_facing && h.kind != HostKind::UserHost)
      throw std::invalid_argument("only user hosts may be internet-facing: " + h.name);
    if (!h.runs_service(ServiceKind::Default))
      throw std::invalid_argument("every host must run the default service: " + h.name);
    if (h.kind == HostKind::OperationalServer) {
      if (op_server_ >= 0)
        throw std::invalid_argument("more than one operational server");
      op_server_ = h.id;
    }
    if (h.internet_facing) footholds_.push_back(h.id);
  }
  if (op_server_ < 0) throw std::invalid_argument("no operational server");
  if (footholds_.empty()) throw std::invalid_argument("no internet-facing host");
}

const HostSpec& Topology::host(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= hosts_.size())
    throw std::out_of_range("host index out of range");
  return hosts_[static_cast<std::size_t>(id)];
}

bool Topology::subnet_reachable(Subnet from, Subnet to) const {
  if (from == to) return true;
  // user <-> enterprise and enterprise <-> operational; the user/operational
  // pair is blocked in both directions
  const auto a = static_cast<int>(from);
  const auto b = static_cast<int>(to);
  return std::abs(a - b) == 1;
}

bool Topology::operator==(const Topology& other) const {
  if (hosts_.size() != other.hosts_.size()) return false;
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    const HostSpec& x = hosts_[i];
    const HostSpec& y = other.hosts_[i];
    if (x.id != y.id || x.name != y.name || x.subnet != y.subnet ||
        x.kind != y.kind || x.criticality != y.criticality ||
        x.services != y.services || x.internet_facing != y.internet_facing)
      return false;
  }
  return true;
}

bool reachable(const Topology& t, int from_host, Subnet to_subnet) {
  return t.subnet_reachable(t.host(from_host).subnet, to_subnet);
}

namespace {

HostSpec make_host(int id, std::string name, Subnet subnet, HostKind kind,
                   double criticality, std::vector<ServiceKind> services,
                   bool internet_facing) {
  HostSpec h;
  h.id = id;
  h.name = std::move(name);
  h.subnet = subnet;
  h.kind = kind;
  h.criticality = criticality;
  h.services = std::move(services);
  h.internet_facing = internet_facing;
  return h;
}

}  // namespace

Topology build_cage2_topology() {
  using S = ServiceKind;
  std::vector<HostSpec> hosts;
  hosts.reserve(13);
  // subnet 1: five internet-facing user hosts
  hosts.push_back(make_host(0, "User0", Subnet::User, HostKind::UserHost, -0.1,
                            {S::Default, S::Femitter, S::Smss}, true));
  hosts.push_back(make_host(1, "User1", Subnet::User, HostKind::UserHost, -0.1,
                            {S::Default, S::Svchost, S::Smss}, true));
  hosts.push_back(make_host(2, "User2", Subnet::User, HostKind::UserHost, -0.1,
                            {S::Default, S::Femitter, S::Svchost}, true));
  hosts.push_back(make_host(3, "User3", Subnet::User, HostKind::UserHost, -0.1,
                            {S::Default, S::Sshd, S::Apache}, true));
  hosts.push_back(make_host(4, "User4", Subnet::User, HostKind::UserHost, -0.1,
                            {S::Default, S::Sshd, S::HarakaSmtp}, true));
  // subnet 2: three enterprise servers plus the defender console
  hosts.push_back(make_host(5, "Enterprise0", Subnet::Enterprise,
                            HostKind::EnterpriseServer, -1.0,
                            {S::Default, S::Sshd}, false));
  hosts.push_back(make_host(6, "Enterprise1", Subnet::Enterprise,
                            HostKind::EnterpriseServer, -1.0,
                            {S::Default, S::Sshd, S::Tomcat}, false));
  hosts.push_back(make_host(7, "Enterprise2", Subnet::Enterprise,
                            HostKind::EnterpriseServer, -1.0,
                            {S::Default, S::Apache, S::Tomcat}, false));
  hosts.push_back(make_host(8, "Defender", Subnet::Enterprise, HostKind::Defender,
                            -0.1, {S::Default, S::Sshd}, false));
  // subnet 3: the operational server and three operational hosts
  hosts.push_back(make_host(9, "Op_Server0", Subnet::Operational,
                            HostKind::OperationalServer, -1.0,
                            {S::Default, S::Apache, S::HarakaSmtp}, false));
  hosts.push_back(make_host(10, "Op_Host0", Subnet::Operational,
                            HostKind::OperationalHost, -0.1,
                            {S::Default, S::Sshd}, false));
  hosts.push_back(make_host(11, "Op_Host1", Subnet::Operational,
                            HostKind::OperationalHost, -0.1,
                            {S::Default, S::Smss, S::Svchost}, false));
  hosts.push_back(make_host(12, "Op_Host2", Subnet::Operational,
                            HostKind::OperationalHost, -0.1,
                            {S::Default, S::Sshd, S::Svchost}, false));
  return Topology(std::move(hosts));
}

void write_topology(std::ostream& os, const Topology& t) {
  os << "topology v1\n";
  os << "# host <id> <name> <subnet> <kind> <criticality> <service,...>\n";
  for (const HostSpec& h : t.hosts()) {
    os << "host " << h.id << ' ' << h.name << ' ' << to_string(h.subnet) << ' '
       << to_string(h.kind) << ' ' << h.criticality << ' ';
    for (std::size_t i = 0; i < h.services.size(); ++i) {
      if (i) os << ',';
      os << to_string(h.services[i]);
    }
    os << '\n';
  }
}

Topology read_topology(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "topology v1")
    throw std::invalid_argument("missing 'topology v1' header");
  std::vector<HostSpec> hosts;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "host")
      throw std::invalid_argument("unexpected record: " + line);
    HostSpec h;
    std::string subnet, kind, services;
    ls >> h.id >> h.name >> subnet >> kind >> h.criticality >> services;
    if (!ls) throw std::invalid_argument("malformed host record: " + line);
    if (!parse_subnet(subnet, h.subnet))
      throw std::invalid_argument("unknown subnet: " + subnet);
    if (!parse_host_kind(kind, h.kind))
      throw std::invalid_argument("unknown host kind: " + kind);
    std::istringstream ss(services);
    std::string item;
    while (std::getline(ss, item, ',')) {
      ServiceKind svc;
      if (!parse_service_kind(item, svc))
        throw std::invalid_argument("unknown service: " + item);
      h.services.push_back(svc);
    }
    h.internet_facing = h.kind == HostKind::UserHost;
    hosts.push_back(std::move(h));
  }
  return Topology(std::move(hosts));
}

void save_topology(const std::string& path, const Topology& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_topology(os, t);
}

Topology load_topology(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_topology(is);
}

}  // namespace cage

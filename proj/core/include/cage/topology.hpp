#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cage {

enum class Subnet : std::uint8_t { User = 0, Enterprise = 1, Operational = 2 };
inline constexpr std::size_t kSubnetCount = 3;

enum class HostKind : std::uint8_t {
  UserHost,
  EnterpriseServer,
  Defender,
  OperationalServer,
  OperationalHost,
};

// The seven decoy-able services plus the always-present default service.
enum class ServiceKind : std::uint8_t {
  Apache,
  Femitter,
  HarakaSmtp,
  Smss,
  Sshd,
  Svchost,
  Tomcat,
  Default,
};
inline constexpr std::size_t kDecoyableServiceCount = 7;
inline constexpr std::size_t kServiceKindCount = 8;

const char* to_string(Subnet s);
const char* to_string(HostKind k);
const char* to_string(ServiceKind s);
bool parse_subnet(const std::string& text, Subnet& out);
bool parse_host_kind(const std::string& text, HostKind& out);
bool parse_service_kind(const std::string& text, ServiceKind& out);

struct HostSpec {
  int id = 0;
  std::string name;
  Subnet subnet = Subnet::User;
  HostKind kind = HostKind::UserHost;
  // score units per step of adversary admin access, in [-1.0, -0.1]
  double criticality = -0.1;
  std::vector<ServiceKind> services;
  bool internet_facing = false;

  bool runs_service(ServiceKind s) const;
};

// Static description of the network: hosts plus the subnet-level firewall.
// Immutable after construction and freely shareable.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<HostSpec> hosts);

  const std::vector<HostSpec>& hosts() const { return hosts_; }
  const HostSpec& host(int id) const;
  std::size_t host_count() const { return hosts_.size(); }

  // indices of internet-facing hosts (foothold candidates)
  const std::vector<int>& internet_facing_hosts() const { return footholds_; }
  // index of the unique operational server
  int operational_server() const { return op_server_; }

  // true iff the firewall admits traffic between the two subnets
  bool subnet_reachable(Subnet from, Subnet to) const;

  bool operator==(const Topology& other) const;

 private:
  std::vector<HostSpec> hosts_;
  std::vector<int> footholds_;
  int op_server_ = -1;
};

// true iff the firewall admits traffic from `from_host`'s subnet to
// `to_subnet`; throws std::out_of_range on a bad host index
bool reachable(const Topology& t, int from_host, Subnet to_subnet);

// The fixed 13-host CAGE-2 scenario. Deterministic; see data table in the
// implementation for the per-host service and criticality assignment.
Topology build_cage2_topology();

// Human-readable text serialization, one record per host. The loader
// validates the structural invariants (one operational server, at least one
// internet-facing user host, every host runs the default service,
// criticalities within [-1, -0.1]) and throws std::invalid_argument on
// violations.
void write_topology(std::ostream& os, const Topology& t);
Topology read_topology(std::istream& is);
void save_topology(const std::string& path, const Topology& t);
Topology load_topology(const std::string& path);

}  // namespace cage

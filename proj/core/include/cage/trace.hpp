#pragma once

#include <iosfwd>
#include <string>

#include "cage/engine.hpp"
#include "cage/topology.hpp"

namespace cage {

// one JSON object per line: step index, both actions, the reward pair and
// the observation as a hex string (bit 4k is the MSB of nibble k)
std::string trace_line(const Topology& t, const TraceStep& step);

// Writes one record per step for replay and debugging.
class EpisodeTraceWriter {
 public:
  EpisodeTraceWriter(std::ostream& os, const Topology& topology)
      : os_(&os), topology_(&topology) {}

  void write(int step_index, const StepOutcome& outcome);

 private:
  std::ostream* os_;
  const Topology* topology_;
};

}  // namespace cage

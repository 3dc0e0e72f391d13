#include "cage/trace.hpp"

#include <json.hpp>
#include <ostream>

namespace cage {

namespace {

nlohmann::json blue_to_json(const Topology& t, const BlueAction& a) {
  nlohmann::json j;
  j["action"] = to_string(a.verb);
  if (a.verb != BlueVerb::Monitor) j["host"] = t.host(a.host).name;
  if (a.verb == BlueVerb::Decoy) j["decoy"] = to_string(a.decoy);
  return j;
}

nlohmann::json red_to_json(const Topology& t, const RedAction& a) {
  nlohmann::json j;
  switch (a.verb) {
    case RedVerb::DiscoverHosts:
      j["action"] = "discover_hosts";
      j["subnet"] = to_string(a.subnet);
      break;
    case RedVerb::DiscoverServices:
      j["action"] = "discover_services";
      j["host"] = t.host(a.host).name;
      break;
    case RedVerb::Exploit:
      j["action"] = "exploit";
      j["host"] = t.host(a.host).name;
      j["service"] = to_string(a.service);
      break;
    case RedVerb::Escalate:
      j["action"] = "escalate";
      j["host"] = t.host(a.host).name;
      break;
    case RedVerb::Impact:
      j["action"] = "impact";
      break;
  }
  return j;
}

}  // namespace

std::string trace_line(const Topology& t, const TraceStep& step) {
  nlohmann::json j;
  j["step"] = step.step;
  j["red"] = red_to_json(t, step.red);
  j["blue"] = blue_to_json(t, step.blue);
  j["reward"] = {{"augmented", step.reward.augmented},
                 {"original", step.reward.original}};
  j["obs"] = step.observation.to_hex();
  return j.dump();
}

void EpisodeTraceWriter::write(int step_index, const StepOutcome& outcome) {
  TraceStep step;
  step.step = step_index;
  step.red = outcome.red_action_taken;
  step.blue = outcome.blue_action_taken;
  step.reward = outcome.reward;
  step.observation = outcome.observation;
  (*os_) << trace_line(*topology_, step) << '\n';
}

}  // namespace cage

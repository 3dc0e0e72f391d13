// Command-line front end: training sweeps, checkpoint evaluation, score
// tables, the shaping-table audit and the gradient self-check.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cage/adversaries.hpp"
#include "cage/config.hpp"
#include "cage/harness.hpp"
#include "cage/icm.hpp"
#include "cage/stats.hpp"
#include "cage/trace.hpp"

namespace {

using namespace cage;

ShapingScheme parse_shaping_or_die(const std::string& text) {
  ShapingScheme s;
  if (!parse_shaping_scheme(text, s))
    throw CLI::ValidationError("--shaping", "unknown scheme: " + text);
  return s;
}

AdversaryKind parse_adversary_or_die(const std::string& text) {
  AdversaryKind a;
  if (!parse_adversary(text, a))
    throw CLI::ValidationError("--adversary", "unknown adversary: " + text);
  return a;
}

int cmd_train(const std::string& config_path, const std::string& preset,
              const std::string& adversary, const std::string& shaping,
              bool icm, double icm_eta, const std::vector<std::uint64_t>& seeds,
              int episodes, const std::string& out_dir,
              const std::string& topology_file) {
  ExperimentConfig cfg;
  if (!config_path.empty())
    cfg = load_config(config_path);
  else if (!preset.empty())
    cfg = preset_by_name(preset);

  if (!adversary.empty()) cfg.adversary = parse_adversary_or_die(adversary);
  if (!shaping.empty()) cfg.shaping = parse_shaping_or_die(shaping);
  if (icm) cfg.icm_enabled = true;
  if (icm_eta >= 0.0) cfg.icm.reward_scale = icm_eta;
  if (!seeds.empty()) cfg.seeds = seeds;
  if (episodes > 0) cfg.train_episodes = episodes;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!topology_file.empty()) cfg.topology_file = topology_file;

  std::printf("training %zu seed(s): adversary=%s shaping=%s icm=%s episodes=%d\n",
              cfg.seeds.size(), to_string(cfg.adversary), to_string(cfg.shaping),
              cfg.icm_enabled ? "on" : "off", cfg.train_episodes);
  const TrainResult result = train(cfg);

  int failures = 0;
  for (const SeedResult& s : result.seeds) {
    if (s.failed) {
      ++failures;
      std::printf("seed %llu FAILED: %s\n",
                  static_cast<unsigned long long>(s.seed), s.error.c_str());
      continue;
    }
    const std::size_t n = s.episode_original_scores.size();
    const std::size_t window = std::min<std::size_t>(100, n);
    std::vector<double> tail(s.episode_original_scores.end() - window,
                             s.episode_original_scores.end());
    std::printf("seed %llu done: final %zu-episode mean original score %.3f -> %s\n",
                static_cast<unsigned long long>(s.seed), window, mean(tail),
                s.checkpoint_path.c_str());
  }
  std::printf("outputs in %s\n", cfg.out_dir.c_str());
  return failures == 0 ? 0 : 1;
}

int cmd_eval(const std::string& checkpoint, const std::string& adversary,
             int length, int episodes, std::uint64_t seed,
             const std::string& name, const std::string& out,
             const std::string& topology_file, const std::string& trace_path) {
  const Topology topology = topology_file.empty() ? build_cage2_topology()
                                                  : load_topology(topology_file);
  const AdversaryKind adv = parse_adversary_or_die(adversary);

  const EvalEntry entry =
      evaluate(checkpoint, topology, EngineConfig{}, adv, length, episodes, seed);
  std::printf("%s vs %s, %d steps x %d episodes: mean %.3f sigma %.3f%s\n",
              checkpoint.c_str(), to_string(adv), length, episodes,
              entry.mean_score, entry.sigma,
              entry.insufficient_sample ? " (insufficient sample)" : "");

  if (!trace_path.empty()) {
    std::ofstream trace_os(trace_path);
    if (!trace_os) throw std::runtime_error("cannot open: " + trace_path);
    PpoDefender defender(load_actor_critic(checkpoint, topology), topology,
                         mix_seed(seed, 0x7e0));
    Engine engine(topology, EngineConfig{});
    EpisodeTraceWriter writer(trace_os, topology);
    int step = 0;
    Observation obs = engine.reset(adv, length, mix_seed(seed, 0x77ace));
    while (!engine.done()) {
      const BlueAction action = defender.controller()(obs, engine);
      const StepOutcome outcome = engine.step(action);
      writer.write(step++, outcome);
      obs = outcome.observation;
    }
    std::printf("episode trace written to %s\n", trace_path.c_str());
  }

  if (!out.empty()) {
    const std::string report_name =
        name.empty() ? std::filesystem::path(checkpoint).stem().string() : name;
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    save_eval_entry(out, report_name, entry);
    std::printf("eval entry written to %s\n", out.c_str());
  }
  return 0;
}

int cmd_report(const std::string& inputs, const std::string& out) {
  const std::vector<EvalReport> reports = load_eval_reports(inputs);
  if (reports.empty()) std::fprintf(stderr, "warning: no eval entries under %s\n",
                                    inputs.c_str());
  if (out.empty()) {
    write_report(std::cout, reports);
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open: " + out);
    write_report(os, reports);
    std::printf("score table written to %s (%zu experiment rows)\n", out.c_str(),
                reports.size());
  }
  return 0;
}

int cmd_shape_table(const std::string& shaping) {
  const ShapingScheme scheme = parse_shaping_or_die(shaping);
  std::printf("# shaping scheme: %s\n", to_string(scheme));
  std::printf("%10s %12s\n", "base", "augmented");
  for (double base : {0.0, -0.1, -1.0, -10.0})
    std::printf("%10.1f %12.2f\n", base, shape(base, scheme));
  if (scheme == ShapingScheme::SmallPositive || scheme == ShapingScheme::LargePositive)
    std::printf("# positive injection applies when the whole-step reward is 0.0\n");
  else
    std::printf("# applied clause-wise, step sum floored at %.0f\n", kStepRewardFloor);
  return 0;
}

int cmd_gradcheck(int instances, std::uint64_t seed) {
  Rng rng(seed);
  const ActionSpace space(build_cage2_topology().host_count());
  const int obs_dim = 52;
  const auto actions = static_cast<int>(space.size());
  const IcmConfig icm_cfg;

  struct Arch {
    const char* name;
    std::vector<int> dims;
    OutputActivation act;
  };
  const std::vector<Arch> archs = {
      {"actor", {obs_dim, 64, 64, actions}, OutputActivation::Softmax},
      {"critic", {obs_dim, 64, 64, 1}, OutputActivation::Linear},
      {"icm-embed", {obs_dim, icm_cfg.hidden_dim, icm_cfg.feature_dim},
       OutputActivation::Linear},
      {"icm-inverse", {2 * icm_cfg.feature_dim, icm_cfg.hidden_dim, actions},
       OutputActivation::Softmax},
      {"icm-forward", {icm_cfg.feature_dim + actions, icm_cfg.hidden_dim,
                       icm_cfg.feature_dim},
       OutputActivation::Linear},
  };

  bool all_ok = true;
  for (const Arch& arch : archs) {
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      // scaled-down instances keep the finite-difference sweep fast while
      // exercising the same head and depth
      std::vector<int> dims = arch.dims;
      for (std::size_t d = 0; d < dims.size(); ++d)
        dims[d] = 3 + static_cast<int>(rng.uniform_int(5)) +
                  (d + 1 == dims.size() && arch.act == OutputActivation::Softmax ? 2 : 0);
      DenseNet net = DenseNet::random_init(dims, arch.act, rng);
      Eigen::VectorXd x(dims.front()), probe(dims.back());
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.uniform(-1.0, 1.0);
      for (Eigen::Index k = 0; k < probe.size(); ++k) probe(k) = rng.uniform(-1.0, 1.0);
      worst = std::max(worst, gradcheck_relative_error(net, x, probe));
    }
    const bool ok = worst <= 1e-4;
    all_ok = all_ok && ok;
    std::printf("%-12s %d instances, worst relative error %.3e  [%s]\n",
                arch.name, instances, worst, ok ? "ok" : "FAIL");
  }
  return all_ok ? 0 : 1;
}

int cmd_topology(const std::string& out, const std::string& in) {
  const Topology t = in.empty() ? build_cage2_topology() : load_topology(in);
  if (out.empty()) {
    write_topology(std::cout, t);
  } else {
    save_topology(out, t);
    std::printf("topology written to %s\n", out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) try {
  CLI::App app{"CAGE-2 style network defense: environment, PPO defender, "
               "reward shaping and evaluation harness"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "train defender(s) across seeds");
  std::string config_path, preset, adversary, shaping, out_dir, topology_file;
  std::vector<std::uint64_t> seeds;
  bool icm = false;
  double icm_eta = -1.0;
  int episodes = 0;
  train_cmd->add_option("--config", config_path, "experiment config JSON");
  train_cmd->add_option("--preset", preset, "desk | full");
  train_cmd->add_option("--adversary", adversary, "bline | meander | sleep");
  train_cmd->add_option("--shaping", shaping,
                        "baseline | normalised | scaled | disproportionate | "
                        "small-positive | large-positive");
  train_cmd->add_flag("--icm", icm, "enable the intrinsic curiosity module");
  train_cmd->add_option("--icm-eta", icm_eta, "override the intrinsic reward scale");
  train_cmd->add_option("--seed-list", seeds, "seeds to train");
  train_cmd->add_option("--episodes", episodes, "override training episodes");
  train_cmd->add_option("--out", out_dir, "output directory");
  train_cmd->add_option("--topology", topology_file, "alternative topology file");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string checkpoint, eval_adversary = "bline", eval_name, eval_out, trace_path;
  std::string eval_topology;
  int length = 100, eval_episodes = 1000;
  std::uint64_t eval_seed = 1;
  eval_cmd->add_option("--checkpoint", checkpoint)->required();
  eval_cmd->add_option("--adversary", eval_adversary, "bline | meander | sleep");
  eval_cmd->add_option("--length", length, "episode length in steps");
  eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");
  eval_cmd->add_option("--name", eval_name, "experiment name for the report row");
  eval_cmd->add_option("--out", eval_out, "write the eval entry JSON here");
  eval_cmd->add_option("--topology", eval_topology, "alternative topology file");
  eval_cmd->add_option("--trace", trace_path, "write one episode trace (JSONL)");

  // report
  auto* report_cmd = app.add_subcommand("report", "aggregate eval entries");
  std::string inputs, report_out;
  report_cmd->add_option("--inputs", inputs, "directory of eval entry JSON files")
      ->required();
  report_cmd->add_option("--out", report_out, "output CSV (default stdout)");

  // shape-table
  auto* shape_cmd = app.add_subcommand("shape-table", "print a shaping table");
  std::string shape_scheme = "baseline";
  shape_cmd->add_option("--shaping", shape_scheme)->required();

  // gradcheck
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of every network architecture");
  int instances = 4;
  std::uint64_t grad_seed = 12345;
  grad_cmd->add_option("--instances", instances, "instances per architecture");
  grad_cmd->add_option("--seed", grad_seed);

  // topology
  auto* topo_cmd = app.add_subcommand("topology", "dump the scenario topology");
  std::string topo_out, topo_in;
  topo_cmd->add_option("--out", topo_out, "output file (default stdout)");
  topo_cmd->add_option("--in", topo_in, "validate and dump this topology file");

  CLI11_PARSE(app, argc, argv);

  if (*train_cmd)
    return cmd_train(config_path, preset, adversary, shaping, icm, icm_eta,
                     seeds, episodes, out_dir, topology_file);
  if (*eval_cmd)
    return cmd_eval(checkpoint, eval_adversary, length, eval_episodes, eval_seed,
                    eval_name, eval_out, eval_topology, trace_path);
  if (*report_cmd) return cmd_report(inputs, report_out);
  if (*shape_cmd) return cmd_shape_table(shape_scheme);
  if (*grad_cmd) return cmd_gradcheck(instances, grad_seed);
  if (*topo_cmd) return cmd_topology(topo_out, topo_in);
  return 0;
} catch (const std::exception& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 1;
}

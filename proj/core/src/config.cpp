#include "cage/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace cage {

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("at least one seed required");
  if (train_episodes <= 0 || episode_len <= 0 || eval_episodes <= 0)
    throw std::invalid_argument("episode counts must be positive");
  if (eval_lengths.empty())
    throw std::invalid_argument("at least one evaluation length required");
  if (ppo.minibatch_timesteps <= 0 || ppo.epochs <= 0)
    throw std::invalid_argument("PPO batch size and epochs must be positive");
  if (ppo.discount <= 0.0 || ppo.discount > 1.0)
    throw std::invalid_argument("discount must lie in (0, 1]");
  if (ppo.clip <= 0.0 || ppo.clip >= 1.0)
    throw std::invalid_argument("clip must lie in (0, 1)");
  if (curve_window <= 0) throw std::invalid_argument("curve window must be positive");
  ppo.adam().validate();
  icm.validate();
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.seeds = {0, 1, 2};
  cfg.train_episodes = 2000;
  cfg.eval_episodes = 100;
  cfg.checkpoint_every = 1000;
  cfg.ppo.minibatch_timesteps = 2000;
  cfg.out_dir = "runs/desk";
  return cfg;
}

ExperimentConfig full_preset() { return ExperimentConfig{}; }

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "full") return full_preset();
  throw std::invalid_argument("unknown preset: " + name);
}

namespace {

using nlohmann::json;

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["adversary"] = to_string(cfg.adversary);
  j["shaping"] = to_string(cfg.shaping);
  j["icm"] = cfg.icm_enabled;
  j["seeds"] = cfg.seeds;
  j["train_episodes"] = cfg.train_episodes;
  j["episode_len"] = cfg.episode_len;
  j["eval_episodes"] = cfg.eval_episodes;
  j["eval_lengths"] = cfg.eval_lengths;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["curve_window"] = cfg.curve_window;
  j["out_dir"] = cfg.out_dir;
  j["topology_file"] = cfg.topology_file;
  j["engine"] = {{"p_exploit", cfg.engine.p_exploit},
                 {"p_escalate", cfg.engine.p_escalate},
                 {"p_detect", cfg.engine.p_detect},
                 {"p_fail_restore", cfg.engine.p_fail_restore},
                 {"p_fail_remove", cfg.engine.p_fail_remove}};
  j["ppo"] = {{"learning_rate", cfg.ppo.learning_rate},
              {"epochs", cfg.ppo.epochs},
              {"minibatch_timesteps", cfg.ppo.minibatch_timesteps},
              {"discount", cfg.ppo.discount},
              {"gae_lambda", cfg.ppo.gae_lambda},
              {"betas", {cfg.ppo.beta1, cfg.ppo.beta2}},
              {"clip", cfg.ppo.clip},
              {"critic_coeff", cfg.ppo.critic_coeff},
              {"entropy_coeff", cfg.ppo.entropy_coeff},
              {"normalize_returns", cfg.ppo.normalize_returns},
              {"hidden_dims", cfg.ppo.hidden_dims}};
  j["icm_config"] = {{"learning_rate", cfg.icm.learning_rate},
                     {"beta", cfg.icm.beta},
                     {"reward_scale", cfg.icm.reward_scale},
                     {"external_factor", cfg.icm.external_factor},
                     {"internal_factor", cfg.icm.internal_factor},
                     {"feature_dim", cfg.icm.feature_dim},
                     {"hidden_dim", cfg.icm.hidden_dim}};
  return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("adversary") &&
      !parse_adversary(j.at("adversary").get<std::string>(), cfg.adversary))
    throw std::invalid_argument("unknown adversary in config");
  if (j.contains("shaping") &&
      !parse_shaping_scheme(j.at("shaping").get<std::string>(), cfg.shaping))
    throw std::invalid_argument("unknown shaping scheme in config");
  maybe(j, "icm", cfg.icm_enabled);
  maybe(j, "seeds", cfg.seeds);
  maybe(j, "train_episodes", cfg.train_episodes);
  maybe(j, "episode_len", cfg.episode_len);
  maybe(j, "eval_episodes", cfg.eval_episodes);
  maybe(j, "eval_lengths", cfg.eval_lengths);
  maybe(j, "checkpoint_every", cfg.checkpoint_every);
  maybe(j, "curve_window", cfg.curve_window);
  maybe(j, "out_dir", cfg.out_dir);
  maybe(j, "topology_file", cfg.topology_file);
  if (j.contains("engine")) {
    const json& e = j.at("engine");
    maybe(e, "p_exploit", cfg.engine.p_exploit);
    maybe(e, "p_escalate", cfg.engine.p_escalate);
    maybe(e, "p_detect", cfg.engine.p_detect);
    maybe(e, "p_fail_restore", cfg.engine.p_fail_restore);
    maybe(e, "p_fail_remove", cfg.engine.p_fail_remove);
  }
  if (j.contains("ppo")) {
    const json& p = j.at("ppo");
    maybe(p, "learning_rate", cfg.ppo.learning_rate);
    maybe(p, "epochs", cfg.ppo.epochs);
    maybe(p, "minibatch_timesteps", cfg.ppo.minibatch_timesteps);
    maybe(p, "discount", cfg.ppo.discount);
    maybe(p, "gae_lambda", cfg.ppo.gae_lambda);
    if (p.contains("betas")) {
      const auto betas = p.at("betas").get<std::vector<double>>();
      if (betas.size() != 2) throw std::invalid_argument("betas must have two entries");
      cfg.ppo.beta1 = betas[0];
      cfg.ppo.beta2 = betas[1];
    }
    maybe(p, "clip", cfg.ppo.clip);
    maybe(p, "critic_coeff", cfg.ppo.critic_coeff);
    maybe(p, "entropy_coeff", cfg.ppo.entropy_coeff);
    maybe(p, "normalize_returns", cfg.ppo.normalize_returns);
    maybe(p, "hidden_dims", cfg.ppo.hidden_dims);
  }
  if (j.contains("icm_config")) {
    const json& i = j.at("icm_config");
    maybe(i, "learning_rate", cfg.icm.learning_rate);
    maybe(i, "beta", cfg.icm.beta);
    maybe(i, "reward_scale", cfg.icm.reward_scale);
    maybe(i, "external_factor", cfg.icm.external_factor);
    maybe(i, "internal_factor", cfg.icm.internal_factor);
    maybe(i, "feature_dim", cfg.icm.feature_dim);
    maybe(i, "hidden_dim", cfg.icm.hidden_dim);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::string to_json_string(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2);
}

ExperimentConfig config_from_json_string(const std::string& text) {
  return from_json(json::parse(text));
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << to_json_string(cfg) << '\n';
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return config_from_json_string(buffer.str());
}

}  // namespace cage

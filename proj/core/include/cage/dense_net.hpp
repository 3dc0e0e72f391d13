#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cage/rng.hpp"

namespace cage {

enum class OutputActivation : std::uint8_t { Linear = 0, Softmax = 1 };

struct AdamConfig {
  double learning_rate = 0.002;
  double beta1 = 0.0;
  double beta2 = 0.990;
  double epsilon = 1e-8;

  // throws std::invalid_argument when outside 0 <= beta < 1, lr > 0
  void validate() const;
};

// Per-parameter gradients of a scalar loss, plus the gradient w.r.t. the
// network input (needed to chain losses through an upstream network).
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd input;

  void add(const Gradients& other);
  void scale(double factor);
  double max_abs() const;
};

// Cached per-layer activations from one forward pass; required by backward.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  // [0] = input, [L] = output
  bool valid() const { return !activations.empty(); }
};

// Small dense feed-forward network: affine layers with tanh on hidden
// layers and a linear or softmax output head. Holds its own Adam moment
// accumulators so a checkpoint captures optimizer state too.
class DenseNet {
 public:
  DenseNet() = default;
  // zero-initialized parameters
  DenseNet(std::vector<int> layer_dims, OutputActivation activation);
  // scaled uniform fan-in init, U[-1/sqrt(fan_in), 1/sqrt(fan_in)]
  static DenseNet random_init(std::vector<int> layer_dims,
                              OutputActivation activation, Rng& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  OutputActivation activation() const { return activation_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  std::size_t parameter_count() const;

  Eigen::MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_[layer]; }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_[layer]; }
  long opt_step_count() const { return opt_step_; }

  // columns are samples; throws std::invalid_argument on a row mismatch
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input,
                          ForwardCache* cache = nullptr) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& input) const;

  // exact reverse-mode gradients of a scalar loss given dLoss/dOutput;
  // throws std::logic_error when the cache is missing
  Gradients backward(const ForwardCache& cache,
                     const Eigen::MatrixXd& output_grad) const;

  // adaptive-moment update with bias correction; throws std::runtime_error
  // on non-finite gradients or parameters
  void adam_step(const Gradients& grads, const AdamConfig& config);

  bool parameters_finite() const;
  bool operator==(const DenseNet& other) const;

  void save(std::ostream& os) const;
  static DenseNet load(std::istream& is);

 private:
  std::vector<int> dims_;
  OutputActivation activation_ = OutputActivation::Linear;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
  // first/second moment accumulators and step count
  std::vector<Eigen::MatrixXd> m_weights_, v_weights_;
  std::vector<Eigen::VectorXd> m_biases_, v_biases_;
  long opt_step_ = 0;
};

// Central finite differences of the probe loss L = probe . forward(x)
// against the analytic backward pass. Touches only forward(), so it stays
// independent of the gradient implementation it checks. Returns
// ||g_analytic - g_fd|| / max(||g_analytic||, ||g_fd||, 1e-12).
double gradcheck_relative_error(const DenseNet& net, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& probe, double h = 1e-5);

// Versioned binary container for a set of named networks plus the seed the
// run was started from.
struct Checkpoint {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, DenseNet>> nets;

  const DenseNet* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cage

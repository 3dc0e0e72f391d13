#include "cage/dense_net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cage {

void AdamConfig::validate() const {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("learning_rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw std::invalid_argument("betas must lie in [0, 1)");
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
}

void Gradients::scale(double factor) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= factor;
    biases[l] *= factor;
  }
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    m = std::max(m, weights[l].cwiseAbs().maxCoeff());
    m = std::max(m, biases[l].cwiseAbs().maxCoeff());
  }
  return m;
}

DenseNet::DenseNet(std::vector<int> layer_dims, OutputActivation activation)
    : dims_(std::move(layer_dims)), activation_(activation) {
  if (dims_.size() < 2)
    throw std::invalid_argument("a network needs at least input and output dims");
  for (int d : dims_)
    if (d <= 0) throw std::invalid_argument("layer dims must be positive");
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(dims_[l], dims_[l - 1]));
    biases_.emplace_back(Eigen::VectorXd::Zero(dims_[l]));
    m_weights_.emplace_back(Eigen::MatrixXd::Zero(dims_[l], dims_[l - 1]));
    v_weights_.emplace_back(Eigen::MatrixXd::Zero(dims_[l], dims_[l - 1]));
    m_biases_.emplace_back(Eigen::VectorXd::Zero(dims_[l]));
    v_biases_.emplace_back(Eigen::VectorXd::Zero(dims_[l]));
  }
}

DenseNet DenseNet::random_init(std::vector<int> layer_dims,
                               OutputActivation activation, Rng& rng) {
  DenseNet net(std::move(layer_dims), activation);
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims_[l]));
    Eigen::MatrixXd& w = net.weights_[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return net;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

namespace {

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const Eigen::VectorXd shifted =
        (z.col(c).array() - z.col(c).maxCoeff()).exp();
    p.col(c) = shifted / shifted.sum();
  }
  return p;
}

}  // namespace

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& input,
                                  ForwardCache* cache) const {
  if (input.rows() != dims_.front())
    throw std::invalid_argument("input dimension mismatch");
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(weights_.size() + 1);
    cache->activations.push_back(input);
  }
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
    const bool last = l + 1 == weights_.size();
    if (!last) {
      a = z.array().tanh();
    } else if (activation_ == OutputActivation::Softmax) {
      a = softmax_columns(z);
    } else {
      a = std::move(z);
    }
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::VectorXd DenseNet::forward_one(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).col(0);
}

Gradients DenseNet::backward(const ForwardCache& cache,
                             const Eigen::MatrixXd& output_grad) const {
  if (!cache.valid() || cache.activations.size() != weights_.size() + 1)
    throw std::logic_error("backward() requires a matching forward cache");

  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());

  Eigen::MatrixXd upstream = output_grad;  // dLoss/dActivation of layer l
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Eigen::MatrixXd& out = cache.activations[l + 1];
    Eigen::MatrixXd dz;
    const bool last = l + 1 == weights_.size();
    if (!last) {
      dz = upstream.cwiseProduct((1.0 - out.array().square()).matrix());
    } else if (activation_ == OutputActivation::Softmax) {
      // dz_c = p_c (*) g_c - p_c * (p_c . g_c) per column
      dz = out.cwiseProduct(upstream);
      const Eigen::RowVectorXd col_dot = dz.colwise().sum();
      dz -= out.cwiseProduct(col_dot.replicate(out.rows(), 1));
    } else {
      dz = upstream;
    }
    g.weights[l] = dz * cache.activations[l].transpose();
    g.biases[l] = dz.rowwise().sum();
    upstream = weights_[l].transpose() * dz;
  }
  g.input = std::move(upstream);
  return g;
}

void DenseNet::adam_step(const Gradients& grads, const AdamConfig& config) {
  config.validate();
  if (grads.weights.size() != weights_.size())
    throw std::invalid_argument("gradient/parameter layer count mismatch");
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
      throw std::runtime_error("non-finite gradient in layer " + std::to_string(l));

  opt_step_ += 1;
  const double correction1 = 1.0 - std::pow(config.beta1, opt_step_);
  const double correction2 = 1.0 - std::pow(config.beta2, opt_step_);
  const auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = (config.beta2 * v.array() + (1.0 - config.beta2) * grad.array().square())
            .matrix();
    param.array() -= config.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + config.epsilon);
  };
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    update(weights_[l], m_weights_[l], v_weights_[l], grads.weights[l]);
    update(biases_[l], m_biases_[l], v_biases_[l], grads.biases[l]);
  }
  if (!parameters_finite())
    throw std::runtime_error("non-finite parameters after optimizer step");
}

bool DenseNet::parameters_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  return true;
}

bool DenseNet::operator==(const DenseNet& other) const {
  if (dims_ != other.dims_ || activation_ != other.activation_ ||
      opt_step_ != other.opt_step_)
    return false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l])
      return false;
    if (m_weights_[l] != other.m_weights_[l] || v_weights_[l] != other.v_weights_[l])
      return false;
    if (m_biases_[l] != other.m_biases_[l] || v_biases_[l] != other.v_biases_[l])
      return false;
  }
  return true;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

// row-major parameter block
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}
void read_matrix(std::istream& is, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = 0;
      is.read(reinterpret_cast<char*>(&v), sizeof v);
      m(i, j) = v;
    }
}
void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * v.size()));
}
void read_vector(std::istream& is, Eigen::VectorXd& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * v.size()));
}

}  // namespace

void DenseNet::save(std::ostream& os) const {
  write_u32(os, static_cast<std::uint32_t>(dims_.size()));
  for (int d : dims_) write_u32(os, static_cast<std::uint32_t>(d));
  write_u32(os, static_cast<std::uint32_t>(activation_));
  write_u64(os, static_cast<std::uint64_t>(opt_step_));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    write_matrix(os, weights_[l]);
    write_vector(os, biases_[l]);
    write_matrix(os, m_weights_[l]);
    write_matrix(os, v_weights_[l]);
    write_vector(os, m_biases_[l]);
    write_vector(os, v_biases_[l]);
  }
}

DenseNet DenseNet::load(std::istream& is) {
  const std::uint32_t n_dims = read_u32(is);
  if (!is || n_dims < 2 || n_dims > 64)
    throw std::runtime_error("corrupt network header");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) d = static_cast<int>(read_u32(is));
  const auto act = static_cast<OutputActivation>(read_u32(is));
  DenseNet net(dims, act);
  net.opt_step_ = static_cast<long>(read_u64(is));
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    read_matrix(is, net.weights_[l]);
    read_vector(is, net.biases_[l]);
    read_matrix(is, net.m_weights_[l]);
    read_matrix(is, net.v_weights_[l]);
    read_vector(is, net.m_biases_[l]);
    read_vector(is, net.v_biases_[l]);
  }
  if (!is) throw std::runtime_error("truncated network block");
  return net;
}

double gradcheck_relative_error(const DenseNet& net, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& probe, double h) {
  ForwardCache cache;
  net.forward(Eigen::MatrixXd(x), &cache);
  const Gradients analytic = net.backward(cache, Eigen::MatrixXd(probe));

  DenseNet probe_net = net;
  const auto loss = [&]() {
    return probe.dot(probe_net.forward_one(x));
  };

  double diff_sq = 0.0, analytic_sq = 0.0, fd_sq = 0.0;
  const auto accumulate = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = loss();
    param = saved - h;
    const double down = loss();
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    diff_sq += (grad - fd) * (grad - fd);
    analytic_sq += grad * grad;
    fd_sq += fd * fd;
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd& w = probe_net.weight(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        accumulate(w(i, j), analytic.weights[l](i, j));
    Eigen::VectorXd& b = probe_net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i)
      accumulate(b(i), analytic.biases[l](i));
  }
  const double denom =
      std::max({std::sqrt(analytic_sq), std::sqrt(fd_sq), 1e-12});
  return std::sqrt(diff_sq) / denom;
}

const DenseNet* Checkpoint::find(const std::string& name) const {
  for (const auto& [net_name, net] : nets)
    if (net_name == name) return &net;
  return nullptr;
}

namespace {
constexpr char kCheckpointMagic[8] = {'C', 'A', 'G', 'E', 'N', 'E', 'T', '1'};
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  write_u64(os, ckpt.seed);
  write_u32(os, static_cast<std::uint32_t>(ckpt.nets.size()));
  for (const auto& [name, net] : ckpt.nets) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    net.save(os);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  Checkpoint ckpt;
  ckpt.seed = read_u64(is);
  const std::uint32_t count = read_u32(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = read_u32(is);
    if (!is || len > 1024) throw std::runtime_error("corrupt checkpoint: " + path);
    std::string name(len, '\0');
    is.read(name.data(), len);
    ckpt.nets.emplace_back(std::move(name), DenseNet::load(is));
  }
  return ckpt;
}

}  // namespace cage

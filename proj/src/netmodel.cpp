#include "iscc/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace iscc {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::MP: return "mp";
    case LayerKind::FC: return "fc";
  }
  return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "conv") return LayerKind::Conv;
  if (s == "mp") return LayerKind::MP;
  if (s == "fc") return LayerKind::FC;
  throw std::invalid_argument("unknown layer kind '" + s + "'");
}

LayerSpec LayerSpec::conv(std::size_t alpha, std::size_t beta, std::size_t gamma, std::size_t psi,
                          std::size_t gamma_prev) {
  LayerSpec s;
  s.kind = LayerKind::Conv;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  s.psi = psi;
  s.gamma_prev = gamma_prev;
  return s;
}

LayerSpec LayerSpec::max_pool(std::size_t alpha, std::size_t beta, std::size_t gamma, std::size_t psi) {
  LayerSpec s;
  s.kind = LayerKind::MP;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  s.psi = psi;
  s.gamma_prev = gamma;
  return s;
}

LayerSpec LayerSpec::fully_connected(std::size_t n, std::size_t n_prev) {
  LayerSpec s;
  s.kind = LayerKind::FC;
  s.n = n;
  s.n_prev = n_prev;
  return s;
}

std::size_t LayerSpec::param_count() const {
  switch (kind) {
    case LayerKind::Conv: return gamma * gamma_prev * psi * psi;
    case LayerKind::MP: return 0;
    case LayerKind::FC: return n * n_prev;
  }
  return 0;
}

std::size_t LayerSpec::output_dim() const {
  return kind == LayerKind::FC ? n : alpha * beta * gamma;
}

Eigen::Index LayerSpec::weight_rows() const {
  return static_cast<Eigen::Index>(kind == LayerKind::FC ? n : gamma);
}

Eigen::Index LayerSpec::weight_cols() const {
  return static_cast<Eigen::Index>(kind == LayerKind::FC ? n_prev : gamma_prev * psi * psi);
}

void LayerSpec::validate() const {
  if (kind == LayerKind::FC) {
    if (n < 1 || n_prev < 1) throw std::invalid_argument("fc layer dims must be >= 1");
  } else if (alpha < 1 || beta < 1 || gamma < 1 || psi < 1 || gamma_prev < 1) {
    throw std::invalid_argument(std::string(to_string(kind)) + " layer dims must be >= 1");
  }
  if (!weights) return;
  if (kind == LayerKind::MP) throw std::invalid_argument("pooling layers carry no weights");
  if (weights->rows() != weight_rows() || weights->cols() != weight_cols()) {
    throw std::invalid_argument("weight matrix shape does not match layer dims");
  }
}

// ---------------------------------------------------------------------------

NetworkModel::NetworkModel(std::vector<LayerSpec> layers, std::size_t input_dim,
                           std::vector<std::size_t> split_candidates)
    : layers_(std::move(layers)), input_dim_(input_dim), splits_(std::move(split_candidates)) {
  if (layers_.empty()) throw std::invalid_argument("network has no layers");
  if (input_dim_ < 1) throw std::invalid_argument("input_dim must be >= 1");

  std::size_t prev_dim = input_dim_;
  std::size_t prev_channels = 0;  // 0: flat input
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& s = layers_[i];
    s.validate();
    const std::string where = "layer " + std::to_string(i + 1);
    switch (s.kind) {
      case LayerKind::FC:
        if (s.n_prev != prev_dim) throw std::invalid_argument(where + ": n_prev does not chain");
        break;
      case LayerKind::Conv:
        if (prev_channels ? prev_channels != s.gamma_prev : prev_dim % s.gamma_prev != 0) {
          throw std::invalid_argument(where + ": gamma_prev does not chain");
        }
        break;
      case LayerKind::MP:
        if (prev_channels != s.gamma) {
          throw std::invalid_argument(where + ": pooling must follow a map with the same channels");
        }
        break;
    }
    prev_dim = s.output_dim();
    if (s.kind == LayerKind::FC) {
      prev_channels = 0;
    } else {
      prev_channels = s.gamma;
    }
  }

  if (splits_.empty()) {
    splits_.resize(layers_.size() + 1);
    std::iota(splits_.begin(), splits_.end(), std::size_t{0});
  }
  std::sort(splits_.begin(), splits_.end());
  splits_.erase(std::unique(splits_.begin(), splits_.end()), splits_.end());
  if (splits_.back() > layers_.size()) throw std::invalid_argument("split candidate beyond depth");
}

const LayerSpec& NetworkModel::layer(std::size_t l) const {
  if (l < 1 || l > layers_.size()) throw std::out_of_range("layer index out of range");
  return layers_[l - 1];
}

std::size_t NetworkModel::feature_dim(std::size_t l) const {
  if (l == 0) return input_dim_;
  return layer(l).output_dim();
}

bool NetworkModel::has_weights_through(std::size_t l) const {
  for (std::size_t i = 1; i <= l; ++i) {
    const auto& s = layer(i);
    if (s.weighted() && !s.weights) return false;
  }
  return true;
}

const Eigen::MatrixXd& NetworkModel::weights(std::size_t l) const {
  const auto& s = layer(l);
  if (!s.weights) throw std::invalid_argument("layer " + std::to_string(l) + " has no weights");
  return *s.weights;
}

void NetworkModel::set_weights(std::size_t l, Eigen::MatrixXd w) {
  if (l < 1 || l > layers_.size()) throw std::out_of_range("layer index out of range");
  auto& s = layers_[l - 1];
  s.weights = std::move(w);
  s.validate();
}

// ---------------------------------------------------------------------------

PrunedNetwork::PrunedNetwork(const NetworkModel& base, double rho, std::size_t split,
                             std::vector<Eigen::MatrixXd> pruned)
    : base_(&base), rho_(rho), split_(split), pruned_(std::move(pruned)) {}

const Eigen::MatrixXd& PrunedNetwork::weights(std::size_t l) const {
  if (l >= 1 && l <= split_) {
    const auto& w = pruned_[l - 1];
    if (w.size() == 0) throw std::invalid_argument("layer " + std::to_string(l) + " has no weights");
    return w;
  }
  return base_->weights(l);
}

// ---------------------------------------------------------------------------

AffineFlops flops_affine(const LayerSpec& s) {
  const double a = static_cast<double>(s.alpha), b = static_cast<double>(s.beta),
               g = static_cast<double>(s.gamma), psi = static_cast<double>(s.psi);
  switch (s.kind) {
    case LayerKind::Conv: {
      const double maps = a * b * g;
      return {2.0 * static_cast<double>(s.gamma_prev) * psi * psi * maps, -maps};
    }
    case LayerKind::MP: return {0.0, a * b * g * psi * psi};
    case LayerKind::FC: {
      const double n = static_cast<double>(s.n);
      return {2.0 * static_cast<double>(s.n_prev) * n, -n};
    }
  }
  return {};
}

FlopCount flops(const LayerSpec& layer, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  const double v = flops_affine(layer).at(rho);
  if (v <= 0.0) return {0.0, true};
  return {v, false};
}

double cum_flops(const NetworkModel& net, std::size_t l_from, std::size_t l_to, double rho) {
  if (l_from < 1 || l_from > l_to || l_to > net.depth()) {
    throw std::out_of_range("invalid layer range for cum_flops");
  }
  double total = 0.0;
  for (std::size_t l = l_from; l <= l_to; ++l) total += flops(net.layer(l), rho).value;
  return total;
}

AffineFlops edge_flops_affine(const NetworkModel& net, std::size_t split) {
  AffineFlops sum;
  for (std::size_t l = 1; l <= split; ++l) {
    const auto f = flops_affine(net.layer(l));
    sum.slope += f.slope;
    sum.intercept += f.intercept;
  }
  return sum;
}

double flops_rho_floor(const NetworkModel& net, std::size_t split) {
  double floor = 0.0;
  for (std::size_t l = 1; l <= split; ++l) {
    const auto f = flops_affine(net.layer(l));
    if (f.intercept < 0.0) floor = std::max(floor, -f.intercept / f.slope);
  }
  return floor;
}

// ---------------------------------------------------------------------------

namespace {

template <class WeightsOf>
Eigen::VectorXd matrix_chain(const NetworkModel& net, const Eigen::VectorXd& x, std::size_t l,
                             WeightsOf&& weights_of) {
  if (l > net.depth()) throw std::out_of_range("forward: layer index out of range");
  if (static_cast<std::size_t>(x.size()) != net.input_dim()) {
    throw std::invalid_argument("forward: input size does not match input_dim");
  }
  Eigen::VectorXd h = x;
  for (std::size_t i = 1; i <= l; ++i) {
    const auto& s = net.layer(i);
    if (s.kind != LayerKind::FC || !s.weights) {
      throw UnsupportedNetwork("forward: layer " + std::to_string(i) +
                               " is not a weighted fully-connected layer");
    }
    if (i > 1) h = h.cwiseMax(0.0);
    h = weights_of(i) * h;
  }
  return h;
}

}  // namespace

Eigen::VectorXd forward(const NetworkModel& net, const Eigen::VectorXd& x, std::size_t l) {
  return matrix_chain(net, x, l, [&](std::size_t i) -> const Eigen::MatrixXd& { return net.weights(i); });
}

Eigen::VectorXd forward(const PrunedNetwork& net, const Eigen::VectorXd& x, std::size_t l) {
  return matrix_chain(net.base(), x, l,
                      [&](std::size_t i) -> const Eigen::MatrixXd& { return net.weights(i); });
}

std::size_t pruned_count(std::size_t m, double rho) {
  // The (1 + 1e-12) factor absorbs the representation error of 1 - rho,
  // e.g. (1 - 0.9) * 10 = 0.9999999999999998.
  const double k = std::floor((1.0 - rho) * static_cast<double>(m) * (1.0 + 1e-12));
  return std::min(m, static_cast<std::size_t>(std::max(0.0, k)));
}

Eigen::MatrixXd prune_matrix(const Eigen::MatrixXd& w, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  const std::size_t m = static_cast<std::size_t>(w.size());
  const std::size_t k = pruned_count(m, rho);
  Eigen::MatrixXd out = w;
  if (k == 0) return out;

  // Row-major flat index so the tie-break is independent of storage order.
  const auto cols = w.cols();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto at = [&](std::size_t idx) {
    return w(static_cast<Eigen::Index>(idx) / cols, static_cast<Eigen::Index>(idx) % cols);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(at(a)) < std::abs(at(b)); });
  for (std::size_t i = 0; i < k; ++i) {
    out(static_cast<Eigen::Index>(order[i]) / cols, static_cast<Eigen::Index>(order[i]) % cols) = 0.0;
  }
  return out;
}

PrunedNetwork prune(const NetworkModel& net, double rho, std::size_t l) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  if (l > net.depth()) throw std::out_of_range("prune: layer index out of range");
  std::vector<Eigen::MatrixXd> pruned(l);
  for (std::size_t i = 1; i <= l; ++i) {
    const auto& s = net.layer(i);
    if (!s.weighted()) continue;
    pruned[i - 1] = prune_matrix(net.weights(i), rho);
  }
  return PrunedNetwork(net, rho, l, std::move(pruned));
}

// ---------------------------------------------------------------------------

double lemma2_bound(const NetworkModel& net, const PrunedNetwork& pruned, std::size_t l) {
  std::vector<double> norm_sq;
  std::vector<double> diff_sq;
  for (std::size_t i = 1; i <= l; ++i) {
    if (!net.layer(i).weighted()) continue;
    const auto& w = net.weights(i);
    norm_sq.push_back(w.squaredNorm());
    diff_sq.push_back((w - pruned.weights(i)).squaredNorm());
  }
  double bound = 0.0;
  for (std::size_t i = 0; i < diff_sq.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < norm_sq.size(); ++j) {
      if (j != i) prod *= norm_sq[j];
    }
    bound += diff_sq[i] * prod;
  }
  return bound;
}

double tail_frobenius(const NetworkModel& net, std::size_t l) {
  if (l > net.depth()) throw std::out_of_range("tail_frobenius: layer index out of range");
  double prod = 1.0;
  for (std::size_t i = l + 1; i <= net.depth(); ++i) {
    if (net.layer(i).weighted()) prod *= net.weights(i).norm();
  }
  return prod;
}

double laplace_rate(const Eigen::MatrixXd& w) {
  const double abs_sum = w.cwiseAbs().sum();
  if (!(abs_sum > 0.0)) throw std::invalid_argument("laplace_rate: all-zero layer");
  return static_cast<double>(w.size()) / abs_sum;
}

double prune_coeff(const NetworkModel& net, std::size_t l) {
  if (l > net.depth()) throw std::out_of_range("prune_coeff: layer index out of range");
  std::vector<double> norm_sq;
  std::vector<double> scale;  // M_l / lambda_l^2
  for (std::size_t i = 1; i <= l; ++i) {
    if (!net.layer(i).weighted()) continue;
    const auto& w = net.weights(i);
    const double rate = laplace_rate(w);
    norm_sq.push_back(w.squaredNorm());
    scale.push_back(static_cast<double>(w.size()) / (rate * rate));
  }
  double c = 0.0;
  for (std::size_t i = 0; i < scale.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < norm_sq.size(); ++j) {
      if (j != i) prod *= norm_sq[j];
    }
    c += scale[i] * prod;
  }
  return c;
}

// ---------------------------------------------------------------------------

double unit_norm_laplace_rate(std::size_t m) { return std::sqrt(2.0 * static_cast<double>(m)); }

void fill_laplace_weights(NetworkModel& net, std::span<const double> rates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution sign(0.5);
  std::size_t r = 0;
  for (std::size_t l = 1; l <= net.depth(); ++l) {
    const auto& s = net.layer(l);
    if (!s.weighted()) continue;
    if (r >= rates.size()) throw std::invalid_argument("fewer Laplace rates than weighted layers");
    const double rate = rates[r++];
    if (!(rate > 0.0)) throw std::invalid_argument("Laplace rate must be positive");
    std::exponential_distribution<double> mag(rate);
    Eigen::MatrixXd w(s.weight_rows(), s.weight_cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double v = mag(rng);
        w(i, j) = sign(rng) ? v : -v;
      }
    }
    net.set_weights(l, std::move(w));
  }
  if (r != rates.size()) throw std::invalid_argument("more Laplace rates than weighted layers");
}

NetworkModel make_analysis_network(std::span<const std::size_t> widths, std::span<const double> rates,
                                   std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("analysis network needs >= 2 widths");
  std::vector<LayerSpec> layers;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    layers.push_back(LayerSpec::fully_connected(widths[i], widths[i - 1]));
  }
  NetworkModel net(std::move(layers), widths[0]);
  fill_laplace_weights(net, rates, seed);
  return net;
}

NetworkModel lenet_template() {
  std::vector<LayerSpec> layers{
      LayerSpec::conv(28, 28, 6, 5, 1),
      LayerSpec::max_pool(14, 14, 6, 2),
      LayerSpec::conv(10, 10, 16, 5, 6),
      LayerSpec::max_pool(5, 5, 16, 2),
      LayerSpec::fully_connected(120, 400),
      LayerSpec::fully_connected(60, 120),
      LayerSpec::fully_connected(5, 60),
  };
  return NetworkModel(std::move(layers), 32 * 32);
}

}  // namespace iscc

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace iscc {

enum class LayerKind { Conv, MP, FC };

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

// Thrown by forward() when the requested prefix is not a pure matrix chain.
class UnsupportedNetwork : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One layer of the split network. Conv and MP use the (alpha, beta, gamma)
// output-map dims and the filter size psi; FC uses (n, n_prev). Conv
// kernels are stored flattened as gamma x (gamma_prev * psi^2).
struct LayerSpec {
  LayerKind kind = LayerKind::FC;
  std::size_t alpha = 1;
  std::size_t beta = 1;
  std::size_t gamma = 1;
  std::size_t psi = 1;
  std::size_t gamma_prev = 1;
  std::size_t n = 1;
  std::size_t n_prev = 1;
  std::optional<Eigen::MatrixXd> weights;

  static LayerSpec conv(std::size_t alpha, std::size_t beta, std::size_t gamma, std::size_t psi,
                        std::size_t gamma_prev);
  static LayerSpec max_pool(std::size_t alpha, std::size_t beta, std::size_t gamma, std::size_t psi);
  static LayerSpec fully_connected(std::size_t n, std::size_t n_prev);

  bool weighted() const { return kind != LayerKind::MP; }
  // M_l; zero for pooling layers.
  std::size_t param_count() const;
  std::size_t output_dim() const;
  Eigen::Index weight_rows() const;
  Eigen::Index weight_cols() const;

  void validate() const;
};

// Affine FLOP model a*rho + b of a layer (or a sum of layers).
struct AffineFlops {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double rho) const { return slope * rho + intercept; }
};

struct FlopCount {
  double value = 0.0;
  bool clamped = false;  // formula went nonpositive and was clamped to zero
};

class NetworkModel {
 public:
  NetworkModel() = default;
  // Layers are 1-based in every accessor below. split_candidates may include
  // 0 (raw upload) and L (fully on-device); empty means {0, ..., L}.
  NetworkModel(std::vector<LayerSpec> layers, std::size_t input_dim,
               std::vector<std::size_t> split_candidates = {});

  std::size_t depth() const { return layers_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  const LayerSpec& layer(std::size_t l) const;
  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<std::size_t>& split_candidates() const { return splits_; }

  std::size_t feature_dim(std::size_t l) const;
  // True when every weighted layer in 1..l carries a weight matrix.
  bool has_weights_through(std::size_t l) const;
  const Eigen::MatrixXd& weights(std::size_t l) const;

  void set_weights(std::size_t l, Eigen::MatrixXd w);

 private:
  std::vector<LayerSpec> layers_;
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> splits_;
};

// Magnitude-pruned prefix 1..split of a base network. The base must outlive
// this object.
class PrunedNetwork {
 public:
  PrunedNetwork(const NetworkModel& base, double rho, std::size_t split,
                std::vector<Eigen::MatrixXd> pruned);

  const NetworkModel& base() const { return *base_; }
  double rho() const { return rho_; }
  std::size_t split() const { return split_; }
  // Pruned weights for l <= split, base weights beyond it.
  const Eigen::MatrixXd& weights(std::size_t l) const;

 private:
  const NetworkModel* base_;
  double rho_;
  std::size_t split_;
  std::vector<Eigen::MatrixXd> pruned_;  // index l-1; empty for MP
};

FlopCount flops(const LayerSpec& layer, double rho);
AffineFlops flops_affine(const LayerSpec& layer);
double cum_flops(const NetworkModel& net, std::size_t l_from, std::size_t l_to, double rho);
// Affine model of sum_{l=1}^{split} flops(l, rho), ignoring clamping.
AffineFlops edge_flops_affine(const NetworkModel& net, std::size_t split);
// Smallest rho at which no layer in 1..split needs clamping.
double flops_rho_floor(const NetworkModel& net, std::size_t split);

Eigen::VectorXd forward(const NetworkModel& net, const Eigen::VectorXd& x, std::size_t l);
Eigen::VectorXd forward(const PrunedNetwork& net, const Eigen::VectorXd& x, std::size_t l);

// Zeroes the floor((1 - rho) * size) smallest-magnitude entries; ties go to
// the lower flat (row-major) index first.
Eigen::MatrixXd prune_matrix(const Eigen::MatrixXd& w, double rho);
std::size_t pruned_count(std::size_t m, double rho);
PrunedNetwork prune(const NetworkModel& net, double rho, std::size_t l);

double lemma2_bound(const NetworkModel& net, const PrunedNetwork& pruned, std::size_t l);
// Product of ||W_i||_F over i = l+1..L; pooling layers count as 1.
double tail_frobenius(const NetworkModel& net, std::size_t l);
// Maximum-likelihood rate of the exponential model for |w|.
double laplace_rate(const Eigen::MatrixXd& w);
double prune_coeff(const NetworkModel& net, std::size_t l);

// Fills every weighted layer with zero-mean Laplacian draws. rates has one
// entry per weighted layer, in layer order.
void fill_laplace_weights(NetworkModel& net, std::span<const double> rates, std::uint64_t seed);
// Rate giving E||W||_F^2 == 1 for a layer with m parameters.
double unit_norm_laplace_rate(std::size_t m);

// FC-only network with Laplacian weights; widths = {input, h1, ..., out}.
NetworkModel make_analysis_network(std::span<const std::size_t> widths, std::span<const double> rates,
                                   std::uint64_t seed);
// Two 5x5 conv + pool stages followed by 120-60-5 FC on a 32x32 input.
NetworkModel lenet_template();

}  // namespace iscc

#pragma once

#include "gqrs/common.hpp"

#include "json.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gqrs::nn {

enum class Activation { ReLU, Sigmoid, Tanh, Softplus, Linear, Selu };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Scaled normal divides N(0,1) draws by sqrt(fan_in); RawNormal keeps them as drawn.
enum class InitScheme { ScaledNormal, RawNormal };

std::string_view to_string(InitScheme s);
InitScheme parse_init_scheme(std::string_view name);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::Linear;
};

/// Feed-forward network: a_l = act_l(W_l a_{l-1} + b_l).
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::vector<std::size_t> layer_dims() const;
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const DenseLayer& layer(std::size_t l) const { return layers_.at(l); }
  DenseLayer& layer(std::size_t l) { return layers_.at(l); }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  bool all_finite() const;
  bool operator==(const Mlp& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

/// layer_dims = (N_0, ..., N_{L+1}); one activation per non-input layer.
Mlp mlp_init(std::span<const std::size_t> layer_dims, std::span<const Activation> activations, std::uint64_t seed,
             InitScheme scheme = InitScheme::ScaledNormal);

/// Per-layer values kept by a forward pass, stored column-per-sample.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // z_l, l = 1..L+1
  std::vector<Eigen::MatrixXd> post;  // a_l, l = 0..L+1 (post[0] is the input)
  bool empty() const { return post.empty(); }
  std::size_t batch_size() const { return post.empty() ? 0 : static_cast<std::size_t>(post.front().cols()); }
};

/// x is batch x N_0 (one sample per row); returns batch x N_{L+1}.
Matrix mlp_forward(const Mlp& m, const Matrix& x, ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Gradients zeros_like(const Mlp& m);
  bool all_finite() const;
};

/// Backpropagation. upstream is batch x N_{L+1} holding d loss_i / d output_i
/// for each sample; the parameter gradients are those of the batch mean
/// (1/B) sum_i loss_i. If input_grad is given it receives d loss_i / d x_i
/// (batch x N_0, not averaged). With want_params = false only the input
/// gradient is produced.
Gradients mlp_backward(const Mlp& m, const ForwardCache& cache, const Matrix& upstream, Matrix* input_grad = nullptr,
                       bool want_params = true);

enum class Direction { Ascend, Descend };

struct RmsPropState {
  std::vector<Eigen::MatrixXd> weight_cache;
  std::vector<Eigen::VectorXd> bias_cache;
  double decay = 0.9;
  double learning_rate = 5e-4;
  double epsilon = 1e-8;

  static RmsPropState for_model(const Mlp& m, double learning_rate, double decay = 0.9, double epsilon = 1e-8);
};

/// cache <- rho*cache + (1-rho) g^2; param <- param +/- lr * g / (sqrt(cache) + eps).
/// Throws ErrorKind::NonFinite (leaving model and state untouched) on non-finite gradients.
void rmsprop_step(Mlp& m, const Gradients& grads, RmsPropState& state, Direction direction);

inline constexpr std::string_view kMlpFormat = "gqrs-mlp";
inline constexpr int kMlpFormatVersion = 1;

nlohmann::json mlp_to_json(const Mlp& m);
Mlp mlp_from_json(const nlohmann::json& j);

std::string mlp_serialize(const Mlp& m);
Mlp mlp_deserialize(std::string_view text);

}  // namespace gqrs::nn

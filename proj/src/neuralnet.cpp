#include "gqrs/neuralnet.hpp"
#include "gqrs/rng.hpp"

#include <cmath>
#include <string>

namespace gqrs::nn {

namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Tanh: return std::tanh(z);
    case Activation::Softplus: return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    case Activation::Linear: return z;
    case Activation::Selu: return z > 0.0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * std::expm1(z);
  }
  return z;
}

// Derivative expressed through the pre-activation z and the output a.
double derivative(Activation act, double z, double a) {
  switch (act) {
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return a * (1.0 - a);
    case Activation::Tanh: return 1.0 - a * a;
    case Activation::Softplus: return sigmoid(z);
    case Activation::Linear: return 1.0;
    case Activation::Selu: return z > 0.0 ? kSeluLambda : a + kSeluLambda * kSeluAlpha;
  }
  return 1.0;
}

void apply_activation(Activation act, const Eigen::MatrixXd& z, Eigen::MatrixXd& a) {
  if (act == Activation::Linear) {
    a = z;
    return;
  }
  if (act == Activation::ReLU) {
    a = z.cwiseMax(0.0);
    return;
  }
  a = z.unaryExpr([act](double v) { return activate(act, v); });
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
    case Activation::Linear: return "linear";
    case Activation::Selu: return "selu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::ReLU, Activation::Sigmoid, Activation::Tanh, Activation::Softplus, Activation::Linear,
                 Activation::Selu})
    if (to_string(a) == name) return a;
  throw Error(ErrorKind::Format, "unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(InitScheme s) { return s == InitScheme::RawNormal ? "raw-normal" : "scaled-normal"; }

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "raw-normal") return InitScheme::RawNormal;
  if (name == "scaled-normal") return InitScheme::ScaledNormal;
  throw Error(ErrorKind::InvalidArgument, "unknown init scheme '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  require(!layers_.empty(), ErrorKind::InvalidArgument, "Mlp: at least one layer required");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    require(layer.weights.rows() == layer.bias.size() && layer.weights.rows() > 0 && layer.weights.cols() > 0,
            ErrorKind::DimensionMismatch, "Mlp: layer " + std::to_string(l) + " has inconsistent shapes");
    if (l > 0)
      require(layer.weights.cols() == layers_[l - 1].weights.rows(), ErrorKind::DimensionMismatch,
              "Mlp: layer " + std::to_string(l) + " input width does not match previous output");
  }
}

std::size_t Mlp::input_dim() const { return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.cols()); }
std::size_t Mlp::output_dim() const { return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weights.rows()); }

std::vector<std::size_t> Mlp::layer_dims() const {
  std::vector<std::size_t> dims;
  if (layers_.empty()) return dims;
  dims.push_back(input_dim());
  for (const auto& l : layers_) dims.push_back(static_cast<std::size_t>(l.weights.rows()));
  return dims;
}

std::size_t Mlp::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return total;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

bool Mlp::operator==(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &a = layers_[l], &b = other.layers_[l];
    if (a.activation != b.activation || a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols() ||
        a.weights != b.weights || a.bias != b.bias)
      return false;
  }
  return true;
}

Mlp mlp_init(std::span<const std::size_t> layer_dims, std::span<const Activation> activations, std::uint64_t seed,
             InitScheme scheme) {
  require(layer_dims.size() >= 2, ErrorKind::InvalidArgument, "mlp_init: need input and output widths");
  require(activations.size() == layer_dims.size() - 1, ErrorKind::InvalidArgument,
          "mlp_init: one activation per layer required");
  CounterRng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 1; l < layer_dims.size(); ++l) {
    const auto out = static_cast<Eigen::Index>(layer_dims[l]);
    const auto in = static_cast<Eigen::Index>(layer_dims[l - 1]);
    require(out > 0 && in > 0, ErrorKind::InvalidArgument, "mlp_init: layer widths must be positive");
    const double scale = scheme == InitScheme::ScaledNormal ? 1.0 / std::sqrt(static_cast<double>(in)) : 1.0;
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out), activations[l - 1]};
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = scale * rng.normal();
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = scale * rng.normal();
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

Matrix mlp_forward(const Mlp& m, const Matrix& x, ForwardCache* cache) {
  require(m.depth() > 0, ErrorKind::InvalidArgument, "mlp_forward: empty network");
  require(static_cast<std::size_t>(x.cols()) == m.input_dim(), ErrorKind::DimensionMismatch,
          "mlp_forward: input width " + std::to_string(x.cols()) + " != " + std::to_string(m.input_dim()));
  Eigen::MatrixXd a = x.transpose();
  if (cache) {
    cache->pre.clear();
    cache->post.clear();
    cache->post.push_back(a);
  }
  Eigen::MatrixXd z;
  for (const auto& layer : m.layers()) {
    // One matrix-vector product per sample keeps each output independent of the batch.
    z.resize(layer.weights.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) z.col(j).noalias() = layer.weights * a.col(j) + layer.bias;
    apply_activation(layer.activation, z, a);
    if (cache) {
      cache->pre.push_back(z);
      cache->post.push_back(a);
    }
  }
  return a.transpose();
}

Gradients Gradients::zeros_like(const Mlp& m) {
  Gradients g;
  for (const auto& l : m.layers()) {
    g.weights.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return g;
}

bool Gradients::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Gradients mlp_backward(const Mlp& m, const ForwardCache& cache, const Matrix& upstream, Matrix* input_grad,
                       bool want_params) {
  require(!cache.empty() && cache.pre.size() == m.depth() && cache.post.size() == m.depth() + 1,
          ErrorKind::InvalidArgument, "mlp_backward: missing or mismatched forward cache");
  const auto batch = static_cast<Eigen::Index>(cache.batch_size());
  require(upstream.rows() == batch && static_cast<std::size_t>(upstream.cols()) == m.output_dim(),
          ErrorKind::DimensionMismatch, "mlp_backward: upstream gradient shape mismatch");

  Gradients grads;
  if (want_params) {
    grads.weights.resize(m.depth());
    grads.biases.resize(m.depth());
  }
  const double inv_batch = batch > 0 ? 1.0 / static_cast<double>(batch) : 0.0;

  Eigen::MatrixXd delta = upstream.transpose();
  for (std::size_t l = m.depth(); l-- > 0;) {
    const auto& layer = m.layer(l);
    const auto& z = cache.pre[l];
    const auto& a = cache.post[l + 1];
    if (layer.activation == Activation::ReLU) {
      delta = (z.array() > 0.0).select(delta, 0.0);
    } else if (layer.activation != Activation::Linear) {
      const Activation act = layer.activation;
      delta = delta.binaryExpr(z.binaryExpr(a, [act](double zv, double av) { return derivative(act, zv, av); }),
                               std::multiplies<double>());
    }
    if (want_params) {
      grads.weights[l].noalias() = delta * cache.post[l].transpose() * inv_batch;
      grads.biases[l] = delta.rowwise().sum() * inv_batch;
    }
    if (l > 0 || input_grad) {
      Eigen::MatrixXd next;
      next.noalias() = layer.weights.transpose() * delta;
      delta.swap(next);
    }
  }
  if (input_grad) *input_grad = delta.transpose();
  return grads;
}

RmsPropState RmsPropState::for_model(const Mlp& m, double learning_rate, double decay, double epsilon) {
  require(learning_rate > 0.0 && decay > 0.0 && decay < 1.0 && epsilon > 0.0, ErrorKind::InvalidArgument,
          "RMSProp: need lr > 0, decay in (0,1), epsilon > 0");
  RmsPropState s;
  s.decay = decay;
  s.learning_rate = learning_rate;
  s.epsilon = epsilon;
  for (const auto& l : m.layers()) {
    s.weight_cache.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    s.bias_cache.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return s;
}

namespace {

template <typename Param, typename Grad, typename Cache>
void rmsprop_update(Param& p, const Grad& g, Cache& cache, const RmsPropState& s, double sign) {
  cache = s.decay * cache + (1.0 - s.decay) * g.cwiseProduct(g);
  p.array() += sign * s.learning_rate * g.array() / (cache.array().sqrt() + s.epsilon);
}

}  // namespace

void rmsprop_step(Mlp& m, const Gradients& grads, RmsPropState& state, Direction direction) {
  require(grads.weights.size() == m.depth() && grads.biases.size() == m.depth() &&
              state.weight_cache.size() == m.depth() && state.bias_cache.size() == m.depth(),
          ErrorKind::DimensionMismatch, "rmsprop_step: gradient/state layer count mismatch");
  for (std::size_t l = 0; l < m.depth(); ++l) {
    const auto& layer = m.layer(l);
    require(grads.weights[l].rows() == layer.weights.rows() && grads.weights[l].cols() == layer.weights.cols() &&
                grads.biases[l].size() == layer.bias.size(),
            ErrorKind::DimensionMismatch, "rmsprop_step: gradient shape mismatch at layer " + std::to_string(l));
  }
  require(grads.all_finite(), ErrorKind::NonFinite, "rmsprop_step: non-finite gradient");
  const double sign = direction == Direction::Ascend ? 1.0 : -1.0;
  for (std::size_t l = 0; l < m.depth(); ++l) {
    auto& layer = m.layer(l);
    rmsprop_update(layer.weights, grads.weights[l], state.weight_cache[l], state, sign);
    rmsprop_update(layer.bias, grads.biases[l], state.bias_cache[l], state, sign);
  }
}

nlohmann::json mlp_to_json(const Mlp& m) {
  nlohmann::json j;
  j["format"] = kMlpFormat;
  j["version"] = kMlpFormatVersion;
  j["layer_dims"] = m.layer_dims();
  auto acts = nlohmann::json::array();
  auto layers = nlohmann::json::array();
  for (const auto& l : m.layers()) {
    acts.push_back(to_string(l.activation));
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    layers.push_back({{"weights", w}, {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  j["activations"] = acts;
  j["layers"] = layers;
  return j;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  try {
    require(j.is_object() && j.contains("version"), ErrorKind::Format, "model: missing version field");
    require(j.value("format", std::string()) == kMlpFormat, ErrorKind::Format, "model: unexpected format tag");
    const int version = j.at("version").get<int>();
    require(version == kMlpFormatVersion, ErrorKind::Format,
            "model: unsupported version " + std::to_string(version) + " (expected " +
                std::to_string(kMlpFormatVersion) + ")");
    const auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const auto acts = j.at("activations").get<std::vector<std::string>>();
    const auto& layers_json = j.at("layers");
    require(dims.size() >= 2 && acts.size() == dims.size() - 1 && layers_json.size() == acts.size(), ErrorKind::Format,
            "model: layer_dims, activations and layers disagree");
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < acts.size(); ++l) {
      const auto rows = static_cast<Eigen::Index>(dims[l + 1]), cols = static_cast<Eigen::Index>(dims[l]);
      const auto w = layers_json[l].at("weights").get<std::vector<double>>();
      const auto b = layers_json[l].at("bias").get<std::vector<double>>();
      require(w.size() == static_cast<std::size_t>(rows * cols) && b.size() == static_cast<std::size_t>(rows),
              ErrorKind::Format, "model: parameter count mismatch in layer " + std::to_string(l));
      DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows), parse_activation(acts[l])};
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      for (Eigen::Index r = 0; r < rows; ++r) layer.bias(r) = b[static_cast<std::size_t>(r)];
      layers.push_back(std::move(layer));
    }
    Mlp m(std::move(layers));
    require(m.all_finite(), ErrorKind::Format, "model: non-finite parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("model: malformed JSON: ") + e.what());
  }
}

std::string mlp_serialize(const Mlp& m) { return mlp_to_json(m).dump(); }

Mlp mlp_deserialize(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorKind::Format, "model: text is not valid JSON");
  return mlp_from_json(j);
}

}  // namespace gqrs::nn

#pragma once

#include "gqrs/common.hpp"
#include "gqrs/neuralnet.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gqrs::gan {

/// Saturating: minimize mean log(1 - D(G(z))), as in the original minimax
/// objective. NonSaturating: minimize -mean log D(G(z)).
enum class GeneratorLoss { Saturating, NonSaturating };

std::string_view to_string(GeneratorLoss loss);
GeneratorLoss parse_generator_loss(std::string_view name);

struct GanConfig {
  std::size_t k = 0;  // latent dimension; 0 means "same as d"
  std::size_t d = 0;
  std::vector<std::size_t> gen_hidden{64};
  std::vector<std::size_t> disc_hidden{256, 256};
  std::size_t batch_size = 256;
  std::size_t iterations = 5000;
  double lr_g = 5e-4;
  double lr_d = 5e-4;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  std::uint64_t seed = 0;
  GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;
  nn::InitScheme init = nn::InitScheme::ScaledNormal;

  std::size_t latent_dim() const { return k == 0 ? d : k; }
  /// Throws ErrorKind::InvalidArgument when a field is out of range.
  void validate() const;
};

struct LossRecord {
  double disc_objective;
  double gen_loss;
};

struct GanModel {
  nn::Mlp generator;      // k -> d, hidden ReLU, sigmoid output
  nn::Mlp discriminator;  // d -> 1, hidden ReLU, sigmoid output
  GanConfig config;
  std::vector<LossRecord> loss_trace;
  std::size_t saturated_steps = 0;
  std::vector<std::string> warnings;

  std::size_t latent_dim() const { return generator.input_dim(); }
  std::size_t output_dim() const { return generator.output_dim(); }
};

/// Discriminator outputs are clamped to [kSaturationClamp, 1 - kSaturationClamp].
inline constexpr double kSaturationClamp = 1e-7;

struct GanLossValue {
  double disc_objective;  // mean log D(u) + mean log(1 - D(G(z)))
  double gen_loss;
  std::size_t clamped;    // number of outputs that hit the clamp
};

GanLossValue gan_loss(std::span<const double> disc_out_real, std::span<const double> disc_out_fake,
                      GeneratorLoss generator_loss = GeneratorLoss::Saturating);

/// Freshly initialized generator/discriminator pair (what training starts from).
GanModel gan_initialize(const GanConfig& config);

/// Alternating RMSProp training: one discriminator ascent step on a data and
/// a latent minibatch, then one generator descent step on a fresh latent
/// minibatch, for config.iterations iterations. Data minibatches are drawn
/// from shuffled epochs without replacement.
GanModel gan_train(const Matrix& pseudo, const GanConfig& config);

/// Generator push-forward of latent rows z (batch x k).
Matrix gan_generate(const GanModel& model, const Matrix& z);

inline constexpr std::string_view kGanFormat = "gqrs-gan";
inline constexpr int kGanFormatVersion = 1;

nlohmann::json gan_config_to_json(const GanConfig& c);
GanConfig gan_config_from_json(const nlohmann::json& j);

std::string gan_serialize(const GanModel& model);
GanModel gan_deserialize(std::string_view text);

}  // namespace gqrs::gan

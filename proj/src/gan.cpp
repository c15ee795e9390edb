#include "gqrs/gan.hpp"
#include "gqrs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gqrs::gan {

namespace {

enum Stream : std::uint64_t { kGeneratorInit = 1, kDiscriminatorInit = 2, kLatent = 3, kData = 4 };

std::vector<std::size_t> dims_of(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

std::vector<nn::Activation> hidden_relu_sigmoid_out(std::size_t layers) {
  std::vector<nn::Activation> acts(layers, nn::Activation::ReLU);
  acts.back() = nn::Activation::Sigmoid;
  return acts;
}

double clamp_disc(double v, std::size_t& clamped) {
  if (v < kSaturationClamp) {
    ++clamped;
    return kSaturationClamp;
  }
  if (v > 1.0 - kSaturationClamp) {
    ++clamped;
    return 1.0 - kSaturationClamp;
  }
  return v;
}

Matrix latent_batch(CounterRng& rng, std::size_t rows, std::size_t k) {
  Matrix z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  return z;
}

// Shuffled epochs without replacement; a trailing partial batch is dropped.
class EpochSampler {
 public:
  EpochSampler(std::size_t n, std::uint64_t seed) : rng_(seed), n_(n) { reshuffle(); }

  Matrix next(const Matrix& data, std::size_t batch) {
    if (pos_ + batch > n_) reshuffle();
    Matrix out(static_cast<Eigen::Index>(batch), data.cols());
    for (std::size_t i = 0; i < batch; ++i) out.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(order_[pos_ + i]));
    pos_ += batch;
    return out;
  }

 private:
  void reshuffle() {
    order_ = rng_.permutation(n_);
    pos_ = 0;
  }

  CounterRng rng_;
  std::size_t n_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> order_;
};

}  // namespace

std::string_view to_string(GeneratorLoss loss) {
  return loss == GeneratorLoss::Saturating ? "saturating" : "non-saturating";
}

GeneratorLoss parse_generator_loss(std::string_view name) {
  if (name == "saturating") return GeneratorLoss::Saturating;
  if (name == "non-saturating" || name == "nonsaturating") return GeneratorLoss::NonSaturating;
  throw Error(ErrorKind::InvalidArgument, "unknown generator loss '" + std::string(name) + "'");
}

void GanConfig::validate() const {
  require(d >= 1, ErrorKind::InvalidArgument, "GanConfig: d must be positive");
  require(latent_dim() >= 1 && latent_dim() <= d, ErrorKind::InvalidArgument, "GanConfig: need 1 <= k <= d");
  require(batch_size >= 1, ErrorKind::InvalidArgument, "GanConfig: batch size must be positive");
  for (auto w : gen_hidden) require(w >= 1, ErrorKind::InvalidArgument, "GanConfig: generator widths must be >= 1");
  for (auto w : disc_hidden) require(w >= 1, ErrorKind::InvalidArgument, "GanConfig: discriminator widths must be >= 1");
  require(lr_g > 0.0 && lr_d > 0.0, ErrorKind::InvalidArgument, "GanConfig: learning rates must be positive");
  require(rmsprop_decay > 0.0 && rmsprop_decay < 1.0 && rmsprop_epsilon > 0.0, ErrorKind::InvalidArgument,
          "GanConfig: RMSProp decay must lie in (0,1) and epsilon be positive");
}

GanLossValue gan_loss(std::span<const double> disc_out_real, std::span<const double> disc_out_fake,
                      GeneratorLoss generator_loss) {
  require(!disc_out_real.empty() && !disc_out_fake.empty(), ErrorKind::InvalidArgument, "gan_loss: empty batch");
  GanLossValue v{0.0, 0.0, 0};
  double real_term = 0.0, fake_term = 0.0, fake_log_d = 0.0;
  for (double r : disc_out_real) real_term += std::log(clamp_disc(r, v.clamped));
  for (double f : disc_out_fake) {
    const double c = clamp_disc(f, v.clamped);
    fake_term += std::log1p(-c);
    fake_log_d += std::log(c);
  }
  const auto nr = static_cast<double>(disc_out_real.size()), nf = static_cast<double>(disc_out_fake.size());
  v.disc_objective = real_term / nr + fake_term / nf;
  v.gen_loss = generator_loss == GeneratorLoss::Saturating ? fake_term / nf : -fake_log_d / nf;
  return v;
}

GanModel gan_initialize(const GanConfig& config) {
  config.validate();
  const std::size_t k = config.latent_dim();
  const auto gdims = dims_of(k, config.gen_hidden, config.d);
  const auto ddims = dims_of(config.d, config.disc_hidden, 1);
  GanModel model;
  model.generator = nn::mlp_init(gdims, hidden_relu_sigmoid_out(gdims.size() - 1),
                                 derive_seed(config.seed, kGeneratorInit), config.init);
  model.discriminator = nn::mlp_init(ddims, hidden_relu_sigmoid_out(ddims.size() - 1),
                                     derive_seed(config.seed, kDiscriminatorInit), config.init);
  model.config = config;
  model.config.k = k;
  return model;
}

GanModel gan_train(const Matrix& pseudo, const GanConfig& config) {
  config.validate();
  require(static_cast<std::size_t>(pseudo.cols()) == config.d, ErrorKind::DimensionMismatch,
          "gan_train: data has " + std::to_string(pseudo.cols()) + " columns, config.d = " + std::to_string(config.d));
  require(static_cast<std::size_t>(pseudo.rows()) >= config.batch_size, ErrorKind::InvalidArgument,
          "gan_train: fewer observations than the batch size");
  require(pseudo.allFinite(), ErrorKind::NonFinite, "gan_train: data contains non-finite values");

  GanModel model = gan_initialize(config);
  const std::size_t batch = config.batch_size;
  const std::size_t k = model.config.k;
  CounterRng latent_rng(derive_seed(config.seed, kLatent));
  EpochSampler sampler(static_cast<std::size_t>(pseudo.rows()), derive_seed(config.seed, kData));

  auto d_state = nn::RmsPropState::for_model(model.discriminator, config.lr_d, config.rmsprop_decay, config.rmsprop_epsilon);
  auto g_state = nn::RmsPropState::for_model(model.generator, config.lr_g, config.rmsprop_decay, config.rmsprop_epsilon);
  model.loss_trace.reserve(config.iterations);

  const auto b = static_cast<Eigen::Index>(batch);
  nn::ForwardCache d_cache, g_cache;
  Matrix stacked(2 * b, static_cast<Eigen::Index>(config.d));
  Matrix upstream;

  for (std::size_t it = 0; it < config.iterations; ++it) {
    auto fail = [&](const std::string& what) {
      throw Error(ErrorKind::NonFinite, "gan_train: " + what + " at iteration " + std::to_string(it));
    };

    // Discriminator: ascend mean log D(u) + mean log(1 - D(G(z))).
    const Matrix z = latent_batch(latent_rng, batch, k);
    stacked.topRows(b) = sampler.next(pseudo, batch);
    stacked.bottomRows(b) = nn::mlp_forward(model.generator, z);
    const Matrix d_out = nn::mlp_forward(model.discriminator, stacked, &d_cache);
    const auto d_step = gan_loss(std::span<const double>(d_out.data(), batch),
                                 std::span<const double>(d_out.data() + batch, batch), config.generator_loss);
    if (!std::isfinite(d_step.disc_objective)) fail("non-finite discriminator objective");
    // The objective is the mean over all 2B rows of 2 log D (real) or 2 log(1 - D) (fake).
    upstream.resize(2 * b, 1);
    std::size_t ignored = 0;
    for (Eigen::Index i = 0; i < 2 * b; ++i) {
      const double c = clamp_disc(d_out(i, 0), ignored);
      upstream(i, 0) = i < b ? 2.0 / c : -2.0 / (1.0 - c);
    }
    const auto d_grads = nn::mlp_backward(model.discriminator, d_cache, upstream);
    if (!d_grads.all_finite()) fail("non-finite discriminator gradient");
    nn::rmsprop_step(model.discriminator, d_grads, d_state, nn::Direction::Ascend);

    // Generator: descend on a fresh latent minibatch.
    const Matrix z2 = latent_batch(latent_rng, batch, k);
    const Matrix fake = nn::mlp_forward(model.generator, z2, &g_cache);
    const Matrix d_fake = nn::mlp_forward(model.discriminator, fake, &d_cache);
    const auto g_step = gan_loss(std::span<const double>(d_out.data(), batch),
                                 std::span<const double>(d_fake.data(), batch), config.generator_loss);
    if (!std::isfinite(g_step.gen_loss)) fail("non-finite generator loss");
    upstream.resize(b, 1);
    for (Eigen::Index i = 0; i < b; ++i) {
      const double c = clamp_disc(d_fake(i, 0), ignored);
      upstream(i, 0) = config.generator_loss == GeneratorLoss::Saturating ? -1.0 / (1.0 - c) : -1.0 / c;
    }
    Matrix fake_grad;
    nn::mlp_backward(model.discriminator, d_cache, upstream, &fake_grad, false);
    const auto g_grads = nn::mlp_backward(model.generator, g_cache, fake_grad);
    if (!g_grads.all_finite()) fail("non-finite generator gradient");
    nn::rmsprop_step(model.generator, g_grads, g_state, nn::Direction::Descend);

    std::size_t fake_clamped = 0;
    for (Eigen::Index i = 0; i < b; ++i) clamp_disc(d_fake(i, 0), fake_clamped);
    model.saturated_steps += (d_step.clamped > 0 ? 1 : 0) + (fake_clamped > 0 ? 1 : 0);
    model.loss_trace.push_back({d_step.disc_objective, g_step.gen_loss});
  }

  // Two optimizer steps per iteration; warn when more than half saturated.
  if (config.iterations > 0 && model.saturated_steps > config.iterations) {
    model.warnings.push_back("discriminator saturated in " + std::to_string(model.saturated_steps) + " of " +
                             std::to_string(2 * config.iterations) + " steps");
  }
  return model;
}

Matrix gan_generate(const GanModel& model, const Matrix& z) {
  require(static_cast<std::size_t>(z.cols()) == model.latent_dim(), ErrorKind::DimensionMismatch,
          "gan_generate: latent width " + std::to_string(z.cols()) + " != " + std::to_string(model.latent_dim()));
  if (z.rows() == 0) return Matrix(0, static_cast<Eigen::Index>(model.output_dim()));
  return nn::mlp_forward(model.generator, z);
}

nlohmann::json gan_config_to_json(const GanConfig& c) {
  return {{"k", c.latent_dim()},
          {"d", c.d},
          {"gen_hidden", c.gen_hidden},
          {"disc_hidden", c.disc_hidden},
          {"batch_size", c.batch_size},
          {"iterations", c.iterations},
          {"lr_g", c.lr_g},
          {"lr_d", c.lr_d},
          {"rmsprop_decay", c.rmsprop_decay},
          {"rmsprop_epsilon", c.rmsprop_epsilon},
          {"seed", c.seed},
          {"generator_loss", to_string(c.generator_loss)},
          {"init", nn::to_string(c.init)}};
}

GanConfig gan_config_from_json(const nlohmann::json& j) {
  GanConfig c;
  c.k = j.at("k").get<std::size_t>();
  c.d = j.at("d").get<std::size_t>();
  c.gen_hidden = j.at("gen_hidden").get<std::vector<std::size_t>>();
  c.disc_hidden = j.at("disc_hidden").get<std::vector<std::size_t>>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.lr_g = j.at("lr_g").get<double>();
  c.lr_d = j.at("lr_d").get<double>();
  c.rmsprop_decay = j.at("rmsprop_decay").get<double>();
  c.rmsprop_epsilon = j.at("rmsprop_epsilon").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.generator_loss = parse_generator_loss(j.at("generator_loss").get<std::string>());
  c.init = nn::parse_init_scheme(j.at("init").get<std::string>());
  return c;
}

std::string gan_serialize(const GanModel& model) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& r : model.loss_trace) trace.push_back({r.disc_objective, r.gen_loss});
  nlohmann::json j{{"format", kGanFormat},
                   {"version", kGanFormatVersion},
                   {"config", gan_config_to_json(model.config)},
                   {"generator", nn::mlp_to_json(model.generator)},
                   {"discriminator", nn::mlp_to_json(model.discriminator)},
                   {"saturated_steps", model.saturated_steps},
                   {"warnings", model.warnings},
                   {"loss_trace", trace}};
  if (!model.loss_trace.empty())
    j["final_losses"] = {{"disc_objective", model.loss_trace.back().disc_objective},
                         {"gen_loss", model.loss_trace.back().gen_loss}};
  return j.dump();
}

GanModel gan_deserialize(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorKind::Format, "gan model: text is not valid JSON");
  try {
    require(j.is_object() && j.contains("version"), ErrorKind::Format, "gan model: missing version field");
    require(j.value("format", std::string()) == kGanFormat, ErrorKind::Format, "gan model: unexpected format tag");
    require(j.at("version").get<int>() == kGanFormatVersion, ErrorKind::Format, "gan model: unsupported version");
    GanModel m;
    m.config = gan_config_from_json(j.at("config"));
    m.generator = nn::mlp_from_json(j.at("generator"));
    m.discriminator = nn::mlp_from_json(j.at("discriminator"));
    require(m.generator.input_dim() == m.config.latent_dim() && m.generator.output_dim() == m.config.d &&
                m.discriminator.input_dim() == m.config.d && m.discriminator.output_dim() == 1,
            ErrorKind::Format, "gan model: network shapes disagree with config");
    m.saturated_steps = j.value("saturated_steps", std::size_t{0});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    for (const auto& r : j.value("loss_trace", nlohmann::json::array()))
      m.loss_trace.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("gan model: malformed JSON: ") + e.what());
  }
}

}  // namespace gqrs::gan

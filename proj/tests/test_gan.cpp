#include "gqrs/gan.hpp"

#include "gqrs/copulas.hpp"
#include "gqrs/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gqrs;
using namespace gqrs::gan;

namespace {

Matrix clayton_pseudo(std::size_t n, std::size_t d, std::uint64_t seed) {
  CounterRng rng(seed);
  return copulas::pseudo_observations(copulas::sample_cdm(copulas::CopulaSpec::clayton(2.0 / 3.0, d), n, rng));
}

GanConfig small_config() {
  GanConfig c;
  c.d = 2;
  c.gen_hidden = {8};
  c.disc_hidden = {16, 16};
  c.batch_size = 32;
  c.iterations = 40;
  c.seed = 3;
  return c;
}

Matrix normal_batch(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix z(n, k);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  return z;
}

// 2-d Clayton model trained with the default architecture; shared by the slower tests.
const GanModel& trained_clayton_2d() {
  static const GanModel model = [] {
    GanConfig c;
    c.d = 2;
    c.iterations = 2000;
    c.seed = 1;
    return gan_train(clayton_pseudo(2000, 2, 21), c);
  }();
  return model;
}

}  // namespace

TEST(GanLoss, UninformativeDiscriminator) {
  const double half[] = {0.5, 0.5, 0.5};
  const auto v = gan_loss(half, half, GeneratorLoss::Saturating);
  EXPECT_NEAR(v.disc_objective, 2 * std::log(0.5), 1e-15);
  EXPECT_NEAR(v.gen_loss, std::log(0.5), 1e-15);
  EXPECT_EQ(v.clamped, 0u);
  EXPECT_NEAR(gan_loss(half, half, GeneratorLoss::NonSaturating).gen_loss, -std::log(0.5), 1e-15);
}

TEST(GanLoss, PerfectDiscriminatorIsClamped) {
  const double ones[] = {1.0, 1.0}, zeros[] = {0.0, 0.0};
  const auto v = gan_loss(ones, zeros);
  EXPECT_NEAR(v.disc_objective, 2 * std::log1p(-kSaturationClamp), 1e-15);
  EXPECT_NEAR(v.disc_objective, -2e-7, 1e-13);
  EXPECT_EQ(v.clamped, 4u);
  EXPECT_THROW(gan_loss(std::span<const double>{}, ones), Error);
}

TEST(GanConfig, Validation) {
  auto c = small_config();
  c.k = 3;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.lr_d = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.disc_hidden = {0};
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.k = 1;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.latent_dim(), 1u);
}

TEST(GanInitialize, Architecture) {
  const auto m = gan_initialize(small_config());
  EXPECT_EQ(m.generator.layer_dims(), (std::vector<std::size_t>{2, 8, 2}));
  EXPECT_EQ(m.discriminator.layer_dims(), (std::vector<std::size_t>{2, 16, 16, 1}));
  EXPECT_EQ(m.generator.layer(0).activation, nn::Activation::ReLU);
  EXPECT_EQ(m.generator.layer(1).activation, nn::Activation::Sigmoid);
  EXPECT_EQ(m.discriminator.layer(2).activation, nn::Activation::Sigmoid);
}

TEST(GanTrain, ZeroIterationsReturnsInitialModel) {
  auto c = small_config();
  c.iterations = 0;
  const auto m = gan_train(clayton_pseudo(100, 2, 1), c);
  EXPECT_TRUE(m.generator == gan_initialize(c).generator);
  EXPECT_TRUE(m.loss_trace.empty());
}

TEST(GanTrain, DeterministicPerSeed) {
  const Matrix data = clayton_pseudo(200, 2, 2);
  const auto a = gan_train(data, small_config());
  const auto b = gan_train(data, small_config());
  EXPECT_EQ(gan_serialize(a), gan_serialize(b));
  ASSERT_EQ(a.loss_trace.size(), 40u);
  for (std::size_t i = 0; i < a.loss_trace.size(); ++i) {
    EXPECT_EQ(a.loss_trace[i].disc_objective, b.loss_trace[i].disc_objective);
    EXPECT_EQ(a.loss_trace[i].gen_loss, b.loss_trace[i].gen_loss);
  }
  auto other = small_config();
  other.seed = 4;
  EXPECT_NE(gan_serialize(gan_train(data, other)), gan_serialize(a));
}

TEST(GanTrain, InputValidation) {
  auto c = small_config();
  EXPECT_THROW(gan_train(clayton_pseudo(100, 3, 1), c), Error);
  EXPECT_THROW(gan_train(clayton_pseudo(10, 2, 1), c), Error);
}

TEST(GanTrain, LatentSmallerThanOutput) {
  auto c = small_config();
  c.d = 3;
  c.k = 1;
  const auto m = gan_train(clayton_pseudo(100, 3, 5), c);
  EXPECT_EQ(m.latent_dim(), 1u);
  EXPECT_EQ(m.output_dim(), 3u);
  EXPECT_EQ(gan_generate(m, normal_batch(4, 1, 1)).cols(), 3);
}

TEST(GanTrain, DiscriminatorAscentStepRaisesObjective) {
  // One RMSProp ascent step from a fresh discriminator on a fixed minibatch.
  const Matrix data = clayton_pseudo(256, 2, 7);
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GanConfig c;
    c.d = 2;
    c.seed = seed;
    c.lr_d = 1e-4;
    auto m = gan_initialize(c);
    const Matrix fake = gan_generate(m, normal_batch(256, 2, seed + 50));
    Matrix stacked(512, 2);
    stacked << data, fake;
    auto objective = [&] {
      const Matrix d = nn::mlp_forward(m.discriminator, stacked);
      return gan_loss(std::span<const double>(d.data(), 256), std::span<const double>(d.data() + 256, 256)).disc_objective;
    };
    const double before = objective();
    nn::ForwardCache cache;
    const Matrix d = nn::mlp_forward(m.discriminator, stacked, &cache);
    Matrix up(512, 1);
    for (Eigen::Index i = 0; i < 512; ++i) up(i, 0) = i < 256 ? 2.0 / d(i, 0) : -2.0 / (1.0 - d(i, 0));
    auto state = nn::RmsPropState::for_model(m.discriminator, c.lr_d);
    nn::rmsprop_step(m.discriminator, nn::mlp_backward(m.discriminator, cache, up), state, nn::Direction::Ascend);
    violations += objective() > before ? 0 : 1;
  }
  EXPECT_LE(violations, 2);
}

TEST(GanTrain, LearnsClaytonDependence) {
  const auto& m = trained_clayton_2d();
  const Matrix u = gan_generate(m, normal_batch(5000, 2, 31));
  EXPECT_NEAR(copulas::kendall_tau_empirical(u), 0.25, 0.10);
}

TEST(GanTrain, MarginsApproximatelyUniform) {
  const Matrix u = gan_generate(trained_clayton_2d(), normal_batch(10000, 2, 32));
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double mean = u.col(j).mean();
    EXPECT_GE(mean, 0.40);
    EXPECT_LE(mean, 0.60);
  }
}

TEST(GanTrain, DiscriminatorNearEquilibrium) {
  const auto& m = trained_clayton_2d();
  const Matrix real = clayton_pseudo(2000, 2, 21);
  const Matrix fake = gan_generate(m, normal_batch(2000, 2, 33));
  const double dr = nn::mlp_forward(m.discriminator, real).mean();
  const double df = nn::mlp_forward(m.discriminator, fake).mean();
  EXPECT_GT(dr, 0.2);
  EXPECT_LT(dr, 0.8);
  EXPECT_GT(df, 0.2);
  EXPECT_LT(df, 0.8);
}

TEST(GanGenerate, OutputRange) {
  const Matrix z = normal_batch(1000000, 2, 34) * 3.0;
  const Matrix u = gan_generate(trained_clayton_2d(), z);
  EXPECT_GT(u.minCoeff(), 0.0);
  EXPECT_LT(u.maxCoeff(), 1.0);
}

TEST(GanGenerate, ZeroLatentAndRepeatability) {
  const auto m = gan_initialize(small_config());
  const Matrix u = gan_generate(m, Matrix::Zero(1, 2));
  EXPECT_GT(u.minCoeff(), 0.0);
  EXPECT_LT(u.maxCoeff(), 1.0);
  const Matrix z = normal_batch(10, 2, 1);
  EXPECT_EQ(gan_generate(m, z), gan_generate(m, z));
  EXPECT_THROW(gan_generate(m, Matrix::Zero(1, 3)), Error);
}

TEST(GanSerialization, RoundTrip) {
  const auto m = gan_train(clayton_pseudo(200, 2, 2), small_config());
  const std::string text = gan_serialize(m);
  const auto back = gan_deserialize(text);
  EXPECT_TRUE(back.generator == m.generator);
  EXPECT_TRUE(back.discriminator == m.discriminator);
  EXPECT_EQ(back.config.seed, m.config.seed);
  EXPECT_EQ(back.loss_trace.size(), m.loss_trace.size());
  EXPECT_EQ(gan_serialize(back), text);
  EXPECT_THROW(gan_deserialize("{}"), Error);
  EXPECT_THROW(gan_deserialize("[1,2"), Error);
}

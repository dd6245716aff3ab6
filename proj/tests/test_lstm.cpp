#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "endstyle/lstm_lm.hpp"
#include "endstyle/rng.hpp"
#include "test_helpers.hpp"

using namespace endstyle;

namespace {

NeuralLMConfig tiny_config(int hidden, int embedding, double dropout,
                           int epochs, std::uint64_t seed) {
  NeuralLMConfig c;
  c.hidden = hidden;
  c.embedding = embedding;
  c.dropout = dropout;
  c.epochs = epochs;
  c.seed = seed;
  c.validation_fraction = 0.0;
  return c;
}

// Structured toy stories over a small vocabulary: each "sentence" is a short
// fixed pattern followed by the boundary token, giving the model something
// learnable.
std::vector<std::vector<int>> toy_stories(std::size_t n_stories,
                                          std::size_t vocab,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> stories;
  for (std::size_t s = 0; s < n_stories; ++s) {
    std::vector<int> story;
    for (int sentence = 0; sentence < 3; ++sentence) {
      const int base = 3 + static_cast<int>(bounded(rng, (vocab - 3) / 2));
      story.push_back(base);
      story.push_back(base + 1);
      story.push_back(static_cast<int>(bounded(rng, 2)) == 0
                          ? base
                          : base + 1);
      story.push_back(Vocabulary::kBreak);
    }
    stories.push_back(std::move(story));
  }
  return stories;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences per block") {
  const std::size_t V = 7;
  NeuralLM model(tiny_config(4, 3, 0.0, 0, 11), V);
  const std::vector<int> seq = {3, 4, 2, 5, 6};

  NeuralLM::Gradients grads;
  model.loss_and_gradients(seq, grads);
  const std::vector<std::pair<std::string, const double*>> analytic = {
      {"embed", grads.embed.data()}, {"w_x", grads.w_x.data()},
      {"w_h", grads.w_h.data()},     {"b", grads.b.data()},
      {"w_out", grads.w_out.data()}, {"b_out", grads.b_out.data()}};

  const double h = 1e-5;
  std::size_t block_idx = 0;
  for (auto& [name, data, size] : model.parameter_blocks()) {
    REQUIRE(analytic[block_idx].first == name);
    const double* ga = analytic[block_idx].second;
    double num = 0.0;
    double den_a = 0.0;
    double den_f = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double saved = data[i];
      data[i] = saved + h;
      const double up = model.sequence_loss({seq});
      data[i] = saved - h;
      const double down = model.sequence_loss({seq});
      data[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      num += (ga[i] - fd) * (ga[i] - fd);
      den_a += ga[i] * ga[i];
      den_f += fd * fd;
    }
    const double rel = std::sqrt(num) /
                       std::max({std::sqrt(den_a), std::sqrt(den_f), 1e-12});
    INFO("block " << name << " rel error " << rel);
    CHECK(rel <= 1e-4);
    ++block_idx;
  }
}

TEST_CASE("softmax rows sum to one") {
  const std::size_t V = 9;
  NeuralLM model(tiny_config(6, 4, 0.0, 0, 3), V);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> ctx;
    const std::size_t clen = bounded(rng, 6);
    for (std::size_t i = 0; i < clen; ++i) {
      ctx.push_back(static_cast<int>(bounded(rng, V)));
    }
    const Eigen::VectorXd p = model.next_distribution(ctx);
    CHECK(std::abs(p.sum() - 1.0) < 1e-6);
    CHECK(p.minCoeff() > 0.0);
  }
}

TEST_CASE("inference is deterministic even with a nonzero dropout rate") {
  const auto stories = toy_stories(10, 9, 5);
  const NeuralLM model =
      train_neural(stories, tiny_config(8, 6, 0.6, 2, 21), 9);
  const std::vector<int> tokens = {3, 4, 2};
  const std::vector<int> ctx = {5, 6, 2};
  const double a = model.seq_logprob(tokens, ctx);
  const double b = model.seq_logprob(tokens, ctx);
  CHECK(a == b);
}

TEST_CASE("zero training epochs leaves the initialized model untouched") {
  const auto stories = toy_stories(12, 9, 6);
  const auto config = tiny_config(8, 6, 0.5, 0, 33);
  const NeuralLM trained = train_neural(stories, config, 9);
  const NeuralLM fresh(config, 9);
  CHECK(trained.sequence_loss(stories) == fresh.sequence_loss(stories));
}

TEST_CASE("training reduces cross-entropy by at least 30% on the toy corpus") {
  const auto stories = toy_stories(50, 11, 7);
  const auto config = tiny_config(32, 16, 0.0, 20, 1);
  const NeuralLM before(config, 11);
  const double initial = before.sequence_loss(stories);
  const NeuralLM after = train_neural(stories, config, 11);
  const double final_loss = after.sequence_loss(stories);
  INFO("cross-entropy " << initial << " -> " << final_loss);
  CHECK(final_loss < 0.7 * initial);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto stories = toy_stories(15, 9, 8);
  const auto config = tiny_config(8, 6, 0.4, 3, 99);
  const NeuralLM a = train_neural(stories, config, 9);
  const NeuralLM b = train_neural(stories, config, 9);
  CHECK(a.sequence_loss(stories) == b.sequence_loss(stories));
}

TEST_CASE("validation perplexity is recorded per epoch") {
  const auto stories = toy_stories(20, 9, 9);
  auto config = tiny_config(8, 6, 0.2, 4, 2);
  config.validation_fraction = 0.1;
  const NeuralLM model = train_neural(stories, config, 9);
  REQUIRE(model.validation_perplexities().size() == 4);
  for (const double ppl : model.validation_perplexities()) {
    CHECK(std::isfinite(ppl));
    CHECK(ppl > 1.0);
  }
}

TEST_CASE("divergent training reports the failing step") {
  const auto stories = toy_stories(10, 9, 10);
  auto config = tiny_config(8, 6, 0.0, 50, 3);
  config.learning_rate = 1e305;  // guaranteed blow-up
  CHECK_THROWS_AS(train_neural(stories, config, 9), TrainingFailureError);
}

TEST_CASE("checkpoint round trip preserves scores and config") {
  const auto stories = toy_stories(10, 9, 12);
  const auto config = tiny_config(6, 5, 0.3, 2, 4);
  const NeuralLM model = train_neural(stories, config, 9);
  testutil::TempFile f("", ".bin");
  model.save(f.path());
  const NeuralLM loaded = NeuralLM::load(f.path());
  std::filesystem::remove(f.path() + ".json");
  CHECK(loaded.config() == model.config());
  CHECK(loaded.vocab_size() == model.vocab_size());
  const std::vector<int> tokens = {3, 4, 2, 5};
  const std::vector<int> ctx = {6, 7, 2};
  CHECK(loaded.seq_logprob(tokens, ctx) == model.seq_logprob(tokens, ctx));
  CHECK(loaded.seq_logprob(tokens) == model.seq_logprob(tokens));
}

TEST_CASE("neural LM validates ids and config") {
  CHECK_THROWS_AS(NeuralLM(tiny_config(0, 4, 0.0, 1, 1), 9),
                  InvalidConfigError);
  CHECK_THROWS_AS(NeuralLM(tiny_config(4, 4, 1.0, 1, 1), 9),
                  InvalidConfigError);
  NeuralLM model(tiny_config(4, 4, 0.0, 1, 1), 9);
  const std::vector<int> bad = {42};
  CHECK_THROWS_AS(model.seq_logprob(bad), InvalidInputError);
  const auto stories = toy_stories(5, 9, 1);
  auto config = tiny_config(4, 4, 0.0, -1, 1);
  CHECK_THROWS_AS(train_neural(stories, config, 9), InvalidConfigError);
  CHECK_THROWS_AS(train_neural({}, tiny_config(4, 4, 0.0, 1, 1), 9),
                  InsufficientDataError);
}

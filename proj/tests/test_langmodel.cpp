#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "endstyle/kneser_ney.hpp"
#include "endstyle/rng.hpp"
#include "endstyle/vocab.hpp"
#include "test_helpers.hpp"

using namespace endstyle;

namespace {

std::vector<std::vector<int>> map_corpus(
    const Vocabulary& v, const std::vector<std::vector<std::string>>& corpus) {
  std::vector<std::vector<int>> out;
  for (const auto& seq : corpus) out.push_back(v.map(seq));
  return out;
}

}  // namespace

TEST_CASE("build_vocab collapses rare tokens to OOV") {
  const std::vector<std::vector<std::string>> corpus = {
      {"a", "a", "a"}, {"b", "b"}, {"c"}};
  const Vocabulary v = build_vocab(corpus, 3);
  CHECK(v.size() == 4);  // unk, <s>, <brk>, a
  CHECK(v.id("a") == 3);
  CHECK(v.id("b") == Vocabulary::kOov);
  CHECK(v.id("c") == Vocabulary::kOov);
  CHECK(v.min_count() == 3);
}

TEST_CASE("build_vocab: nothing collapses when every token is frequent") {
  const std::vector<std::vector<std::string>> corpus = {
      {"x", "y", "x"}, {"y", "x", "y"}};
  const Vocabulary v = build_vocab(corpus, 3);
  for (const auto& seq : corpus) {
    for (const int id : v.map(seq)) CHECK(id != Vocabulary::kOov);
  }
}

TEST_CASE("build_vocab matches a manual frequency table") {
  const std::vector<std::vector<std::string>> corpus = {
      {"the", "sun", "the"}, {"sun", "the", "moon"}, {"sun"}};
  // the:3, sun:3, moon:1 -> keep {sun, the} sorted after the specials.
  const Vocabulary v = build_vocab(corpus, 2);
  CHECK(v.size() == 5);
  CHECK(v.id("sun") == 3);
  CHECK(v.id("the") == 4);
  CHECK(v.id("moon") == Vocabulary::kOov);
  CHECK(v.token(3) == "sun");
}

TEST_CASE("vocabulary serialization round trip") {
  const Vocabulary v = build_vocab({{"q", "q", "r", "r", "q"}}, 2);
  const Vocabulary loaded = Vocabulary::deserialize(v.serialize());
  CHECK(loaded.serialize() == v.serialize());
  CHECK(loaded.id("q") == v.id("q"));
  CHECK(loaded.fingerprint() == v.fingerprint());
  CHECK_THROWS_AS(build_vocab({}, 3), InsufficientDataError);
}

// Bigram interpolated Kneser-Ney on {a b, a b, a c}, discount 0.75,
// vocabulary {unk, <s>, <brk>, a, b, c} (V = 6). Worked out by hand before
// the implementation:
//   bigram counts: (bos,a)=3 (a,b)=2 (a,c)=1
//   continuation counts: a=1 b=1 c=1, total 3, types 3
//   p1(w)        = (max(c'(w)-D,0) + D*3/V) / 3
//   p2(w|h)      = (max(c(hw)-D,0) + D*types(h)*p1(w)) / total(h)
TEST_CASE("KN bigram probabilities equal the hand worksheet") {
  const std::vector<std::vector<std::string>> corpus = {
      {"a", "b"}, {"a", "b"}, {"a", "c"}};
  const Vocabulary v = build_vocab(corpus, 1);
  REQUIRE(v.size() == 6);
  const int a = v.id("a"), b = v.id("b"), c = v.id("c");
  const NGramLM lm = train_kn(map_corpus(v, corpus), 2, 0.75, v.size());

  const double tol = 1e-9;
  const std::vector<int> empty_h;
  const std::vector<int> hist_a = {a};
  const std::vector<int> hist_b = {b};
  CHECK(std::abs(lm.prob(a, empty_h) - 2.40625 / 3.0) < tol);   // p(a|bos)
  CHECK(std::abs(lm.prob(b, hist_a) - 1.5625 / 3.0) < tol);     // p(b|a)
  CHECK(std::abs(lm.prob(c, hist_a) - 0.5625 / 3.0) < tol);     // p(c|a)
  CHECK(std::abs(lm.prob(Vocabulary::kOov, hist_a) - 0.0625) < tol);
  // Unseen history backs off to the continuation unigram.
  CHECK(std::abs(lm.prob(a, hist_b) - 0.625 / 3.0) < tol);

  // Strict positivity across the vocabulary.
  for (int w = 0; w < static_cast<int>(v.size()); ++w) {
    CHECK(lm.prob(w, hist_a) > 0.0);
    CHECK(lm.prob(w, hist_b) > 0.0);
  }
}

TEST_CASE("KN next-token distributions sum to one") {
  std::mt19937_64 rng(2024);
  // Random corpus over a 10-token vocabulary.
  std::vector<std::vector<int>> corpus;
  const std::size_t V = 13;
  for (int s = 0; s < 40; ++s) {
    std::vector<int> seq;
    const std::size_t len = 3 + bounded(rng, 12);
    for (std::size_t i = 0; i < len; ++i) {
      seq.push_back(3 + static_cast<int>(bounded(rng, V - 3)));
    }
    corpus.push_back(std::move(seq));
  }
  const NGramLM lm = train_kn(corpus, 3, 0.75, V);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> history;
    const std::size_t hlen = bounded(rng, 4);
    for (std::size_t i = 0; i < hlen; ++i) {
      history.push_back(static_cast<int>(bounded(rng, V)));
    }
    double sum = 0.0;
    for (int w = 0; w < static_cast<int>(V); ++w) {
      const double p = lm.prob(w, history);
      CHECK(p > 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("KN degenerate corpus concentrates on the repeated token") {
  const std::vector<std::vector<std::string>> corpus = {{"a", "a", "a"}};
  const Vocabulary v = build_vocab(corpus, 1);
  const NGramLM lm = train_kn(map_corpus(v, corpus), 2, 0.75, v.size());
  const int a = v.id("a");
  const std::vector<int> hist_a = {a};
  CHECK(lm.prob(a, hist_a) > 0.85);
  CHECK(lm.prob(a, hist_a) < 1.0);
}

TEST_CASE("seq_logprob obeys the chain rule") {
  const std::vector<std::vector<std::string>> corpus = {
      {"a", "b"}, {"a", "b"}, {"a", "c"}};
  const Vocabulary v = build_vocab(corpus, 1);
  const NGramLM lm = train_kn(map_corpus(v, corpus), 2, 0.75, v.size());
  const int a = v.id("a"), b = v.id("b");
  const std::vector<int> ab = {a, b};
  const std::vector<int> just_a = {a};
  const std::vector<int> just_b = {b};
  CHECK(lm.seq_logprob(ab) ==
        lm.seq_logprob(just_a) + lm.seq_logprob(just_b, just_a));
}

TEST_CASE("order-1 model: single-token logprob is the unigram probability "
          "and context changes nothing") {
  const std::vector<std::vector<std::string>> corpus = {
      {"a", "b"}, {"a", "b"}, {"a", "c"}};
  const Vocabulary v = build_vocab(corpus, 1);
  const NGramLM lm = train_kn(map_corpus(v, corpus), 1, 0.75, v.size());
  const int a = v.id("a"), b = v.id("b");
  // Raw unigram counts a=3 b=2 c=1, total 6, types 3, V=6.
  const std::vector<int> just_a = {a};
  CHECK(std::abs(lm.seq_logprob(just_a) - std::log(2.625 / 6.0)) < 1e-12);
  const std::vector<int> ctx = {b, b, a};
  CHECK(lm.seq_logprob(just_a, ctx) == lm.seq_logprob(just_a));
  const PmiScore score = lm.pmi(ctx, just_a);
  CHECK(score.log_ratio == 0.0);
}

TEST_CASE("pmi is positive when the context predicts the ending") {
  const std::vector<std::vector<std::string>> corpus = {
      {"the", "sun", "shines"}, {"the", "sun", "shines"},
      {"the", "sun", "shines"}, {"a", "dog", "barks"},
      {"a", "dog", "barks"}};
  const Vocabulary v = build_vocab(corpus, 1);
  const NGramLM lm = train_kn(map_corpus(v, corpus), 2, 0.75, v.size());
  const std::vector<int> ctx = {v.id("the"), v.id("sun")};
  const std::vector<int> ending = {v.id("shines")};
  const PmiScore score = lm.pmi(ctx, ending);
  CHECK(score.log_ratio > 0.0);
  CHECK(std::abs(std::exp(score.log_conditional) - 0.78125) < 1e-9);
}

TEST_CASE("pmi stores the exact difference") {
  std::mt19937_64 rng(5);
  std::vector<std::vector<int>> corpus;
  for (int s = 0; s < 20; ++s) {
    std::vector<int> seq;
    for (int i = 0; i < 8; ++i) {
      seq.push_back(3 + static_cast<int>(bounded(rng, 7)));
    }
    corpus.push_back(std::move(seq));
  }
  const NGramLM lm = train_kn(corpus, 3, 0.6, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ctx;
    std::vector<int> ending;
    for (int i = 0; i < 4; ++i) {
      ctx.push_back(static_cast<int>(bounded(rng, 10)));
      ending.push_back(static_cast<int>(bounded(rng, 10)));
    }
    const PmiScore score = lm.pmi(ctx, ending);
    CHECK(score.log_ratio - (score.log_conditional - score.log_marginal) ==
          0.0);
  }
}

TEST_CASE("KN serialization round trip preserves probabilities") {
  const std::vector<std::vector<std::string>> corpus = {
      {"a", "b", "c"}, {"a", "b"}, {"c", "a"}};
  const Vocabulary v = build_vocab(corpus, 1);
  const NGramLM lm = train_kn(map_corpus(v, corpus), 3, 0.75, v.size());
  const NGramLM loaded = NGramLM::deserialize(lm.serialize());
  CHECK(loaded.serialize() == lm.serialize());
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> history;
    const std::size_t hlen = bounded(rng, 3);
    for (std::size_t i = 0; i < hlen; ++i) {
      history.push_back(static_cast<int>(bounded(rng, v.size())));
    }
    const int w = static_cast<int>(bounded(rng, v.size()));
    CHECK(lm.prob(w, history) == loaded.prob(w, history));
  }
}

TEST_CASE("KN configuration and input validation") {
  const std::vector<std::vector<int>> corpus = {{3, 4}, {4, 3}};
  CHECK_THROWS_AS(train_kn(corpus, 0, 0.75, 5), InvalidConfigError);
  CHECK_THROWS_AS(train_kn(corpus, 2, 1.0, 5), InvalidConfigError);
  CHECK_THROWS_AS(train_kn(corpus, 2, 0.0, 5), InvalidConfigError);
  CHECK_THROWS_AS(train_kn({}, 2, 0.75, 5), InsufficientDataError);
  CHECK_THROWS_AS(train_kn({{3, 99}}, 2, 0.75, 5), InvalidInputError);

  const NGramLM lm = train_kn(corpus, 2, 0.75, 5);
  const std::vector<int> empty_seq;
  const std::vector<int> bad_seq = {99};
  CHECK_THROWS_AS(lm.seq_logprob(empty_seq), InvalidInputError);
  CHECK_THROWS_AS(lm.seq_logprob(bad_seq), InvalidInputError);
  CHECK_THROWS_AS(lm.prob(2, bad_seq), InvalidInputError);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/lm.hpp"

namespace endstyle {

namespace detail {

struct IdVecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const int x : v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

using GramTable = std::unordered_map<std::vector<int>, long, IdVecHash>;

struct ContextStats {
  long total = 0;    // sum of counts over continuations
  long distinct = 0; // number of continuation types
};

using ContextTable =
    std::unordered_map<std::vector<int>, ContextStats, IdVecHash>;

}  // namespace detail

// Interpolated Kneser-Ney n-gram language model over vocabulary ids.
// Highest order uses raw counts, lower orders continuation counts, and the
// unigram level interpolates with the uniform distribution so every
// vocabulary item has strictly positive probability and each conditional
// distribution sums to one exactly.
class NGramLM : public SequenceScorer {
 public:
  using SequenceScorer::seq_logprob;

  int order() const { return order_; }
  double discount() const { return discount_; }
  std::size_t vocab_size() const { return vocab_size_; }

  double prob(int token, std::span<const int> history) const {
    check_id(token);
    for (const int h : history) check_id(h);
    std::vector<int> hist = padded_history(history);
    return prob_at(order_, hist, token);
  }

  double seq_logprob(std::span<const int> tokens,
                     std::span<const int> context) const override {
    if (tokens.empty()) {
      throw InvalidInputError("seq_logprob on an empty token sequence");
    }
    for (const int t : tokens) check_id(t);
    for (const int c : context) check_id(c);
    std::vector<int> hist = padded_history(context);
    double logp = 0.0;
    for (const int t : tokens) {
      logp += std::log(prob_at(order_, hist, t));
      if (order_ > 1) {
        hist.erase(hist.begin());
        hist.push_back(t);
      }
    }
    return logp;
  }

  std::string serialize() const {
    nlohmann::json header{{"format", "endstyle-kn"},
                          {"version", 1},
                          {"order", order_},
                          {"discount", discount_},
                          {"vocab_size", vocab_size_}};
    std::string out = header.dump() + "\n";
    for (int k = 1; k <= order_; ++k) {
      std::map<std::vector<int>, long> sorted(table(k).begin(),
                                              table(k).end());
      for (const auto& [gram, count] : sorted) {
        out += nlohmann::json{{"k", k}, {"gram", gram}, {"count", count}}
                   .dump() +
               "\n";
      }
    }
    return out;
  }

  static NGramLM deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
      throw InvalidInputError("empty n-gram model payload");
    }
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("format", "") != "endstyle-kn" ||
        header.value("version", 0) != 1) {
      throw InvalidInputError("unrecognized n-gram model header");
    }
    NGramLM lm;
    lm.order_ = header.at("order").get<int>();
    lm.discount_ = header.at("discount").get<double>();
    lm.vocab_size_ = header.at("vocab_size").get<std::size_t>();
    lm.tables_.assign(static_cast<std::size_t>(lm.order_), {});
    lm.contexts_.assign(static_cast<std::size_t>(lm.order_), {});
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(line);
      const int k = rec.at("k").get<int>();
      std::vector<int> gram = rec.at("gram").get<std::vector<int>>();
      if (k < 1 || k > lm.order_ ||
          gram.size() != static_cast<std::size_t>(k)) {
        throw InvalidInputError("bad n-gram record");
      }
      lm.tables_[static_cast<std::size_t>(k - 1)][gram] =
          rec.at("count").get<long>();
    }
    lm.rebuild_contexts();
    return lm;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize();
    if (!out) throw IoError("write failure on " + path);
  }

  static NGramLM load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
  }

  friend NGramLM train_kn(const std::vector<std::vector<int>>& corpus,
                          int order, double discount, std::size_t vocab_size);

 private:
  const detail::GramTable& table(int k) const {
    return tables_[static_cast<std::size_t>(k - 1)];
  }

  void check_id(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_) {
      throw InvalidInputError("token id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(vocab_size_));
    }
  }

  std::vector<int> padded_history(std::span<const int> context) const {
    const std::size_t need = static_cast<std::size_t>(order_ - 1);
    std::vector<int> hist(need, Vocabulary::kBos);
    const std::size_t take = std::min(context.size(), need);
    for (std::size_t i = 0; i < take; ++i) {
      hist[need - take + i] = context[context.size() - take + i];
    }
    return hist;
  }

  // hist holds order_-1 ids; order-k estimates use its last k-1 entries.
  double prob_at(int k, const std::vector<int>& hist, int token) const {
    if (k == 0) {
      return 1.0 / static_cast<double>(vocab_size_);
    }
    std::vector<int> h(hist.end() - (k - 1), hist.end());
    const auto& ctx = contexts_[static_cast<std::size_t>(k - 1)];
    const auto stats = ctx.find(h);
    if (stats == ctx.end() || stats->second.total == 0) {
      return prob_at(k - 1, hist, token);
    }
    h.push_back(token);
    const auto& tab = tables_[static_cast<std::size_t>(k - 1)];
    const auto hit = tab.find(h);
    const double c = hit == tab.end() ? 0.0 : static_cast<double>(hit->second);
    const double total = static_cast<double>(stats->second.total);
    const double types = static_cast<double>(stats->second.distinct);
    return (std::max(c - discount_, 0.0) +
            discount_ * types * prob_at(k - 1, hist, token)) /
           total;
  }

  void rebuild_contexts() {
    contexts_.assign(static_cast<std::size_t>(order_), {});
    for (int k = 1; k <= order_; ++k) {
      auto& ctx = contexts_[static_cast<std::size_t>(k - 1)];
      for (const auto& [gram, count] : tables_[static_cast<std::size_t>(k - 1)]) {
        std::vector<int> h(gram.begin(), gram.end() - 1);
        auto& stats = ctx[h];
        stats.total += count;
        stats.distinct += 1;
      }
    }
  }

  int order_ = 3;
  double discount_ = 0.75;
  std::size_t vocab_size_ = 0;
  std::vector<detail::GramTable> tables_;      // [k-1] -> k-gram counts
  std::vector<detail::ContextTable> contexts_; // [k-1] -> history stats
};

// Counts n-grams over BOS-padded sequences, derives lower-order continuation
// counts from distinct higher-order grams, and freezes the estimates.
inline NGramLM train_kn(const std::vector<std::vector<int>>& corpus, int order,
                        double discount, std::size_t vocab_size) {
  if (order < 1) {
    throw InvalidConfigError("n-gram order must be >= 1");
  }
  if (!(discount > 0.0 && discount < 1.0)) {
    throw InvalidConfigError("discount must lie in (0,1)");
  }
  if (corpus.empty()) {
    throw InsufficientDataError("n-gram training corpus is empty");
  }
  NGramLM lm;
  lm.order_ = order;
  lm.discount_ = discount;
  lm.vocab_size_ = vocab_size;
  lm.tables_.assign(static_cast<std::size_t>(order), {});

  auto& top = lm.tables_[static_cast<std::size_t>(order - 1)];
  for (const auto& seq : corpus) {
    for (const int id : seq) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
        throw InvalidInputError("corpus token id outside vocabulary");
      }
    }
    std::vector<int> padded(static_cast<std::size_t>(order - 1),
                            Vocabulary::kBos);
    padded.insert(padded.end(), seq.begin(), seq.end());
    for (std::size_t i = static_cast<std::size_t>(order - 1);
         i < padded.size(); ++i) {
      std::vector<int> gram(padded.begin() + static_cast<std::ptrdiff_t>(
                                                 i - (order - 1)),
                            padded.begin() + static_cast<std::ptrdiff_t>(i + 1));
      ++top[gram];
    }
  }
  // Continuation counts: types of distinct one-order-higher grams.
  for (int k = order - 1; k >= 1; --k) {
    auto& lower = lm.tables_[static_cast<std::size_t>(k - 1)];
    for (const auto& [gram, count] :
         lm.tables_[static_cast<std::size_t>(k)]) {
      std::vector<int> suffix(gram.begin() + 1, gram.end());
      ++lower[suffix];
    }
  }
  lm.rebuild_contexts();
  return lm;
}

}  // namespace endstyle

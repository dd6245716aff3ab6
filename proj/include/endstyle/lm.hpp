#pragma once

#include <span>
#include <string>
#include <vector>

#include "endstyle/errors.hpp"
#include "endstyle/tokenize.hpp"
#include "endstyle/vocab.hpp"

namespace endstyle {

// Pointwise mutual information between a context and a sequence under one
// language model. log_ratio is stored as the literal difference, so the
// identity log_ratio == log_conditional - log_marginal holds exactly.
struct PmiScore {
  double log_conditional = 0.0;
  double log_marginal = 0.0;
  double log_ratio = 0.0;
};

// Common scoring surface for the n-gram and recurrent realizations: the sum
// of per-token conditional log-probabilities of `tokens`, after advancing
// through `context` (empty context means a fresh start state).
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;

  virtual double seq_logprob(std::span<const int> tokens,
                             std::span<const int> context) const = 0;

  double seq_logprob(std::span<const int> tokens) const {
    return seq_logprob(tokens, {});
  }

  PmiScore pmi(std::span<const int> context,
               std::span<const int> ending) const {
    PmiScore score;
    score.log_conditional = seq_logprob(ending, context);
    score.log_marginal = seq_logprob(ending);
    score.log_ratio = score.log_conditional - score.log_marginal;
    return score;
  }
};

// ---------------------------------------------------------------------------
// Token streams. Sentences are joined with an explicit boundary token so the
// conditional probability of an ending after a 4-sentence context is well
// defined under both realizations.

inline std::vector<int> sentence_stream(const Vocabulary& vocab,
                                        const std::string& sentence) {
  std::vector<int> ids = vocab.map(tokenize(sentence));
  ids.push_back(Vocabulary::kBreak);
  return ids;
}

inline std::vector<int> sentences_stream(
    const Vocabulary& vocab, const std::vector<std::string>& sentences) {
  std::vector<int> ids;
  for (const auto& s : sentences) {
    const auto part = sentence_stream(vocab, s);
    ids.insert(ids.end(), part.begin(), part.end());
  }
  return ids;
}

// Full 5-sentence story stream used for language-model training.
inline std::vector<int> story_stream(const Vocabulary& vocab,
                                     const std::vector<std::string>& sentences) {
  return sentences_stream(vocab, sentences);
}

}  // namespace endstyle

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/corpus.hpp"
#include "endstyle/errors.hpp"
#include "endstyle/features.hpp"
#include "endstyle/lm.hpp"
#include "endstyle/logistic.hpp"
#include "endstyle/tagger.hpp"
#include "endstyle/tokenize.hpp"

namespace endstyle {

// ---------------------------------------------------------------------------
// Tagging source: the bundled tagger, or pre-tagged sentences that bypass it.

class TaggingProvider {
 public:
  explicit TaggingProvider(const Tagger& tagger) : tagger_(&tagger) {}

  explicit TaggingProvider(const std::vector<TaggedSentence>& pretagged) {
    for (const auto& ts : pretagged) {
      const std::vector<std::string> body(ts.sentence.tokens.begin() + 1,
                                          ts.sentence.tokens.end());
      pretagged_[join_tokens(body)] = ts;
    }
  }

  TaggedSentence tag(const std::string& text) const {
    if (!pretagged_.empty()) {
      auto it = pretagged_.find(text);
      if (it == pretagged_.end()) {
        it = pretagged_.find(join_tokens(tokenize(text)));
      }
      if (it == pretagged_.end()) {
        throw InvalidInputError("no pre-tagged entry for: " + text);
      }
      TaggedSentence ts = it->second;
      ts.sentence.raw = text;
      return ts;
    }
    return tagger_->tag(tokenize_and_normalize(text));
  }

 private:
  const Tagger* tagger_ = nullptr;
  std::unordered_map<std::string, TaggedSentence> pretagged_;
};

// Memoizes tagging across folds and operations.
class TagCache {
 public:
  explicit TagCache(TaggingProvider provider) : provider_(std::move(provider)) {}

  const TaggedSentence& get(const std::string& text) {
    const auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(text, provider_.tag(text)).first->second;
  }

  std::vector<TaggedSentence> tag_all(const std::vector<Ending>& endings) {
    std::vector<TaggedSentence> out;
    out.reserve(endings.size());
    for (const auto& e : endings) out.push_back(get(e.text));
    return out;
  }

 private:
  TaggingProvider provider_;
  std::unordered_map<std::string, TaggedSentence> cache_;
};

// ---------------------------------------------------------------------------
// Experiment runner

struct FoldResult {
  double accuracy = 0.0;
  double selected_lambda = 0.0;
  std::vector<std::pair<double, double>> lambda_scores;
  std::string dataset_fingerprint;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  nlohmann::json config_echo;
};

struct TrainedFold {
  FeatureSpace space;
  LinearModel model;
};

struct ExperimentRun {
  ExperimentReport report;
  std::vector<TrainedFold> trained;
};

namespace detail {

inline std::vector<int> labels_for(const std::vector<Ending>& endings,
                                   Label positive) {
  std::vector<int> y;
  y.reserve(endings.size());
  for (const auto& e : endings) y.push_back(e.label == positive ? 1 : 0);
  return y;
}

inline std::vector<StyleVector> vectorize(
    const FeatureSpace& space, const std::vector<TaggedSentence>& tagged) {
  std::vector<StyleVector> X;
  X.reserve(tagged.size());
  for (const auto& ts : tagged) X.push_back(space.transform(ts));
  return X;
}

}  // namespace detail

// Per fold: fit features on train, grid-search lambda on dev, report test
// accuracy of the individual-ending classifier.
inline ExperimentRun run_experiment(Experiment experiment,
                                    const std::vector<DatasetSplit>& folds,
                                    const FeatureConfig& feature_config,
                                    const std::vector<double>& grid,
                                    TagCache& tags, TrainOptions options = {}) {
  const auto [positive, negative] = experiment_classes(experiment);
  (void)negative;
  ExperimentRun run;
  run.report.experiment = to_string(experiment);
  double sum = 0.0;
  for (const auto& fold : folds) {
    FeatureSpace space(feature_config);
    const auto train_tagged = tags.tag_all(fold.train);
    space.fit(train_tagged);
    const auto train_X = detail::vectorize(space, train_tagged);
    const auto dev_X = detail::vectorize(space, tags.tag_all(fold.dev));
    const auto test_X = detail::vectorize(space, tags.tag_all(fold.test));
    const auto train_y = detail::labels_for(fold.train, positive);
    const auto dev_y = detail::labels_for(fold.dev, positive);
    const auto test_y = detail::labels_for(fold.test, positive);

    GridSearchResult search = grid_search(train_X, train_y, dev_X, dev_y,
                                          grid, space.size(), options);
    search.selected_model.space_fingerprint = space.fingerprint();

    FoldResult result;
    result.accuracy = accuracy(search.selected_model, test_X, test_y);
    result.selected_lambda = search.selected_lambda;
    result.lambda_scores = search.scores;
    result.dataset_fingerprint = dataset_fingerprint(fold);
    sum += result.accuracy;
    run.report.folds.push_back(std::move(result));
    run.trained.push_back({std::move(space), std::move(search.selected_model)});
  }
  run.report.mean_accuracy = sum / static_cast<double>(folds.size());
  run.report.config_echo =
      nlohmann::json{{"experiment", run.report.experiment},
                     {"grid", grid},
                     {"features", FeatureSpace::config_to_json(feature_config)},
                     {"folds", folds.size()}};
  return run;
}

// ---------------------------------------------------------------------------
// Story cloze decision rule

struct ClozeDecision {
  std::string instance_id;
  Choice chosen = Choice::A;
  double posterior_a = 0.0;
  double posterior_b = 0.0;
  std::string rule_path;  // "labels-differ" or "flipped"
};

// The two-step rule on a posterior pair: keep the labels when they differ;
// otherwise reverse the label whose posterior is lower. Ties go to A.
inline ClozeDecision decide_pair(double posterior_a, double posterior_b) {
  ClozeDecision d;
  d.posterior_a = posterior_a;
  d.posterior_b = posterior_b;
  const bool right_a = posterior_a >= 0.5;
  const bool right_b = posterior_b >= 0.5;
  if (right_a != right_b) {
    d.rule_path = "labels-differ";
    d.chosen = right_a ? Choice::A : Choice::B;
    return d;
  }
  d.rule_path = "flipped";
  if (right_a) {
    // Both labeled right: the lower-posterior label flips to wrong.
    d.chosen = posterior_b > posterior_a ? Choice::B : Choice::A;
  } else {
    // Both labeled wrong: the lower-posterior wrong label flips to right,
    // and the posterior of "wrong" is 1 - P(right).
    d.chosen = (1.0 - posterior_b) < (1.0 - posterior_a) ? Choice::B
                                                         : Choice::A;
  }
  return d;
}

inline ClozeDecision cloze_decide(const LinearModel& model,
                                  const FeatureSpace& space, TagCache& tags,
                                  const ClozeInstance& instance) {
  const double pa = predict_proba(model, space.transform(tags.get(instance.ending_a)));
  const double pb = predict_proba(model, space.transform(tags.get(instance.ending_b)));
  ClozeDecision d = decide_pair(pa, pb);
  d.instance_id = instance.id;
  return d;
}

template <typename Decider>
double cloze_eval(Decider&& decide,
                  const std::vector<ClozeInstance>& instances) {
  if (instances.empty()) {
    throw InsufficientDataError("cloze evaluation on an empty set");
  }
  std::size_t correct = 0;
  for (const auto& inst : instances) {
    if (decide(inst) == inst.gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

// ---------------------------------------------------------------------------
// Language-model decision rule

enum class LmClozeMode { ConditionalOnly, Pmi };

inline Choice lm_cloze_decide(const SequenceScorer& lm, const Vocabulary& vocab,
                              const ClozeInstance& instance, LmClozeMode mode) {
  const std::vector<int> context = sentences_stream(vocab, instance.context);
  const std::vector<int> a = sentence_stream(vocab, instance.ending_a);
  const std::vector<int> b = sentence_stream(vocab, instance.ending_b);
  double score_a;
  double score_b;
  if (mode == LmClozeMode::ConditionalOnly) {
    score_a = lm.seq_logprob(a, context);
    score_b = lm.seq_logprob(b, context);
  } else {
    score_a = lm.pmi(context, a).log_ratio;
    score_b = lm.pmi(context, b).log_ratio;
  }
  return score_b > score_a ? Choice::B : Choice::A;
}

// ---------------------------------------------------------------------------
// Combined style + language-model classifier

struct CombinedResult {
  double accuracy = 0.0;
  double selected_lambda = 0.0;
  std::vector<std::pair<double, double>> lambda_scores;
  std::size_t style_dim = 0;
  FeatureSpace space;
  LinearModel model;
  // Min/max over the training part for each appended log-space feature:
  // conditional, marginal, ratio.
  double lm_min[3] = {0, 0, 0};
  double lm_max[3] = {0, 0, 0};
};

namespace detail {

inline std::array<double, 3> lm_raw_features(const SequenceScorer& lm,
                                             const Vocabulary& vocab,
                                             const std::vector<int>& context,
                                             const std::string& ending_text) {
  const std::vector<int> ending = sentence_stream(vocab, ending_text);
  const PmiScore score = lm.pmi(context, ending);
  return {score.log_conditional, score.log_marginal, score.log_ratio};
}

inline void append_lm_features(StyleVector& vec, std::size_t style_dim,
                               const std::array<double, 3>& raw,
                               const double mn[3], const double mx[3]) {
  for (std::size_t j = 0; j < 3; ++j) {
    const double denom = mx[j] - mn[j];
    const double scaled =
        denom > 0.0 ? (raw[j] - mn[j]) / denom : raw[j] - mn[j];
    vec.entries.emplace_back(static_cast<int>(style_dim + j),
                             std::clamp(scaled, 0.0, 1.0));
  }
}

}  // namespace detail

// Extends every style vector with the three log-space LM scores (conditional,
// marginal, ratio), min-max scaled on the training part, then retrains with
// grid search and evaluates with the pairwise decision rule.
inline CombinedResult combined_train_eval(
    const DatasetSplit& split, const std::vector<ClozeInstance>& test_instances,
    const std::vector<ClozeInstance>& train_instances, const SequenceScorer& lm,
    const Vocabulary& vocab, const FeatureConfig& feature_config,
    const std::vector<double>& grid, TagCache& tags,
    TrainOptions options = {}) {
  std::unordered_map<std::string, const ClozeInstance*> by_id;
  for (const auto& inst : train_instances) by_id[inst.id] = &inst;
  std::unordered_map<std::string, std::vector<int>> context_streams;
  auto context_of = [&](const std::string& source_id) -> const std::vector<int>& {
    const auto it = context_streams.find(source_id);
    if (it != context_streams.end()) return it->second;
    const auto inst = by_id.find(source_id);
    if (inst == by_id.end()) {
      throw InvalidInputError("no cloze instance for ending source " +
                              source_id);
    }
    return context_streams
        .emplace(source_id, sentences_stream(vocab, inst->second->context))
        .first->second;
  };

  CombinedResult result;
  FeatureSpace space(feature_config);
  const auto train_tagged = tags.tag_all(split.train);
  space.fit(train_tagged);
  result.style_dim = space.size();

  auto build = [&](const std::vector<Ending>& endings,
                   const std::vector<TaggedSentence>& tagged,
                   bool collect_minmax) {
    std::vector<StyleVector> X;
    std::vector<std::array<double, 3>> raws;
    X.reserve(endings.size());
    raws.reserve(endings.size());
    for (std::size_t i = 0; i < endings.size(); ++i) {
      X.push_back(space.transform(tagged[i]));
      raws.push_back(detail::lm_raw_features(
          lm, vocab, context_of(endings[i].source_id), endings[i].text));
    }
    if (collect_minmax) {
      for (std::size_t j = 0; j < 3; ++j) {
        result.lm_min[j] = raws[0][j];
        result.lm_max[j] = raws[0][j];
      }
      for (const auto& r : raws) {
        for (std::size_t j = 0; j < 3; ++j) {
          result.lm_min[j] = std::min(result.lm_min[j], r[j]);
          result.lm_max[j] = std::max(result.lm_max[j], r[j]);
        }
      }
    }
    for (std::size_t i = 0; i < X.size(); ++i) {
      detail::append_lm_features(X[i], result.style_dim, raws[i],
                                 result.lm_min, result.lm_max);
    }
    return X;
  };

  const auto train_X = build(split.train, train_tagged, true);
  const auto dev_X = build(split.dev, tags.tag_all(split.dev), false);
  const auto train_y = detail::labels_for(split.train, Label::Right);
  const auto dev_y = detail::labels_for(split.dev, Label::Right);

  GridSearchResult search = grid_search(train_X, train_y, dev_X, dev_y, grid,
                                        result.style_dim + 3, options);
  result.selected_lambda = search.selected_lambda;
  result.lambda_scores = search.scores;
  result.model = std::move(search.selected_model);
  result.model.space_fingerprint = space.fingerprint();

  auto vec_for = [&](const ClozeInstance& inst, const std::string& ending) {
    StyleVector x = space.transform(tags.get(ending));
    detail::append_lm_features(
        x, result.style_dim,
        detail::lm_raw_features(lm, vocab,
                                sentences_stream(vocab, inst.context), ending),
        result.lm_min, result.lm_max);
    return x;
  };
  result.accuracy = cloze_eval(
      [&](const ClozeInstance& inst) {
        const double pa =
            predict_proba(result.model, vec_for(inst, inst.ending_a));
        const double pb =
            predict_proba(result.model, vec_for(inst, inst.ending_b));
        return decide_pair(pa, pb).chosen;
      },
      test_instances);
  result.space = std::move(space);
  return result;
}

// ---------------------------------------------------------------------------
// Feature-family ablation (Experiment 1 restricted to one family)

inline std::map<std::string, FoldResult> ablation(
    const std::set<std::string>& families, const DatasetSplit& split,
    const FeatureConfig& base, const std::vector<double>& grid, TagCache& tags,
    TrainOptions options = {}) {
  std::map<std::string, FoldResult> results;
  for (const auto& family : families) {
    FeatureConfig fc = base;
    if (family == "word") {
      fc.use_word = true;
      fc.use_char = false;
      fc.use_length = false;
    } else if (family == "char") {
      fc.use_word = false;
      fc.use_char = true;
      fc.use_length = false;
    } else if (family == "full") {
      fc = base;
    } else {
      throw InvalidInputError("unknown ablation family: " + family);
    }
    const ExperimentRun run = run_experiment(Experiment::RightVsWrong, {split},
                                             fc, grid, tags, options);
    results[family] = run.report.folds.front();
  }
  return results;
}

// ---------------------------------------------------------------------------
// Surface statistics

struct ClassStats {
  double mean_length = 0.0;                 // tokens per ending, START excluded
  std::map<std::string, double> pos_percent;   // sums to 100 per class
  std::map<std::string, double> word_percent;  // sums to 100 per class
};

struct SurfaceStats {
  std::map<std::string, ClassStats> classes;
};

inline SurfaceStats surface_stats(
    const std::vector<std::pair<std::string, std::vector<Ending>>>& groups,
    TagCache& tags) {
  SurfaceStats stats;
  for (const auto& [name, endings] : groups) {
    if (endings.empty()) {
      throw InsufficientDataError("surface stats on empty group " + name);
    }
    ClassStats cs;
    std::map<std::string, long> tag_counts;
    std::map<std::string, long> word_counts;
    long total_tokens = 0;
    for (const auto& e : endings) {
      const TaggedSentence& ts = tags.get(e.text);
      for (std::size_t i = 1; i < ts.sentence.tokens.size(); ++i) {
        ++word_counts[ts.sentence.tokens[i]];
        ++tag_counts[ts.tags[i]];
        ++total_tokens;
      }
    }
    cs.mean_length = static_cast<double>(total_tokens) /
                     static_cast<double>(endings.size());
    for (const auto& [tag, count] : tag_counts) {
      cs.pos_percent[tag] =
          100.0 * static_cast<double>(count) / static_cast<double>(total_tokens);
    }
    for (const auto& [word, count] : word_counts) {
      cs.word_percent[word] =
          100.0 * static_cast<double>(count) / static_cast<double>(total_tokens);
    }
    stats.classes[name] = std::move(cs);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Generic paired-choice evaluation (premise + two alternatives)

struct PairedChoiceInstance {
  std::string id;
  std::string premise;
  std::string alt1;
  std::string alt2;
  Choice gold = Choice::A;
};

inline std::vector<PairedChoiceInstance> load_paired_choice(
    const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) {
    throw MalformedRowError("paired-choice file " + path + ": missing header");
  }
  detail::require_columns(rows[0], 5, 1, "paired choice");
  std::vector<PairedChoiceInstance> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    detail::require_columns(row, 5, r + 1, "paired choice");
    PairedChoiceInstance inst;
    inst.id = row[0];
    inst.premise = row[1];
    inst.alt1 = row[2];
    inst.alt2 = row[3];
    if (row[4] == "1") {
      inst.gold = Choice::A;
    } else if (row[4] == "2") {
      inst.gold = Choice::B;
    } else {
      throw MalformedRowError("paired choice: row " + std::to_string(r + 1) +
                              " has gold '" + row[4] + "', expected 1 or 2");
    }
    if (inst.alt1.empty() || inst.alt2.empty()) {
      throw MalformedRowError("paired choice: row " + std::to_string(r + 1) +
                              " has an empty alternative");
    }
    out.push_back(std::move(inst));
  }
  return out;
}

// The premise is ignored by design: alternatives are treated as an ending
// pair under the same decision rule.
inline double paired_choice_eval(
    const LinearModel& model, const FeatureSpace& space, TagCache& tags,
    const std::vector<PairedChoiceInstance>& instances) {
  if (instances.empty()) {
    throw InsufficientDataError("paired-choice evaluation on an empty set");
  }
  std::size_t correct = 0;
  for (const auto& inst : instances) {
    const double pa = predict_proba(model, space.transform(tags.get(inst.alt1)));
    const double pb = predict_proba(model, space.transform(tags.get(inst.alt2)));
    if (decide_pair(pa, pb).chosen == inst.gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

}  // namespace endstyle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "endstyle/csv.hpp"
#include "endstyle/errors.hpp"
#include "endstyle/fingerprint.hpp"
#include "endstyle/rng.hpp"

namespace endstyle {

// ---------------------------------------------------------------------------
// Domain types

struct Story {
  std::string id;
  std::string title;               // may be empty
  std::vector<std::string> sentences;  // exactly 5, non-empty
};

enum class Choice { A, B };

struct ClozeInstance {
  std::string id;
  std::vector<std::string> context;  // exactly 4 sentences
  std::string ending_a;
  std::string ending_b;
  Choice gold = Choice::A;
};

enum class Label { Original, Right, Wrong };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::Original: return "original";
    case Label::Right: return "right";
    case Label::Wrong: return "wrong";
  }
  return "?";
}

struct Ending {
  std::string text;       // raw surface string, non-empty
  Label label = Label::Right;
  std::string source_id;  // story id or cloze instance id
};

struct DatasetSplit {
  std::vector<Ending> train;
  std::vector<Ending> dev;
  std::vector<Ending> test;
  std::uint64_t seed = 0;
};

enum class Experiment { RightVsWrong, OriginalVsRight, OriginalVsWrong };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::RightVsWrong: return "right-vs-wrong";
    case Experiment::OriginalVsRight: return "original-vs-right";
    case Experiment::OriginalVsWrong: return "original-vs-wrong";
  }
  return "?";
}

// Positive / negative class labels for each experiment.
inline std::pair<Label, Label> experiment_classes(Experiment e) {
  switch (e) {
    case Experiment::RightVsWrong: return {Label::Right, Label::Wrong};
    case Experiment::OriginalVsRight: return {Label::Original, Label::Right};
    case Experiment::OriginalVsWrong: return {Label::Original, Label::Wrong};
  }
  return {Label::Right, Label::Wrong};
}

// ---------------------------------------------------------------------------
// File schemas

inline constexpr const char* kRocSchema =
    "storyid,storytitle,sentence1,sentence2,sentence3,sentence4,sentence5";
inline constexpr const char* kClozeSchema =
    "InputStoryid,InputSentence1,InputSentence2,InputSentence3,"
    "InputSentence4,RandomFifthSentenceQuiz1,RandomFifthSentenceQuiz2,"
    "AnswerRightEnding";
inline constexpr const char* kPairedChoiceSchema = "id,premise,alt1,alt2,gold";

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline void require_columns(const std::vector<std::string>& row,
                            std::size_t expected, std::size_t row_no,
                            const char* what) {
  if (row.size() != expected) {
    throw MalformedRowError(std::string(what) + ": row " +
                            std::to_string(row_no) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(expected));
  }
}

}  // namespace detail

inline std::vector<Story> load_roc_stories(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) {
    throw MalformedRowError("ROC stories file " + path + ": missing header");
  }
  detail::require_columns(rows[0], 7, 1, "ROC stories");
  std::vector<Story> stories;
  stories.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    detail::require_columns(row, 7, r + 1, "ROC stories");
    Story s;
    s.id = row[0];
    s.title = row[1];
    for (int k = 0; k < 5; ++k) {
      if (row[2 + static_cast<std::size_t>(k)].empty()) {
        throw MalformedRowError("ROC stories: row " + std::to_string(r + 1) +
                                " has an empty sentence " +
                                std::to_string(k + 1));
      }
      s.sentences.push_back(row[2 + static_cast<std::size_t>(k)]);
    }
    stories.push_back(std::move(s));
  }
  return stories;
}

inline std::vector<ClozeInstance> load_cloze_set(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) {
    throw MalformedRowError("cloze file " + path + ": missing header");
  }
  detail::require_columns(rows[0], 8, 1, "cloze set");
  std::vector<ClozeInstance> instances;
  instances.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    detail::require_columns(row, 8, r + 1, "cloze set");
    ClozeInstance inst;
    inst.id = row[0];
    inst.context.assign(row.begin() + 1, row.begin() + 5);
    inst.ending_a = row[5];
    inst.ending_b = row[6];
    if (inst.ending_a.empty() || inst.ending_b.empty()) {
      throw MalformedRowError("cloze set: row " + std::to_string(r + 1) +
                              " has an empty ending");
    }
    if (row[7] == "1") {
      inst.gold = Choice::A;
    } else if (row[7] == "2") {
      inst.gold = Choice::B;
    } else {
      throw MalformedRowError("cloze set: row " + std::to_string(r + 1) +
                              " has gold answer '" + row[7] +
                              "', expected 1 or 2");
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

// ---------------------------------------------------------------------------
// Endings and splits

inline const std::string& right_ending(const ClozeInstance& inst) {
  return inst.gold == Choice::A ? inst.ending_a : inst.ending_b;
}
inline const std::string& wrong_ending(const ClozeInstance& inst) {
  return inst.gold == Choice::A ? inst.ending_b : inst.ending_a;
}

// One Right and one Wrong ending per instance, in file order.
inline std::vector<Ending> cloze_endings(
    const std::vector<ClozeInstance>& instances) {
  std::vector<Ending> out;
  out.reserve(instances.size() * 2);
  for (const auto& inst : instances) {
    out.push_back({right_ending(inst), Label::Right, inst.id});
    out.push_back({wrong_ending(inst), Label::Wrong, inst.id});
  }
  return out;
}

// Instance-level holdout: both endings of an instance land in the same part,
// so an author's paired right/wrong endings never straddle the split.
// dev gets ceil(n * dev_fraction) instances (capped so train stays non-empty).
inline DatasetSplit split_cloze_endings(
    const std::vector<ClozeInstance>& instances, double dev_fraction,
    std::uint64_t seed) {
  if (instances.size() < 2) {
    throw InsufficientDataError(
        "need at least 2 cloze instances to split, got " +
        std::to_string(instances.size()));
  }
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw InvalidInputError("dev_fraction must be in (0,1)");
  }
  const std::size_t n = instances.size();
  std::size_t dev_count = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * dev_fraction));
  dev_count = std::min(dev_count, n - 1);
  dev_count = std::max<std::size_t>(dev_count, 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  shuffle(order, rng);

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const ClozeInstance& inst = instances[order[i]];
    auto& part = i < dev_count ? split.dev : split.train;
    part.push_back({right_ending(inst), Label::Right, inst.id});
    part.push_back({wrong_ending(inst), Label::Wrong, inst.id});
  }
  return split;
}

namespace detail {

inline std::vector<Ending> keep_label(const std::vector<Ending>& part,
                                      Label label) {
  std::vector<Ending> out;
  for (const auto& e : part) {
    if (e.label == label) out.push_back(e);
  }
  return out;
}

inline std::uint64_t fold_seed(std::uint64_t resample_seed, std::size_t fold) {
  return fnv1a64("fold-" + std::to_string(fold),
                 resample_seed ^ 0x9e3779b97f4a7c15ull);
}

}  // namespace detail

inline constexpr std::size_t kResampleFolds = 5;

// Experiment 1 passes the cloze split through unchanged. Experiments 2 and 3
// build five folds, each pairing the Right (resp. Wrong) endings with an
// equal-size uniform sample of final ROC sentences labeled Original.
// Samples are drawn without replacement and are disjoint across folds when
// the corpus is large enough.
inline std::vector<DatasetSplit> build_experiment_dataset(
    Experiment experiment, const std::vector<Story>& roc,
    const DatasetSplit& cloze_split, std::uint64_t resample_seed) {
  if (experiment == Experiment::RightVsWrong) {
    return {cloze_split};
  }
  const Label keep = experiment == Experiment::OriginalVsRight ? Label::Right
                                                               : Label::Wrong;
  const std::vector<Ending> tr = detail::keep_label(cloze_split.train, keep);
  const std::vector<Ending> dv = detail::keep_label(cloze_split.dev, keep);
  const std::vector<Ending> te = detail::keep_label(cloze_split.test, keep);
  const std::size_t need = tr.size() + dv.size() + te.size();
  if (roc.empty() || need == 0) {
    throw InsufficientDataError("empty ROC corpus or cloze split");
  }
  if (roc.size() < need) {
    throw InsufficientDataError(
        "ROC corpus has " + std::to_string(roc.size()) +
        " stories; each fold needs " + std::to_string(need));
  }
  {
    std::unordered_set<std::string> roc_ids;
    roc_ids.reserve(roc.size());
    for (const auto& s : roc) roc_ids.insert(s.id);
    for (const auto* part : {&tr, &dv, &te}) {
      for (const auto& e : *part) {
        if (roc_ids.count(e.source_id)) {
          throw InvalidInputError(
              "ROC corpus overlaps cloze instances at id " + e.source_id);
        }
      }
    }
  }

  // Disjoint folds when the corpus permits, independent draws otherwise.
  std::vector<std::vector<std::size_t>> fold_samples(kResampleFolds);
  if (roc.size() >= kResampleFolds * need) {
    std::mt19937_64 rng(resample_seed);
    const auto all = sample_indices(roc.size(), kResampleFolds * need, rng);
    for (std::size_t f = 0; f < kResampleFolds; ++f) {
      fold_samples[f].assign(all.begin() + static_cast<std::ptrdiff_t>(f * need),
                             all.begin() +
                                 static_cast<std::ptrdiff_t>((f + 1) * need));
    }
  } else {
    for (std::size_t f = 0; f < kResampleFolds; ++f) {
      std::mt19937_64 rng(detail::fold_seed(resample_seed, f));
      fold_samples[f] = sample_indices(roc.size(), need, rng);
    }
  }

  std::vector<DatasetSplit> folds;
  folds.reserve(kResampleFolds);
  for (std::size_t f = 0; f < kResampleFolds; ++f) {
    DatasetSplit fold;
    fold.seed = detail::fold_seed(resample_seed, f);
    fold.train = tr;
    fold.dev = dv;
    fold.test = te;
    std::size_t cursor = 0;
    auto add_originals = [&](std::vector<Ending>& part, std::size_t count) {
      for (std::size_t i = 0; i < count; ++i) {
        const Story& s = roc[fold_samples[f][cursor++]];
        part.push_back({s.sentences[4], Label::Original, s.id});
      }
    };
    add_originals(fold.train, tr.size());
    add_originals(fold.dev, dv.size());
    add_originals(fold.test, te.size());
    folds.push_back(std::move(fold));
  }
  return folds;
}

// ---------------------------------------------------------------------------
// Canonical serialization (drives fingerprints and reproducibility checks)

inline std::string serialize(const std::vector<Ending>& part) {
  std::string out;
  for (const auto& e : part) {
    out += e.source_id;
    out += '\x1f';
    out += to_string(e.label);
    out += '\x1f';
    out += e.text;
    out += '\n';
  }
  return out;
}

inline std::string serialize(const DatasetSplit& split) {
  return "train\n" + serialize(split.train) + "dev\n" + serialize(split.dev) +
         "test\n" + serialize(split.test);
}

inline std::string dataset_fingerprint(const DatasetSplit& split) {
  return fingerprint_hex(serialize(split));
}

}  // namespace endstyle

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "endstyle/errors.hpp"
#include "endstyle/rng.hpp"
#include "endstyle/tokenize.hpp"

namespace endstyle {

struct TaggedSentence {
  TokenizedSentence sentence;
  std::vector<std::string> tags;  // aligned to tokens; tags[0] == kStartTag
};

using TaggedCorpus =
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>;

// Averaged-perceptron POS tagger. Greedy left-to-right decoding over
// contextual features, an unambiguous-word lexicon for frequent words, and
// weight averaging across all updates. Deterministic for a fixed seed.
class Tagger {
 public:
  bool trained() const { return trained_; }
  const std::vector<std::string>& tagset() const { return tags_; }

  // Tags a normalized sentence; START receives the sentinel tag.
  TaggedSentence tag(const TokenizedSentence& sentence) const {
    if (!trained_) {
      throw InvalidStateError("tagger has not been trained");
    }
    if (sentence.tokens.empty() || sentence.tokens.front() != kStart) {
      throw InvalidInputError("tag: sentence is not normalized (no START)");
    }
    TaggedSentence out;
    out.sentence = sentence;
    out.tags.push_back(kStartTag);
    const std::vector<std::string> body(sentence.tokens.begin() + 1,
                                        sentence.tokens.end());
    for (auto& t : tag_body(body)) out.tags.push_back(std::move(t));
    return out;
  }

  // Tags a raw token vector (no START symbol).
  std::vector<std::string> tag_body(
      const std::vector<std::string>& tokens) const {
    if (!trained_) {
      throw InvalidStateError("tagger has not been trained");
    }
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    std::string prev = "-B1-";
    std::string prev2 = "-B2-";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      int tag_id;
      const auto lex = lexicon_.find(tokens[i]);
      if (lex != lexicon_.end()) {
        tag_id = lex->second;
      } else {
        tag_id = predict(features(tokens, i, prev, prev2));
      }
      prev2 = std::move(prev);
      prev = tags_[static_cast<std::size_t>(tag_id)];
      tags.push_back(prev);
    }
    return tags;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "endstyle-tagger v1\n";
    out << "epochs " << epochs_ << " seed " << seed_ << "\n";
    out << "tags " << tags_.size() << "\n";
    for (const auto& t : tags_) out << t << "\n";
    std::map<std::string, int> lex_sorted(lexicon_.begin(), lexicon_.end());
    out << "lexicon " << lex_sorted.size() << "\n";
    for (const auto& [word, tag] : lex_sorted) {
      out << word << "\t" << tags_[static_cast<std::size_t>(tag)] << "\n";
    }
    std::size_t triples = 0;
    std::map<std::string, const std::vector<double>*> sorted;
    for (const auto& [feat, w] : weights_) sorted[feat] = &w;
    for (const auto& [feat, w] : sorted) {
      for (double v : *w) {
        if (v != 0.0) ++triples;
      }
    }
    out << "weights " << triples << "\n";
    out.precision(17);
    for (const auto& [feat, w] : sorted) {
      for (std::size_t t = 0; t < w->size(); ++t) {
        if ((*w)[t] != 0.0) {
          out << feat << "\t" << tags_[t] << "\t" << (*w)[t] << "\n";
        }
      }
    }
    if (!out) throw IoError("write failure on " + path);
  }

  static Tagger load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != "endstyle-tagger v1") {
      throw InvalidInputError("unrecognized tagger model header in " + path);
    }
    Tagger t;
    std::string word;
    std::size_t n = 0;
    in >> word >> t.epochs_ >> word >> t.seed_;
    in >> word >> n;
    std::getline(in, line);
    for (std::size_t i = 0; i < n; ++i) {
      std::getline(in, line);
      t.tags_.push_back(line);
      t.tag_ids_[line] = static_cast<int>(i);
    }
    in >> word >> n;
    std::getline(in, line);
    for (std::size_t i = 0; i < n; ++i) {
      std::getline(in, line);
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw InvalidInputError("bad lexicon line in " + path);
      }
      t.lexicon_[line.substr(0, tab)] = t.tag_id(line.substr(tab + 1));
    }
    in >> word >> n;
    std::getline(in, line);
    for (std::size_t i = 0; i < n; ++i) {
      std::getline(in, line);
      const auto tab1 = line.find('\t');
      const auto tab2 = line.find('\t', tab1 + 1);
      if (tab1 == std::string::npos || tab2 == std::string::npos) {
        throw InvalidInputError("bad weight line in " + path);
      }
      auto& w = t.weights_[line.substr(0, tab1)];
      if (w.empty()) w.assign(t.tags_.size(), 0.0);
      const int tag = t.tag_id(line.substr(tab1 + 1, tab2 - tab1 - 1));
      w[static_cast<std::size_t>(tag)] = std::stod(line.substr(tab2 + 1));
    }
    if (!in) throw IoError("truncated tagger model " + path);
    t.trained_ = true;
    return t;
  }

  friend Tagger train_tagger(const TaggedCorpus& corpus, int epochs,
                             std::uint64_t seed);

 private:
  int tag_id(const std::string& tag) const {
    const auto it = tag_ids_.find(tag);
    if (it == tag_ids_.end()) {
      throw InvalidInputError("unknown tag " + tag);
    }
    return it->second;
  }

  static std::string normalize_word(const std::string& w) {
    if (w.find('-') != std::string::npos && w.front() != '-') {
      return "!HYPHEN";
    }
    bool all_digits = !w.empty();
    for (char c : w) {
      if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
    }
    if (all_digits) return w.size() == 4 ? "!YEAR" : "!DIGITS";
    std::string out = w;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return out;
  }

  static std::string suffix3(const std::string& w) {
    return w.size() <= 3 ? w : w.substr(w.size() - 3);
  }

  // Contextual feature template; order is fixed so score sums are
  // deterministic.
  static std::vector<std::string> features(
      const std::vector<std::string>& tokens, std::size_t i,
      const std::string& prev, const std::string& prev2) {
    const std::string w = normalize_word(tokens[i]);
    const std::string wm1 =
        i >= 1 ? normalize_word(tokens[i - 1]) : std::string("-B1-");
    const std::string wm2 =
        i >= 2 ? normalize_word(tokens[i - 2]) : std::string("-B2-");
    const std::string wp1 = i + 1 < tokens.size()
                                ? normalize_word(tokens[i + 1])
                                : std::string("-E1-");
    const std::string wp2 = i + 2 < tokens.size()
                                ? normalize_word(tokens[i + 2])
                                : std::string("-E2-");
    std::vector<std::string> f;
    f.reserve(14);
    f.push_back("bias");
    f.push_back("sfx " + suffix3(w));
    f.push_back("pre1 " + w.substr(0, 1));
    f.push_back("t-1 " + prev);
    f.push_back("t-2 " + prev2);
    f.push_back("t-1,2 " + prev + " " + prev2);
    f.push_back("w " + w);
    f.push_back("t-1 w " + prev + " " + w);
    f.push_back("w-1 " + wm1);
    f.push_back("sfx-1 " + suffix3(wm1));
    f.push_back("w-2 " + wm2);
    f.push_back("w+1 " + wp1);
    f.push_back("sfx+1 " + suffix3(wp1));
    f.push_back("w+2 " + wp2);
    return f;
  }

  int predict(const std::vector<std::string>& feats) const {
    std::vector<double> scores(tags_.size(), 0.0);
    for (const auto& f : feats) {
      const auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      for (std::size_t t = 0; t < scores.size(); ++t) {
        scores[t] += it->second[t];
      }
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t) {
      if (scores[t] > scores[best]) best = t;
    }
    return static_cast<int>(best);
  }

  bool trained_ = false;
  int epochs_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> tag_ids_;
  std::unordered_map<std::string, int> lexicon_;
  std::unordered_map<std::string, std::vector<double>> weights_;
};

namespace detail {

// Accumulators for perceptron weight averaging.
struct AveragedCell {
  double weight = 0.0;
  double total = 0.0;
  std::uint64_t stamp = 0;
};

}  // namespace detail

// Trains with per-epoch shuffling driven by seed; returns averaged weights.
// Words seen >= 20 times with a single tag in >= 97% of occurrences go to
// the lexicon and bypass the perceptron entirely.
inline Tagger train_tagger(const TaggedCorpus& corpus, int epochs,
                           std::uint64_t seed) {
  if (corpus.empty()) {
    throw InsufficientDataError("tagger training corpus is empty");
  }
  if (epochs < 1) {
    throw InvalidInputError("tagger training needs at least one epoch");
  }
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].first.size() != corpus[s].second.size()) {
      throw InvalidInputError("tagged corpus sentence " + std::to_string(s) +
                              ": token/tag length mismatch");
    }
  }

  Tagger tagger;
  tagger.epochs_ = epochs;
  tagger.seed_ = seed;

  {
    std::set<std::string> tagset;
    for (const auto& [tokens, tags] : corpus) {
      for (const auto& t : tags) tagset.insert(t);
    }
    tagger.tags_.assign(tagset.begin(), tagset.end());
    for (std::size_t i = 0; i < tagger.tags_.size(); ++i) {
      tagger.tag_ids_[tagger.tags_[i]] = static_cast<int>(i);
    }
  }

  // Unambiguous-word lexicon.
  {
    std::unordered_map<std::string, std::vector<int>> tag_counts;
    for (const auto& [tokens, tags] : corpus) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto& counts = tag_counts[tokens[i]];
        if (counts.empty()) counts.assign(tagger.tags_.size(), 0);
        ++counts[static_cast<std::size_t>(tagger.tag_id(tags[i]))];
      }
    }
    for (const auto& [word, counts] : tag_counts) {
      int total = 0;
      int best = 0;
      for (std::size_t t = 0; t < counts.size(); ++t) {
        total += counts[t];
        if (counts[t] > counts[static_cast<std::size_t>(best)]) {
          best = static_cast<int>(t);
        }
      }
      if (total >= 20 &&
          counts[static_cast<std::size_t>(best)] >= 0.97 * total) {
        tagger.lexicon_[word] = best;
      }
    }
  }

  std::unordered_map<std::string, std::vector<detail::AveragedCell>> cells;
  std::uint64_t now = 0;

  auto update = [&](const std::vector<std::string>& feats, int truth,
                    int guess) {
    ++now;
    if (truth == guess) return;
    for (const auto& f : feats) {
      auto& row = cells[f];
      if (row.empty()) row.resize(tagger.tags_.size());
      for (const auto& [tag, delta] :
           {std::pair<int, double>{truth, 1.0}, {guess, -1.0}}) {
        auto& cell = row[static_cast<std::size_t>(tag)];
        cell.total += static_cast<double>(now - cell.stamp) * cell.weight;
        cell.stamp = now;
        cell.weight += delta;
      }
    }
  };

  auto raw_predict = [&](const std::vector<std::string>& feats) {
    std::vector<double> scores(tagger.tags_.size(), 0.0);
    for (const auto& f : feats) {
      const auto it = cells.find(f);
      if (it == cells.end()) continue;
      for (std::size_t t = 0; t < scores.size(); ++t) {
        scores[t] += it->second[t].weight;
      }
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t) {
      if (scores[t] > scores[best]) best = t;
    }
    return static_cast<int>(best);
  };

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle(order, rng);
    for (const std::size_t s : order) {
      const auto& [tokens, tags] = corpus[s];
      std::string prev = "-B1-";
      std::string prev2 = "-B2-";
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const int truth = tagger.tag_id(tags[i]);
        int guess;
        const auto lex = tagger.lexicon_.find(tokens[i]);
        if (lex != tagger.lexicon_.end()) {
          guess = lex->second;
        } else {
          const auto feats = Tagger::features(tokens, i, prev, prev2);
          guess = raw_predict(feats);
          update(feats, truth, guess);
        }
        prev2 = std::move(prev);
        prev = tagger.tags_[static_cast<std::size_t>(guess)];
      }
    }
  }

  for (auto& [feat, row] : cells) {
    std::vector<double> averaged(tagger.tags_.size(), 0.0);
    bool any = false;
    for (std::size_t t = 0; t < row.size(); ++t) {
      auto& cell = row[t];
      cell.total += static_cast<double>(now - cell.stamp) * cell.weight;
      if (cell.total != 0.0) {
        averaged[t] = cell.total / static_cast<double>(now);
        any = true;
      }
    }
    if (any) tagger.weights_[feat] = std::move(averaged);
  }

  tagger.trained_ = true;
  return tagger;
}

// ---------------------------------------------------------------------------
// Tagged-file formats: one `token<TAB>TAG` per line, blank line between
// sentences. Used for the bundled training fixture and the pre-tagged
// escape hatch that bypasses the tagger.

inline TaggedCorpus load_tagged_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  TaggedCorpus corpus;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!tokens.empty()) {
      corpus.emplace_back(std::move(tokens), std::move(tags));
      tokens.clear();
      tags.clear();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw MalformedRowError(path + ": line " + std::to_string(line_no) +
                              " is not token<TAB>TAG");
    }
    tokens.push_back(line.substr(0, tab));
    tags.push_back(line.substr(tab + 1));
  }
  flush();
  return corpus;
}

// Pre-tagged sentences, normalized (START + sentinel prepended). The raw
// string is reconstructed by joining tokens with spaces.
inline std::vector<TaggedSentence> load_pretagged(const std::string& path) {
  std::vector<TaggedSentence> out;
  for (auto& [tokens, tags] : load_tagged_corpus(path)) {
    TaggedSentence ts;
    const std::string raw = join_tokens(tokens);
    ts.sentence = normalize(std::move(tokens), raw);
    ts.tags.reserve(tags.size() + 1);
    ts.tags.push_back(kStartTag);
    for (auto& t : tags) ts.tags.push_back(std::move(t));
    out.push_back(std::move(ts));
  }
  return out;
}

}  // namespace endstyle

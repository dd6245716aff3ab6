#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/fingerprint.hpp"
#include "endstyle/tagger.hpp"
#include "endstyle/tokenize.hpp"

namespace endstyle {

// Content-word tags get replaced by their tag in word n-grams: nouns, verbs,
// adjectives and adverbs, proper nouns included.
inline bool is_content_tag(std::string_view tag) {
  return tag.substr(0, 2) == "NN" || tag.substr(0, 2) == "VB" ||
         tag.substr(0, 2) == "JJ" || tag.substr(0, 2) == "RB";
}

// Tokens whose tag is in the content set become their tag; everything else
// (START, punctuation, function words) stays verbatim.
using BackoffSequence = std::vector<std::string>;

inline BackoffSequence backoff(const TaggedSentence& tagged) {
  if (tagged.tags.size() != tagged.sentence.tokens.size()) {
    throw InvalidInputError("backoff: token/tag length mismatch");
  }
  BackoffSequence seq;
  seq.reserve(tagged.tags.size());
  for (std::size_t i = 0; i < tagged.tags.size(); ++i) {
    seq.push_back(is_content_tag(tagged.tags[i]) ? tagged.tags[i]
                                                 : tagged.sentence.tokens[i]);
  }
  return seq;
}

using NgramCounts = std::unordered_map<std::string, int>;

// Contiguous n-grams for n in [lo, hi] over the backoff sequence, joined with
// single spaces. START participates.
inline NgramCounts word_ngrams(const BackoffSequence& seq, int lo = 1,
                               int hi = 5) {
  NgramCounts counts;
  const int len = static_cast<int>(seq.size());
  for (int n = lo; n <= hi; ++n) {
    for (int start = 0; start + n <= len; ++start) {
      std::string gram = seq[static_cast<std::size_t>(start)];
      for (int k = 1; k < n; ++k) {
        gram += ' ';
        gram += seq[static_cast<std::size_t>(start + k)];
      }
      ++counts[gram];
    }
  }
  return counts;
}

// Sliding window of k codepoints over the surface string, spaces and
// punctuation included, no padding. Strings shorter than k yield nothing.
inline NgramCounts char_ngrams(const std::string& raw, int k = 4) {
  NgramCounts counts;
  // Codepoint start offsets (any byte that is not a UTF-8 continuation).
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if ((static_cast<unsigned char>(raw[i]) & 0xc0) != 0x80) starts.push_back(i);
  }
  starts.push_back(raw.size());
  const std::size_t cp = starts.size() - 1;
  if (cp < static_cast<std::size_t>(k)) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= cp; ++i) {
    const std::size_t from = starts[i];
    const std::size_t to = starts[i + static_cast<std::size_t>(k)];
    ++counts[raw.substr(from, to - from)];
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Feature space

enum class Family { Length, WordNgram, CharNgram };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Length: return "length";
    case Family::WordNgram: return "word";
    case Family::CharNgram: return "char";
  }
  return "?";
}

struct FeatureConfig {
  int word_n_lo = 1;
  int word_n_hi = 5;
  int char_k = 4;
  int min_count = 5;       // total corpus occurrences, not document frequency
  bool binary = false;     // raw values 1/0 instead of counts
  bool use_length = true;
  bool use_word = true;
  bool use_char = true;
  // Window char n-grams over the token-joined string instead of the raw
  // surface string (sensitivity knob; off by default).
  bool char_on_joined = false;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct FeatureMeta {
  Family family;
  std::string text;  // empty for LENGTH
  double min = 0.0;
  double max = 0.0;
};

struct StyleVector {
  // (feature index, value) sorted by index; values all in [0,1].
  std::vector<std::pair<int, double>> entries;
};

class FeatureSpace {
 public:
  FeatureSpace() = default;
  explicit FeatureSpace(FeatureConfig config) : config_(config) {}

  bool fitted() const { return fitted_; }
  const FeatureConfig& config() const { return config_; }
  std::size_t size() const { return features_.size(); }
  const FeatureMeta& feature(int index) const {
    return features_[static_cast<std::size_t>(index)];
  }
  const std::vector<FeatureMeta>& features() const { return features_; }

  // Builds the vocabulary from the fitting set: n-grams kept when their
  // total count reaches min_count, LENGTH kept unconditionally; per-feature
  // min/max recorded for scaling.
  void fit(const std::vector<TaggedSentence>& train) {
    if (train.empty()) {
      throw InsufficientDataError("feature space fit on empty training set");
    }
    struct Acc {
      long total = 0;
      int docs = 0;
      int max = 0;
      int min_positive = std::numeric_limits<int>::max();
    };
    std::unordered_map<std::string, Acc> word_acc;
    std::unordered_map<std::string, Acc> char_acc;
    double len_min = std::numeric_limits<double>::max();
    double len_max = std::numeric_limits<double>::lowest();

    auto accumulate = [&](std::unordered_map<std::string, Acc>& table,
                          const NgramCounts& counts) {
      for (const auto& [gram, count] : counts) {
        const int v = config_.binary ? 1 : count;
        Acc& a = table[gram];
        a.total += count;
        a.docs += 1;
        a.max = std::max(a.max, v);
        a.min_positive = std::min(a.min_positive, v);
      }
    };

    const int n_docs = static_cast<int>(train.size());
    for (const auto& ts : train) {
      if (config_.use_length) {
        const double len = length_value(ts);
        len_min = std::min(len_min, len);
        len_max = std::max(len_max, len);
      }
      if (config_.use_word) {
        accumulate(word_acc, word_ngrams(backoff(ts), config_.word_n_lo,
                                         config_.word_n_hi));
      }
      if (config_.use_char) {
        accumulate(char_acc, char_ngrams(char_source(ts), config_.char_k));
      }
    }

    features_.clear();
    word_index_.clear();
    char_index_.clear();
    if (config_.use_length) {
      features_.push_back({Family::Length, "", len_min, len_max});
    }
    auto emit = [&](Family family,
                    const std::unordered_map<std::string, Acc>& table,
                    std::unordered_map<std::string, int>& index) {
      std::vector<std::pair<std::string, const Acc*>> kept;
      for (const auto& [gram, acc] : table) {
        if (acc.total >= config_.min_count) kept.emplace_back(gram, &acc);
      }
      std::sort(kept.begin(), kept.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [gram, acc] : kept) {
        index[gram] = static_cast<int>(features_.size());
        const double mn =
            acc->docs == n_docs ? static_cast<double>(acc->min_positive) : 0.0;
        features_.push_back({family, gram, mn, static_cast<double>(acc->max)});
      }
    };
    if (config_.use_word) emit(Family::WordNgram, word_acc, word_index_);
    if (config_.use_char) emit(Family::CharNgram, char_acc, char_index_);
    fitted_ = true;
  }

  // Counts scaled by the fitting min/max, clipped into [0,1]; unseen n-grams
  // ignored.
  StyleVector transform(const TaggedSentence& ts) const {
    if (!fitted_) {
      throw InvalidStateError("feature space has not been fitted");
    }
    StyleVector vec;
    if (config_.use_length) {
      vec.entries.emplace_back(0, scale(features_[0], length_value(ts)));
    }
    auto add = [&](const std::unordered_map<std::string, int>& index,
                   const NgramCounts& counts) {
      for (const auto& [gram, count] : counts) {
        const auto it = index.find(gram);
        if (it == index.end()) continue;
        const int v = config_.binary ? 1 : count;
        vec.entries.emplace_back(
            it->second,
            scale(features_[static_cast<std::size_t>(it->second)],
                  static_cast<double>(v)));
      }
    };
    if (config_.use_word) {
      add(word_index_,
          word_ngrams(backoff(ts), config_.word_n_lo, config_.word_n_hi));
    }
    if (config_.use_char) {
      add(char_index_, char_ngrams(char_source(ts), config_.char_k));
    }
    std::sort(vec.entries.begin(), vec.entries.end());
    return vec;
  }

  // Fraction of endings in which each feature occurs.
  std::vector<double> doc_frequencies(
      const std::vector<TaggedSentence>& endings) const {
    if (!fitted_) {
      throw InvalidStateError("feature space has not been fitted");
    }
    std::vector<int> docs(features_.size(), 0);
    for (const auto& ts : endings) {
      if (config_.use_length && !features_.empty()) docs[0] += 1;
      auto mark = [&](const std::unordered_map<std::string, int>& index,
                      const NgramCounts& counts) {
        for (const auto& [gram, count] : counts) {
          const auto it = index.find(gram);
          if (it != index.end()) docs[static_cast<std::size_t>(it->second)]++;
        }
      };
      if (config_.use_word) {
        mark(word_index_,
             word_ngrams(backoff(ts), config_.word_n_lo, config_.word_n_hi));
      }
      if (config_.use_char) {
        mark(char_index_, char_ngrams(char_source(ts), config_.char_k));
      }
    }
    std::vector<double> freq(features_.size(), 0.0);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      freq[i] = endings.empty()
                    ? 0.0
                    : static_cast<double>(docs[i]) /
                          static_cast<double>(endings.size());
    }
    return freq;
  }

  // Versioned JSON-lines: header, then one record per feature.
  std::string serialize() const {
    if (!fitted_) {
      throw InvalidStateError("cannot serialize an unfitted feature space");
    }
    nlohmann::json header{{"format", "endstyle-features"},
                          {"version", 1},
                          {"config", config_to_json(config_)}};
    std::string out = header.dump() + "\n";
    for (std::size_t i = 0; i < features_.size(); ++i) {
      const auto& f = features_[i];
      nlohmann::json rec{{"family", to_string(f.family)},
                         {"feature", f.text},
                         {"index", static_cast<int>(i)},
                         {"min", f.min},
                         {"max", f.max}};
      out += rec.dump() + "\n";
    }
    return out;
  }

  static FeatureSpace deserialize(const std::string& text) {
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
      if (pos >= text.size()) return {};
      const auto nl = text.find('\n', pos);
      std::string line = text.substr(pos, nl == std::string::npos
                                              ? std::string::npos
                                              : nl - pos);
      pos = nl == std::string::npos ? text.size() : nl + 1;
      return line;
    };
    const std::string header_line = next_line();
    nlohmann::json header = nlohmann::json::parse(header_line);
    if (header.value("format", "") != "endstyle-features" ||
        header.value("version", 0) != 1) {
      throw InvalidInputError("unrecognized feature-space header");
    }
    FeatureSpace space(config_from_json(header.at("config")));
    for (std::string line = next_line(); !line.empty(); line = next_line()) {
      nlohmann::json rec = nlohmann::json::parse(line);
      FeatureMeta meta;
      const std::string family = rec.at("family").get<std::string>();
      meta.family = family == "length"  ? Family::Length
                    : family == "word"  ? Family::WordNgram
                                        : Family::CharNgram;
      meta.text = rec.at("feature").get<std::string>();
      meta.min = rec.at("min").get<double>();
      meta.max = rec.at("max").get<double>();
      const int index = rec.at("index").get<int>();
      if (index != static_cast<int>(space.features_.size())) {
        throw InvalidInputError("feature-space indices are not dense");
      }
      if (meta.family == Family::WordNgram) {
        space.word_index_[meta.text] = index;
      } else if (meta.family == Family::CharNgram) {
        space.char_index_[meta.text] = index;
      }
      space.features_.push_back(std::move(meta));
    }
    space.fitted_ = true;
    return space;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize();
    if (!out) throw IoError("write failure on " + path);
  }

  static FeatureSpace load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
  }

  std::string fingerprint() const { return fingerprint_hex(serialize()); }

  static nlohmann::json config_to_json(const FeatureConfig& c) {
    return {{"word_n_lo", c.word_n_lo},   {"word_n_hi", c.word_n_hi},
            {"char_k", c.char_k},         {"min_count", c.min_count},
            {"binary", c.binary},         {"use_length", c.use_length},
            {"use_word", c.use_word},     {"use_char", c.use_char},
            {"char_on_joined", c.char_on_joined}};
  }

  static FeatureConfig config_from_json(const nlohmann::json& j) {
    FeatureConfig c;
    c.word_n_lo = j.value("word_n_lo", c.word_n_lo);
    c.word_n_hi = j.value("word_n_hi", c.word_n_hi);
    c.char_k = j.value("char_k", c.char_k);
    c.min_count = j.value("min_count", c.min_count);
    c.binary = j.value("binary", c.binary);
    c.use_length = j.value("use_length", c.use_length);
    c.use_word = j.value("use_word", c.use_word);
    c.use_char = j.value("use_char", c.use_char);
    c.char_on_joined = j.value("char_on_joined", c.char_on_joined);
    return c;
  }

 private:
  // Token count excluding START.
  static double length_value(const TaggedSentence& ts) {
    return static_cast<double>(ts.sentence.tokens.size()) - 1.0;
  }

  std::string char_source(const TaggedSentence& ts) const {
    if (!config_.char_on_joined) return ts.sentence.raw;
    std::vector<std::string> body(ts.sentence.tokens.begin() + 1,
                                  ts.sentence.tokens.end());
    return join_tokens(body);
  }

  static double scale(const FeatureMeta& f, double v) {
    const double denom = f.max - f.min;
    const double scaled = denom > 0.0 ? (v - f.min) / denom : v - f.min;
    return std::clamp(scaled, 0.0, 1.0);
  }

  FeatureConfig config_;
  bool fitted_ = false;
  std::vector<FeatureMeta> features_;
  std::unordered_map<std::string, int> word_index_;
  std::unordered_map<std::string, int> char_index_;
};

}  // namespace endstyle

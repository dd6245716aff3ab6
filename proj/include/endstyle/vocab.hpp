#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/fingerprint.hpp"

namespace endstyle {

// Token ids for language modeling. Tokens occurring fewer than min_count
// times collapse to the out-of-vocabulary token. Ids are dense; 0..2 are
// reserved for the specials.
class Vocabulary {
 public:
  static constexpr int kOov = 0;
  static constexpr int kBos = 1;  // sequence start (conditioning only)
  static constexpr int kBreak = 2;  // sentence boundary

  Vocabulary() {
    tokens_ = {"<unk>", "<s>", "<brk>"};
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      ids_[tokens_[i]] = static_cast<int>(i);
    }
  }

  int id(const std::string& token) const {
    const auto it = ids_.find(token);
    return it == ids_.end() ? kOov : it->second;
  }

  std::vector<int> map(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
  }

  const std::string& token(int id) const {
    return tokens_.at(static_cast<std::size_t>(id));
  }

  std::size_t size() const { return tokens_.size(); }
  int min_count() const { return min_count_; }

  std::string serialize() const {
    nlohmann::json header{{"format", "endstyle-vocab"},
                          {"version", 1},
                          {"min_count", min_count_},
                          {"size", tokens_.size()}};
    std::string out = header.dump() + "\n";
    for (std::size_t i = 3; i < tokens_.size(); ++i) {
      out += nlohmann::json{{"id", i}, {"token", tokens_[i]}}.dump() + "\n";
    }
    return out;
  }

  static Vocabulary deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
      throw InvalidInputError("empty vocabulary payload");
    }
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("format", "") != "endstyle-vocab" ||
        header.value("version", 0) != 1) {
      throw InvalidInputError("unrecognized vocabulary header");
    }
    Vocabulary v;
    v.min_count_ = header.at("min_count").get<int>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(line);
      if (rec.at("id").get<std::size_t>() != v.tokens_.size()) {
        throw InvalidInputError("vocabulary ids are not dense");
      }
      v.tokens_.push_back(rec.at("token").get<std::string>());
      v.ids_[v.tokens_.back()] = static_cast<int>(v.tokens_.size() - 1);
    }
    if (v.tokens_.size() != header.at("size").get<std::size_t>()) {
      throw InvalidInputError("vocabulary size mismatch");
    }
    return v;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize();
    if (!out) throw IoError("write failure on " + path);
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
  }

  std::string fingerprint() const { return fingerprint_hex(serialize()); }

  friend Vocabulary build_vocab(
      const std::vector<std::vector<std::string>>& corpus, int min_count);

 private:
  int min_count_ = 3;
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

inline Vocabulary build_vocab(
    const std::vector<std::vector<std::string>>& corpus, int min_count = 3) {
  if (corpus.empty()) {
    throw InsufficientDataError("vocabulary built from an empty corpus");
  }
  std::map<std::string, long> counts;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) ++counts[tok];
  }
  Vocabulary v;
  v.min_count_ = min_count;
  for (const auto& [token, count] : counts) {
    if (count < min_count) continue;
    if (v.ids_.count(token)) continue;  // collides with a special
    v.ids_[token] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(token);
  }
  return v;
}

}  // namespace endstyle

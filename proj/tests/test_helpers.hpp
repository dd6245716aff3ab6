#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "endstyle/rng.hpp"

namespace testutil {

// Writes content to a fresh file under the build temp dir; removed on
// destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& content,
                    const std::string& suffix = ".csv") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("endstyle_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++) + suffix))
                .string();
    std::ofstream out(path_, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string source_dir() { return ENDSTYLE_SOURCE_DIR; }

// Quadratic reference enumerations the fast paths are checked against.
inline std::map<std::string, int> naive_word_ngrams(
    const std::vector<std::string>& seq, int lo, int hi) {
  std::map<std::string, int> counts;
  for (int n = lo; n <= hi; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size();
         ++i) {
      std::string gram;
      for (int k = 0; k < n; ++k) {
        if (k) gram += ' ';
        gram += seq[i + static_cast<std::size_t>(k)];
      }
      ++counts[gram];
    }
  }
  return counts;
}

inline std::map<std::string, int> naive_char_ngrams_ascii(const std::string& s,
                                                          int k) {
  std::map<std::string, int> counts;
  if (s.size() < static_cast<std::size_t>(k)) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= s.size(); ++i) {
    ++counts[s.substr(i, static_cast<std::size_t>(k))];
  }
  return counts;
}

// Golden-section search for a unimodal scalar function.
template <typename F>
double golden_minimize(F f, double lo, double hi, double tol = 1e-12) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

inline std::string random_ascii(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABC .,!?'\"()0123456789";
  const std::size_t len = endstyle::bounded(rng, max_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    s += alphabet[endstyle::bounded(rng, alphabet.size())];
  }
  return s;
}

}  // namespace testutil

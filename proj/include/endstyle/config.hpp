#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/features.hpp"
#include "endstyle/lstm_lm.hpp"

namespace endstyle {

// Environment variable naming the default data directory; relative paths
// that do not resolve from the working directory are retried against it.
inline constexpr const char* kDataDirEnv = "ENDSTYLE_DATA";

struct RunConfig {
  // Input files.
  std::string roc_path;
  std::string cloze_dev_path;
  std::string cloze_test_path;
  std::string paired_choice_path;
  std::string tagger_fixture_path = "data/tagged_fixture.tsv";
  std::string pretagged_path;  // non-empty bypasses the tagger
  std::string paired_train_path;

  std::string out_dir = "out";
  std::uint64_t seed = 13;
  double dev_fraction = 0.1;
  int tagger_epochs = 5;

  FeatureConfig features;
  std::vector<double> grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};

  // Language model.
  std::string lm_kind = "kn";  // "kn" or "neural"
  int kn_order = 3;
  double kn_discount = 0.75;
  int lm_min_count = 3;
  NeuralLMConfig neural;

  bool retrain_paired_choice = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"roc_path", c.roc_path},
          {"cloze_dev_path", c.cloze_dev_path},
          {"cloze_test_path", c.cloze_test_path},
          {"paired_choice_path", c.paired_choice_path},
          {"tagger_fixture_path", c.tagger_fixture_path},
          {"pretagged_path", c.pretagged_path},
          {"paired_train_path", c.paired_train_path},
          {"out_dir", c.out_dir},
          {"seed", c.seed},
          {"dev_fraction", c.dev_fraction},
          {"tagger_epochs", c.tagger_epochs},
          {"features", FeatureSpace::config_to_json(c.features)},
          {"grid", c.grid},
          {"lm_kind", c.lm_kind},
          {"kn_order", c.kn_order},
          {"kn_discount", c.kn_discount},
          {"lm_min_count", c.lm_min_count},
          {"neural", to_json(c.neural)},
          {"retrain_paired_choice", c.retrain_paired_choice}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.roc_path = j.value("roc_path", c.roc_path);
  c.cloze_dev_path = j.value("cloze_dev_path", c.cloze_dev_path);
  c.cloze_test_path = j.value("cloze_test_path", c.cloze_test_path);
  c.paired_choice_path = j.value("paired_choice_path", c.paired_choice_path);
  c.tagger_fixture_path =
      j.value("tagger_fixture_path", c.tagger_fixture_path);
  c.pretagged_path = j.value("pretagged_path", c.pretagged_path);
  c.paired_train_path = j.value("paired_train_path", c.paired_train_path);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.seed = j.value("seed", c.seed);
  c.dev_fraction = j.value("dev_fraction", c.dev_fraction);
  c.tagger_epochs = j.value("tagger_epochs", c.tagger_epochs);
  if (j.contains("features")) {
    c.features = FeatureSpace::config_from_json(j.at("features"));
  }
  if (j.contains("grid")) {
    c.grid = j.at("grid").get<std::vector<double>>();
  }
  c.lm_kind = j.value("lm_kind", c.lm_kind);
  c.kn_order = j.value("kn_order", c.kn_order);
  c.kn_discount = j.value("kn_discount", c.kn_discount);
  c.lm_min_count = j.value("lm_min_count", c.lm_min_count);
  if (j.contains("neural")) {
    c.neural = neural_config_from_json(j.at("neural"));
  }
  c.retrain_paired_choice =
      j.value("retrain_paired_choice", c.retrain_paired_choice);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Resolves a path against the working directory first, then the data
// directory named by ENDSTYLE_DATA.
inline std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::exists(path)) return path;
  if (const char* dir = std::getenv(kDataDirEnv)) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

inline void require_file(const std::string& resolved, const char* what) {
  if (resolved.empty()) {
    throw InvalidConfigError(std::string("no path configured for ") + what);
  }
  if (!std::filesystem::exists(resolved)) {
    throw IoError(std::string(what) + " file not found: " + resolved);
  }
}

}  // namespace endstyle

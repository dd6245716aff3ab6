#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/harness.hpp"

namespace endstyle {

// Reports are emitted twice: canonical JSON (keys sorted by nlohmann's
// object ordering, shortest-round-trip doubles) and aligned-column text.
// Two runs with equal config and data produce byte-identical files.

inline nlohmann::json to_json(const FoldResult& fold) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& [lambda, acc] : fold.lambda_scores) {
    scores.push_back({{"lambda", lambda}, {"dev_accuracy", acc}});
  }
  return {{"accuracy", fold.accuracy},
          {"selected_lambda", fold.selected_lambda},
          {"lambda_scores", std::move(scores)},
          {"dataset_fingerprint", fold.dataset_fingerprint}};
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) folds.push_back(to_json(f));
  return {{"experiment", report.experiment},
          {"folds", std::move(folds)},
          {"mean_accuracy", report.mean_accuracy},
          {"config", report.config_echo}};
}

inline std::string render_text(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment: " << report.experiment << "\n";
  out << std::left << std::setw(6) << "fold" << std::setw(12) << "accuracy"
      << std::setw(12) << "lambda" << "fingerprint\n";
  out << std::fixed << std::setprecision(4);
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& f = report.folds[i];
    out << std::left << std::setw(6) << i << std::setw(12) << f.accuracy
        << std::setw(12) << f.selected_lambda << f.dataset_fingerprint << "\n";
  }
  out << "mean accuracy: " << report.mean_accuracy << "\n";
  return out.str();
}

inline nlohmann::json to_json(const SurfaceStats& stats) {
  nlohmann::json out;
  for (const auto& [name, cs] : stats.classes) {
    out[name] = {{"mean_length", cs.mean_length},
                 {"pos_percent", cs.pos_percent},
                 {"word_percent", cs.word_percent}};
  }
  return out;
}

// Fig-1-style table: mean lengths plus the per-class percentages of the
// requested tags and words.
inline std::string render_text(const SurfaceStats& stats,
                               const std::vector<std::string>& tags,
                               const std::vector<std::string>& words) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(16) << "class" << std::setw(12)
      << "mean_length";
  for (const auto& t : tags) out << std::setw(8) << t;
  out << "| ";
  for (const auto& w : words) out << std::setw(8) << w;
  out << "\n";
  for (const auto& [name, cs] : stats.classes) {
    out << std::left << std::setw(16) << name << std::setw(12)
        << cs.mean_length;
    for (const auto& t : tags) {
      const auto it = cs.pos_percent.find(t);
      out << std::setw(8) << (it == cs.pos_percent.end() ? 0.0 : it->second);
    }
    out << "| ";
    for (const auto& w : words) {
      const auto it = cs.word_percent.find(w);
      out << std::setw(8) << (it == cs.word_percent.end() ? 0.0 : it->second);
    }
    out << "\n";
  }
  return out.str();
}

inline nlohmann::json to_json(const SalientFeatures& salient) {
  auto side = [](const std::vector<SalientFeature>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : list) {
      out.push_back({{"feature", feature_display(f)},
                     {"family", to_string(f.family)},
                     {"weight", f.weight},
                     {"doc_frequency", f.doc_frequency}});
    }
    return out;
  };
  return {{"positive", side(salient.positive)},
          {"negative", side(salient.negative)}};
}

inline std::string render_text(const SalientFeatures& salient,
                               const std::string& positive_name,
                               const std::string& negative_name) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  auto side = [&](const std::string& name,
                  const std::vector<SalientFeature>& list) {
    out << name << "\n";
    out << std::left << std::setw(24) << "feature" << std::setw(10) << "weight"
        << "freq\n";
    for (const auto& f : list) {
      out << std::left << std::setw(24) << feature_display(f) << std::setw(10)
          << f.weight << 100.0 * f.doc_frequency << "%\n";
    }
  };
  side(positive_name, salient.positive);
  out << "\n";
  side(negative_name, salient.negative);
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace endstyle

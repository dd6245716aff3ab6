#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/features.hpp"

namespace endstyle {

struct LinearModel {
  std::vector<double> weights;  // dense, aligned to FeatureSpace indices
  double intercept = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double final_objective = 0.0;
  std::string space_fingerprint;  // binds the model to one feature space

  bool trained() const { return !weights.empty() || iterations > 0; }
};

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

inline double dot(const StyleVector& x, const std::vector<double>& w,
                  double intercept) {
  double z = intercept;
  for (const auto& [idx, v] : x.entries) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= w.size()) {
      throw InvalidInputError("style vector index " + std::to_string(idx) +
                              " outside model dimension " +
                              std::to_string(w.size()));
    }
    z += w[static_cast<std::size_t>(idx)] * v;
  }
  return z;
}

// Posterior probability of the positive class, kept inside (0,1).
inline double predict_proba(const LinearModel& model, const StyleVector& x) {
  const double p = sigmoid(dot(x, model.weights, model.intercept));
  return std::clamp(p, 1e-15, 1.0 - 1e-15);
}

// Mean negative log-likelihood plus (lambda/2)||w||^2, intercept unpenalized.
inline double lr_objective(const std::vector<StyleVector>& X,
                           const std::vector<int>& y, double lambda,
                           const std::vector<double>& w, double intercept) {
  double nll = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double z = dot(X[i], w, intercept);
    // -log p(y|z): log(1+e^z) - y z
    nll += log1pexp(z) - (y[i] ? z : 0.0);
  }
  nll /= static_cast<double>(X.size());
  double reg = 0.0;
  for (const double wi : w) reg += wi * wi;
  return nll + 0.5 * lambda * reg;
}

// Analytic gradient of lr_objective.
inline void lr_gradient(const std::vector<StyleVector>& X,
                        const std::vector<int>& y, double lambda,
                        const std::vector<double>& w, double intercept,
                        std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r =
        (sigmoid(dot(X[i], w, intercept)) - static_cast<double>(y[i])) * inv_n;
    for (const auto& [idx, v] : X[i].entries) {
      grad_w[static_cast<std::size_t>(idx)] += r * v;
    }
    grad_b += r;
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    grad_w[j] += lambda * w[j];
  }
}

struct TrainOptions {
  double tolerance = 1e-6;  // sup-norm of the gradient
  int max_iterations = 1000;
  std::vector<double>* objective_trace = nullptr;  // filled when non-null
};

// Deterministic full-batch gradient descent with backtracking line search
// from zero initialization. The objective is convex, so this converges to
// the unique optimum for any lambda > 0.
inline LinearModel train(const std::vector<StyleVector>& X,
                         const std::vector<int>& y, double lambda,
                         std::size_t dim, TrainOptions options = {}) {
  if (X.size() != y.size() || X.size() < 2) {
    throw InvalidInputError("training needs at least 2 labeled examples");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError("lambda must be a positive finite scalar");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (const int label : y) {
    if (label != 0 && label != 1) {
      throw InvalidInputError("labels must be 0 or 1");
    }
    (label ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DegenerateDataError("training data contains a single class");
  }
  for (const auto& x : X) {
    for (const auto& [idx, v] : x.entries) {
      if (!std::isfinite(v)) {
        throw InvalidInputError("non-finite feature value");
      }
      if (idx < 0 || static_cast<std::size_t>(idx) >= dim) {
        throw InvalidInputError("feature index outside declared dimension");
      }
    }
  }

  LinearModel model;
  model.lambda = lambda;
  model.weights.assign(dim, 0.0);
  double& b = model.intercept;

  std::vector<double> grad_w;
  double grad_b = 0.0;
  std::vector<double> cand_w(dim);
  double f = lr_objective(X, y, lambda, model.weights, b);
  if (options.objective_trace) options.objective_trace->push_back(f);
  double step = 1.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    lr_gradient(X, y, lambda, model.weights, b, grad_w, grad_b);
    double g_inf = std::abs(grad_b);
    double g_sq = grad_b * grad_b;
    for (const double g : grad_w) {
      g_inf = std::max(g_inf, std::abs(g));
      g_sq += g * g;
    }
    if (g_inf <= options.tolerance) break;

    // Armijo backtracking; the previous accepted step seeds the next try.
    step = std::min(step * 2.0, 1e8);
    bool accepted = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j < dim; ++j) {
        cand_w[j] = model.weights[j] - step * grad_w[j];
      }
      const double cand_b = b - step * grad_b;
      const double cand_f = lr_objective(X, y, lambda, cand_w, cand_b);
      if (cand_f <= f - 1e-4 * step * g_sq) {
        model.weights.swap(cand_w);
        b = cand_b;
        f = cand_f;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: no further progress possible
    if (options.objective_trace) options.objective_trace->push_back(f);
  }
  model.iterations = iter;
  model.final_objective = f;
  return model;
}

// ---------------------------------------------------------------------------
// Grid search

struct GridSearchResult {
  std::vector<std::pair<double, double>> scores;  // (lambda, dev accuracy)
  double selected_lambda = 0.0;
  LinearModel selected_model;
};

inline double accuracy(const LinearModel& model,
                       const std::vector<StyleVector>& X,
                       const std::vector<int>& y) {
  if (X.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const int predicted = predict_proba(model, X[i]) >= 0.5 ? 1 : 0;
    if (predicted == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(X.size());
}

// One model per lambda, selection by dev accuracy; ties break toward the
// larger lambda.
inline GridSearchResult grid_search(const std::vector<StyleVector>& train_X,
                                    const std::vector<int>& train_y,
                                    const std::vector<StyleVector>& dev_X,
                                    const std::vector<int>& dev_y,
                                    const std::vector<double>& grid,
                                    std::size_t dim,
                                    TrainOptions options = {}) {
  if (grid.empty()) {
    throw InvalidInputError("lambda grid is empty");
  }
  if (dev_X.empty()) {
    throw InsufficientDataError("grid search needs a non-empty dev set");
  }
  GridSearchResult result;
  bool have_best = false;
  double best_acc = -1.0;
  for (const double lambda : grid) {
    LinearModel model = train(train_X, train_y, lambda, dim, options);
    const double acc = accuracy(model, dev_X, dev_y);
    result.scores.emplace_back(lambda, acc);
    if (!have_best || acc > best_acc ||
        (acc == best_acc && lambda > result.selected_lambda)) {
      have_best = true;
      best_acc = acc;
      result.selected_lambda = lambda;
      result.selected_model = std::move(model);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Coefficient inspection

struct SalientFeature {
  int index = 0;
  Family family = Family::Length;
  std::string text;
  double weight = 0.0;
  double doc_frequency = 0.0;
};

struct SalientFeatures {
  std::vector<SalientFeature> positive;  // descending weight
  std::vector<SalientFeature> negative;  // ascending weight
};

// Top-k positively and negatively weighted features among those present in
// at least min_doc_freq of the reference endings.
inline SalientFeatures top_features(const LinearModel& model,
                                    const FeatureSpace& space,
                                    const std::vector<TaggedSentence>& endings,
                                    std::size_t k, double min_doc_freq) {
  if (!model.trained()) {
    throw InvalidStateError("top_features requires a trained model");
  }
  if (model.weights.size() != space.size()) {
    throw InvalidInputError("model dimension does not match feature space");
  }
  const std::vector<double> freq = space.doc_frequencies(endings);
  std::vector<SalientFeature> all;
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (freq[i] < min_doc_freq) continue;
    const FeatureMeta& meta = space.feature(static_cast<int>(i));
    all.push_back({static_cast<int>(i), meta.family, meta.text,
                   model.weights[i], freq[i]});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.weight > b.weight;
  });
  SalientFeatures out;
  for (const auto& f : all) {
    if (f.weight > 0.0 && out.positive.size() < k) out.positive.push_back(f);
  }
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    if (it->weight < 0.0 && out.negative.size() < k) {
      out.negative.push_back(*it);
    }
  }
  return out;
}

// Display form matching the salient-feature tables: char n-grams quoted,
// LENGTH named.
inline std::string feature_display(const SalientFeature& f) {
  switch (f.family) {
    case Family::Length: return "length";
    case Family::CharNgram: return "'" + f.text + "'";
    case Family::WordNgram: return f.text;
  }
  return f.text;
}

// ---------------------------------------------------------------------------
// Serialization: versioned JSON with sparse index->weight pairs.

inline std::string serialize(const LinearModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) {
      weights.push_back({static_cast<int>(i), model.weights[i]});
    }
  }
  nlohmann::json j{{"format", "endstyle-linear-model"},
                   {"version", 1},
                   {"dim", model.weights.size()},
                   {"lambda", model.lambda},
                   {"intercept", model.intercept},
                   {"iterations", model.iterations},
                   {"final_objective", model.final_objective},
                   {"space_fingerprint", model.space_fingerprint},
                   {"weights", std::move(weights)}};
  return j.dump();
}

inline LinearModel deserialize_model(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "endstyle-linear-model" ||
      j.value("version", 0) != 1) {
    throw InvalidInputError("unrecognized linear-model header");
  }
  LinearModel model;
  model.weights.assign(j.at("dim").get<std::size_t>(), 0.0);
  model.lambda = j.at("lambda").get<double>();
  model.intercept = j.at("intercept").get<double>();
  model.iterations = j.at("iterations").get<int>();
  model.final_objective = j.at("final_objective").get<double>();
  model.space_fingerprint = j.at("space_fingerprint").get<std::string>();
  for (const auto& pair : j.at("weights")) {
    model.weights.at(pair.at(0).get<std::size_t>()) = pair.at(1).get<double>();
  }
  return model;
}

inline void save(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << serialize(model) << "\n";
  if (!out) throw IoError("write failure on " + path);
}

inline LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace endstyle

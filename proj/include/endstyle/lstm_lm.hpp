#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "endstyle/errors.hpp"
#include "endstyle/lm.hpp"
#include "endstyle/rng.hpp"

namespace endstyle {

struct NeuralLMConfig {
  int hidden = 512;
  int embedding = 512;
  double dropout = 0.6;  // on the recurrent layer's input and output
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int epochs = 1;
  std::uint64_t seed = 1;
  double validation_fraction = 0.1;

  friend bool operator==(const NeuralLMConfig&,
                         const NeuralLMConfig&) = default;
};

inline nlohmann::json to_json(const NeuralLMConfig& c) {
  return {{"hidden", c.hidden},
          {"embedding", c.embedding},
          {"dropout", c.dropout},
          {"learning_rate", c.learning_rate},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"validation_fraction", c.validation_fraction}};
}

inline NeuralLMConfig neural_config_from_json(const nlohmann::json& j) {
  NeuralLMConfig c;
  c.hidden = j.value("hidden", c.hidden);
  c.embedding = j.value("embedding", c.embedding);
  c.dropout = j.value("dropout", c.dropout);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  return c;
}

// Single-layer LSTM language model trained by truncation-free BPTT with the
// adaptive-moment optimizer. Inference never applies dropout, so scoring is
// deterministic.
class NeuralLM : public SequenceScorer {
 public:
  using SequenceScorer::seq_logprob;

  NeuralLM() = default;

  NeuralLM(const NeuralLMConfig& config, std::size_t vocab_size)
      : config_(config), vocab_size_(vocab_size) {
    if (config.hidden < 1 || config.embedding < 1) {
      throw InvalidConfigError("hidden and embedding sizes must be >= 1");
    }
    if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
      throw InvalidConfigError("dropout rate must lie in [0,1)");
    }
    if (vocab_size < 2) {
      throw InvalidConfigError("vocabulary too small for a language model");
    }
    const auto V = static_cast<Eigen::Index>(vocab_size);
    const auto E = static_cast<Eigen::Index>(config.embedding);
    const auto H = static_cast<Eigen::Index>(config.hidden);
    std::mt19937_64 rng(config.seed);
    embed_ = init_matrix(E, V, rng);
    w_x_ = init_matrix(4 * H, E, rng);
    w_h_ = init_matrix(4 * H, H, rng);
    b_ = Eigen::VectorXd::Zero(4 * H);
    // Forget-gate bias starts at 1 so early training keeps cell memory.
    b_.segment(H, H).setOnes();
    w_out_ = init_matrix(V, H, rng);
    b_out_ = Eigen::VectorXd::Zero(V);
  }

  const NeuralLMConfig& config() const { return config_; }
  std::size_t vocab_size() const { return vocab_size_; }
  const std::vector<double>& validation_perplexities() const {
    return validation_perplexity_;
  }

  double seq_logprob(std::span<const int> tokens,
                     std::span<const int> context) const override {
    if (tokens.empty()) {
      throw InvalidInputError("seq_logprob on an empty token sequence");
    }
    for (const int t : tokens) check_id(t);
    for (const int c : context) check_id(c);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(config_.hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(config_.hidden);
    int prev = Vocabulary::kBos;
    for (const int id : context) {
      step(prev, h, c);
      prev = id;
    }
    double logp = 0.0;
    for (const int id : tokens) {
      step(prev, h, c);
      logp += log_softmax_at(w_out_ * h + b_out_, id);
      prev = id;
    }
    return logp;
  }

  // Next-token distribution after consuming `context` from a fresh state.
  Eigen::VectorXd next_distribution(std::span<const int> context) const {
    for (const int c : context) check_id(c);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(config_.hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(config_.hidden);
    int prev = Vocabulary::kBos;
    for (const int id : context) {
      step(prev, h, c);
      prev = id;
    }
    step(prev, h, c);
    Eigen::VectorXd z = w_out_ * h + b_out_;
    const double zmax = z.maxCoeff();
    Eigen::VectorXd p = (z.array() - zmax).exp();
    return p / p.sum();
  }

  // Mean cross-entropy per token over the sequences, dropout off.
  double sequence_loss(const std::vector<std::vector<int>>& seqs) const {
    double total = 0.0;
    long tokens = 0;
    for (const auto& seq : seqs) {
      if (seq.empty()) continue;
      total -= seq_logprob(seq, {});
      tokens += static_cast<long>(seq.size());
    }
    if (tokens == 0) {
      throw InvalidInputError("sequence_loss on empty corpus");
    }
    return total / static_cast<double>(tokens);
  }

  struct Gradients {
    Eigen::MatrixXd embed, w_x, w_h, w_out;
    Eigen::VectorXd b, b_out;
  };

  // Loss (mean CE per token of the sequence) and its gradients. Dropout
  // masks are applied only when `rng` is given and the rate is positive.
  double loss_and_gradients(const std::vector<int>& seq, Gradients& grads,
                            std::mt19937_64* rng = nullptr) const {
    if (seq.empty()) {
      throw InvalidInputError("cannot train on an empty sequence");
    }
    for (const int t : seq) check_id(t);
    const auto H = static_cast<Eigen::Index>(config_.hidden);
    const auto T = static_cast<Eigen::Index>(seq.size());
    const bool use_dropout = rng != nullptr && config_.dropout > 0.0;
    const double keep = 1.0 - config_.dropout;

    // Forward, caching per-step activations.
    std::vector<int> inputs(seq.size());
    inputs[0] = Vocabulary::kBos;
    for (std::size_t t = 1; t < seq.size(); ++t) inputs[t] = seq[t - 1];

    Eigen::MatrixXd xs(config_.embedding, T), gates(4 * H, T), cs(H, T),
        hs(H, T), tanh_cs(H, T), hs_out(H, T);
    Eigen::MatrixXd mask_x, mask_h;
    if (use_dropout) {
      mask_x.resize(config_.embedding, T);
      mask_h.resize(H, T);
      for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index i = 0; i < mask_x.rows(); ++i) {
          mask_x(i, t) = u01(*rng) < keep ? 1.0 / keep : 0.0;
        }
        for (Eigen::Index i = 0; i < H; ++i) {
          mask_h(i, t) = u01(*rng) < keep ? 1.0 / keep : 0.0;
        }
      }
    }

    Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
    double loss = 0.0;
    Eigen::MatrixXd dz(static_cast<Eigen::Index>(vocab_size_), T);
    for (Eigen::Index t = 0; t < T; ++t) {
      Eigen::VectorXd x = embed_.col(inputs[static_cast<std::size_t>(t)]);
      if (use_dropout) x.array() *= mask_x.col(t).array();
      xs.col(t) = x;
      Eigen::VectorXd a = w_x_ * x + w_h_ * h + b_;
      a.segment(0, H) = a.segment(0, H).unaryExpr(&sigmoid_scalar);
      a.segment(H, H) = a.segment(H, H).unaryExpr(&sigmoid_scalar);
      a.segment(2 * H, H) = a.segment(2 * H, H).unaryExpr(&sigmoid_scalar);
      a.segment(3 * H, H) = a.segment(3 * H, H).array().tanh().matrix();
      const auto i_g = a.segment(0, H).array();
      const auto f_g = a.segment(H, H).array();
      const auto o_g = a.segment(2 * H, H).array();
      const auto g_g = a.segment(3 * H, H).array();
      const Eigen::VectorXd c_prev = c;
      c = (f_g * c_prev.array() + i_g * g_g).matrix();
      tanh_cs.col(t) = c.array().tanh().matrix();
      h = (o_g * tanh_cs.col(t).array()).matrix();
      gates.col(t) = a;
      cs.col(t) = c;
      hs.col(t) = h;
      Eigen::VectorXd h_out = h;
      if (use_dropout) h_out.array() *= mask_h.col(t).array();
      hs_out.col(t) = h_out;

      Eigen::VectorXd z = w_out_ * h_out + b_out_;
      const double zmax = z.maxCoeff();
      const Eigen::VectorXd ez = (z.array() - zmax).exp();
      const double zsum = ez.sum();
      const int target = seq[static_cast<std::size_t>(t)];
      loss -= z(target) - zmax - std::log(zsum);
      dz.col(t) = ez / zsum;
      dz(target, t) -= 1.0;
    }
    const double scale = 1.0 / static_cast<double>(T);
    loss *= scale;

    // Backward.
    grads.embed = Eigen::MatrixXd::Zero(embed_.rows(), embed_.cols());
    grads.w_x = Eigen::MatrixXd::Zero(w_x_.rows(), w_x_.cols());
    grads.w_h = Eigen::MatrixXd::Zero(w_h_.rows(), w_h_.cols());
    grads.b = Eigen::VectorXd::Zero(b_.size());
    grads.w_out = Eigen::MatrixXd::Zero(w_out_.rows(), w_out_.cols());
    grads.b_out = Eigen::VectorXd::Zero(b_out_.size());

    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const Eigen::VectorXd dzt = dz.col(t) * scale;
      grads.w_out += dzt * hs_out.col(t).transpose();
      grads.b_out += dzt;
      Eigen::VectorXd dh_out = w_out_.transpose() * dzt;
      if (use_dropout) dh_out.array() *= mask_h.col(t).array();
      Eigen::VectorXd dh = dh_out + dh_next;

      const auto i_g = gates.col(t).segment(0, H).array();
      const auto f_g = gates.col(t).segment(H, H).array();
      const auto o_g = gates.col(t).segment(2 * H, H).array();
      const auto g_g = gates.col(t).segment(3 * H, H).array();
      const auto tc = tanh_cs.col(t).array();
      const Eigen::ArrayXd dc =
          dh.array() * o_g * (1.0 - tc * tc) + dc_next.array();
      Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(H);
      if (t > 0) c_prev = cs.col(t - 1).array();

      Eigen::VectorXd da(4 * H);
      da.segment(0, H) = (dc * g_g * i_g * (1.0 - i_g)).matrix();
      da.segment(H, H) = (dc * c_prev * f_g * (1.0 - f_g)).matrix();
      da.segment(2 * H, H) =
          (dh.array() * tc * o_g * (1.0 - o_g)).matrix();
      da.segment(3 * H, H) = (dc * i_g * (1.0 - g_g * g_g)).matrix();

      grads.w_x += da * xs.col(t).transpose();
      if (t > 0) grads.w_h += da * hs.col(t - 1).transpose();
      grads.b += da;
      dh_next = w_h_.transpose() * da;
      dc_next = (dc * f_g).matrix();

      Eigen::VectorXd dx = w_x_.transpose() * da;
      if (use_dropout) dx.array() *= mask_x.col(t).array();
      grads.embed.col(inputs[static_cast<std::size_t>(t)]) += dx;
    }
    return loss;
  }

  // Named views over the flat parameter blocks; drives the checkpoint layout
  // and the finite-difference tests.
  std::vector<std::tuple<std::string, double*, std::size_t>>
  parameter_blocks() {
    return {{"embed", embed_.data(), static_cast<std::size_t>(embed_.size())},
            {"w_x", w_x_.data(), static_cast<std::size_t>(w_x_.size())},
            {"w_h", w_h_.data(), static_cast<std::size_t>(w_h_.size())},
            {"b", b_.data(), static_cast<std::size_t>(b_.size())},
            {"w_out", w_out_.data(), static_cast<std::size_t>(w_out_.size())},
            {"b_out", b_out_.data(), static_cast<std::size_t>(b_out_.size())}};
  }

  void save(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint layout is little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    const char magic[8] = {'E', 'S', 'L', 'M', '0', '0', '0', '1'};
    out.write(magic, sizeof magic);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(vocab_size_),
                                   static_cast<std::uint32_t>(config_.embedding),
                                   static_cast<std::uint32_t>(config_.hidden)};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    auto dump = [&](const double* data, std::size_t n) {
      out.write(reinterpret_cast<const char*>(data),
                static_cast<std::streamsize>(n * sizeof(double)));
    };
    dump(embed_.data(), static_cast<std::size_t>(embed_.size()));
    dump(w_x_.data(), static_cast<std::size_t>(w_x_.size()));
    dump(w_h_.data(), static_cast<std::size_t>(w_h_.size()));
    dump(b_.data(), static_cast<std::size_t>(b_.size()));
    dump(w_out_.data(), static_cast<std::size_t>(w_out_.size()));
    dump(b_out_.data(), static_cast<std::size_t>(b_out_.size()));
    if (!out) throw IoError("write failure on " + path);
    std::ofstream sidecar(path + ".json", std::ios::binary);
    if (!sidecar) throw IoError("cannot write " + path + ".json");
    sidecar << nlohmann::json{{"format", "endstyle-neural-lm"},
                              {"version", 1},
                              {"vocab_size", vocab_size_},
                              {"config", to_json(config_)}}
                   .dump(2)
            << "\n";
  }

  static NeuralLM load(const std::string& path) {
    std::ifstream sidecar_in(path + ".json", std::ios::binary);
    if (!sidecar_in) throw IoError("cannot open " + path + ".json");
    nlohmann::json sidecar = nlohmann::json::parse(sidecar_in);
    if (sidecar.value("format", "") != "endstyle-neural-lm" ||
        sidecar.value("version", 0) != 1) {
      throw InvalidInputError("unrecognized neural checkpoint sidecar");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (std::string(magic, 8) != "ESLM0001") {
      throw InvalidInputError("unrecognized neural checkpoint magic");
    }
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    NeuralLM lm(neural_config_from_json(sidecar.at("config")), dims[0]);
    if (static_cast<std::uint32_t>(lm.config_.embedding) != dims[1] ||
        static_cast<std::uint32_t>(lm.config_.hidden) != dims[2]) {
      throw InvalidInputError("checkpoint dims disagree with sidecar config");
    }
    auto slurp = [&](double* data, std::size_t n) {
      in.read(reinterpret_cast<char*>(data),
              static_cast<std::streamsize>(n * sizeof(double)));
    };
    slurp(lm.embed_.data(), static_cast<std::size_t>(lm.embed_.size()));
    slurp(lm.w_x_.data(), static_cast<std::size_t>(lm.w_x_.size()));
    slurp(lm.w_h_.data(), static_cast<std::size_t>(lm.w_h_.size()));
    slurp(lm.b_.data(), static_cast<std::size_t>(lm.b_.size()));
    slurp(lm.w_out_.data(), static_cast<std::size_t>(lm.w_out_.size()));
    slurp(lm.b_out_.data(), static_cast<std::size_t>(lm.b_out_.size()));
    if (!in) throw IoError("truncated neural checkpoint " + path);
    return lm;
  }

  friend NeuralLM train_neural(const std::vector<std::vector<int>>& stories,
                               const NeuralLMConfig& config,
                               std::size_t vocab_size);

 private:
  static double sigmoid_scalar(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  static Eigen::MatrixXd init_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::mt19937_64& rng) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        m(i, j) = (2.0 * u01(rng) - 1.0) * bound;
      }
    }
    return m;
  }

  void check_id(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_) {
      throw InvalidInputError("token id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(vocab_size_));
    }
  }

  // One LSTM step consuming token `input`, updating (h, c) in place.
  void step(int input, Eigen::VectorXd& h, Eigen::VectorXd& c) const {
    const auto H = static_cast<Eigen::Index>(config_.hidden);
    Eigen::VectorXd a = w_x_ * embed_.col(input) + w_h_ * h + b_;
    const Eigen::ArrayXd i_g =
        a.segment(0, H).array().unaryExpr(&sigmoid_scalar);
    const Eigen::ArrayXd f_g =
        a.segment(H, H).array().unaryExpr(&sigmoid_scalar);
    const Eigen::ArrayXd o_g =
        a.segment(2 * H, H).array().unaryExpr(&sigmoid_scalar);
    const Eigen::ArrayXd g_g = a.segment(3 * H, H).array().tanh();
    c = (f_g * c.array() + i_g * g_g).matrix();
    h = (o_g * c.array().tanh()).matrix();
  }

  static double log_softmax_at(const Eigen::VectorXd& z, int index) {
    const double zmax = z.maxCoeff();
    const double lse = std::log((z.array() - zmax).exp().sum());
    return z(index) - zmax - lse;
  }

  NeuralLMConfig config_;
  std::size_t vocab_size_ = 0;
  Eigen::MatrixXd embed_;  // E x V
  Eigen::MatrixXd w_x_;    // 4H x E, gate rows [i; f; o; g]
  Eigen::MatrixXd w_h_;    // 4H x H
  Eigen::VectorXd b_;      // 4H
  Eigen::MatrixXd w_out_;  // V x H
  Eigen::VectorXd b_out_;  // V
  std::vector<double> validation_perplexity_;
};

// Sequence-at-a-time training over full 5-sentence streams; 10% of the
// corpus (by the config fraction) is set aside for per-epoch validation
// perplexity. Deterministic for a fixed seed.
inline NeuralLM train_neural(const std::vector<std::vector<int>>& stories,
                             const NeuralLMConfig& config,
                             std::size_t vocab_size) {
  if (stories.empty()) {
    throw InsufficientDataError("neural LM training corpus is empty");
  }
  if (config.epochs < 0) {
    throw InvalidConfigError("epochs must be >= 0");
  }
  NeuralLM lm(config, vocab_size);
  std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dull);

  std::vector<std::size_t> order(stories.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  std::size_t val_count = static_cast<std::size_t>(
      std::ceil(config.validation_fraction * static_cast<double>(stories.size())));
  val_count = std::min(val_count, stories.size() - 1);
  std::vector<std::size_t> val_ids(order.end() - static_cast<std::ptrdiff_t>(val_count),
                                   order.end());
  order.resize(order.size() - val_count);

  NeuralLM::Gradients g;
  NeuralLM::Gradients m;  // first moments
  NeuralLM::Gradients v;  // second moments
  auto zero_like = [&](NeuralLM::Gradients& x) {
    x.embed = Eigen::MatrixXd::Zero(lm.embed_.rows(), lm.embed_.cols());
    x.w_x = Eigen::MatrixXd::Zero(lm.w_x_.rows(), lm.w_x_.cols());
    x.w_h = Eigen::MatrixXd::Zero(lm.w_h_.rows(), lm.w_h_.cols());
    x.b = Eigen::VectorXd::Zero(lm.b_.size());
    x.w_out = Eigen::MatrixXd::Zero(lm.w_out_.rows(), lm.w_out_.cols());
    x.b_out = Eigen::VectorXd::Zero(lm.b_out_.size());
  };
  zero_like(m);
  zero_like(v);

  long step = 0;
  auto adam_update = [&](auto& theta, const auto& grad, auto& m1, auto& m2) {
    m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * grad;
    m2.array() = config.adam_beta2 * m2.array() +
                 (1.0 - config.adam_beta2) * grad.array().square();
    const double bc1 =
        1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
    const double bc2 =
        1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
    theta.array() -= config.learning_rate * (m1.array() / bc1) /
                     ((m2.array() / bc2).sqrt() + config.adam_epsilon);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (const std::size_t idx : order) {
      if (stories[idx].empty()) continue;
      ++step;
      const double loss = lm.loss_and_gradients(stories[idx], g, &rng);
      if (!std::isfinite(loss)) {
        throw TrainingFailureError("non-finite loss at training step " +
                                   std::to_string(step));
      }
      adam_update(lm.embed_, g.embed, m.embed, v.embed);
      adam_update(lm.w_x_, g.w_x, m.w_x, v.w_x);
      adam_update(lm.w_h_, g.w_h, m.w_h, v.w_h);
      adam_update(lm.b_, g.b, m.b, v.b);
      adam_update(lm.w_out_, g.w_out, m.w_out, v.w_out);
      adam_update(lm.b_out_, g.b_out, m.b_out, v.b_out);
    }
    if (!val_ids.empty()) {
      std::vector<std::vector<int>> val;
      val.reserve(val_ids.size());
      for (const std::size_t idx : val_ids) val.push_back(stories[idx]);
      lm.validation_perplexity_.push_back(std::exp(lm.sequence_loss(val)));
    }
  }
  return lm;
}

}  // namespace endstyle

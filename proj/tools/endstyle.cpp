// endstyle: stylometric classification of story endings and a story-cloze
// evaluation harness. Subcommands cover corpus statistics, the three
// ending-classification experiments, the paired cloze task, language-model
// scoring, feature ablations and salient-feature reports.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "endstyle/config.hpp"
#include "endstyle/corpus.hpp"
#include "endstyle/harness.hpp"
#include "endstyle/kneser_ney.hpp"
#include "endstyle/lstm_lm.hpp"
#include "endstyle/report.hpp"

namespace es = endstyle;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheckFailed = 3;

struct CheckOutcome {
  bool enabled = false;
  bool failed = false;

  void expect(const std::string& name, double value, double target,
              double tolerance) {
    if (!enabled) return;
    const bool ok = std::abs(value - target) <= tolerance;
    std::cout << (ok ? "CHECK PASS " : "CHECK FAIL ") << name << ": " << value
              << " vs " << target << " +/- " << tolerance << "\n";
    if (!ok) failed = true;
  }

  void expect_range(const std::string& name, double value, double lo,
                    double hi) {
    if (!enabled) return;
    const bool ok = value >= lo && value <= hi;
    std::cout << (ok ? "CHECK PASS " : "CHECK FAIL ") << name << ": " << value
              << " in [" << lo << ", " << hi << "]\n";
    if (!ok) failed = true;
  }
};

// Lazily constructed shared state for one CLI invocation.
class Session {
 public:
  explicit Session(es::RunConfig cfg) : cfg_(std::move(cfg)) {}

  const es::RunConfig& cfg() const { return cfg_; }

  es::TagCache& tags() {
    if (!tags_) {
      if (!cfg_.pretagged_path.empty()) {
        const std::string path = es::resolve_data_path(cfg_.pretagged_path);
        es::require_file(path, "pre-tagged input");
        tags_ = std::make_unique<es::TagCache>(
            es::TaggingProvider(es::load_pretagged(path)));
      } else {
        const std::string path =
            es::resolve_data_path(cfg_.tagger_fixture_path);
        es::require_file(path, "tagger fixture");
        tagger_ = es::train_tagger(es::load_tagged_corpus(path),
                                   cfg_.tagger_epochs, cfg_.seed);
        tags_ = std::make_unique<es::TagCache>(es::TaggingProvider(*tagger_));
      }
    }
    return *tags_;
  }

  const std::vector<es::ClozeInstance>& cloze_dev() {
    if (!cloze_dev_) {
      const std::string path = es::resolve_data_path(cfg_.cloze_dev_path);
      es::require_file(path, "cloze dev set");
      cloze_dev_ = es::load_cloze_set(path);
    }
    return *cloze_dev_;
  }

  const std::vector<es::ClozeInstance>& cloze_test() {
    if (!cloze_test_) {
      const std::string path = es::resolve_data_path(cfg_.cloze_test_path);
      es::require_file(path, "cloze test set");
      cloze_test_ = es::load_cloze_set(path);
    }
    return *cloze_test_;
  }

  const std::vector<es::Story>& roc() {
    if (!roc_) {
      const std::string path = es::resolve_data_path(cfg_.roc_path);
      es::require_file(path, "ROC stories");
      roc_ = es::load_roc_stories(path);
    }
    return *roc_;
  }

  // Experiment-1 split: cloze dev instances split train/dev, cloze test
  // endings as the test part.
  es::DatasetSplit exp1_split() {
    es::DatasetSplit split =
        es::split_cloze_endings(cloze_dev(), cfg_.dev_fraction, cfg_.seed);
    split.test = es::cloze_endings(cloze_test());
    return split;
  }

  void write_report(const std::string& name, const nlohmann::json& body,
                    const std::string& text) {
    fs::create_directories(cfg_.out_dir);
    nlohmann::json report = body;
    report["config"] = es::to_json(cfg_);
    es::write_file(cfg_.out_dir + "/" + name + ".json", report.dump(2) + "\n");
    es::write_file(cfg_.out_dir + "/" + name + ".txt", text);
    std::cout << text;
  }

 private:
  es::RunConfig cfg_;
  std::optional<es::Tagger> tagger_;
  std::unique_ptr<es::TagCache> tags_;
  std::optional<std::vector<es::ClozeInstance>> cloze_dev_;
  std::optional<std::vector<es::ClozeInstance>> cloze_test_;
  std::optional<std::vector<es::Story>> roc_;
};

void print_schemas() {
  std::cout << "ROC stories CSV header:\n  " << es::kRocSchema << "\n\n";
  std::cout << "Story cloze CSV header:\n  " << es::kClozeSchema << "\n\n";
  std::cout << "Paired-choice CSV header:\n  " << es::kPairedChoiceSchema
            << "\n  (gold is 1 for alt1, 2 for alt2)\n\n";
  std::cout << "Pre-tagged input: one `token<TAB>TAG` per line, blank line "
               "between sentences.\n";
}

es::ExperimentRun run_style_experiment(Session& session, es::Experiment kind) {
  const es::RunConfig& cfg = session.cfg();
  es::DatasetSplit split = session.exp1_split();
  std::vector<es::DatasetSplit> folds;
  if (kind == es::Experiment::RightVsWrong) {
    folds = es::build_experiment_dataset(kind, {}, split, cfg.seed);
  } else {
    folds = es::build_experiment_dataset(kind, session.roc(), split, cfg.seed);
  }
  return es::run_experiment(kind, folds, cfg.features, cfg.grid,
                            session.tags());
}

int cmd_experiment(Session& session, es::Experiment kind, CheckOutcome& check) {
  const es::ExperimentRun run = run_style_experiment(session, kind);
  session.write_report(std::string("exp-") + es::to_string(kind),
                       es::to_json(run.report), es::render_text(run.report));
  switch (kind) {
    case es::Experiment::RightVsWrong:
      check.expect("experiment-1 accuracy", run.report.mean_accuracy, 0.645,
                   0.015);
      break;
    case es::Experiment::OriginalVsRight:
      check.expect("experiment-2 mean accuracy", run.report.mean_accuracy,
                   0.685, 0.02);
      break;
    case es::Experiment::OriginalVsWrong:
      check.expect("experiment-3 mean accuracy", run.report.mean_accuracy,
                   0.756, 0.02);
      break;
  }
  return kExitOk;
}

int cmd_cloze(Session& session, CheckOutcome& check) {
  const es::ExperimentRun run =
      run_style_experiment(session, es::Experiment::RightVsWrong);
  const es::TrainedFold& fold = run.trained.front();
  long differ = 0;
  long flipped = 0;
  const double acc = es::cloze_eval(
      [&](const es::ClozeInstance& inst) {
        const es::ClozeDecision d =
            es::cloze_decide(fold.model, fold.space, session.tags(), inst);
        (d.rule_path == "labels-differ" ? differ : flipped) += 1;
        return d.chosen;
      },
      session.cloze_test());
  nlohmann::json body{{"accuracy", acc},
                      {"selected_lambda", run.report.folds[0].selected_lambda},
                      {"rule_paths",
                       {{"labels-differ", differ}, {"flipped", flipped}}},
                      {"dataset_fingerprint",
                       run.report.folds[0].dataset_fingerprint}};
  std::ostringstream text;
  text << "story cloze (style-only) accuracy: " << acc << "\n"
       << "rule paths: labels-differ " << differ << ", flipped " << flipped
       << "\n";
  session.write_report("cloze", body, text.str());
  check.expect("story cloze style-only accuracy", acc, 0.724, 0.015);
  return kExitOk;
}

int cmd_stats(Session& session, CheckOutcome& check) {
  std::vector<es::Ending> original;
  for (const auto& story : session.roc()) {
    original.push_back({story.sentences[4], es::Label::Original, story.id});
  }
  std::vector<es::Ending> right;
  std::vector<es::Ending> wrong;
  for (const auto& inst : session.cloze_dev()) {
    right.push_back({es::right_ending(inst), es::Label::Right, inst.id});
    wrong.push_back({es::wrong_ending(inst), es::Label::Wrong, inst.id});
  }
  const es::SurfaceStats stats = es::surface_stats(
      {{"original", original}, {"right", right}, {"wrong", wrong}},
      session.tags());
  const std::string text =
      es::render_text(stats, {"NN", "VBD", "PRP", "DT", "NNP"},
                      {"to", "and", "I", "hates", "!"});
  session.write_report("stats", es::to_json(stats), text);

  const auto& orig = stats.classes.at("original");
  const auto& rgt = stats.classes.at("right");
  const auto& wrg = stats.classes.at("wrong");
  check.expect("original mean length", orig.mean_length, 11.0, 0.2);
  check.expect("right mean length", rgt.mean_length, 8.75, 0.2);
  check.expect("wrong mean length", wrg.mean_length, 8.47, 0.2);
  auto prp = [](const es::ClassStats& cs) {
    const auto it = cs.pos_percent.find("PRP");
    return it == cs.pos_percent.end() ? 0.0 : it->second;
  };
  check.expect("original PRP%", prp(orig), 10.1, 0.8);
  check.expect("right PRP%", prp(rgt), 9.7, 0.8);
  check.expect("wrong PRP%", prp(wrg), 7.4, 0.8);
  if (check.enabled && !(prp(orig) > prp(wrg))) {
    std::cout << "CHECK FAIL PRP ordering original > wrong\n";
    check.failed = true;
  }
  return kExitOk;
}

int cmd_ablate(Session& session, CheckOutcome& check) {
  const es::RunConfig& cfg = session.cfg();
  const es::DatasetSplit split = session.exp1_split();
  const auto results = es::ablation({"word", "char", "full"}, split,
                                    cfg.features, cfg.grid, session.tags());
  nlohmann::json body;
  std::ostringstream text;
  text << std::fixed << std::setprecision(4);
  for (const auto& [family, fold] : results) {
    body[family] = es::to_json(fold);
    text << family << ": " << fold.accuracy << " (lambda "
         << fold.selected_lambda << ")\n";
  }
  session.write_report("ablate", body, text.str());
  check.expect("word-only accuracy", results.at("word").accuracy, 0.612, 0.02);
  check.expect("char-only accuracy", results.at("char").accuracy, 0.639, 0.02);
  check.expect("full accuracy", results.at("full").accuracy, 0.645, 0.015);
  return kExitOk;
}

int cmd_salient(Session& session) {
  const es::RunConfig& cfg = session.cfg();

  const es::ExperimentRun exp1 =
      run_style_experiment(session, es::Experiment::RightVsWrong);
  const es::DatasetSplit split1 = session.exp1_split();
  std::vector<es::TaggedSentence> train1;
  for (const auto& e : split1.train) train1.push_back(session.tags().get(e.text));
  const es::SalientFeatures sal1 = es::top_features(
      exp1.trained[0].model, exp1.trained[0].space, train1, 5, 0.05);

  const es::ExperimentRun exp2 =
      run_style_experiment(session, es::Experiment::OriginalVsRight);
  std::vector<es::DatasetSplit> folds2 = es::build_experiment_dataset(
      es::Experiment::OriginalVsRight, session.roc(), session.exp1_split(),
      cfg.seed);
  std::vector<es::TaggedSentence> train2;
  for (const auto& e : folds2[0].train) {
    train2.push_back(session.tags().get(e.text));
  }
  const es::SalientFeatures sal2 = es::top_features(
      exp2.trained[0].model, exp2.trained[0].space, train2, 5, 0.05);

  nlohmann::json body{{"right_vs_wrong", es::to_json(sal1)},
                      {"original_vs_right", es::to_json(sal2)}};
  std::string text = "== right vs wrong ==\n";
  text += es::render_text(sal1, "right", "wrong");
  text += "\n== original vs right ==\n";
  text += es::render_text(sal2, "original", "right (new)");
  session.write_report("salient", body, text);
  return kExitOk;
}

// Tokenized 5-sentence story streams plus the vocabulary for LM work.
struct LmCorpus {
  es::Vocabulary vocab;
  std::vector<std::vector<int>> streams;
};

LmCorpus build_lm_corpus(Session& session) {
  std::vector<std::vector<std::string>> token_seqs;
  for (const auto& story : session.roc()) {
    std::vector<std::string> tokens;
    for (const auto& sentence : story.sentences) {
      for (auto& t : es::tokenize(sentence)) tokens.push_back(std::move(t));
    }
    token_seqs.push_back(std::move(tokens));
  }
  LmCorpus corpus;
  corpus.vocab = es::build_vocab(token_seqs, session.cfg().lm_min_count);
  for (const auto& story : session.roc()) {
    corpus.streams.push_back(es::story_stream(corpus.vocab, story.sentences));
  }
  return corpus;
}

std::string lm_model_path(const es::RunConfig& cfg) {
  return cfg.out_dir + (cfg.lm_kind == "kn" ? "/lm-kn.jsonl" : "/lm-neural.bin");
}

std::string lm_vocab_path(const es::RunConfig& cfg) {
  return cfg.out_dir + "/lm-vocab.jsonl";
}

int cmd_lm_train(Session& session) {
  const es::RunConfig& cfg = session.cfg();
  const LmCorpus corpus = build_lm_corpus(session);
  fs::create_directories(cfg.out_dir);
  corpus.vocab.save(lm_vocab_path(cfg));

  nlohmann::json body{{"vocab_size", corpus.vocab.size()},
                      {"stories", corpus.streams.size()},
                      {"lm_kind", cfg.lm_kind}};
  std::ostringstream text;
  text << "language model: " << cfg.lm_kind << "\n"
       << "vocabulary size: " << corpus.vocab.size() << "\n";
  if (cfg.lm_kind == "kn") {
    const es::NGramLM lm = es::train_kn(corpus.streams, cfg.kn_order,
                                        cfg.kn_discount, corpus.vocab.size());
    lm.save(lm_model_path(cfg));
  } else if (cfg.lm_kind == "neural") {
    const es::NeuralLM lm =
        es::train_neural(corpus.streams, cfg.neural, corpus.vocab.size());
    lm.save(lm_model_path(cfg));
    body["validation_perplexity"] = lm.validation_perplexities();
    text << "validation perplexity per epoch:";
    for (const double p : lm.validation_perplexities()) text << " " << p;
    text << "\n";
  } else {
    throw es::InvalidConfigError("unknown lm kind: " + cfg.lm_kind);
  }
  text << "model written to " << lm_model_path(cfg) << "\n";
  session.write_report("lm-train", body, text.str());
  return kExitOk;
}

struct LoadedLm {
  es::Vocabulary vocab;
  std::unique_ptr<es::SequenceScorer> scorer;
};

LoadedLm load_lm(const es::RunConfig& cfg) {
  es::require_file(lm_vocab_path(cfg), "LM vocabulary (run lm-train first)");
  es::require_file(lm_model_path(cfg), "LM model (run lm-train first)");
  LoadedLm lm;
  lm.vocab = es::Vocabulary::load(lm_vocab_path(cfg));
  if (cfg.lm_kind == "kn") {
    lm.scorer = std::make_unique<es::NGramLM>(
        es::NGramLM::load(lm_model_path(cfg)));
  } else {
    lm.scorer = std::make_unique<es::NeuralLM>(
        es::NeuralLM::load(lm_model_path(cfg)));
  }
  return lm;
}

int cmd_lm_cloze(Session& session, const std::string& mode,
                 CheckOutcome& check) {
  const es::RunConfig& cfg = session.cfg();
  const LoadedLm lm = load_lm(cfg);
  const es::LmClozeMode lm_mode = mode == "conditional"
                                      ? es::LmClozeMode::ConditionalOnly
                                      : es::LmClozeMode::Pmi;
  const double acc = es::cloze_eval(
      [&](const es::ClozeInstance& inst) {
        return es::lm_cloze_decide(*lm.scorer, lm.vocab, inst, lm_mode);
      },
      session.cloze_test());
  nlohmann::json body{{"accuracy", acc}, {"mode", mode}, {"lm_kind", cfg.lm_kind}};
  std::ostringstream text;
  text << "LM cloze accuracy (" << cfg.lm_kind << ", " << mode
       << "): " << acc << "\n";
  session.write_report("lm-cloze", body, text.str());
  if (mode == "conditional") {
    check.expect("LM conditional-only accuracy", acc, 0.55, 0.02);
  } else {
    check.expect("LM PMI accuracy", acc, 0.677, 0.02);
  }
  return kExitOk;
}

int cmd_combine(Session& session, CheckOutcome& check) {
  const es::RunConfig& cfg = session.cfg();
  const LoadedLm lm = load_lm(cfg);
  const es::DatasetSplit split = session.exp1_split();
  const es::CombinedResult result = es::combined_train_eval(
      split, session.cloze_test(), session.cloze_dev(), *lm.scorer, lm.vocab,
      cfg.features, cfg.grid, session.tags());
  nlohmann::json body{{"accuracy", result.accuracy},
                      {"selected_lambda", result.selected_lambda},
                      {"style_dim", result.style_dim},
                      {"lm_kind", cfg.lm_kind}};
  std::ostringstream text;
  text << "combined (style + " << cfg.lm_kind
       << " LM) cloze accuracy: " << result.accuracy << "\n";
  session.write_report("combine", body, text.str());
  check.expect("combined accuracy", result.accuracy, 0.752, 0.02);
  return kExitOk;
}

int cmd_paired_choice(Session& session, CheckOutcome& check) {
  const es::RunConfig& cfg = session.cfg();
  const std::string path = es::resolve_data_path(cfg.paired_choice_path);
  es::require_file(path, "paired-choice data");
  const auto instances = es::load_paired_choice(path);

  es::FeatureSpace space;
  es::LinearModel model;
  if (cfg.retrain_paired_choice) {
    // Retrain on a paired-choice file, falling back to the evaluation file
    // itself when no separate training file is configured.
    std::string train_path = path;
    if (!cfg.paired_train_path.empty()) {
      train_path = es::resolve_data_path(cfg.paired_train_path);
      es::require_file(train_path, "paired-choice training data");
    }
    std::vector<es::Ending> endings;
    for (const auto& inst : es::load_paired_choice(train_path)) {
      endings.push_back({inst.gold == es::Choice::A ? inst.alt1 : inst.alt2,
                         es::Label::Right, inst.id});
      endings.push_back({inst.gold == es::Choice::A ? inst.alt2 : inst.alt1,
                         es::Label::Wrong, inst.id});
    }
    if (endings.size() < 4) {
      throw es::InsufficientDataError("paired-choice retraining set too small");
    }
    // Instance-level 90/10 split mirroring the ending experiments.
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(endings.size() / 2);
    std::iota(order.begin(), order.end(), std::size_t{0});
    es::shuffle(order, rng);
    const std::size_t dev_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(0.1 * order.size())));
    es::DatasetSplit split;
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto& part = i < dev_count ? split.dev : split.train;
      part.push_back(endings[order[i] * 2]);
      part.push_back(endings[order[i] * 2 + 1]);
    }
    const es::ExperimentRun run =
        es::run_experiment(es::Experiment::RightVsWrong, {split}, cfg.features,
                           cfg.grid, session.tags());
    space = run.trained[0].space;
    model = run.trained[0].model;
  } else {
    const es::ExperimentRun run =
        run_style_experiment(session, es::Experiment::RightVsWrong);
    space = run.trained[0].space;
    model = run.trained[0].model;
  }

  const double acc =
      es::paired_choice_eval(model, space, session.tags(), instances);
  nlohmann::json body{{"accuracy", acc},
                      {"instances", instances.size()},
                      {"retrained", cfg.retrain_paired_choice}};
  std::ostringstream text;
  text << "paired-choice accuracy (" << instances.size()
       << " instances): " << acc << "\n";
  session.write_report("paired-choice", body, text.str());
  check.expect_range("paired-choice accuracy", acc, 0.50, 0.57);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "endstyle: writing-task style detection for story endings.\n"
      "Data files are resolved against $ENDSTYLE_DATA when not found "
      "relative to the working directory."};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool schema_flag = false;
  bool binary_features = false;
  bool retrain = false;
  bool run_checks = false;
  std::string lm_mode = "pmi";

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_flag("--schema", schema_flag, "print the CSV schemas and exit");
  auto* seed_opt =
      app.add_option("--seed", "root seed overriding the config value");
  auto* out_opt = app.add_option("--out", "output directory override");
  app.add_flag("--binary-features", binary_features,
               "use 1/0 n-gram values instead of counts");
  app.add_flag("--retrain", retrain,
               "paired-choice: retrain instead of transferring");
  auto* pretagged_opt = app.add_option(
      "--pretagged", "pre-tagged endings file bypassing the tagger");
  auto* lm_opt = app.add_option("--lm", "language model kind (kn|neural)")
                     ->check(CLI::IsMember({"kn", "neural"}));
  app.add_flag("--check", run_checks,
               "compare results against the pinned expected values; "
               "exit 3 on miss");

  auto* stats = app.add_subcommand("stats", "surface statistics per class");
  auto* exp1 = app.add_subcommand("exp1", "right vs wrong endings");
  auto* exp2 = app.add_subcommand("exp2", "original vs right endings");
  auto* exp3 = app.add_subcommand("exp3", "original vs wrong endings");
  auto* cloze = app.add_subcommand("cloze", "story cloze, style-only model");
  auto* lm_train = app.add_subcommand("lm-train", "train the language model");
  auto* lm_cloze =
      app.add_subcommand("lm-cloze", "story cloze, language-model scoring");
  lm_cloze->add_option("--mode", lm_mode, "conditional|pmi")
      ->check(CLI::IsMember({"conditional", "pmi"}));
  auto* combine =
      app.add_subcommand("combine", "style + language-model classifier");
  auto* ablate = app.add_subcommand("ablate", "feature-family ablations");
  auto* salient = app.add_subcommand("salient", "most salient features");
  auto* paired =
      app.add_subcommand("paired-choice", "generic premise/alternatives task");
  auto* schema = app.add_subcommand("schema", "print the CSV schemas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (schema_flag || schema->parsed()) {
    print_schemas();
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << std::endl;
    return kExitUsage;
  }

  try {
    es::RunConfig cfg;
    if (!config_path.empty()) cfg = es::load_config(config_path);
    if (seed_opt->count()) cfg.seed = seed_opt->as<std::uint64_t>();
    if (out_opt->count()) cfg.out_dir = out_opt->as<std::string>();
    if (pretagged_opt->count()) {
      cfg.pretagged_path = pretagged_opt->as<std::string>();
    }
    if (lm_opt->count()) cfg.lm_kind = lm_opt->as<std::string>();
    if (binary_features) cfg.features.binary = true;
    if (retrain) cfg.retrain_paired_choice = true;

    Session session(std::move(cfg));
    CheckOutcome check;
    check.enabled = run_checks;

    int rc = kExitOk;
    if (stats->parsed()) {
      rc = cmd_stats(session, check);
    } else if (exp1->parsed()) {
      rc = cmd_experiment(session, es::Experiment::RightVsWrong, check);
    } else if (exp2->parsed()) {
      rc = cmd_experiment(session, es::Experiment::OriginalVsRight, check);
    } else if (exp3->parsed()) {
      rc = cmd_experiment(session, es::Experiment::OriginalVsWrong, check);
    } else if (cloze->parsed()) {
      rc = cmd_cloze(session, check);
    } else if (lm_train->parsed()) {
      rc = cmd_lm_train(session);
    } else if (lm_cloze->parsed()) {
      rc = cmd_lm_cloze(session, lm_mode, check);
    } else if (combine->parsed()) {
      rc = cmd_combine(session, check);
    } else if (ablate->parsed()) {
      rc = cmd_ablate(session, check);
    } else if (salient->parsed()) {
      rc = cmd_salient(session);
    } else if (paired->parsed()) {
      rc = cmd_paired_choice(session, check);
    }
    if (rc == kExitOk && check.failed) return kExitCheckFailed;
    return rc;
  } catch (const es::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return kExitData;
  }
}

#ifndef PROSODY_TOOLS_CLI_HPP
#define PROSODY_TOOLS_CLI_HPP

// prosody command line: gen, featurize, train, eval, spot.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data or model error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prosody/prosody.hpp"

namespace prosody::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

inline constexpr const char* kOutDirEnv = "PROSODY_OUT_DIR";

inline std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

/// Options shared by the commands that read a corpus or train.
struct CommonOptions {
  std::string config_file;
  std::string corpus_dir;
  std::string segments, f0, marks, votes;
  std::optional<unsigned> listeners;
  std::string out_dir;

  // Experiment overrides; applied on top of the config file.
  std::optional<std::string> task, features, composite_rule;
  std::optional<long long> window;
  std::optional<std::uint64_t> seed;
  std::optional<double> test_fraction, learning_rate, validation_fraction;
  std::optional<unsigned> threshold_votes;
  std::optional<std::size_t> hidden, max_epochs, patience, batch_size;
  bool test_last = false;
  bool semitones = false;
};

inline void add_corpus_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--corpus", o.corpus_dir, "Directory holding segments.tsv, f0.tsv, expert_marks.tsv, listener_votes.tsv");
  cmd->add_option("--segments", o.segments, "Segmentation file (overrides --corpus)");
  cmd->add_option("--f0", o.f0, "F0 track file (overrides --corpus)");
  cmd->add_option("--marks", o.marks, "Expert marks file (overrides --corpus)");
  cmd->add_option("--votes", o.votes, "Listener votes file (overrides --corpus)");
  cmd->add_option("--listeners", o.listeners, "Number of listeners (default: votes file header, else 17)");
}

inline void add_experiment_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "key = value experiment config; flags override it");
  cmd->add_option("--task", o.task, "mark | frontier | accent");
  cmd->add_option("--window", o.window, "Context window width in nuclei (odd)");
  cmd->add_option("--features", o.features, "Comma separated: vowel_dur,pseudo_syll_dur,f0_mean,f0_slope,valid_f0,d_*");
  cmd->add_option("--seed", o.seed, "Training seed");
  cmd->add_option("--test-fraction", o.test_fraction, "Share of nuclei held out for test (default 0.25)");
  cmd->add_option("--threshold-votes", o.threshold_votes, "Listener votes needed for a positive label (default 3)");
  cmd->add_option("--hidden", o.hidden, "Hidden units (default 10)");
  cmd->add_option("--learning-rate", o.learning_rate, "Gradient step (default 0.01)");
  cmd->add_option("--max-epochs", o.max_epochs, "Epoch limit (default 500)");
  cmd->add_option("--patience", o.patience, "Early stopping patience in epochs (default 20)");
  cmd->add_option("--batch-size", o.batch_size, "Mini-batch size (default 32)");
  cmd->add_option("--validation-fraction", o.validation_fraction, "Chronological validation tail (default 0.1)");
  cmd->add_option("--composite-rule", o.composite_rule, "first | last: which part of a composite mark decides its class");
  cmd->add_flag("--test-last", o.test_last, "Hold out the last share of the corpus instead of the first");
  cmd->add_flag("--semitones", o.semitones, "F0 features in semitones instead of Hz");
}

inline KeyValueConfig merged_config(const CommonOptions& o) {
  KeyValueConfig c = o.config_file.empty() ? KeyValueConfig() : KeyValueConfig::load(o.config_file);
  auto put = [&](const char* key, const auto& opt) {
    if (!opt) return;
    std::ostringstream s;
    if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, double>)
      s << tsv::exact(*opt);
    else
      s << *opt;
    c.set(key, s.str());
  };
  put("task", o.task);
  put("features", o.features);
  put("composite_rule", o.composite_rule);
  put("window", o.window);
  put("seed", o.seed);
  put("test_fraction", o.test_fraction);
  put("learning_rate", o.learning_rate);
  put("validation_fraction", o.validation_fraction);
  put("threshold_votes", o.threshold_votes);
  put("hidden", o.hidden);
  put("max_epochs", o.max_epochs);
  put("patience", o.patience);
  put("batch_size", o.batch_size);
  if (o.test_last) c.set("test_first", "false");
  if (o.semitones) c.set("semitones", "true");
  return c;
}

inline std::size_t positive_size(const KeyValueConfig& c, const std::string& key, std::size_t fallback) {
  auto v = c.get_int(key, static_cast<long long>(fallback));
  if (v < 1) throw ConfigError(key + " must be positive");
  return static_cast<std::size_t>(v);
}

inline ExperimentConfig experiment_config(const KeyValueConfig& c) {
  static const char* kKnown[] = {"task",          "window",        "features",      "seed",
                                 "test_fraction", "test_first",    "threshold_votes", "hidden",
                                 "learning_rate", "max_epochs",    "patience",      "validation_fraction",
                                 "batch_size",    "semitones",     "composite_rule", "corpus",
                                 "listeners"};
  for (const auto& [key, value] : c.values()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }

  auto task = task_from_string(c.get("task", "mark"));
  ExperimentConfig e = task == Task::Mark       ? ExperimentConfig::mark_defaults()
                       : task == Task::Frontier ? ExperimentConfig::frontier_defaults()
                                                : ExperimentConfig::accent_defaults();
  auto window = c.get_int("window", static_cast<long long>(e.input.window));
  check_window_width(window);
  e.input.window = static_cast<std::size_t>(window);
  if (c.has("features")) e.input.features = parse_feature_selection(c.get("features", ""));
  e.input.semitones = c.get_bool("semitones", false);
  e.train.seed = c.get_u64("seed", e.train.seed);
  e.test_fraction = c.get_double("test_fraction", e.test_fraction);
  if (!(e.test_fraction > 0.0 && e.test_fraction < 1.0)) throw ConfigError("test fraction must be in (0,1)");
  e.test_first = c.get_bool("test_first", true);
  auto threshold = c.get_int("threshold_votes", e.vote_threshold);
  if (threshold < 1) throw ConfigError("vote threshold must be at least 1");
  e.vote_threshold = static_cast<unsigned>(threshold);
  e.train.hidden_size = positive_size(c, "hidden", e.train.hidden_size);
  e.train.learning_rate = c.get_double("learning_rate", e.train.learning_rate);
  e.train.max_epochs = positive_size(c, "max_epochs", e.train.max_epochs);
  e.train.patience = positive_size(c, "patience", e.train.patience);
  e.train.batch_size = positive_size(c, "batch_size", e.train.batch_size);
  e.train.validation_fraction = c.get_double("validation_fraction", e.train.validation_fraction);
  auto rule = c.get("composite_rule", "first");
  if (rule == "first")
    e.composite_rule = CompositeRule::FirstPart;
  else if (rule == "last")
    e.composite_rule = CompositeRule::LastPart;
  else
    throw ConfigError("composite_rule must be 'first' or 'last'");
  e.train.validate();
  return e;
}

inline Corpus load_corpus_from(const CommonOptions& o, const KeyValueConfig& c) {
  auto dir = o.corpus_dir.empty() ? c.get("corpus", "") : o.corpus_dir;
  CorpusPaths paths;
  if (!dir.empty()) paths = CorpusPaths::in_dir(dir);
  if (!o.segments.empty()) paths.segments = o.segments;
  if (!o.f0.empty()) paths.f0 = o.f0;
  if (!o.marks.empty()) paths.expert_marks = o.marks;
  if (!o.votes.empty()) paths.listener_votes = o.votes;
  if (paths.segments.empty() || paths.f0.empty()) throw ConfigError("no corpus given (use --corpus or --segments/--f0)");
  std::optional<unsigned> listeners = o.listeners;
  if (!listeners && c.has("listeners")) listeners = static_cast<unsigned>(c.get_u64("listeners", kDefaultListeners));
  return load_corpus(paths, listeners);
}

inline std::filesystem::path out_dir(const CommonOptions& o) {
  std::filesystem::path dir = o.out_dir.empty() ? default_out_dir() : std::filesystem::path(o.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

inline nlohmann::json config_echo(const ExperimentConfig& e) {
  return {{"task", to_string(e.task)},
          {"window", e.input.window},
          {"features", render_feature_selection(e.input.features)},
          {"semitones", e.input.semitones},
          {"seed", e.train.seed},
          {"test_fraction", e.test_fraction},
          {"test_first", e.test_first},
          {"threshold_votes", e.vote_threshold},
          {"hidden", e.train.hidden_size},
          {"learning_rate", e.train.learning_rate},
          {"max_epochs", e.train.max_epochs},
          {"patience", e.train.patience},
          {"batch_size", e.train.batch_size},
          {"validation_fraction", e.train.validation_fraction},
          {"composite_rule", e.composite_rule == CompositeRule::FirstPart ? "first" : "last"}};
}

inline void write_reports(const std::filesystem::path& dir, const ConfusionReport& r, const std::string& format,
                          const nlohmann::json& echo, std::ostream& out) {
  bool text = format == "text" || format == "both";
  bool json = format == "json" || format == "both";
  if (!text && !json) throw ConfigError("unknown report format '" + format + "' (expected text, json or both)");
  if (text) write_file(dir / "report.txt", report(r, ReportFormat::Text));
  if (json) write_file(dir / "report.json", report(r, ReportFormat::Json, echo));
  out << report(r, ReportFormat::Text);
}

// ---------------------------------------------------------------------------

inline void cmd_gen(const std::string& spec_file, std::optional<std::uint64_t> seed, const CommonOptions& o,
                    std::ostream& out) {
  auto cfg = KeyValueConfig::load(spec_file);
  if (seed) cfg.set("seed", std::to_string(*seed));
  auto spec = gen_spec_from_config(cfg);
  auto g = generate(spec);
  auto dir = out_dir(o);
  save_generated(dir, g);
  auto counts = class_counts(g.corpus);
  out << "generated " << g.corpus.nuclei.size() << " nuclei in " << dir.string() << " (";
  for (auto c : kAllGenericClasses)
    out << to_string(c) << ':' << counts[static_cast<std::size_t>(c)] << (c == GenericClass::R ? ")\n" : " ");
}

inline void cmd_featurize(const CommonOptions& o, std::ostream& out) {
  auto cfg = merged_config(o);
  auto corpus = load_corpus_from(o, cfg);
  auto features = compute_features(corpus, {cfg.get_bool("semitones", false)});
  auto dir = out_dir(o);
  std::ostringstream s;
  write_features(s, features);
  write_file(dir / "features.tsv", s.str());
  out << "wrote " << features.size() << " feature rows to " << (dir / "features.tsv").string() << '\n';
}

inline void cmd_train(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  auto cfg = merged_config(o);
  auto e = experiment_config(cfg);
  auto corpus = load_corpus_from(o, cfg);
  auto prepared = prepare(corpus, e);
  for (const auto& name : prepared.norm.dropped_names())
    err << "warning: feature '" << name << "' is constant on the training split and was dropped\n";
  auto model = train_on(prepared, e);
  auto dir = out_dir(o);
  save_model(model, dir / "model.bin");
  std::ostringstream log;
  log << "# epoch\ttrain_loss\tvalidation_loss\n";
  for (const auto& row : model.train_log)
    log << row.epoch << '\t' << tsv::exact(row.train_loss) << '\t' << tsv::exact(row.validation_loss) << '\n';
  write_file(dir / "train_log.tsv", log.str());
  out << "trained " << to_string(e.task) << " model on nuclei " << prepared.split.train.begin << ".."
      << prepared.split.train.end - 1 << "; best epoch " << model.best_epoch << " of " << model.train_log.size() - 1
      << "; wrote " << (dir / "model.bin").string() << '\n';
}

inline void cmd_eval(const CommonOptions& o, const std::string& model_file, const std::string& decisions_file,
                     bool probe, const std::string& format, std::ostream& out) {
  auto cfg = merged_config(o);
  auto dir = out_dir(o);
  if (!decisions_file.empty()) {
    auto task = task_from_string(cfg.get("task", "mark"));
    auto in = tsv::open_input(decisions_file);
    auto r = replay_decisions(in, class_names(task), decisions_file);
    write_reports(dir, r, format, {{"task", to_string(task)}, {"mode", "replay"}}, out);
    return;
  }
  if (probe) {
    cfg.set("task", "accent");
    AccentProbeConfig pc;
    pc.base = experiment_config(cfg);
    auto corpus = load_corpus_from(o, cfg);
    auto result = run_accent_probe(corpus, pc);
    auto echo = config_echo(pc.base);
    echo["mode"] = "accent_probe";
    echo["best_window"] = result.best.width;
    echo["best_features"] = render_feature_selection(result.best.features);
    echo["inconsistent"] = result.inconsistent;
    write_reports(dir, result.best_report, format, echo, out);
    std::ostringstream s;
    s << "# window\tfeatures\tbalanced_accuracy\n";
    for (const auto& t : result.trials)
      s << t.width << '\t' << render_feature_selection(t.features) << '\t' << tsv::fixed(t.balanced_accuracy, 4) << '\n';
    s << "# best balanced accuracy " << tsv::fixed(result.best.balanced_accuracy, 4) << " (threshold "
      << tsv::fixed(pc.inconsistency_threshold, 2) << "): " << (result.inconsistent ? "inconsistent" : "consistent")
      << '\n';
    write_file(dir / "probe.tsv", s.str());
    out << "accent marking: " << (result.inconsistent ? "inconsistent" : "consistent") << '\n';
    return;
  }
  if (model_file.empty()) throw ConfigError("eval needs --model, --decisions or --probe");
  auto model = load_model(model_file);
  auto task = cfg.has("task") ? task_from_string(cfg.get("task", "")) : model.task;
  auto test_fraction = cfg.get_double("test_fraction", 0.25);
  auto test_first = cfg.get_bool("test_first", true);
  auto rule = cfg.get("composite_rule", "first") == "last" ? CompositeRule::LastPart : CompositeRule::FirstPart;
  auto corpus = load_corpus_from(o, cfg);
  auto r = evaluate(model, corpus, task, test_fraction, test_first, rule);
  nlohmann::json echo = {{"task", to_string(task)},
                         {"window", model.input.window},
                         {"features", render_feature_selection(model.input.features)},
                         {"seed", model.seed},
                         {"test_fraction", test_fraction},
                         {"test_first", test_first},
                         {"threshold_votes", model.vote_threshold}};
  write_reports(dir, r, format, echo, out);
}

inline void cmd_spot(const CommonOptions& o, const std::string& model_file, const std::string& out_file,
                     std::ostream& out) {
  auto cfg = merged_config(o);
  auto model = load_model(model_file);
  auto corpus = load_corpus_from(o, cfg);
  auto rows = spot(model, corpus);
  std::ostringstream s;
  write_decisions(s, rows, model.class_names);
  if (out_file == "-") {
    out << s.str();
    return;
  }
  auto path = out_file.empty() ? out_dir(o) / "decisions.tsv" : std::filesystem::path(out_file);
  write_file(path, s.str());
  out << "wrote " << rows.size() << " decisions to " << path.string() << '\n';
}

/// Runs one command line; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Prosodic event spotting: synthetic corpora, features, MLP training and evaluation"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus from a generator spec");
  std::string spec_file;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--spec", spec_file, "Generator spec (key = value)")->required();
  gen->add_option("--seed", gen_seed, "Override the spec seed");
  gen->add_option("--out", o.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");

  auto* featurize = app.add_subcommand("featurize", "Export per-nucleus features (features.tsv)");
  add_corpus_options(featurize, o);
  featurize->add_option("--config", o.config_file, "key = value config");
  featurize->add_flag("--semitones", o.semitones, "F0 in semitones instead of Hz");
  featurize->add_option("--out", o.out_dir, "Output directory");

  auto* train_cmd = app.add_subcommand("train", "Train a model on the training split (model.bin, train_log.tsv)");
  add_corpus_options(train_cmd, o);
  add_experiment_options(train_cmd, o);
  train_cmd->add_option("--out", o.out_dir, "Output directory");

  auto* eval_cmd = app.add_subcommand("eval", "Score a model, replay a decision list, or run the accent probe");
  std::string model_file, decisions_file, format = "both";
  bool probe = false;
  add_corpus_options(eval_cmd, o);
  add_experiment_options(eval_cmd, o);
  eval_cmd->add_option("--model", model_file, "Model file");
  eval_cmd->add_option("--decisions", decisions_file, "Replay an `index expected decision` list instead");
  eval_cmd->add_flag("--probe", probe, "Run the accent consistency probe over window widths and feature sets");
  eval_cmd->add_option("--format", format, "text | json | both (default both)");
  eval_cmd->add_option("--out", o.out_dir, "Output directory");

  auto* spot_cmd = app.add_subcommand("spot", "Per-nucleus decisions (decisions.tsv)");
  std::string spot_out;
  add_corpus_options(spot_cmd, o);
  spot_cmd->add_option("--model", model_file, "Model file")->required();
  spot_cmd->add_option("--out-file", spot_out, "Output file, '-' for standard output");
  spot_cmd->add_option("--out", o.out_dir, "Output directory (decisions.tsv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen) cmd_gen(spec_file, gen_seed, o, out);
    if (*featurize) cmd_featurize(o, out);
    if (*train_cmd) cmd_train(o, out, err);
    if (*eval_cmd) cmd_eval(o, model_file, decisions_file, probe, format, out);
    if (*spot_cmd) cmd_spot(o, model_file, spot_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace prosody::cli

#endif  // PROSODY_TOOLS_CLI_HPP

// mospc command line tool: synthetic data generation, staged training and
// evaluation. Every command is a pure function of (inputs, config, seed) —
// repeated invocations produce byte-identical artifacts. All diagnostics go
// to stderr prefixed "mospc: error: "; exit code 0 iff no error surfaced.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mospc/mospc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool verbose_enabled() {
  const char* v = std::getenv("MOSPC_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void log_epochs(const std::string& tag, const mospc::TrainLog& log) {
  if (!verbose_enabled()) {
    return;
  }
  for (const mospc::EpochRecord& r : log.epochs) {
    std::fprintf(stderr, "%s epoch %zu train_loss %.6f valid_l1 %.6f\n", tag.c_str(), r.epoch,
                 r.train_loss, r.valid_l1);
  }
}

json load_json_file(const fs::path& path) {
  const std::string text = mospc::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw mospc::Error("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) {
    throw mospc::Error("config " + path.string() + ": top level must be an object");
  }
  // A manifest from a previous run doubles as a config: unwrap its snapshot.
  if (j.contains("tool") && j.contains("config")) {
    j = j.at("config");
  }
  return j;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const std::string& a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw mospc::Error(where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw mospc::Error(where + ": bad value for \"" + std::string(key) + "\"");
  }
}

mospc::SynthConfig parse_synth_config(const json& j) {
  reject_unknown_keys(j,
                      {"n_systems", "utterances_per_system", "n_annotators", "feature_dim",
                       "noise_scale", "annotator_noise_scale", "shift", "seed"},
                      "synth config");
  mospc::SynthConfig cfg;
  read_field(j, "n_systems", cfg.n_systems, "synth config");
  read_field(j, "utterances_per_system", cfg.utterances_per_system, "synth config");
  read_field(j, "n_annotators", cfg.n_annotators, "synth config");
  read_field(j, "feature_dim", cfg.feature_dim, "synth config");
  read_field(j, "noise_scale", cfg.noise_scale, "synth config");
  read_field(j, "annotator_noise_scale", cfg.annotator_noise_scale, "synth config");
  read_field(j, "shift", cfg.shift, "synth config");
  read_field(j, "seed", cfg.seed, "synth config");
  return cfg;
}

json synth_config_to_json(const mospc::SynthConfig& cfg) {
  return {{"n_systems", cfg.n_systems},
          {"utterances_per_system", cfg.utterances_per_system},
          {"n_annotators", cfg.n_annotators},
          {"feature_dim", cfg.feature_dim},
          {"noise_scale", cfg.noise_scale},
          {"annotator_noise_scale", cfg.annotator_noise_scale},
          {"shift", cfg.shift},
          {"seed", cfg.seed}};
}

struct CliTrainConfig {
  mospc::TrainConfig train;
  std::vector<std::size_t> extractor_widths{32};
  std::vector<std::size_t> encoder_widths{32, 16};
  std::string stage = "all";
  std::size_t predictors = 7;
  bool cmixup_given = false;
};

bool valid_stage(const std::string& s) {
  return s == "pairwise" || s == "cmixup" || s == "fusion" || s == "all";
}

CliTrainConfig parse_train_config(const json& j) {
  reject_unknown_keys(j,
                      {"learning_rate", "batch_size", "max_epochs", "patience", "beta", "seed",
                       "cmixup", "extractor_widths", "encoder_widths", "stage", "predictors"},
                      "train config");
  CliTrainConfig cfg;
  read_field(j, "learning_rate", cfg.train.learning_rate, "train config");
  read_field(j, "batch_size", cfg.train.batch_size, "train config");
  read_field(j, "max_epochs", cfg.train.max_epochs, "train config");
  read_field(j, "patience", cfg.train.patience, "train config");
  read_field(j, "beta", cfg.train.beta, "train config");
  read_field(j, "seed", cfg.train.seed, "train config");
  read_field(j, "extractor_widths", cfg.extractor_widths, "train config");
  read_field(j, "encoder_widths", cfg.encoder_widths, "train config");
  read_field(j, "stage", cfg.stage, "train config");
  read_field(j, "predictors", cfg.predictors, "train config");
  if (!valid_stage(cfg.stage)) {
    throw mospc::Error("train config: \"stage\" must be pairwise|cmixup|fusion|all");
  }
  if (j.contains("cmixup")) {
    const json& c = j.at("cmixup");
    if (!c.is_object()) {
      throw mospc::Error("train config: \"cmixup\" must be an object");
    }
    reject_unknown_keys(c, {"bandwidth", "alpha", "lambda_override"}, "train config cmixup");
    mospc::CMixupConfig mc;
    read_field(c, "bandwidth", mc.bandwidth, "train config cmixup");
    read_field(c, "alpha", mc.alpha, "train config cmixup");
    if (c.contains("lambda_override")) {
      double lo = 0.0;
      read_field(c, "lambda_override", lo, "train config cmixup");
      mc.lambda_override = lo;
    }
    cfg.train.cmixup = mc;
    cfg.cmixup_given = true;
  }
  mospc::validate(cfg.train);
  return cfg;
}

json train_config_to_json(const CliTrainConfig& cfg) {
  json j = {{"learning_rate", cfg.train.learning_rate},
            {"batch_size", cfg.train.batch_size},
            {"max_epochs", cfg.train.max_epochs},
            {"patience", cfg.train.patience},
            {"beta", cfg.train.beta},
            {"seed", cfg.train.seed},
            {"extractor_widths", cfg.extractor_widths},
            {"encoder_widths", cfg.encoder_widths}};
  if (cfg.train.cmixup) {
    json c = {{"bandwidth", cfg.train.cmixup->bandwidth}, {"alpha", cfg.train.cmixup->alpha}};
    if (cfg.train.cmixup->lambda_override) {
      c["lambda_override"] = *cfg.train.cmixup->lambda_override;
    }
    j["cmixup"] = c;
  }
  return j;
}

void write_json_file(const fs::path& path, const json& j) {
  mospc::write_file_atomic(path, j.dump(2) + "\n");
}

// Manifest: config snapshot, inputs as given, artifact paths relative to the
// manifest's directory, tool version. No timestamps, no absolute paths.
json make_manifest(const std::string& command, const json& config, const json& inputs,
                   std::vector<std::string> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  return {{"tool", "mospc"},
          {"version", mospc::kVersion},
          {"command", command},
          {"config", config},
          {"inputs", inputs},
          {"artifacts", artifacts}};
}

std::string predictor_ckpt_name(std::size_t k) {
  return "predictor_" + std::to_string(k) + ".ckpt";
}

// --split "0.7,0.15,0.15" additionally writes train/valid/test files; the
// split shuffle is seeded by the generator seed.
int cmd_synth(const fs::path& config_path, const fs::path& out_dir, const std::string& name,
              const std::string& split_spec) {
  const mospc::SynthConfig cfg = parse_synth_config(load_json_file(config_path));
  fs::create_directories(out_dir);
  const mospc::Dataset ds = mospc::generate_synthetic(cfg);
  mospc::save_dataset(ds, out_dir / name);
  std::vector<std::string> artifacts{name};
  json config_snapshot = synth_config_to_json(cfg);
  if (!split_spec.empty()) {
    const std::vector<std::string> parts = mospc::split_csv_line(split_spec);
    if (parts.size() != 3) {
      throw mospc::Error("synth: --split expects three comma-separated fractions");
    }
    mospc::SplitFractions fr;
    fr.train = mospc::parse_double(parts[0], "--split train fraction");
    fr.valid = mospc::parse_double(parts[1], "--split valid fraction");
    fr.test = mospc::parse_double(parts[2], "--split test fraction");
    const mospc::SplitResult sp = mospc::split(ds, fr, cfg.seed);
    mospc::save_dataset(sp.train, out_dir / "train.csv");
    mospc::save_dataset(sp.valid, out_dir / "valid.csv");
    mospc::save_dataset(sp.test, out_dir / "test.csv");
    artifacts.insert(artifacts.end(), {"train.csv", "valid.csv", "test.csv"});
    config_snapshot["split"] = {{"train", fr.train}, {"valid", fr.valid}, {"test", fr.test}};
    std::printf("synth: split %zu/%zu/%zu (train/valid/test)\n", sp.train.samples.size(),
                sp.valid.samples.size(), sp.test.samples.size());
  }
  write_json_file(out_dir / "manifest.json",
                  make_manifest("synth", config_snapshot, json::object(), std::move(artifacts)));
  std::printf("synth: wrote %zu rows (%zu systems x %zu utterances, dim %zu) to %s\n",
              ds.samples.size(), cfg.n_systems, cfg.utterances_per_system, cfg.feature_dim,
              (out_dir / name).string().c_str());
  return 0;
}

struct TrainArgs {
  fs::path config_path;
  fs::path train_path;
  fs::path valid_path;
  fs::path out_dir;
  // flag overrides; the config (or a reused manifest) supplies the defaults
  std::optional<std::string> stage;
  std::optional<std::size_t> predictors;
};

int cmd_train(const TrainArgs& args) {
  CliTrainConfig cfg = parse_train_config(load_json_file(args.config_path));
  if (args.stage) {
    cfg.stage = *args.stage;
  }
  if (args.predictors) {
    cfg.predictors = *args.predictors;
  }
  const bool run_pairwise = cfg.stage == "pairwise" || cfg.stage == "all";
  const bool run_cmixup = cfg.stage == "cmixup" || cfg.stage == "all";
  const bool run_fusion = cfg.stage == "fusion" || cfg.stage == "all";
  if (cfg.predictors == 0) {
    throw mospc::Error("train: --predictors must be positive");
  }
  if (run_cmixup && !cfg.train.cmixup) {
    cfg.train.cmixup = mospc::CMixupConfig{};
  }

  const mospc::Dataset train_ds = mospc::load_dataset(args.train_path);
  const mospc::Dataset valid_ds = mospc::load_dataset(args.valid_path);
  fs::create_directories(args.out_dir);

  std::vector<std::string> artifacts;
  const std::size_t k_pred = cfg.predictors;

  // Stage order is fixed: pairwise -> cmixup -> fusion. Later stages load the
  // canonical predictor checkpoints written by earlier ones, so each stage is
  // independently invokable once its prerequisites exist on disk.
  std::vector<mospc::Predictor> predictors;
  if (run_pairwise) {
    for (std::size_t k = 0; k < k_pred; ++k) {
      mospc::Rng init_rng(cfg.train.seed + k);
      mospc::Predictor p = mospc::make_predictor(train_ds.feature_dim, cfg.extractor_widths,
                                                 cfg.encoder_widths, init_rng);
      mospc::TrainConfig tc = cfg.train;
      tc.seed = cfg.train.seed + k;
      const mospc::TrainLog log = mospc::train_predictor_pairwise(p, train_ds, valid_ds, tc);
      log_epochs("pairwise " + std::to_string(k), log);
      mospc::save_predictor(p, args.out_dir / predictor_ckpt_name(k));
      mospc::write_file_atomic(args.out_dir / ("pairwise_" + std::to_string(k) + ".log.csv"),
                               mospc::train_log_to_csv(log));
      artifacts.push_back(predictor_ckpt_name(k));
      artifacts.push_back("pairwise_" + std::to_string(k) + ".log.csv");
      std::printf("train pairwise predictor %zu: epochs=%zu best_epoch=%zu best_valid_l1=%s\n", k,
                  log.epochs.size(), log.best_epoch,
                  mospc::format_double(log.best_valid_l1).c_str());
      predictors.push_back(std::move(p));
    }
  }

  auto load_stage_predictor = [&](std::size_t k, const char* stage_name) {
    const fs::path path = args.out_dir / predictor_ckpt_name(k);
    if (!fs::exists(path)) {
      throw mospc::Error(std::string("train: ") + stage_name +
                         " stage requires predictor checkpoints from the pairwise stage; missing " +
                         path.string());
    }
    return mospc::load_predictor(path);
  };

  if (run_cmixup) {
    for (std::size_t k = 0; k < k_pred; ++k) {
      mospc::Predictor p =
          run_pairwise ? std::move(predictors[k]) : load_stage_predictor(k, "cmixup");
      mospc::TrainConfig tc = cfg.train;
      tc.seed = cfg.train.seed + k;
      const mospc::TrainLog log = mospc::train_predictor_cmixup(p, train_ds, valid_ds, tc);
      log_epochs("cmixup " + std::to_string(k), log);
      mospc::save_predictor(p, args.out_dir / predictor_ckpt_name(k));
      mospc::write_file_atomic(args.out_dir / ("cmixup_" + std::to_string(k) + ".log.csv"),
                               mospc::train_log_to_csv(log));
      if (!run_pairwise) {
        artifacts.push_back(predictor_ckpt_name(k));
      }
      artifacts.push_back("cmixup_" + std::to_string(k) + ".log.csv");
      std::printf("train cmixup predictor %zu: epochs=%zu best_epoch=%zu best_valid_l1=%s\n", k,
                  log.epochs.size(), log.best_epoch,
                  mospc::format_double(log.best_valid_l1).c_str());
      if (run_pairwise) {
        predictors[k] = std::move(p);
      } else {
        predictors.push_back(std::move(p));
      }
    }
  }

  if (run_fusion) {
    if (predictors.empty()) {
      for (std::size_t k = 0; k < k_pred; ++k) {
        predictors.push_back(load_stage_predictor(k, "fusion"));
      }
    }
    mospc::FusionModel f = mospc::make_fusion(k_pred);
    const mospc::TrainLog log =
        mospc::train_fusion(f, predictors, train_ds, valid_ds, cfg.train);
    log_epochs("fusion", log);
    mospc::save_fusion(f, args.out_dir / "fusion.ckpt");
    mospc::write_file_atomic(args.out_dir / "fusion.log.csv", mospc::train_log_to_csv(log));
    artifacts.push_back("fusion.ckpt");
    artifacts.push_back("fusion.log.csv");
    std::printf("train fusion: epochs=%zu best_epoch=%zu best_valid_l1=%s\n", log.epochs.size(),
                log.best_epoch, mospc::format_double(log.best_valid_l1).c_str());
  }

  artifacts.push_back("manifest.json");
  const json inputs = {{"train", args.train_path.string()}, {"valid", args.valid_path.string()}};
  json config_snapshot = train_config_to_json(cfg);
  config_snapshot["stage"] = cfg.stage;
  config_snapshot["predictors"] = k_pred;
  write_json_file(args.out_dir / "manifest.json",
                  make_manifest("train", config_snapshot, inputs, std::move(artifacts)));
  return 0;
}

struct EvalArgs {
  fs::path model_dir;
  fs::path data_path;
  fs::path out_dir;
  bool segments = false;
  std::optional<fs::path> categories_path;
};

// id -> category map; every id must exist in the dataset. Dataset rows absent
// from the file are excluded from the category report.
std::map<std::string, std::string> load_categories(const fs::path& path,
                                                   const mospc::Dataset& ds) {
  const std::string text = mospc::read_file(path);
  std::map<std::string, std::string> out;
  std::set<std::string> known;
  for (const mospc::SpeechSample& s : ds.samples) {
    known.insert(s.id);
  }
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) {
      end = text.size();
    }
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    ++row;
    if (row == 1) {
      if (line != "id,category") {
        throw mospc::Error("categories " + path.string() + ": expected header \"id,category\"");
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = mospc::split_csv_line(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw mospc::Error("categories " + path.string() + ": row " + std::to_string(row) +
                         ": expected \"id,category\"");
    }
    if (known.count(fields[0]) == 0) {
      throw mospc::Error("categories " + path.string() + ": row " + std::to_string(row) +
                         ": unknown id \"" + fields[0] + "\"");
    }
    if (!out.emplace(fields[0], fields[1]).second) {
      throw mospc::Error("categories " + path.string() + ": row " + std::to_string(row) +
                         ": duplicate id \"" + fields[0] + "\"");
    }
  }
  if (out.empty()) {
    throw mospc::Error("categories " + path.string() + ": no rows");
  }
  return out;
}

int cmd_eval(const EvalArgs& args) {
  const fs::path fusion_path = args.model_dir / "fusion.ckpt";
  if (!fs::exists(fusion_path)) {
    throw mospc::Error("eval: missing " + fusion_path.string() +
                       " (model dir incomplete; run train --stage fusion)");
  }
  const mospc::FusionModel fusion = mospc::load_fusion(fusion_path);
  std::vector<mospc::Predictor> predictors;
  for (std::size_t k = 0; k < fusion.weights.size(); ++k) {
    const fs::path p = args.model_dir / predictor_ckpt_name(k);
    if (!fs::exists(p)) {
      throw mospc::Error("eval: missing " + p.string() +
                         " (model dir incomplete; run train --stage pairwise)");
    }
    predictors.push_back(mospc::load_predictor(p));
  }
  const mospc::Dataset ds = mospc::load_dataset(args.data_path);
  if (ds.feature_dim != mospc::predictor_input_dim(predictors[0])) {
    throw mospc::Error("eval: dataset feature_dim " + std::to_string(ds.feature_dim) +
                       " != model input dim " +
                       std::to_string(mospc::predictor_input_dim(predictors[0])));
  }

  const std::vector<double> pred = mospc::predict_fused(predictors, fusion, ds);
  const std::vector<double> truth = mospc::dataset_labels(ds);
  std::vector<std::string> systems;
  systems.reserve(ds.samples.size());
  for (const mospc::SpeechSample& s : ds.samples) {
    systems.push_back(s.system_id);
  }

  const mospc::EvalReport report = mospc::evaluate(pred, truth, systems);
  fs::create_directories(args.out_dir);
  std::vector<std::string> artifacts{"eval_report.json", "eval_report.csv"};
  write_json_file(args.out_dir / "eval_report.json", mospc::to_json(report));
  mospc::write_file_atomic(args.out_dir / "eval_report.csv", mospc::to_csv(report));

  std::printf("level      %10s %10s %10s %10s\n", "mse", "lcc", "srcc", "ktau");
  std::printf("utterance  %10.6f %10.6f %10.6f %10.6f\n", report.utterance.mse,
              report.utterance.lcc, report.utterance.srcc, report.utterance.ktau);
  std::printf("system     %10.6f %10.6f %10.6f %10.6f\n", report.system.mse, report.system.lcc,
              report.system.srcc, report.system.ktau);
  std::printf("n_utterances %zu, n_systems %zu\n", report.n_utterances, report.n_systems);

  if (args.segments) {
    const mospc::SegmentReport seg =
        mospc::segment_ranking_accuracy(pred, truth, mospc::default_segments());
    write_json_file(args.out_dir / "segment_report.json", mospc::to_json(seg));
    mospc::write_file_atomic(args.out_dir / "segment_report.csv", mospc::to_csv(seg));
    artifacts.push_back("segment_report.json");
    artifacts.push_back("segment_report.csv");
    std::printf("segment    %10s %10s\n", "n_pairs", "accuracy");
    for (const mospc::SegmentResult& s : seg.segments) {
      if (s.accuracy) {
        std::printf("%-10s %10zu %10.6f\n", mospc::segment_label(s).c_str(), s.n_pairs,
                    *s.accuracy);
      } else {
        std::printf("%-10s %10zu %10s\n", mospc::segment_label(s).c_str(), s.n_pairs, "n/a");
      }
    }
  }

  if (args.categories_path) {
    const auto cats = load_categories(*args.categories_path, ds);
    std::vector<std::string> labels;
    std::vector<double> cat_pred, cat_truth;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
      const auto it = cats.find(ds.samples[i].id);
      if (it == cats.end()) {
        continue;
      }
      labels.push_back(it->second);
      cat_pred.push_back(pred[i]);
      cat_truth.push_back(truth[i]);
    }
    const mospc::CategoryErrorReport cer = mospc::category_error_report(labels, cat_pred, cat_truth);
    write_json_file(args.out_dir / "category_report.json", mospc::to_json(cer));
    mospc::write_file_atomic(args.out_dir / "category_report.csv", mospc::to_csv(cer));
    artifacts.push_back("category_report.json");
    artifacts.push_back("category_report.csv");
    std::printf("category   %10s %12s %12s\n", "n", "mean_sq_err", "std_sq_err");
    for (const auto& [cat, c] : cer.categories) {
      std::printf("%-10s %10zu %12.6f %12.6f\n", cat.c_str(), c.n, c.mean_sq_err, c.std_sq_err);
    }
  }

  artifacts.push_back("manifest.json");
  json config = {{"segments", args.segments},
                 {"categories", args.categories_path ? json(args.categories_path->string())
                                                     : json(nullptr)}};
  const json inputs = {{"model_dir", args.model_dir.string()},
                       {"data", args.data_path.string()}};
  write_json_file(args.out_dir / "manifest.json",
                  make_manifest("eval", config, inputs, std::move(artifacts)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MOS predictor training and evaluation with pairwise ranking loss"};
  app.set_version_flag("--version", std::string(mospc::kVersion));
  app.require_subcommand(1);

  std::string synth_config, synth_out_dir, synth_name = "dataset.csv", synth_split;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic MOS dataset");
  synth->add_option("--config", synth_config, "JSON generator config")->required();
  synth->add_option("--out-dir", synth_out_dir, "output directory")->required();
  synth->add_option("--name", synth_name, "dataset file name (default dataset.csv)");
  synth->add_option("--split", synth_split,
                    "also write train/valid/test files, e.g. 0.7,0.15,0.15");

  TrainArgs train_args;
  std::string train_config, train_train, train_valid, train_out;
  CLI::App* train = app.add_subcommand("train", "run the training stages");
  train->add_option("--config", train_config, "JSON train config")->required();
  train->add_option("--train", train_train, "training dataset CSV")->required();
  train->add_option("--valid", train_valid, "validation dataset CSV")->required();
  train->add_option("--out-dir", train_out, "output directory")->required();
  train->add_option("--stage", train_args.stage, "pairwise|cmixup|fusion|all (config default: all)")
      ->check(CLI::IsMember({"pairwise", "cmixup", "fusion", "all"}));
  train->add_option("--predictors", train_args.predictors,
                    "number of fused predictors (config default: 7)");

  EvalArgs eval_args;
  std::string eval_model, eval_data, eval_out, eval_categories;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--model-dir", eval_model, "directory with checkpoints")->required();
  eval->add_option("--data", eval_data, "dataset CSV to evaluate on")->required();
  eval->add_option("--out-dir", eval_out, "output directory for reports")->required();
  eval->add_flag("--segments", eval_args.segments, "emit segment ranking accuracy report");
  eval->add_option("--categories", eval_categories, "id,category CSV for per-category errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << "mospc: error: " << e.what() << "\n";
    return e.get_exit_code();
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_config, synth_out_dir, synth_name, synth_split);
    }
    if (train->parsed()) {
      train_args.config_path = train_config;
      train_args.train_path = train_train;
      train_args.valid_path = train_valid;
      train_args.out_dir = train_out;
      return cmd_train(train_args);
    }
    if (eval->parsed()) {
      eval_args.model_dir = eval_model;
      eval_args.data_path = eval_data;
      eval_args.out_dir = eval_out;
      if (!eval_categories.empty()) {
        eval_args.categories_path = fs::path(eval_categories);
      }
      return cmd_eval(eval_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "mospc: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

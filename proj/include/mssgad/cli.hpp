/*
 * Copyright 2026 The MssGAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Subcommands of the mssgad tool. Each cmd_* returns a process exit status:
//
//   0  success
//   1  usage or configuration error
//   2  data, IO, or model-format error
//   3  training diverged (a checkpoint was written)
//   4  gradient check above threshold

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mssgad/config.hpp"
#include "mssgad/evaluation.hpp"
#include "mssgad/gradcheck_suite.hpp"
#include "mssgad/model_io.hpp"
#include "mssgad/synth.hpp"
#include "mssgad/tudataset.hpp"

namespace mssgad::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kDiverged = 3,
  kGradCheck = 4,
};

namespace fs = std::filesystem;

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kUsage;
  if (dynamic_cast<const DivergenceError*>(&e)) return kDiverged;
  if (dynamic_cast<const Error*>(&e)) return kData;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kData;
  return kData;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IngestionError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IngestionError("cannot write " + path.string());
  return out;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string kind = "hexagon";
  std::size_t n_normal = 100;
  std::size_t n_abnormal = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string name;  // defaults to the corpus name
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.n_normal == 0 || a.n_abnormal == 0) {
      throw ConfigError(std::string("synth needs at least one graph per class; the ") +
                        (a.n_normal == 0 ? "normal" : "abnormal") + " side is empty");
    }
    GraphSet set;
    if (a.kind == "hexagon") {
      set = synth::hexagon_corpus(a.n_normal, a.n_abnormal, derive_seed(a.seed, "synth"));
    } else if (a.kind == "connectivity") {
      set = synth::connectivity_corpus(a.n_normal, a.n_abnormal, derive_seed(a.seed, "synth"));
    } else {
      throw ConfigError("unknown synth kind '" + a.kind + "' (expected hexagon or connectivity)");
    }
    const std::string name = a.name.empty() ? set.name() : a.name;
    ensure_dir(a.out_dir);
    save_tudataset(set, a.out_dir, name, false);
    out << "wrote " << set.size() << " graphs (" << a.n_normal << " normal, " << a.n_abnormal
        << " abnormal) to " << (fs::path(a.out_dir) / name).string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- shared config handling ------------------------------------------------

struct ConfigArgs {
  std::string config_file;
  ConfigMap overrides;
};

inline RunConfig resolve_config(const ConfigArgs& a) {
  ConfigMap base;
  if (!a.config_file.empty()) base = read_config_file(a.config_file);
  const RunConfig c = run_config_from_map(merge_config(base, a.overrides));
  if (c.dataset_dir.empty() || c.dataset_name.empty()) {
    throw ConfigError("dataset_dir and dataset_name are required");
  }
  return c;
}

inline GraphSet load_configured(const RunConfig& c) {
  LoadOptions opts;
  opts.features = c.features;
  opts.anomaly_label = c.anomaly_label;
  return load_tudataset(c.dataset_dir, c.dataset_name, opts);
}

// ---- train -----------------------------------------------------------------

inline int cmd_train(const ConfigArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = resolve_config(a);
    const GraphSet set = load_configured(c);
    ensure_dir(c.output_dir);
    const TrainedModel model = train(set, c.train);
    const fs::path model_path = fs::path(c.output_dir) / "model.bin";
    save_model(model, model_path);
    {
      std::ofstream log = open_out(fs::path(c.output_dir) / "train_log.csv");
      write_training_log_csv(log, model.log);
    }
    const TrainingRecord& first = model.log.front();
    const TrainingRecord& last = model.log.back();
    out << std::setprecision(6);
    out << "config_hash " << c.hash() << '\n';
    out << "weights alpha=" << model.weights.alpha << " beta=" << model.weights.beta << '\n';
    out << "epoch " << last.epoch << " mean_dist3=" << last.dist3 << " (epoch " << first.epoch
        << ": " << first.dist3 << ")" << " loss_p=" << last.loss_p << " loss_n=" << last.loss_n
        << '\n';
    out << "model " << model_path.string() << '\n';
    return kOk;
  } catch (const DivergenceError& e) {
    const fs::path ckpt = fs::path(c.output_dir) / "checkpoint.bin";
    try {
      ensure_dir(c.output_dir);
      save_model(e.last_good(), ckpt);
      err << "error: " << e.what() << " at epoch " << e.epoch() << "; last good checkpoint "
          << ckpt.string() << '\n';
    } catch (const std::exception& inner) {
      err << "error: " << e.what() << "; checkpoint could not be written: " << inner.what() << '\n';
    }
    return kDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- eval / sweep-k --------------------------------------------------------

struct EvalArgs {
  ConfigArgs config;
  bool ablate_constant_weights = false;
  bool ablate_drop_dist3 = false;
  // Empty means no sweep; otherwise "kmax" or "kmin..kmax".
  std::string sweep_k;
};

inline std::pair<std::size_t, std::size_t> parse_k_range(const std::string& s) {
  auto num = [&](const std::string& part) {
    return detail::parse_config_number<std::size_t>("sweep-k", part);
  };
  const auto dots = s.find("..");
  std::size_t lo = 1, hi = 0;
  if (dots == std::string::npos) {
    hi = num(s);
  } else {
    lo = num(s.substr(0, dots));
    hi = num(s.substr(dots + 2));
  }
  if (lo < 1 || hi < lo) throw ConfigError("invalid k range '" + s + "'");
  return {lo, hi};
}

inline std::vector<int> orientations(const RunConfig& c, const GraphSet& set) {
  if (c.orientations != "both") {
    return {detail::parse_config_number<int>("orientations", c.orientations)};
  }
  // Every class in turn is the anomaly class; for binary labels that is
  // A=0 then A=1.
  const std::vector<int> classes = set.classes();
  if (classes.size() < 2) {
    throw PartitionError("dataset '" + c.dataset_name + "' has fewer than two label classes");
  }
  return classes;
}

inline std::string report_stem(const RunConfig& c, const EvalReport& r) {
  std::string stem = "report_" + c.dataset_name + "_A" + std::to_string(r.orientation);
  if (r.ablation != "none") stem += "_" + r.ablation;
  return stem;
}

inline void write_report_files(const RunConfig& c, const EvalReport& r, const fs::path& dir,
                               const std::string& stem) {
  {
    std::ofstream j = open_out(dir / (stem + ".json"));
    j << to_json(r).dump(2) << '\n';
  }
  std::ofstream csv = open_out(dir / (stem + ".csv"));
  write_report_csv_header(csv, c.folds);
  write_report_csv_row(csv, r);
}

inline int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  try {
    RunConfig c = resolve_config(a.config);
    if (a.ablate_constant_weights) c.train.ablate_constant_weights = true;
    if (a.ablate_drop_dist3) c.train.ablate_drop_dist3 = true;
    const GraphSet set = load_configured(c);
    ensure_dir(c.output_dir);
    const std::vector<int> labels = orientations(c, set);

    out << std::fixed << std::setprecision(4);
    if (a.sweep_k.empty()) {
      const std::string hash = c.hash();
      for (int label : labels) {
        EvalReport r = cross_validate(set.with_anomaly_label(label), c.train, c.folds,
                                      c.train.seed, c.threads);
        r.config_hash = hash;
        const std::string stem = report_stem(c, r);
        write_report_files(c, r, c.output_dir, stem);
        out << c.dataset_name << " A=" << label << " ablation=" << r.ablation
            << " mean_auc=" << r.mean_auc << " std_auc=" << r.std_auc << "  ["
            << (fs::path(c.output_dir) / (stem + ".json")).string() << "]\n";
      }
      return kOk;
    }

    const auto [k_lo, k_hi] = parse_k_range(a.sweep_k);
    const fs::path sweep_path = fs::path(c.output_dir) / ("sweep_k_" + c.dataset_name + ".csv");
    std::ofstream sweep = open_out(sweep_path);
    sweep << "dataset,orientation,ablation,anchor_k,mean_auc,std_auc,seed,config_hash\n";
    sweep << std::setprecision(17);
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      RunConfig ck = c;
      ck.train.anchor_k = k;
      const std::string hash = ck.hash();
      for (int label : labels) {
        EvalReport r = cross_validate(set.with_anomaly_label(label), ck.train, ck.folds,
                                      ck.train.seed, ck.threads);
        r.config_hash = hash;
        write_report_files(ck, r, ck.output_dir, report_stem(ck, r) + "_k" + std::to_string(k));
        sweep << c.dataset_name << ',' << label << ',' << r.ablation << ',' << k << ','
              << r.mean_auc << ',' << r.std_auc << ',' << r.seed << ',' << hash << '\n';
        out << "k=" << k << " A=" << label << " mean_auc=" << r.mean_auc
            << " std_auc=" << r.std_auc << '\n';
      }
    }
    out << "sweep table " << sweep_path.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string model_file;
  std::string dataset_dir;
  std::string dataset_name;
  FeatureMode features = FeatureMode::kAuto;
  double threshold = 0.0;
  std::string csv_file;
};

inline int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const TrainedModel model = load_model(a.model_file);
    LoadOptions opts;
    opts.features = a.features;
    opts.remap_graph_labels = false;
    const GraphSet set = load_tudataset(a.dataset_dir, a.dataset_name, opts);
    if (set.size() > 0 && set.feature_dim() != model.params.dims.front()) {
      throw DimensionError("feature dimension mismatch: model expects " +
                           std::to_string(model.params.dims.front()) + ", dataset has " +
                           std::to_string(set.feature_dim()));
    }
    std::ofstream csv;
    if (!a.csv_file.empty()) {
      csv = open_out(a.csv_file);
      csv << "graph,label,dist_p,dist_n,score_g,predicted\n" << std::setprecision(17);
    }
    out << "graph  label  dist_p      dist_n      score_g     predicted\n";
    std::size_t n_abnormal = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const ScoreResult s = score_graph(set[i], model, a.threshold);
      const char* pred = s.predicted_abnormal ? "abnormal" : "normal";
      n_abnormal += s.predicted_abnormal ? 1 : 0;
      out << std::setw(5) << i << "  " << std::setw(5) << set[i].label() << "  " << std::fixed
          << std::setprecision(6) << std::setw(10) << s.dist_p << "  " << std::setw(10) << s.dist_n
          << "  " << std::setw(10) << s.score_g << "  " << pred << '\n';
      if (csv.is_open()) {
        csv << i << ',' << set[i].label() << ',' << s.dist_p << ',' << s.dist_n << ','
            << s.score_g << ',' << pred << '\n';
      }
    }
    out << set.size() << " graphs, " << n_abnormal << " predicted abnormal\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- gradcheck -------------------------------------------------------------

inline int cmd_gradcheck(const GradCheckOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const GradCheckReport rep = run_gradcheck(opt);
    print_gradcheck_report(out, rep);
    return rep.passed() ? kOk : kGradCheck;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- argument parsing ------------------------------------------------------

namespace detail {

// Flags that map directly onto config keys.
struct ConfigFlags {
  std::string dataset_dir, dataset_name, features, output_dir, optimizer, fe_kind, hidden_dims,
      orientations;
  std::string anomaly_label, epochs, batch_size, learning_rate, seed, anchor_k, folds, threads;
  std::vector<std::string> sets;

  void add_to(CLI::App& app) {
    app.add_option("--dataset-dir", dataset_dir, "Directory holding the dataset folder");
    app.add_option("--dataset-name", dataset_name, "Dataset name (file prefix)");
    app.add_option("--features", features, "auto | attributes | labels | degree");
    app.add_option("--anomaly-label", anomaly_label, "Label value treated as abnormal");
    app.add_option("--hidden-dims", hidden_dims, "Comma-separated hidden layer widths");
    app.add_option("--epochs", epochs);
    app.add_option("--batch-size", batch_size);
    app.add_option("--learning-rate", learning_rate);
    app.add_option("--optimizer", optimizer, "adam | sgd");
    app.add_option("--seed", seed, "Root seed");
    app.add_option("--fe-kind", fe_kind, "max | mean");
    app.add_option("--anchor-k", anchor_k, "Anchor sampling ratio factor");
    app.add_option("--folds", folds, "Cross-validation folds");
    app.add_option("--threads", threads, "Fold-level worker threads");
    app.add_option("--orientations", orientations, "both | <label>");
    app.add_option("--out,-o", output_dir, "Output directory");
    app.add_option("--set", sets, "Extra key=value override (repeatable)");
  }

  ConfigMap overrides() const {
    ConfigMap m;
    auto put = [&](const char* key, const std::string& v) {
      if (!v.empty()) m[key] = v;
    };
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      const std::string key(mssgad::detail::trim(std::string_view(kv).substr(0, eq)));
      const auto& keys = mssgad::detail::config_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      m[key] = std::string(mssgad::detail::trim(std::string_view(kv).substr(eq + 1)));
    }
    put("dataset_dir", dataset_dir);
    put("dataset_name", dataset_name);
    put("features", features);
    put("anomaly_label", anomaly_label);
    put("hidden_dims", hidden_dims);
    put("epochs", epochs);
    put("batch_size", batch_size);
    put("learning_rate", learning_rate);
    put("optimizer", optimizer);
    put("seed", seed);
    put("fe_kind", fe_kind);
    put("anchor_k", anchor_k);
    put("folds", folds);
    put("threads", threads);
    put("orientations", orientations);
    put("output_dir", output_dir);
    return m;
  }
};

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-level anomaly detection by multi-representation space separation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic TUDataset corpus");
  synth->add_option("kind", synth_args.kind, "hexagon | connectivity")->required();
  synth->add_option("--normal", synth_args.n_normal, "Number of normal graphs");
  synth->add_option("--abnormal", synth_args.n_abnormal, "Number of abnormal graphs");
  synth->add_option("--seed", synth_args.seed, "Root seed");
  synth->add_option("--out,-o", synth_args.out_dir, "Output directory")->required();
  synth->add_option("--name", synth_args.name, "Dataset name (default: corpus name)");

  std::string train_config;
  detail::ConfigFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model on a labeled graph set");
  train_cmd->add_option("--config,-c", train_config, "key=value config file");
  train_flags.add_to(*train_cmd);
  bool train_ablate_cw = false, train_ablate_d3 = false;
  train_cmd->add_flag("--ablate-constant-weights", train_ablate_cw, "Fix alpha = beta = 1");
  train_cmd->add_flag("--ablate-drop-dist3", train_ablate_d3, "Drop the anchor separation term");

  std::string eval_config;
  detail::ConfigFlags eval_flags;
  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Stratified k-fold evaluation");
  eval->add_option("--config,-c", eval_config, "key=value config file");
  eval_flags.add_to(*eval);
  eval->add_flag("--ablate-constant-weights", eval_args.ablate_constant_weights,
                 "Fix alpha = beta = 1");
  eval->add_flag("--ablate-drop-dist3", eval_args.ablate_drop_dist3,
                 "Drop the anchor separation term");
  eval->add_option("--sweep-k", eval_args.sweep_k, "Sweep the anchor factor: kmax or kmin..kmax");

  std::string sweep_config;
  detail::ConfigFlags sweep_flags;
  EvalArgs sweep_args;
  sweep_args.sweep_k = "1..6";
  CLI::App* sweep = app.add_subcommand("sweep-k", "Evaluate over a range of anchor factors");
  sweep->add_option("--config,-c", sweep_config, "key=value config file");
  sweep_flags.add_to(*sweep);
  sweep->add_flag("--ablate-constant-weights", sweep_args.ablate_constant_weights);
  sweep->add_flag("--ablate-drop-dist3", sweep_args.ablate_drop_dist3);
  sweep->add_option("--k", sweep_args.sweep_k, "kmax or kmin..kmax")->capture_default_str();

  ScoreArgs score_args;
  std::string score_features = "auto";
  CLI::App* score = app.add_subcommand("score", "Score graphs with a saved model");
  score->add_option("--model,-m", score_args.model_file, "Model file")->required();
  score->add_option("--dataset-dir", score_args.dataset_dir)->required();
  score->add_option("--dataset-name", score_args.dataset_name)->required();
  score->add_option("--features", score_features, "auto | attributes | labels | degree");
  score->add_option("--threshold", score_args.threshold, "Abnormal iff score_g < threshold");
  score->add_option("--csv", score_args.csv_file, "Also write the table as CSV");

  GradCheckOptions gc;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gradcheck->add_option("--seed", gc.seed);
  gradcheck->add_option("--trials", gc.trials);
  gradcheck->add_option("--threshold", gc.threshold);
  gradcheck->add_flag("--inject-fault", gc.inject_fault, "Use a broken relu backward");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args, out, err);
    if (train_cmd->parsed()) {
      ConfigArgs ca{train_config, train_flags.overrides()};
      if (train_ablate_cw) ca.overrides["ablate_constant_weights"] = "true";
      if (train_ablate_d3) ca.overrides["ablate_drop_dist3"] = "true";
      return cmd_train(ca, out, err);
    }
    if (eval->parsed()) {
      eval_args.config = {eval_config, eval_flags.overrides()};
      return cmd_eval(eval_args, out, err);
    }
    if (sweep->parsed()) {
      sweep_args.config = {sweep_config, sweep_flags.overrides()};
      return cmd_eval(sweep_args, out, err);
    }
    if (score->parsed()) {
      score_args.features = parse_feature_mode(score_features);
      return cmd_score(score_args, out, err);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(gc, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kUsage;
}

}  // namespace mssgad::cli

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

#include <atomic>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mssgad/metrics.hpp"
#include "mssgad/scorer.hpp"
#include "mssgad/trainer.hpp"
#include "mssgad/version.hpp"

namespace mssgad {

struct FoldOutcome {
  double auc = 0.0;
  WeightFactors weights;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t train_fingerprint = 0;
};

struct EvalReport {
  std::string dataset;
  int orientation = 1;  // the anomaly label
  std::size_t k = 5;
  std::vector<double> fold_aucs;
  std::vector<FoldOutcome> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string ablation = "none";
  std::size_t anchor_k = 4;
  std::uint64_t fold_assignment_hash = 0;
  std::string code_version{kVersion};
};

inline std::string ablation_tag(const TrainConfig& cfg) {
  if (cfg.ablate_constant_weights && cfg.ablate_drop_dist3) return "constant_weights+drop_dist3";
  if (cfg.ablate_constant_weights) return "constant_weights";
  if (cfg.ablate_drop_dist3) return "drop_dist3";
  return "none";
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

// Trains on one fold's complement and scores the held-out graphs. The AUC
// anomaly score is -Score_g, so higher means more anomalous.
inline FoldOutcome run_fold(const GraphSet& set, const FoldPlan& plan, std::size_t fold,
                            const TrainConfig& cfg, std::uint64_t seed) {
  const GraphSet train_set = set.subset(plan.train_indices(fold));
  TrainConfig fold_cfg = cfg;
  fold_cfg.seed = derive_seed(seed, "fold", fold);
  const TrainedModel model = train(train_set, fold_cfg);
  std::vector<double> anomaly_scores;
  std::vector<bool> abnormal;
  const std::vector<std::size_t> test = plan.test_indices(fold);
  for (std::size_t i : test) {
    anomaly_scores.push_back(-score_graph(set[i], model).score_g);
    abnormal.push_back(set.is_abnormal(i));
  }
  FoldOutcome out;
  out.auc = auc(anomaly_scores, abnormal);
  out.weights = model.weights;
  out.train_size = train_set.size();
  out.test_size = test.size();
  out.train_fingerprint = model.source_fingerprint;
  return out;
}

// Stratified k-fold cross-validation with retraining per fold. Folds may run
// on up to `threads` workers; results do not depend on the thread count.
inline EvalReport cross_validate(const GraphSet& set, const TrainConfig& cfg, std::size_t k,
                                 std::uint64_t seed, std::size_t threads = 1) {
  cfg.validate();
  const FoldPlan plan = make_folds(set, k, derive_seed(seed, "folds"));
  std::vector<FoldOutcome> outcomes(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        outcomes[f] = run_fold(set, plan, f, cfg, seed);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, k));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport r;
  r.dataset = set.name();
  r.orientation = set.anomaly_label();
  r.k = k;
  r.seed = seed;
  r.ablation = ablation_tag(cfg);
  r.anchor_k = cfg.anchor_k;
  r.fold_assignment_hash = plan.hash();
  r.folds = outcomes;
  for (const FoldOutcome& o : outcomes) r.fold_aucs.push_back(o.auc);
  r.mean_auc = mean(r.fold_aucs);
  r.std_auc = stddev(r.fold_aucs);
  return r;
}

// Cross-validation with label 0 as the anomaly class, then label 1.
inline std::pair<EvalReport, EvalReport> run_both_orientations(const GraphSet& set,
                                                               const TrainConfig& cfg,
                                                               std::size_t k, std::uint64_t seed,
                                                               std::size_t threads = 1) {
  if (set.classes().size() < 2) {
    throw PartitionError("graph set '" + set.name() + "' has fewer than two label classes");
  }
  return {cross_validate(set.with_anomaly_label(0), cfg, k, seed, threads),
          cross_validate(set.with_anomaly_label(1), cfg, k, seed, threads)};
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const FoldOutcome& f = r.folds[i];
    folds.push_back({{"fold", i},
                     {"auc", f.auc},
                     {"alpha", f.weights.alpha},
                     {"beta", f.weights.beta},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"train_fingerprint", hex64(f.train_fingerprint)}});
  }
  return {{"dataset", r.dataset},
          {"orientation", r.orientation},
          {"k", r.k},
          {"ablation", r.ablation},
          {"anchor_k", r.anchor_k},
          {"fold_aucs", r.fold_aucs},
          {"mean_auc", r.mean_auc},
          {"std_auc", r.std_auc},
          {"folds", folds},
          {"seed", r.seed},
          {"config_hash", r.config_hash},
          {"fold_assignment_hash", hex64(r.fold_assignment_hash)},
          {"code_version", r.code_version}};
}

inline void write_report_csv_header(std::ostream& out, std::size_t k) {
  out << "dataset,orientation,ablation,anchor_k";
  for (std::size_t i = 1; i <= k; ++i) out << ",auc_fold" << i;
  out << ",mean_auc,std_auc,seed,config_hash,code_version\n";
}

inline void write_report_csv_row(std::ostream& out, const EvalReport& r) {
  const auto old = out.precision(17);
  out << r.dataset << ',' << r.orientation << ',' << r.ablation << ',' << r.anchor_k;
  for (double a : r.fold_aucs) out << ',' << a;
  out << ',' << r.mean_auc << ',' << r.std_auc << ',' << r.seed << ',' << r.config_hash << ','
      << r.code_version << '\n';
  out.precision(old);
}

}  // namespace mssgad

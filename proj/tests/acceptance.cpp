// End-to-end acceptance run: one PASS/FAIL line per criterion. Exits
// nonzero when a hard criterion fails. The MUTAG check is soft: a miss is
// reported with its diagnostics but does not change the exit status.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mssgad.hpp"
#include "mssgad/cli.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mssgad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool soft = false;  // a failure is a diagnosed miss, not a hard failure
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

GraphSet hexagon() { return synth::hexagon_corpus(100, 100, 1); }
GraphSet connectivity() { return synth::connectivity_corpus(100, 100, 1); }

// ---------------------------------------------------------------------------

Outcome gradient_integrity() {
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckOptions opt;
  opt.seed = 0;
  opt.trials = 100;
  const GradCheckReport rep = run_gradcheck(opt);
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << rep.trials << " trials, " << rep.coordinates << " coordinates, worst rel error "
    << std::scientific << std::setprecision(2) << rep.worst << " (" << rep.worst_case << "), "
    << std::fixed << std::setprecision(1) << secs << " s";
  return {rep.passed() && rep.trials >= 100 && secs < 60.0, d.str()};
}

Outcome oracle_equivalence() {
  Rng rng = make_rng(0, "acceptance-oracle");
  double worst = 0.0;
  const int trials = 60;
  for (int t = 0; t < trials; ++t) {
    const std::size_t nn = 1 + uniform_index(rng, 5), na = 1 + uniform_index(rng, 5);
    const GraphSet s = uniform_index(rng, 2) == 0 ? synth::connectivity_corpus(nn, na, rng())
                                                  : synth::hexagon_corpus(nn, na, rng());
    const ModelParams p = init_params({1, 1 + uniform_index(rng, 8), 1 + uniform_index(rng, 8),
                                       1 + uniform_index(rng, 4)},
                                      rng());
    const AnchorSets anchors = sample_anchors(s, 1 + uniform_index(rng, 4), rng());
    auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };

    std::vector<oracle::Encoded> all, normal, pos, neg;
    for (std::size_t i = 0; i < s.size(); ++i) {
      all.push_back(oracle::encode(s[i], p));
      if (!s.is_abnormal(i)) normal.push_back(all.back());
    }
    for (std::size_t i : anchors.normal) pos.push_back(all[i]);
    for (std::size_t i : anchors.abnormal) neg.push_back(all[i]);

    const DistanceProfile d = representation_distances(s, anchors, p);
    track(d.d_pgraph, oracle::pair_mean(normal, pos, 1, 0));
    track(d.d_pnode, oracle::pair_mean(normal, pos, 0, 1));
    track(d.d_ngraph, oracle::pair_mean(normal, neg, 1, 0));
    track(d.d_nnode, oracle::pair_mean(normal, neg, 0, 1));

    const WeightFactors w{uniform_unit(rng), uniform_unit(rng)};
    {
      Tape tape;
      const auto weights = bind_weights(tape, p, false);
      auto enc = [&](const std::vector<std::size_t>& idx) {
        std::vector<Encoding> out;
        for (std::size_t i : idx) out.push_back(encode(tape, s[i], weights));
        return out;
      };
      track(space_distance(enc(anchors.normal), enc(anchors.abnormal), w).scalar(),
            oracle::pair_mean(pos, neg, w.alpha, w.beta));
    }

    TrainedModel m;
    m.params = p;
    m.anchors = anchors;
    m.weights = w;
    m.anchor_reps = encode_anchors(s, anchors, p, m.encoder);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const ScoreResult r = score_graph(s[i], m);
      track(r.dist_p, oracle::pair_mean({all[i]}, pos, w.alpha, w.beta));
      track(r.dist_n, oracle::pair_mean({all[i]}, neg, w.alpha, w.beta));
    }
  }
  std::ostringstream o;
  o << trials << " trials, max abs deviation " << std::scientific << std::setprecision(2) << worst;
  return {worst <= 1e-10, o.str()};
}

Outcome separation_dynamic() {
  TrainConfig cfg;
  const TrainedModel m = train(hexagon(), cfg);
  const double first = m.log.front().dist3, last = m.log.back().dist3;
  return {last > first, "mean Dist3 epoch 1 = " + fmt(first) + ", epoch " +
                            std::to_string(m.log.back().epoch) + " = " + fmt(last)};
}

struct CorpusRuns {
  EvalReport plain, constant_weights, drop_dist3;
  double seconds = 0.0;
};

CorpusRuns run_corpus(const GraphSet& s) {
  CorpusRuns r;
  TrainConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  r.plain = cross_validate(s, cfg, 5, cfg.seed);
  r.seconds = seconds_since(t0);
  TrainConfig cw = cfg;
  cw.ablate_constant_weights = true;
  r.constant_weights = cross_validate(s, cw, 5, cfg.seed);
  TrainConfig dd = cfg;
  dd.ablate_drop_dist3 = true;
  r.drop_dist3 = cross_validate(s, dd, 5, cfg.seed);
  return r;
}

Outcome detection_quality(const CorpusRuns& hex, const CorpusRuns& con) {
  const bool ok = hex.plain.mean_auc >= 0.95 && con.plain.mean_auc >= 0.90 &&
                  hex.seconds < 300.0 && con.seconds < 300.0;
  return {ok, "hexagon AUC " + fmt(hex.plain.mean_auc) + " (" + fmt(hex.seconds, 1) +
                  " s), connectivity AUC " + fmt(con.plain.mean_auc) + " (" +
                  fmt(con.seconds, 1) + " s)"};
}

Outcome ablation_direction(const CorpusRuns& hex, const CorpusRuns& con) {
  auto holds = [](const CorpusRuns& c) {
    return c.plain.mean_auc >= c.constant_weights.mean_auc &&
           c.plain.mean_auc >= c.drop_dist3.mean_auc;
  };
  auto line = [](const char* name, const CorpusRuns& c) {
    return std::string(name) + " full/constant/drop = " + fmt(c.plain.mean_auc) + "/" +
           fmt(c.constant_weights.mean_auc) + "/" + fmt(c.drop_dist3.mean_auc);
  };
  return {holds(hex) || holds(con), line("hexagon", hex) + "; " + line("connectivity", con)};
}

Outcome mutag_soft() {
  const fs::path dir = fs::path(MSSGAD_DATA_DIR) / "MUTAG";
  if (!fs::exists(dir / "MUTAG_A.txt")) {
    return {false, "MUTAG files not found under " + dir.string(), true};
  }
  const auto t0 = std::chrono::steady_clock::now();
  const GraphSet s = load_tudataset(dir, "MUTAG").with_anomaly_label(0);
  TrainConfig cfg;
  const EvalReport r = cross_validate(s, cfg, 5, cfg.seed);
  const double secs = seconds_since(t0);
  const double pct = 100.0 * r.mean_auc;
  const bool in_band = pct >= 80.07 && pct <= 100.0 && secs < 600.0;
  std::string detail = "A=0 mean AUC " + fmt(pct, 2) + " +- " + fmt(100.0 * r.std_auc, 2) +
                       " (band 80.07..100, " + fmt(secs, 1) + " s)";
  // Same protocol with degree features instead of one-hot atom labels.
  LoadOptions degree;
  degree.features = FeatureMode::kDegree;
  const EvalReport rd = cross_validate(load_tudataset(dir, "MUTAG", degree).with_anomaly_label(0),
                                       cfg, 5, cfg.seed);
  detail += "; diagnostic: features=degree gives " + fmt(100.0 * rd.mean_auc, 2) + " +- " +
            fmt(100.0 * rd.std_auc, 2);
  return {in_band, detail, true};
}

Outcome weighting_rule() {
  struct Case {
    DistanceProfile p;
    WeightFactors expect;
  };
  // Fields: d_pnode, d_pgraph, d_nnode, d_ngraph.
  const std::vector<Case> cases = {
      {{1, 2, 5, 3}, {0, 1}},
      {{1, 2, 1.5, 6}, {1, 0}},
      {{1, 2, 2, 3}, {0.5, 0.5}},
      {{0, 0, 2, 1}, {0.5, 0.5}},  // node_diff exactly twice graph_diff
      {{0, 0, 1, 2}, {0.5, 0.5}},
  };
  int ok = 0;
  for (const Case& c : cases) ok += decide_weights(c.p) == c.expect ? 1 : 0;
  return {ok == static_cast<int>(cases.size()),
          std::to_string(ok) + "/" + std::to_string(cases.size()) + " profiles"};
}

Outcome determinism() {
  testutil::TempDir d("acceptance");
  const std::string data = d.str();
  auto run_cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), "mssgad");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  if (run_cli({"synth", "hexagon", "--normal", "100", "--abnormal", "100", "--seed", "1", "--out",
           data}) != 0) {
    return {false, "synth failed"};
  }
  for (const char* out : {"run1", "run2"}) {
    if (run_cli({"eval", "--dataset-dir", data, "--dataset-name", "HEXAGON", "--out",
             (d.path() / out).string()}) != 0) {
      return {false, "eval failed"};
    }
  }
  int reports = 0;
  for (const auto& entry : fs::directory_iterator(d.path() / "run1")) {
    const fs::path twin = d.path() / "run2" / entry.path().filename();
    if (testutil::slurp(entry.path()) != testutil::slurp(twin)) {
      return {false, entry.path().filename().string() + " differs between runs"};
    }
    ++reports;
  }

  const GraphSet s = hexagon();
  TrainConfig cfg;
  cfg.epochs = 10;
  const TrainedModel m = train(s, cfg);
  save_model(m, d.path() / "model.bin");
  const TrainedModel back = load_model(d.path() / "model.bin");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ScoreResult a = score_graph(s[i], m), b = score_graph(s[i], back);
    if (a.score_g != b.score_g || a.dist_p != b.dist_p || a.dist_n != b.dist_n) {
      return {false, "score of graph " + std::to_string(i) + " changed after reload"};
    }
  }
  return {reports == 4, std::to_string(reports) + " report files identical across runs; " +
                            std::to_string(s.size()) + " scores bit-identical after reload"};
}

Outcome anchor_table() {
  const bool table = anchor_count(10, 4) == 4 && anchor_count(100, 4) == 16 &&
                     anchor_count(1000, 4) == 64;
  const bool clamp = anchor_count(5, 10) == 5 && anchor_count(40, 10) == 40 &&
                     anchor_count(7, 1000) == 7;
  return {table && clamp, "(10,4)->" + std::to_string(anchor_count(10, 4)) + " (100,4)->" +
                              std::to_string(anchor_count(100, 4)) + " (1000,4)->" +
                              std::to_string(anchor_count(1000, 4)) + "; clamp (5,10)->" +
                              std::to_string(anchor_count(5, 10))};
}

}  // namespace

int main() {
  int hard_failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), false};
    }
    const char* tag = o.pass ? "PASS" : (o.soft ? "MISS" : "FAIL");
    if (!o.pass && !o.soft) ++hard_failures;
    std::cout << "[" << tag << "] " << id << ". " << name << ": " << o.detail << std::endl;
  };

  report(1, "gradient integrity", gradient_integrity);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "separation dynamic", separation_dynamic);

  CorpusRuns hex, con;
  bool corpora_ok = true;
  std::string corpus_error;
  try {
    hex = run_corpus(hexagon());
    con = run_corpus(connectivity());
  } catch (const std::exception& e) {
    corpora_ok = false;
    corpus_error = e.what();
  }
  auto needs_corpora = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!corpora_ok) return {false, "exception: " + corpus_error};
      return fn(hex, con);
    };
  };
  report(4, "synthetic detection quality", needs_corpora(detection_quality));
  report(5, "MUTAG soft reproduction", mutag_soft);
  report(6, "ablation direction", needs_corpora(ablation_direction));
  report(7, "weighting rule", weighting_rule);
  report(8, "determinism", determinism);
  report(9, "anchor_count table", anchor_table);

  std::cout << (hard_failures == 0 ? "acceptance: all hard criteria pass"
                                   : "acceptance: " + std::to_string(hard_failures) +
                                         " hard criteria failed")
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}

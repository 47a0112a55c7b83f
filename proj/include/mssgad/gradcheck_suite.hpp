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

// Randomized finite-difference suite over every differentiable op and the
// two training losses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mssgad/gradcheck.hpp"
#include "mssgad/trainer.hpp"

namespace mssgad {

struct GradCheckOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  double step = 1e-5;
  double floor = 1e-6;
  double threshold = 1e-4;
  // Replace the relu backward with one that leaks gradient through negative
  // inputs. Used to prove the suite catches a broken op.
  bool inject_fault = false;
};

struct GradCheckCase {
  std::string name;
  std::size_t trials = 0;
  double worst = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  double worst = 0.0;
  std::string worst_case;
  double threshold = 1e-4;
  bool passed() const { return worst < threshold; }
};

namespace detail {

inline Var faulty_relu(const Var& x) {
  const std::size_t ix = x.index();
  return x.tape().record(
      x.value().cwiseMax(0.0), {x},
      [ix](Tape& t, const Matrix& g) { t.accumulate(ix, g); }, "relu");
}

inline Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = lo + (hi - lo) * uniform_unit(rng);
  return m;
}

// Entries at least `margin` away from zero.
inline Matrix random_off_zero(Rng& rng, Eigen::Index r, Eigen::Index c, double margin) {
  Matrix m = random_matrix(rng, r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double& x = m.data()[i];
    if (std::abs(x) < margin) x = x < 0 ? x - margin : x + margin;
  }
  return m;
}

// Per column, the distance from the maximum to the next lower entry; an
// exact tie at a nonzero maximum counts as zero. Exact zeros tied at the top
// come from fully clamped relu inputs, which stay clamped under small
// perturbations and so do not form a kink.
inline double max_gap(const Matrix& m) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double top = m.col(c).maxCoeff();
    Eigen::Index at_top = 0;
    double next = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double x = m(r, c);
      if (x == top) {
        ++at_top;
      } else {
        next = std::max(next, x);
      }
    }
    if (at_top > 1 && top != 0.0) return 0.0;
    gap = std::min(gap, top - next);
  }
  return gap;
}

// Smallest magnitude among nonzero entries. Exact zeros are products of
// clamped inputs and move only if those inputs cross their own kink.
inline double min_nonzero_abs(const Matrix& m) {
  double out = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double x = std::abs(m.data()[i]);
    if (x != 0.0) out = std::min(out, x);
  }
  return out;
}

// Distance to the nearest non-differentiable point of the encoder: relu
// inputs near zero and near-ties in max pooling.
inline double encoder_kink_margin(const Graph& g, const std::vector<Matrix>& weights,
                                  PoolKind fe) {
  const Matrix adj = normalize_adjacency(g);
  Matrix h = g.features();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix z = adj * h * weights[l];
    const bool last = l + 1 == weights.size();
    if (last) {
      margin = std::min(margin, max_gap(z));
    } else {
      margin = std::min(margin, min_nonzero_abs(z));
      h = z.cwiseMax(0.0);
      if (l + 2 == weights.size() && fe == PoolKind::kMax) margin = std::min(margin, max_gap(h));
    }
  }
  return margin;
}

inline Graph random_small_graph(Rng& rng, std::size_t d_in, int label) {
  const std::size_t n = 2 + uniform_index(rng, 9);  // 2..10 nodes
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(uniform_index(rng, v), v);
  const std::size_t extra = uniform_index(rng, n);
  for (std::size_t e = 0; e < extra; ++e) {
    const std::size_t u = uniform_index(rng, n), v = uniform_index(rng, n);
    if (u != v) edges.emplace_back(u, v);
  }
  return Graph(n, std::move(edges),
               random_matrix(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d_in)),
               label);
}

// Scalarizes an op output with a fixed random projection so every output
// entry contributes to the gradient.
inline Var project(Tape& tape, const Var& out, const Matrix& proj) {
  return ops::sum(ops::hadamard(out, tape.constant(proj)));
}

struct OpCase {
  std::string name;
  std::vector<Matrix> inputs;
  ScalarFn fn;
};

inline std::vector<OpCase> op_cases(Rng& rng, bool inject_fault) {
  auto dim = [&] { return static_cast<Eigen::Index>(1 + uniform_index(rng, 5)); };
  std::vector<OpCase> cases;
  const Eigen::Index r = dim(), k = dim(), c = dim();

  {
    Matrix p = random_matrix(rng, r, c);
    cases.push_back({"matmul", {random_matrix(rng, r, k), random_matrix(rng, k, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::matmul(x[0], x[1]), p);
                     }});
  }
  {
    Matrix p = random_matrix(rng, r, c);
    cases.push_back({"relu", {random_off_zero(rng, r, c, 1e-3)},
                     [p, inject_fault](Tape& t, const std::vector<Var>& x) {
                       return project(t, inject_fault ? faulty_relu(x[0]) : ops::relu(x[0]), p);
                     }});
  }
  {
    Matrix in = random_matrix(rng, r, c);
    while (max_gap(in) < 1e-3) in = random_matrix(rng, r, c);
    Matrix p = random_matrix(rng, 1, c);
    cases.push_back({"row_max_pool", {in}, [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::row_max_pool(x[0]), p);
                     }});
  }
  {
    Matrix p = random_matrix(rng, 1, c);
    cases.push_back({"row_mean_pool", {random_matrix(rng, r, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::row_mean_pool(x[0]), p);
                     }});
  }
  {
    Matrix p = random_matrix(rng, r, c);
    cases.push_back({"l2_normalize_rows", {random_off_zero(rng, r, c, 0.1)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::l2_normalize_rows(x[0], 1e-12), p);
                     }});
  }
  {
    Matrix p = random_matrix(rng, r, c);
    cases.push_back({"add", {random_matrix(rng, r, c), random_matrix(rng, r, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::add(x[0], x[1]), p);
                     }});
    cases.push_back({"sub", {random_matrix(rng, r, c), random_matrix(rng, r, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::sub(x[0], x[1]), p);
                     }});
    const double s = -2.0 + 4.0 * uniform_unit(rng);
    cases.push_back({"scale", {random_matrix(rng, r, c)},
                     [p, s](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::scale(x[0], s), p);
                     }});
    cases.push_back({"hadamard", {random_matrix(rng, r, c), random_matrix(rng, r, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::hadamard(x[0], x[1]), p);
                     }});
  }
  cases.push_back({"sum", {random_matrix(rng, r, c)},
                   [](Tape&, const std::vector<Var>& x) { return ops::sum(x[0]); }});
  {
    const Eigen::Index r2 = dim();
    Matrix p = random_matrix(rng, r + r2, c);
    cases.push_back({"concat_rows", {random_matrix(rng, r, c), random_matrix(rng, r2, c)},
                     [p](Tape& t, const std::vector<Var>& x) {
                       return project(t, ops::concat_rows({x[0], x[1]}), p);
                     }});
  }
  {
    const Eigen::Index r2 = dim();
    cases.push_back({"pairwise_mean_distance",
                     {random_matrix(rng, r, c), random_matrix(rng, r2, c)},
                     [](Tape&, const std::vector<Var>& x) {
                       return ops::pairwise_mean_distance(x[0], x[1]);
                     }});
  }
  return cases;
}

struct LossCase {
  std::vector<Graph> batch, normal_anchors, abnormal_anchors;
  std::vector<Matrix> weights;
  WeightFactors w;
  TrainConfig cfg;
};

inline LossCase random_loss_case(Rng& rng) {
  LossCase lc;
  const std::size_t d_in = 1 + uniform_index(rng, 4);
  const std::vector<std::size_t> dims = {d_in, 1 + uniform_index(rng, 8), 1 + uniform_index(rng, 8),
                                         1 + uniform_index(rng, 4)};
  lc.cfg.fe_kind = uniform_index(rng, 2) == 0 ? PoolKind::kMax : PoolKind::kMean;
  lc.cfg.normalize = uniform_index(rng, 4) != 0;
  lc.cfg.ablate_drop_dist3 = uniform_index(rng, 4) == 0;
  static const WeightFactors choices[] = {{0.5, 0.5}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  lc.w = choices[uniform_index(rng, 4)];
  auto graphs = [&](std::size_t count, int label) {
    std::vector<Graph> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_small_graph(rng, d_in, label));
    return out;
  };
  lc.batch = graphs(1 + uniform_index(rng, 3), 0);
  lc.normal_anchors = graphs(1 + uniform_index(rng, 3), 0);
  lc.abnormal_anchors = graphs(1 + uniform_index(rng, 3), 1);
  // Redraw weights until no graph sits within reach of a kink.
  for (;;) {
    lc.weights = init_params(dims, rng()).weights;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto* set : {&lc.batch, &lc.normal_anchors, &lc.abnormal_anchors}) {
      for (const Graph& g : *set) {
        margin = std::min(margin, encoder_kink_margin(g, lc.weights, lc.cfg.fe_kind));
      }
    }
    if (margin >= 1e-4) break;
  }
  return lc;
}

inline ScalarFn loss_fn(const LossCase& lc, Phase phase) {
  return [&lc, phase](Tape& tape, const std::vector<Var>& weights) {
    const EncoderOptions opts = lc.cfg.encoder();
    auto stack = [&](const std::vector<Graph>& gs) {
      std::vector<Encoding> e;
      for (const Graph& g : gs) e.push_back(encode(tape, g, weights, opts));
      return stack_encodings(e);
    };
    const EncodingStack b = stack(lc.batch);
    const EncodingStack ps = stack(lc.normal_anchors);
    const EncodingStack ns = stack(lc.abnormal_anchors);
    const Var d3 = space_distance(ps, ns, lc.w);
    if (phase == Phase::kNormal) {
      return loss_p(space_distance(b, ps, lc.w), space_distance(b, ns, lc.w), d3, lc.cfg);
    }
    return loss_n(space_distance(b, ns, lc.w), space_distance(b, ps, lc.w), d3, lc.cfg);
  };
}

}  // namespace detail

inline GradCheckReport run_gradcheck(const GradCheckOptions& opt) {
  GradCheckReport rep;
  rep.threshold = opt.threshold;
  rep.worst = 0.0;
  auto record = [&](const std::string& name, const GradCheckResult& r) {
    auto it = std::find_if(rep.cases.begin(), rep.cases.end(),
                           [&](const GradCheckCase& c) { return c.name == name; });
    if (it == rep.cases.end()) {
      rep.cases.push_back({name, 0, 0.0});
      it = rep.cases.end() - 1;
    }
    ++it->trials;
    it->worst = std::max(it->worst, r.max_rel_error);
    rep.coordinates += r.coordinates;
    if (r.max_rel_error > rep.worst || rep.worst_case.empty()) {
      rep.worst = r.max_rel_error;
      rep.worst_case = name;
    }
  };
  for (std::size_t t = 0; t < opt.trials; ++t) {
    Rng rng = make_rng(opt.seed, "gradcheck", t);
    for (const detail::OpCase& c : detail::op_cases(rng, opt.inject_fault)) {
      record(c.name, finite_diff_check(c.fn, c.inputs, opt.step, opt.floor));
    }
    const detail::LossCase lc = detail::random_loss_case(rng);
    record("loss_p", finite_diff_check(detail::loss_fn(lc, Phase::kNormal), lc.weights, opt.step,
                                       opt.floor));
    record("loss_n", finite_diff_check(detail::loss_fn(lc, Phase::kAbnormal), lc.weights,
                                       opt.step, opt.floor));
    ++rep.trials;
  }
  return rep;
}

inline void print_gradcheck_report(std::ostream& out, const GradCheckReport& rep) {
  const auto old = out.precision(6);
  out << std::scientific;
  for (const GradCheckCase& c : rep.cases) {
    out << c.name << " trials=" << c.trials << " worst_rel_error=" << c.worst << '\n';
  }
  out << "trials=" << rep.trials << " coordinates=" << rep.coordinates
      << " worst_rel_error=" << rep.worst << " (" << rep.worst_case << ")"
      << " threshold=" << rep.threshold << ' ' << (rep.passed() ? "PASS" : "FAIL") << '\n';
  out << std::defaultfloat;
  out.precision(old);
}

}  // namespace mssgad

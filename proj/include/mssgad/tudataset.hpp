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

// Reader and writer for the plain-text TUDataset layout:
//   <DS>_A.txt                one edge per line, "i, j", 1-based global node ids
//   <DS>_graph_indicator.txt  line t holds the 1-based graph id of node t
//   <DS>_graph_labels.txt     one integer per graph
//   <DS>_node_labels.txt      optional, one integer per node
//   <DS>_node_attributes.txt  optional, comma-separated reals per node

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mssgad/graph.hpp"

namespace mssgad {

enum class FeatureMode {
  kAuto,        // attributes ++ one-hot node labels, whichever exist; else degrees
  kAttributes,  // node attributes only
  kNodeLabels,  // one-hot node labels only
  kDegree,      // node degrees, ignoring any files
};

inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "auto") return FeatureMode::kAuto;
  if (s == "attributes") return FeatureMode::kAttributes;
  if (s == "labels") return FeatureMode::kNodeLabels;
  if (s == "degree") return FeatureMode::kDegree;
  throw ConfigError("unknown feature mode '" + std::string(s) +
                    "' (expected auto, attributes, labels or degree)");
}

inline const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::kAuto: return "auto";
    case FeatureMode::kAttributes: return "attributes";
    case FeatureMode::kNodeLabels: return "labels";
    case FeatureMode::kDegree: return "degree";
  }
  return "auto";
}

struct LoadOptions {
  FeatureMode features = FeatureMode::kAuto;
  // Map graph labels onto 0..C-1 in sorted order of the raw values.
  bool remap_graph_labels = true;
  int anomaly_label = 1;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct TextFile {
  std::filesystem::path path;
  std::vector<std::string> lines;
};

inline std::optional<TextFile> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  TextFile f{path, {}};
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) f.lines.push_back(line);
  }
  return f;
}

inline TextFile require_lines(const std::filesystem::path& path) {
  auto f = read_lines(path);
  if (!f) throw IngestionError("missing or unreadable dataset file: " + path.string());
  return std::move(*f);
}

template <typename T>
T parse_number(std::string_view text, const TextFile& f, std::size_t line_no) {
  text = trim(text);
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw MalformedDatasetError(f.path.string() + ":" + std::to_string(line_no) +
                                ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline GraphSet load_tudataset(const std::filesystem::path& dir, const std::string& name,
                               const LoadOptions& opts = {}) {
  namespace fs = std::filesystem;
  const fs::path base = dir / name;
  auto file = [&](const char* suffix) { return fs::path(base.string() + suffix); };

  const detail::TextFile indicator = detail::require_lines(file("_graph_indicator.txt"));
  const detail::TextFile adjacency = detail::require_lines(file("_A.txt"));
  const detail::TextFile graph_labels = detail::require_lines(file("_graph_labels.txt"));

  // Graph id per node, and each node's position inside its graph.
  const std::size_t total_nodes = indicator.lines.size();
  std::vector<long> graph_of(total_nodes);
  std::map<long, std::size_t> graph_sizes;
  std::vector<std::size_t> local(total_nodes);
  for (std::size_t t = 0; t < total_nodes; ++t) {
    const long gid = detail::parse_number<long>(indicator.lines[t], indicator, t + 1);
    if (gid < 1) {
      throw MalformedDatasetError(indicator.path.string() + ":" + std::to_string(t + 1) +
                                  ": graph id must be >= 1");
    }
    graph_of[t] = gid;
    local[t] = graph_sizes[gid]++;
  }
  std::map<long, std::size_t> graph_pos;
  for (const auto& [gid, n] : graph_sizes) graph_pos.emplace(gid, graph_pos.size());
  const std::size_t num_graphs = graph_sizes.size();

  if (graph_labels.lines.size() < num_graphs) {
    throw MalformedDatasetError(graph_labels.path.string() + ": " +
                                std::to_string(graph_labels.lines.size()) + " labels for " +
                                std::to_string(num_graphs) + " graphs");
  }
  std::vector<long> raw_labels(num_graphs);
  {
    std::size_t g = 0;
    for (const auto& [gid, pos] : graph_pos) {
      const auto line_index = static_cast<std::size_t>(gid - 1);
      if (line_index >= graph_labels.lines.size()) {
        throw MalformedDatasetError(graph_labels.path.string() + ": no label for graph id " +
                                    std::to_string(gid));
      }
      raw_labels[g++] = detail::parse_number<long>(graph_labels.lines[line_index], graph_labels,
                                                   line_index + 1);
    }
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  for (std::size_t line = 0; line < adjacency.lines.size(); ++line) {
    const auto parts = detail::split_commas(adjacency.lines[line]);
    if (parts.size() != 2) {
      throw MalformedDatasetError(adjacency.path.string() + ":" + std::to_string(line + 1) +
                                  ": expected 'i, j'");
    }
    const long i = detail::parse_number<long>(parts[0], adjacency, line + 1);
    const long j = detail::parse_number<long>(parts[1], adjacency, line + 1);
    const auto in_range = [&](long v) { return v >= 1 && static_cast<std::size_t>(v) <= total_nodes; };
    if (!in_range(i) || !in_range(j) || graph_of[i - 1] != graph_of[j - 1]) {
      throw MalformedDatasetError(adjacency.path.string() + ":" + std::to_string(line + 1) +
                                  ": edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") leaves its graph's node range");
    }
    if (i == j) continue;  // self-loops are added by adjacency normalization
    edges[graph_pos[graph_of[i - 1]]].emplace_back(local[i - 1], local[j - 1]);
  }

  const bool want_attrs =
      opts.features == FeatureMode::kAuto || opts.features == FeatureMode::kAttributes;
  const bool want_labels =
      opts.features == FeatureMode::kAuto || opts.features == FeatureMode::kNodeLabels;

  Matrix attrs;
  if (want_attrs) {
    if (auto f = detail::read_lines(file("_node_attributes.txt"))) {
      if (f->lines.size() != total_nodes) {
        throw MalformedDatasetError(f->path.string() + ": " + std::to_string(f->lines.size()) +
                                    " rows for " + std::to_string(total_nodes) + " nodes");
      }
      for (std::size_t t = 0; t < total_nodes; ++t) {
        const auto parts = detail::split_commas(f->lines[t]);
        if (t == 0) attrs.resize(static_cast<Eigen::Index>(total_nodes), static_cast<Eigen::Index>(parts.size()));
        if (static_cast<Eigen::Index>(parts.size()) != attrs.cols()) {
          throw MalformedDatasetError(f->path.string() + ":" + std::to_string(t + 1) +
                                      ": inconsistent attribute count");
        }
        for (std::size_t c = 0; c < parts.size(); ++c) {
          attrs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
              detail::parse_number<double>(parts[c], *f, t + 1);
        }
      }
    } else if (opts.features == FeatureMode::kAttributes) {
      throw IngestionError("missing or unreadable dataset file: " +
                           file("_node_attributes.txt").string());
    }
  }

  Matrix onehot;
  if (want_labels) {
    if (auto f = detail::read_lines(file("_node_labels.txt"))) {
      if (f->lines.size() != total_nodes) {
        throw MalformedDatasetError(f->path.string() + ": " + std::to_string(f->lines.size()) +
                                    " rows for " + std::to_string(total_nodes) + " nodes");
      }
      std::vector<long> node_labels(total_nodes);
      for (std::size_t t = 0; t < total_nodes; ++t) {
        // Multi-column node label files keep the first column.
        node_labels[t] =
            detail::parse_number<long>(detail::split_commas(f->lines[t]).front(), *f, t + 1);
      }
      std::vector<long> values = node_labels;
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      onehot = Matrix::Zero(static_cast<Eigen::Index>(total_nodes),
                            static_cast<Eigen::Index>(values.size()));
      for (std::size_t t = 0; t < total_nodes; ++t) {
        const auto col = std::lower_bound(values.begin(), values.end(), node_labels[t]) - values.begin();
        onehot(static_cast<Eigen::Index>(t), col) = 1.0;
      }
    } else if (opts.features == FeatureMode::kNodeLabels) {
      throw IngestionError("missing or unreadable dataset file: " +
                           file("_node_labels.txt").string());
    }
  }

  Matrix all_features(static_cast<Eigen::Index>(total_nodes), attrs.cols() + onehot.cols());
  if (attrs.cols() > 0) all_features.leftCols(attrs.cols()) = attrs;
  if (onehot.cols() > 0) all_features.rightCols(onehot.cols()) = onehot;

  std::vector<long> label_values = raw_labels;
  std::sort(label_values.begin(), label_values.end());
  label_values.erase(std::unique(label_values.begin(), label_values.end()), label_values.end());

  // Node rows of each graph in file order.
  std::vector<std::vector<std::size_t>> members(num_graphs);
  for (std::size_t t = 0; t < total_nodes; ++t) members[graph_pos[graph_of[t]]].push_back(t);

  std::vector<Graph> graphs;
  graphs.reserve(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    const std::size_t n = members[g].size();
    Matrix feats;
    if (all_features.cols() > 0) {
      feats.resize(static_cast<Eigen::Index>(n), all_features.cols());
      for (std::size_t r = 0; r < n; ++r) {
        feats.row(static_cast<Eigen::Index>(r)) =
            all_features.row(static_cast<Eigen::Index>(members[g][r]));
      }
    }
    const long raw = raw_labels[g];
    const int label = opts.remap_graph_labels
                          ? static_cast<int>(std::lower_bound(label_values.begin(),
                                                              label_values.end(), raw) -
                                             label_values.begin())
                          : static_cast<int>(raw);
    graphs.emplace_back(n, std::move(edges[g]), std::move(feats), label);
  }
  return GraphSet(std::move(graphs), opts.anomaly_label, name);
}

// Writes the set in TUDataset layout. Both edge directions are emitted. With
// `write_attributes`, features go to <DS>_node_attributes.txt in shortest
// round-trip form; otherwise a reader falls back to degree features.
inline void save_tudataset(const GraphSet& set, const std::filesystem::path& dir,
                           const std::string& name, bool write_attributes) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IngestionError("cannot create directory " + dir.string() + ": " + ec.message());
  const fs::path base = dir / name;
  auto open = [&](const char* suffix) {
    const fs::path p(base.string() + suffix);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestionError("cannot write " + p.string());
    return out;
  };

  std::ofstream a = open("_A.txt");
  std::ofstream ind = open("_graph_indicator.txt");
  std::ofstream lab = open("_graph_labels.txt");
  std::ofstream attr;
  if (write_attributes) attr = open("_node_attributes.txt");

  std::size_t offset = 0;
  for (std::size_t g = 0; g < set.size(); ++g) {
    const Graph& graph = set[g];
    std::vector<Edge> directed;
    directed.reserve(graph.num_edges() * 2);
    for (const auto& [u, v] : graph.edges()) {
      directed.emplace_back(u, v);
      directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    for (const auto& [u, v] : directed) a << (offset + u + 1) << ", " << (offset + v + 1) << '\n';
    for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
      ind << (g + 1) << '\n';
      if (write_attributes) {
        for (Eigen::Index c = 0; c < graph.features().cols(); ++c) {
          if (c) attr << ", ";
          attr << detail::format_double(graph.features()(static_cast<Eigen::Index>(i), c));
        }
        attr << '\n';
      }
    }
    lab << graph.label() << '\n';
    offset += graph.num_nodes();
  }
  for (std::ofstream* s : {&a, &ind, &lab, &attr}) {
    if (s->is_open()) {
      s->flush();
      if (!*s) throw IngestionError("write failed under " + dir.string());
    }
  }
}

}  // namespace mssgad

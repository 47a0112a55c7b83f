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

// Run configuration in a flat `key = value` text format. Lines starting with
// '#' are comments. Unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mssgad/evaluation.hpp"
#include "mssgad/tudataset.hpp"

namespace mssgad {

using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  std::string dataset_dir;
  std::string dataset_name;
  FeatureMode features = FeatureMode::kAuto;
  int anomaly_label = 1;
  // "both" or one label value; eval only.
  std::string orientations = "both";
  std::size_t folds = 5;
  double threshold = 0.0;
  TrainConfig train;
  // Not part of the hash: they do not change results.
  std::string output_dir = "out";
  std::size_t threads = 1;

  // Keys that identify the experiment, in canonical order.
  ConfigMap to_map() const {
    ConfigMap m;
    m["dataset_dir"] = dataset_dir;
    m["dataset_name"] = dataset_name;
    m["features"] = to_string(features);
    m["anomaly_label"] = std::to_string(anomaly_label);
    m["orientations"] = orientations;
    m["folds"] = std::to_string(folds);
    m["threshold"] = detail::format_double(threshold);
    m["epochs"] = std::to_string(train.epochs);
    m["batch_size"] = std::to_string(train.batch_size);
    m["learning_rate"] = detail::format_double(train.learning_rate);
    m["optimizer"] = to_string(train.optimizer);
    m["seed"] = std::to_string(train.seed);
    m["ablate_constant_weights"] = train.ablate_constant_weights ? "true" : "false";
    m["ablate_drop_dist3"] = train.ablate_drop_dist3 ? "true" : "false";
    m["refresh_anchors_per_epoch"] = train.refresh_anchors_per_epoch ? "true" : "false";
    m["fe_kind"] = to_string(train.fe_kind);
    std::string dims;
    for (std::size_t i = 0; i < train.hidden_dims.size(); ++i) {
      dims += (i ? "," : "") + std::to_string(train.hidden_dims[i]);
    }
    m["hidden_dims"] = dims;
    m["anchor_k"] = std::to_string(train.anchor_k);
    m["normalize"] = train.normalize ? "true" : "false";
    return m;
  }

  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : to_map()) out += k + "=" + v + "\n";
    return out;
  }

  std::string hash() const { return hex64(fnv1a64(canonical())); }
};

namespace detail {

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "dataset_dir", "dataset_name", "features", "anomaly_label", "orientations", "folds",
      "threshold", "epochs", "batch_size", "learning_rate", "optimizer", "seed",
      "ablate_constant_weights", "ablate_drop_dist3", "refresh_anchors_per_epoch", "fe_kind",
      "hidden_dims", "anchor_k", "normalize", "output_dir", "threads"};
  return keys;
}

template <typename T>
T parse_config_number(const std::string& key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || v.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

inline bool parse_config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline ConfigMap parse_config_text(std::string_view text, const std::string& origin = "config") {
  ConfigMap m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(t.substr(0, eq)));
    const std::string value(detail::trim(t.substr(eq + 1)));
    const auto& keys = detail::config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    m[key] = value;
  }
  return m;
}

inline ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

// Entries of `overrides` win over `base`.
inline ConfigMap merge_config(ConfigMap base, const ConfigMap& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

inline RunConfig run_config_from_map(const ConfigMap& m) {
  using detail::parse_config_bool;
  using detail::parse_config_number;
  RunConfig c;
  const auto& keys = detail::config_keys();
  for (const auto& [key, v] : m) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (key == "dataset_dir") c.dataset_dir = v;
    else if (key == "dataset_name") c.dataset_name = v;
    else if (key == "features") c.features = parse_feature_mode(v);
    else if (key == "anomaly_label") c.anomaly_label = parse_config_number<int>(key, v);
    else if (key == "orientations") {
      if (v != "both") parse_config_number<int>(key, v);
      c.orientations = v;
    }
    else if (key == "folds") c.folds = parse_config_number<std::size_t>(key, v);
    else if (key == "threshold") c.threshold = parse_config_number<double>(key, v);
    else if (key == "epochs") c.train.epochs = parse_config_number<std::size_t>(key, v);
    else if (key == "batch_size") c.train.batch_size = parse_config_number<std::size_t>(key, v);
    else if (key == "learning_rate") c.train.learning_rate = parse_config_number<double>(key, v);
    else if (key == "optimizer") c.train.optimizer = parse_optimizer(v);
    else if (key == "seed") c.train.seed = parse_config_number<std::uint64_t>(key, v);
    else if (key == "ablate_constant_weights") c.train.ablate_constant_weights = parse_config_bool(key, v);
    else if (key == "ablate_drop_dist3") c.train.ablate_drop_dist3 = parse_config_bool(key, v);
    else if (key == "refresh_anchors_per_epoch") c.train.refresh_anchors_per_epoch = parse_config_bool(key, v);
    else if (key == "fe_kind") c.train.fe_kind = parse_pool_kind(v);
    else if (key == "hidden_dims") {
      c.train.hidden_dims.clear();
      std::string item;
      std::istringstream s(v);
      while (std::getline(s, item, ',')) {
        c.train.hidden_dims.push_back(
            parse_config_number<std::size_t>(key, std::string(detail::trim(item))));
      }
    }
    else if (key == "anchor_k") c.train.anchor_k = parse_config_number<std::size_t>(key, v);
    else if (key == "normalize") c.train.normalize = parse_config_bool(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "threads") c.threads = parse_config_number<std::size_t>(key, v);
  }
  c.train.validate();
  if (c.folds < 2) throw ConfigError("folds must be >= 2");
  return c;
}

}  // namespace mssgad

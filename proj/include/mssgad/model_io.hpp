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

// Binary model file. All integers are u64 and all reals IEEE-754 binary64,
// both little-endian:
//
//   magic "MSSGADMF"  u64 version
//   u64 n_dims, dims[n_dims]
//   weights, layer by layer, row-major (dims[l] x dims[l+1])
//   u64 fe_kind (0 max, 1 mean)  u64 normalize  f64 eps
//   f64 alpha  f64 beta
//   u64 training seed  u64 source-set fingerprint
//   u64 anchor seed  u64 ratio factor k
//   u64 n, normal anchor indices[n]  u64 m, abnormal anchor indices[m]
//   f64 d_pnode d_pgraph d_nnode d_ngraph
//   anchor representations: normal graph, normal node, abnormal graph,
//   abnormal node; each u64 rows, u64 cols, f64 data row-major
//   u64 FNV-1a checksum of every preceding byte

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "mssgad/trainer.hpp"

namespace mssgad {

inline constexpr char kModelMagic[8] = {'M', 'S', 'S', 'G', 'A', 'D', 'M', 'F'};
inline constexpr std::uint64_t kModelFormatVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  void matrix(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  void indices(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (std::size_t x : v) u64(x);
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<char>& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t count(std::uint64_t limit, const char* what) {
    const std::uint64_t v = u64();
    if (v > limit) throw ModelFormatError(std::string("implausible ") + what + " in model file");
    return static_cast<std::size_t>(v);
  }
  Matrix matrix() {
    const std::size_t r = count(1u << 24, "matrix rows");
    const std::size_t c = count(1u << 24, "matrix cols");
    if (r * c > (remaining() / 8)) throw ModelFormatError("truncated model file");
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  std::vector<std::size_t> indices() {
    const std::size_t n = count(remaining() / 8, "index count");
    std::vector<std::size_t> v(n);
    for (std::size_t& x : v) x = static_cast<std::size_t>(u64());
    return v;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw ModelFormatError("truncated model file");
  }
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<char> serialize_model(const TrainedModel& m) {
  detail::ByteWriter w;
  w.raw(kModelMagic, sizeof kModelMagic);
  w.u64(kModelFormatVersion);
  w.u64(m.params.dims.size());
  for (std::size_t d : m.params.dims) w.u64(d);
  for (const Matrix& layer : m.params.weights) {
    for (Eigen::Index i = 0; i < layer.size(); ++i) w.f64(layer.data()[i]);
  }
  w.u64(m.encoder.fe == PoolKind::kMax ? 0 : 1);
  w.u64(m.encoder.normalize ? 1 : 0);
  w.f64(m.encoder.eps);
  w.f64(m.weights.alpha);
  w.f64(m.weights.beta);
  w.u64(m.seed);
  w.u64(m.source_fingerprint);
  w.u64(m.anchors.seed);
  w.u64(m.anchors.ratio_factor_k);
  w.indices(m.anchors.normal);
  w.indices(m.anchors.abnormal);
  w.f64(m.profile.d_pnode);
  w.f64(m.profile.d_pgraph);
  w.f64(m.profile.d_nnode);
  w.f64(m.profile.d_ngraph);
  w.matrix(m.anchor_reps.normal_graph);
  w.matrix(m.anchor_reps.normal_node);
  w.matrix(m.anchor_reps.abnormal_graph);
  w.matrix(m.anchor_reps.abnormal_node);
  const auto& b = w.bytes();
  w.u64(fnv1a64(std::string_view(b.data(), b.size())));
  return w.bytes();
}

// Inverse of serialize_model. The training log is not persisted.
inline TrainedModel deserialize_model(const std::vector<char>& bytes) {
  if (bytes.size() < sizeof kModelMagic + 16) throw ModelFormatError("model file too short");
  if (std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw ModelFormatError("bad model file magic");
  }
  const std::size_t body = bytes.size() - 8;
  detail::ByteReader tail(bytes);
  {
    // Skip to the checksum.
    std::vector<char> skip(body);
    tail.raw(skip.data(), body);
  }
  if (tail.u64() != fnv1a64(std::string_view(bytes.data(), body))) {
    throw ModelFormatError("model file checksum mismatch");
  }

  detail::ByteReader r(bytes);
  char magic[8];
  r.raw(magic, sizeof magic);
  const std::uint64_t version = r.u64();
  if (version != kModelFormatVersion) {
    throw ModelFormatError("unsupported model format version " + std::to_string(version));
  }
  TrainedModel m;
  const std::size_t n_dims = r.count(64, "layer count");
  if (n_dims < 3) throw ModelFormatError("model file has fewer than two layers");
  for (std::size_t i = 0; i < n_dims; ++i) m.params.dims.push_back(r.count(1u << 20, "dimension"));
  for (std::size_t l = 0; l + 1 < n_dims; ++l) {
    const auto rows = static_cast<Eigen::Index>(m.params.dims[l]);
    const auto cols = static_cast<Eigen::Index>(m.params.dims[l + 1]);
    if (static_cast<std::size_t>(rows * cols) > r.remaining() / 8) {
      throw ModelFormatError("truncated model file");
    }
    Matrix layer(rows, cols);
    for (Eigen::Index i = 0; i < layer.size(); ++i) layer.data()[i] = r.f64();
    m.params.weights.push_back(std::move(layer));
  }
  const std::uint64_t fe = r.u64();
  if (fe > 1) throw ModelFormatError("unknown pooling kind in model file");
  m.encoder.fe = fe == 0 ? PoolKind::kMax : PoolKind::kMean;
  m.encoder.normalize = r.u64() != 0;
  m.encoder.eps = r.f64();
  m.weights.alpha = r.f64();
  m.weights.beta = r.f64();
  m.seed = r.u64();
  m.source_fingerprint = r.u64();
  m.anchors.seed = r.u64();
  m.anchors.ratio_factor_k = static_cast<std::size_t>(r.u64());
  m.anchors.normal = r.indices();
  m.anchors.abnormal = r.indices();
  m.profile.d_pnode = r.f64();
  m.profile.d_pgraph = r.f64();
  m.profile.d_nnode = r.f64();
  m.profile.d_ngraph = r.f64();
  m.anchor_reps.normal_graph = r.matrix();
  m.anchor_reps.normal_node = r.matrix();
  m.anchor_reps.abnormal_graph = r.matrix();
  m.anchor_reps.abnormal_node = r.matrix();
  if (r.position() != body) throw ModelFormatError("trailing bytes in model file");

  const auto d_graph = static_cast<Eigen::Index>(m.params.dims.back());
  const auto d_node = static_cast<Eigen::Index>(m.params.dims[n_dims - 2]);
  const AnchorEncodings& a = m.anchor_reps;
  if (a.normal_graph.rows() == 0 || a.abnormal_graph.rows() == 0 ||
      a.normal_graph.cols() != d_graph || a.abnormal_graph.cols() != d_graph ||
      a.normal_node.cols() != d_node || a.abnormal_node.cols() != d_node ||
      a.normal_node.rows() != a.normal_graph.rows() ||
      a.abnormal_node.rows() != a.abnormal_graph.rows()) {
    throw ModelFormatError("anchor representations inconsistent with encoder dims");
  }
  return m;
}

inline void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  const std::vector<char> bytes = serialize_model(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot write model file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IngestionError("write failed for model file " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open model file " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace mssgad

// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/estimator.h"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sepkit/util.h"

namespace sepkit {

namespace {
constexpr char kMagic[4] = {'S', 'K', 'M', '1'};
}

double MaskEstimator::Gradients::SquaredNorm() const {
  double acc = 0.0;
  for (const auto& w : weights) acc += w.squaredNorm();
  for (const auto& b : biases) acc += b.squaredNorm();
  return acc;
}

void MaskEstimator::Gradients::Accumulate(const Gradients& other) {
  for (size_t i = 0; i < weights.size(); ++i) weights[i] += other.weights[i];
  for (size_t i = 0; i < biases.size(); ++i) biases[i] += other.biases[i];
}

void MaskEstimator::Gradients::Scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
}

MaskEstimator MaskEstimator::Create(FeatureMode mode, int source_count, int bins,
                                    int pair_count, const std::vector<int>& hidden,
                                    uint64_t seed) {
  if (source_count < 1 || bins < 1)
    throw std::invalid_argument("estimator: bad source count or bins");
  MaskEstimator est;
  est.mode_ = mode;
  est.source_count_ = source_count;
  est.bins_ = bins;
  est.pair_count_ = pair_count;

  std::vector<int> dims;
  dims.push_back(bins * FeaturePlaneCount(mode, pair_count, source_count));
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("estimator: bad hidden width");
    dims.push_back(h);
  }
  dims.push_back(source_count * bins);

  Rng rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Eigen::MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = rng.Uniform(-bound, bound);
    est.weights_.push_back(std::move(w));
    est.biases_.push_back(Eigen::VectorXd::Zero(out));
  }
  return est;
}

std::vector<Eigen::MatrixXd> MaskEstimator::Forward(const Eigen::MatrixXd& features,
                                                    ForwardCache* cache) const {
  if (features.cols() != input_width())
    throw std::invalid_argument("estimator: feature width " +
                                std::to_string(features.cols()) + " != expected " +
                                std::to_string(input_width()));
  ForwardCache local;
  ForwardCache& fc = cache != nullptr ? *cache : local;
  fc.activations.clear();
  fc.activations.push_back(features);

  Eigen::MatrixXd a = features;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = a * weights_[l].transpose();
    z.rowwise() += biases_[l].transpose();
    if (l + 1 < weights_.size()) {
      a = z.array().tanh();
    } else {
      a = (1.0 / (1.0 + (-z.array()).exp())).matrix();  // sigmoid keeps masks in (0,1)
    }
    fc.activations.push_back(a);
  }

  std::vector<Eigen::MatrixXd> masks;
  for (int s = 0; s < source_count_; ++s)
    masks.push_back(a.middleCols(static_cast<Eigen::Index>(s) * bins_, bins_));
  return masks;
}

MaskEstimator::Gradients MaskEstimator::Backward(
    const ForwardCache& cache, const std::vector<Eigen::MatrixXd>& mask_grads) const {
  if (cache.activations.size() != weights_.size() + 1)
    throw std::invalid_argument("estimator: stale forward cache");
  if (static_cast<int>(mask_grads.size()) != source_count_)
    throw std::invalid_argument("estimator: mask grad count mismatch");

  const Eigen::Index frames = cache.activations[0].rows();
  Eigen::MatrixXd d_out(frames, output_width());
  for (int s = 0; s < source_count_; ++s)
    d_out.middleCols(static_cast<Eigen::Index>(s) * bins_, bins_) =
        mask_grads[static_cast<size_t>(s)];

  Gradients grads = ZeroGradients();
  // Output sigmoid: dz = da * y (1 - y).
  const Eigen::MatrixXd& y = cache.activations.back();
  Eigen::MatrixXd dz = d_out.array() * y.array() * (1.0 - y.array());
  for (size_t l = weights_.size(); l-- > 0;) {
    grads.weights[l] = dz.transpose() * cache.activations[l];
    grads.biases[l] = dz.colwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd da = dz * weights_[l];
    const Eigen::MatrixXd& h = cache.activations[l];
    dz = da.array() * (1.0 - h.array().square());  // tanh'
  }
  return grads;
}

MaskEstimator::Gradients MaskEstimator::ZeroGradients() const {
  Gradients g;
  for (const auto& w : weights_)
    g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : biases_) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

void MaskEstimator::ApplyStep(const Gradients& grads, double learning_rate) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] -= learning_rate * grads.weights[l];
    biases_[l] -= learning_rate * grads.biases[l];
  }
}

void MaskEstimator::Save(const std::string& path) const {
  std::string out;
  out.append(kMagic, 4);
  AppendU32Le(&out, 1);  // version
  AppendU32Le(&out, static_cast<uint32_t>(mode_));
  AppendU32Le(&out, static_cast<uint32_t>(source_count_));
  AppendU32Le(&out, static_cast<uint32_t>(bins_));
  AppendU32Le(&out, static_cast<uint32_t>(pair_count_));
  AppendU32Le(&out, static_cast<uint32_t>(weights_.size()));
  for (const auto& w : weights_) {
    AppendU32Le(&out, static_cast<uint32_t>(w.rows()));
    AppendU32Le(&out, static_cast<uint32_t>(w.cols()));
  }
  for (size_t l = 0; l < weights_.size(); ++l) {
    const auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) AppendF64Le(&out, w(r, c));
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r)
      AppendF64Le(&out, biases_[l][r]);
  }
  AtomicWriteFile(path, out);
}

MaskEstimator MaskEstimator::Load(const std::string& path) {
  const std::string raw = ReadTextFile(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  size_t pos = 0;
  auto need = [&](size_t n) {
    if (pos + n > raw.size()) throw std::runtime_error("checkpoint: truncated file");
  };
  need(4);
  if (std::memcmp(p, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  pos = 4;
  auto get_u32 = [&]() {
    need(4);
    const uint32_t v = ReadU32Le(p + pos);
    pos += 4;
    return v;
  };
  auto get_f64 = [&]() {
    need(8);
    const double v = ReadF64Le(p + pos);
    pos += 8;
    return v;
  };

  const uint32_t version = get_u32();
  if (version != 1) throw std::runtime_error("checkpoint: unsupported version");
  MaskEstimator est;
  est.mode_ = static_cast<FeatureMode>(get_u32());
  est.source_count_ = static_cast<int>(get_u32());
  est.bins_ = static_cast<int>(get_u32());
  est.pair_count_ = static_cast<int>(get_u32());
  const uint32_t layers = get_u32();
  std::vector<std::pair<uint32_t, uint32_t>> dims;
  for (uint32_t l = 0; l < layers; ++l) {
    const uint32_t rows = get_u32();
    const uint32_t cols = get_u32();
    dims.emplace_back(rows, cols);
  }
  for (const auto& [rows, cols] : dims) {
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_f64();
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = get_f64();
    est.weights_.push_back(std::move(w));
    est.biases_.push_back(std::move(b));
  }
  if (pos != raw.size()) throw std::runtime_error("checkpoint: trailing bytes");
  return est;
}

}  // namespace sepkit

// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_ESTIMATOR_H_
#define SEPKIT_ESTIMATOR_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sepkit/features.h"

namespace sepkit {

// Per-frame MLP mask estimator: tanh hidden layers, sigmoid output of
// width S * F. Stands in for the full separation networks; it exercises
// every loss and feature path with hand-checkable gradients.
class MaskEstimator {
 public:
  struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;  // per layer incl. input, T x width
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    double SquaredNorm() const;
    void Accumulate(const Gradients& other);
    void Scale(double factor);
  };

  MaskEstimator() = default;

  // Weights drawn uniform in +-1/sqrt(fan_in) from the seeded generator.
  static MaskEstimator Create(FeatureMode mode, int source_count, int bins,
                              int pair_count, const std::vector<int>& hidden,
                              uint64_t seed);

  // features: T x input_width; returns one T x F mask per source.
  std::vector<Eigen::MatrixXd> Forward(const Eigen::MatrixXd& features,
                                       ForwardCache* cache = nullptr) const;

  // mask_grads in source-slot order, matching Forward's outputs.
  Gradients Backward(const ForwardCache& cache,
                     const std::vector<Eigen::MatrixXd>& mask_grads) const;

  Gradients ZeroGradients() const;
  void ApplyStep(const Gradients& grads, double learning_rate);

  int input_width() const { return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols()); }
  int output_width() const { return weights_.empty() ? 0 : static_cast<int>(weights_.back().rows()); }
  FeatureMode mode() const { return mode_; }
  int source_count() const { return source_count_; }
  int bins() const { return bins_; }
  int pair_count() const { return pair_count_; }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  // Versioned flat binary: magic, feature mode, dims, row-major float64.
  void Save(const std::string& path) const;
  static MaskEstimator Load(const std::string& path);

 private:
  FeatureMode mode_ = FeatureMode::kMagnitude;
  int source_count_ = 0;
  int bins_ = 0;
  int pair_count_ = 0;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace sepkit

#endif  // SEPKIT_ESTIMATOR_H_

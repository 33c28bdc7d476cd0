// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_WAVEFORM_H_
#define SEPKIT_WAVEFORM_H_

#include <Eigen/Core>
#include <vector>

namespace sepkit {

// Time-domain samples, one vector per channel. All channels share a length
// and the sample rate; every sample must be finite.
struct MultichannelWaveform {
  double sample_rate = 0.0;
  std::vector<Eigen::VectorXd> channels;

  MultichannelWaveform() = default;
  MultichannelWaveform(double rate, std::vector<Eigen::VectorXd> chans)
      : sample_rate(rate), channels(std::move(chans)) {}

  int channel_count() const { return static_cast<int>(channels.size()); }
  Eigen::Index length() const { return channels.empty() ? 0 : channels[0].size(); }

  // Throws std::invalid_argument on any violated invariant.
  void Validate() const;
};

MultichannelWaveform MonoWaveform(double rate, Eigen::VectorXd samples);

}  // namespace sepkit

#endif  // SEPKIT_WAVEFORM_H_

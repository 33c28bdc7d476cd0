// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/waveform.h"

#include <cmath>
#include <stdexcept>

namespace sepkit {

void MultichannelWaveform::Validate() const {
  if (sample_rate <= 0.0)
    throw std::invalid_argument("waveform: sample_rate must be positive");
  if (channels.empty())
    throw std::invalid_argument("waveform: no channels");
  const Eigen::Index len = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != len)
      throw std::invalid_argument("waveform: channel lengths differ");
    if (!ch.allFinite())
      throw std::invalid_argument("waveform: non-finite sample");
  }
}

MultichannelWaveform MonoWaveform(double rate, Eigen::VectorXd samples) {
  std::vector<Eigen::VectorXd> chans;
  chans.push_back(std::move(samples));
  return MultichannelWaveform(rate, std::move(chans));
}

}  // namespace sepkit

// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_WAV_H_
#define SEPKIT_WAV_H_

#include <string>

#include "sepkit/waveform.h"

namespace sepkit {

enum class WavEncoding { kPcm16, kFloat32 };

// Little-endian RIFF/WAVE, PCM 16-bit or IEEE float-32, any channel count.
MultichannelWaveform ReadWav(const std::string& path);
void WriteWav(const std::string& path, const MultichannelWaveform& wave,
              WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace sepkit

#endif  // SEPKIT_WAV_H_

// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/wav.h"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "sepkit/util.h"

namespace sepkit {

namespace {

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void PutU32(std::string* s, uint32_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>(v >> 8 & 0xff));
  s->push_back(static_cast<char>(v >> 16 & 0xff));
  s->push_back(static_cast<char>(v >> 24 & 0xff));
}

void PutU16(std::string* s, uint16_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>(v >> 8 & 0xff));
}

float BitsToFloat(uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

uint32_t FloatToBits(float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

}  // namespace

MultichannelWaveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const uint32_t chunk_len = ReadU32(buf.data() + pos + 4);
    const unsigned char* body = buf.data() + pos + 8;
    if (pos + 8 + chunk_len > buf.size())
      throw std::runtime_error("wav: truncated chunk in " + path);
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw std::runtime_error("wav: short fmt chunk");
      format = ReadU16(body);
      channels = ReadU16(body + 2);
      rate = ReadU32(body + 4);
      bits = ReadU16(body + 14);
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }
  if (channels == 0 || rate == 0) throw std::runtime_error("wav: missing fmt chunk");
  if (data_off == 0) throw std::runtime_error("wav: missing data chunk");

  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32)
    throw std::runtime_error("wav: unsupported encoding (format=" +
                             std::to_string(format) + ", bits=" + std::to_string(bits) + ")");

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data_len / frame_bytes;

  std::vector<Eigen::VectorXd> chans(channels, Eigen::VectorXd(frames));
  const unsigned char* d = buf.data() + data_off;
  for (size_t n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const unsigned char* p = d + n * frame_bytes + c * bytes_per_sample;
      double v;
      if (pcm16) {
        int16_t s = static_cast<int16_t>(ReadU16(p));
        v = static_cast<double>(s) / 32768.0;
      } else {
        v = static_cast<double>(BitsToFloat(ReadU32(p)));
      }
      chans[c][static_cast<Eigen::Index>(n)] = v;
    }
  }
  MultichannelWaveform wave(static_cast<double>(rate), std::move(chans));
  wave.Validate();
  return wave;
}

void WriteWav(const std::string& path, const MultichannelWaveform& wave,
              WavEncoding encoding) {
  wave.Validate();
  const int channels = wave.channel_count();
  const auto frames = static_cast<size_t>(wave.length());
  const bool f32 = encoding == WavEncoding::kFloat32;
  const uint16_t bits = f32 ? 32 : 16;
  const uint32_t rate = static_cast<uint32_t>(wave.sample_rate);
  if (static_cast<double>(rate) != wave.sample_rate)
    throw std::invalid_argument("wav: non-integer sample rate");

  const size_t frame_bytes = static_cast<size_t>(bits / 8) * static_cast<size_t>(channels);
  const size_t data_len = frames * frame_bytes;

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  PutU32(&out, static_cast<uint32_t>(36 + data_len));
  out += "WAVE";
  out += "fmt ";
  PutU32(&out, 16);
  PutU16(&out, f32 ? 3 : 1);
  PutU16(&out, static_cast<uint16_t>(channels));
  PutU32(&out, rate);
  PutU32(&out, static_cast<uint32_t>(rate * frame_bytes));
  PutU16(&out, static_cast<uint16_t>(frame_bytes));
  PutU16(&out, bits);
  out += "data";
  PutU32(&out, static_cast<uint32_t>(data_len));

  for (size_t n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const double v = wave.channels[static_cast<size_t>(c)][static_cast<Eigen::Index>(n)];
      if (f32) {
        PutU32(&out, FloatToBits(static_cast<float>(v)));
      } else {
        double clipped = std::max(-1.0, std::min(1.0, v));
        auto s = static_cast<int16_t>(std::lround(clipped * 32767.0));
        PutU16(&out, static_cast<uint16_t>(s));
      }
    }
  }
  AtomicWriteFile(path, out);
}

}  // namespace sepkit

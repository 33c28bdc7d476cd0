// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_UTIL_H_
#define SEPKIT_UTIL_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace sepkit {

// Seeded generator with explicit draw logic so that sampled values do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double Uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Box-Muller; avoids std::normal_distribution for reproducibility.
  double Normal() {
    double u1 = Uniform();
    double u2 = Uniform();
    while (u1 <= 1e-300) u1 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Draw an index from unnormalized weights.
  int Categorical(const std::vector<double>& weights);

  uint64_t NextRaw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

uint64_t Fnv1a64(const void* data, size_t len);
uint64_t Fnv1a64(const std::string& s);
std::string ToHex(uint64_t v);

// Little-endian scalar packing for the flat binary formats.
void AppendU32Le(std::string* s, uint32_t v);
void AppendF64Le(std::string* s, double v);
uint32_t ReadU32Le(const unsigned char* p);
double ReadF64Le(const unsigned char* p);

// Writes via a temp file in the same directory, then renames into place.
void AtomicWriteFile(const std::string& path, const std::string& contents);
void AtomicWriteFile(const std::string& path, const void* data, size_t len);

std::string ReadTextFile(const std::string& path);
bool FileExists(const std::string& path);
void EnsureDirectory(const std::string& path);
std::string JoinPath(const std::string& a, const std::string& b);

// Shortest decimal form that round-trips a double exactly.
std::string FormatDouble(double v);

// Runs fn(0..count-1) on up to `jobs` threads. Work items must be
// independent; the first exception is rethrown after all workers join.
void ParallelFor(int jobs, size_t count, const std::function<void(size_t)>& fn);

}  // namespace sepkit

#endif  // SEPKIT_UTIL_H_

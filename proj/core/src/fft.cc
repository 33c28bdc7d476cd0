// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/fft.h"

#include <cmath>
#include <stdexcept>

namespace sepkit {

void Fft(std::vector<std::complex<double>>* data, bool inverse) {
  auto& a = *data;
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("Fft: size must be a power of two");

  // Bit reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= scale;
  }
}

size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Eigen::VectorXd FftConvolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() == 0 || b.size() == 0) return Eigen::VectorXd();
  const size_t out_len = static_cast<size_t>(a.size() + b.size() - 1);
  const size_t n = NextPow2(out_len);

  std::vector<std::complex<double>> fa(n), fb(n);
  for (Eigen::Index i = 0; i < a.size(); ++i) fa[static_cast<size_t>(i)] = a[i];
  for (Eigen::Index i = 0; i < b.size(); ++i) fb[static_cast<size_t>(i)] = b[i];
  Fft(&fa, false);
  Fft(&fb, false);
  for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  Fft(&fa, true);

  Eigen::VectorXd out(static_cast<Eigen::Index>(out_len));
  for (size_t i = 0; i < out_len; ++i) out[static_cast<Eigen::Index>(i)] = fa[i].real();
  return out;
}

}  // namespace sepkit

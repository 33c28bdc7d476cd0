// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_FFT_H_
#define SEPKIT_FFT_H_

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace sepkit {

// In-place radix-2 complex FFT. n must be a power of two.
void Fft(std::vector<std::complex<double>>* data, bool inverse);

size_t NextPow2(size_t n);

// Linear convolution via FFT, output length a.size() + b.size() - 1.
Eigen::VectorXd FftConvolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace sepkit

#endif  // SEPKIT_FFT_H_

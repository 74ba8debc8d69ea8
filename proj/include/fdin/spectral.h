/* Copyright 2026 The FDIN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FDIN_SPECTRAL_H_
#define FDIN_SPECTRAL_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "fdin/tensor.h"

namespace fdin {

// Real DCT-II coefficients with the same shape as the source plane.
template <typename T>
using Spectrum = Tensor<T>;

// Half spectrum of a real signal over the last two axes: (..., H, W/2+1).
// Bins k in (0, W/2) stand for themselves and their Hermitian mirror.
template <typename T>
struct ComplexSpectrum {
  Tensor<T> real;
  Tensor<T> imag;
};

// Orthonormal type-II DCT of a single (H, W) plane, separable rows then
// columns. Inverse and adjoint coincide.
template <typename T>
absl::StatusOr<Spectrum<T>> Dct2(const Tensor<T>& plane);
template <typename T>
absl::StatusOr<Tensor<T>> Idct2(const Spectrum<T>& spectrum);

// Orthonormal real-input 2D FFT over the last two axes of `volume`.
template <typename T>
absl::StatusOr<ComplexSpectrum<T>> RfftSpatial(const Tensor<T>& volume);
// Inverse of RfftSpatial. `out_w` selects between the even and odd width
// that share a half-spectrum length.
template <typename T>
absl::StatusOr<Tensor<T>> IrfftSpatial(const ComplexSpectrum<T>& spectrum,
                                       int64_t out_h, int64_t out_w);

// Weight of half-spectrum bin k in Parseval sums: 1 for DC and (even W)
// Nyquist, 2 otherwise.
int HermitianWeight(int64_t k, int64_t w);

// Unchecked kernels over `planes` contiguous (h, w) planes.
namespace spectral {

template <typename T>
void Dct2Planes(const T* in, T* out, int64_t planes, int h, int w);
template <typename T>
void Idct2Planes(const T* in, T* out, int64_t planes, int h, int w);

// Writes (planes, h, w/2+1) real and imaginary parts.
template <typename T>
void RfftPlanes(const T* in, T* re, T* im, int64_t planes, int h, int w);
// With hermitian_weights the exact inverse of RfftPlanes; without, its
// adjoint.
template <typename T>
void IrfftPlanes(const T* re, const T* im, T* out, int64_t planes, int h, int w,
                 bool hermitian_weights);
// Adjoint of the weighted IrfftPlanes: Hermitian weights times RfftPlanes.
template <typename T>
void IrfftAdjointPlanes(const T* in, T* re, T* im, int64_t planes, int h,
                        int w);

}  // namespace spectral
}  // namespace fdin

#endif  // FDIN_SPECTRAL_H_

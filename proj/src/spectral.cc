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

#include "fdin/spectral.h"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <type_traits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "fdin/blas.h"

namespace fdin {
namespace {

enum class Basis {
  kDct,
  kCos,
  kSin,
  kHalfCos,
  kHalfSin,
  kHalfCosWeighted,
  kHalfSinWeighted
};

// Dense basis matrices, cached per (kind, size). Map nodes never move, so
// returned references stay valid.
template <typename T>
const std::vector<T>& BasisMatrix(Basis kind, int n) {
  static std::mutex mu;
  static std::map<std::pair<Basis, int>, std::vector<T>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({kind, n});
  if (it != cache.end()) return it->second;

  const double pi = std::numbers::pi;
  const int half = n / 2 + 1;
  std::vector<T> m;
  switch (kind) {
    case Basis::kDct:
      m.resize(n * n);
      for (int k = 0; k < n; ++k) {
        const double a = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i) {
          m[k * n + i] =
              static_cast<T>(a * std::cos(pi * (2 * i + 1) * k / (2.0 * n)));
        }
      }
      break;
    case Basis::kCos:
    case Basis::kSin:
      m.resize(n * n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double ang = 2.0 * pi * ((int64_t(a) * b) % n) / n;
          m[a * n + b] = static_cast<T>(kind == Basis::kCos ? std::cos(ang)
                                                            : std::sin(ang));
        }
      }
      break;
    default: {
      const bool is_cos =
          kind == Basis::kHalfCos || kind == Basis::kHalfCosWeighted;
      const bool weighted =
          kind == Basis::kHalfCosWeighted || kind == Basis::kHalfSinWeighted;
      m.resize(half * n);
      for (int k = 0; k < half; ++k) {
        const double c = weighted ? HermitianWeight(k, n) : 1.0;
        for (int i = 0; i < n; ++i) {
          const double ang = 2.0 * pi * ((int64_t(k) * i) % n) / n;
          m[k * n + i] =
              static_cast<T>(c * (is_cos ? std::cos(ang) : std::sin(ang)));
        }
      }
    }
  }
  return cache.emplace(std::make_pair(kind, n), std::move(m)).first->second;
}

template <typename T>
absl::Status CheckFinite(const Tensor<T>& t, const char* what) {
  if (!AllFinite(t)) {
    return absl::InvalidArgumentError(absl::StrCat(what, ": non-finite input"));
  }
  return absl::OkStatus();
}

}  // namespace

int HermitianWeight(int64_t k, int64_t w) {
  if (k == 0) return 1;
  if (w % 2 == 0 && k == w / 2) return 1;
  return 2;
}

namespace spectral {

template <typename T>
void Dct2PlanesImpl(const T* in, T* out, int64_t planes, int h, int w) {
  const auto& ch = BasisMatrix<T>(Basis::kDct, h);
  const auto& cw = BasisMatrix<T>(Basis::kDct, w);
  std::vector<T> tmp(planes * h * w);
  // Rows: X * Cw^T.
  Gemm(false, true, planes * h, w, w, T(1), in, w, cw.data(), w, T(0),
       tmp.data(), w);
  // Columns: Ch * (X Cw^T), per plane.
  for (int64_t p = 0; p < planes; ++p) {
    Gemm(false, false, h, w, h, T(1), ch.data(), h, tmp.data() + p * h * w, w,
         T(0), out + p * h * w, w);
  }
}

template <typename T>
void Idct2PlanesImpl(const T* in, T* out, int64_t planes, int h, int w) {
  const auto& ch = BasisMatrix<T>(Basis::kDct, h);
  const auto& cw = BasisMatrix<T>(Basis::kDct, w);
  std::vector<T> tmp(planes * h * w);
  Gemm(false, false, planes * h, w, w, T(1), in, w, cw.data(), w, T(0),
       tmp.data(), w);
  for (int64_t p = 0; p < planes; ++p) {
    Gemm(true, false, h, w, h, T(1), ch.data(), h, tmp.data() + p * h * w, w,
         T(0), out + p * h * w, w);
  }
}

template <typename T>
void RfftPlanesImpl(const T* in, T* re, T* im, int64_t planes, int h, int w) {
  const int half = w / 2 + 1;
  const auto& cw = BasisMatrix<T>(Basis::kHalfCos, w);
  const auto& sw = BasisMatrix<T>(Basis::kHalfSin, w);
  const auto& ch = BasisMatrix<T>(Basis::kCos, h);
  const auto& sh = BasisMatrix<T>(Basis::kSin, h);
  const T scale = static_cast<T>(1.0 / std::sqrt(double(h) * w));
  std::vector<T> ar(planes * h * half), ai(planes * h * half);
  // Along W: A = X e^{-i 2pi k w / W}.
  Gemm(false, true, planes * h, half, w, T(1), in, w, cw.data(), w, T(0),
       ar.data(), half);
  Gemm(false, true, planes * h, half, w, T(-1), in, w, sw.data(), w, T(0),
       ai.data(), half);
  // Along H: Re = Ch Ar + Sh Ai, Im = Ch Ai - Sh Ar.
  for (int64_t p = 0; p < planes; ++p) {
    const int64_t off = p * h * half;
    Gemm(false, false, h, half, h, scale, ch.data(), h, ar.data() + off, half,
         T(0), re + off, half);
    Gemm(false, false, h, half, h, scale, sh.data(), h, ai.data() + off, half,
         T(1), re + off, half);
    Gemm(false, false, h, half, h, scale, ch.data(), h, ai.data() + off, half,
         T(0), im + off, half);
    Gemm(false, false, h, half, h, -scale, sh.data(), h, ar.data() + off, half,
         T(1), im + off, half);
  }
}

template <typename T>
void IrfftPlanesImpl(const T* re, const T* im, T* out, int64_t planes, int h,
                     int w, bool hermitian_weights) {
  const int half = w / 2 + 1;
  const auto& cw = BasisMatrix<T>(
      hermitian_weights ? Basis::kHalfCosWeighted : Basis::kHalfCos, w);
  const auto& sw = BasisMatrix<T>(
      hermitian_weights ? Basis::kHalfSinWeighted : Basis::kHalfSin, w);
  const auto& ch = BasisMatrix<T>(Basis::kCos, h);
  const auto& sh = BasisMatrix<T>(Basis::kSin, h);
  const T scale = static_cast<T>(1.0 / std::sqrt(double(h) * w));
  std::vector<T> zr(planes * h * half), zi(planes * h * half);
  // Along H: Z = Y e^{+i 2pi h h' / H}.
  for (int64_t p = 0; p < planes; ++p) {
    const int64_t off = p * h * half;
    Gemm(false, false, h, half, h, T(1), ch.data(), h, re + off, half, T(0),
         zr.data() + off, half);
    Gemm(false, false, h, half, h, T(-1), sh.data(), h, im + off, half, T(1),
         zr.data() + off, half);
    Gemm(false, false, h, half, h, T(1), ch.data(), h, im + off, half, T(0),
         zi.data() + off, half);
    Gemm(false, false, h, half, h, T(1), sh.data(), h, re + off, half, T(1),
         zi.data() + off, half);
  }
  // Along W: y = sum_k c_k Re(Z_k e^{+i 2pi k w / W}).
  Gemm(false, false, planes * h, w, half, scale, zr.data(), half, cw.data(), w,
       T(0), out, w);
  Gemm(false, false, planes * h, w, half, -scale, zi.data(), half, sw.data(), w,
       T(1), out, w);
}

// Single precision runs the kernels in double and rounds once at the end, so
// inverse pairs compose to the identity to within a few float ulps.
template <typename T>
std::vector<double> Widen(const T* p, int64_t n) {
  return std::vector<double>(p, p + n);
}

template <typename T>
void Narrow(const std::vector<double>& v, T* out) {
  std::copy(v.begin(), v.end(), out);
}

template <typename T>
void Dct2Planes(const T* in, T* out, int64_t planes, int h, int w) {
  if constexpr (std::is_same_v<T, double>) {
    Dct2PlanesImpl(in, out, planes, h, w);
  } else {
    const int64_t n = planes * h * w;
    std::vector<double> o(n);
    Dct2PlanesImpl(Widen(in, n).data(), o.data(), planes, h, w);
    Narrow(o, out);
  }
}

template <typename T>
void Idct2Planes(const T* in, T* out, int64_t planes, int h, int w) {
  if constexpr (std::is_same_v<T, double>) {
    Idct2PlanesImpl(in, out, planes, h, w);
  } else {
    const int64_t n = planes * h * w;
    std::vector<double> o(n);
    Idct2PlanesImpl(Widen(in, n).data(), o.data(), planes, h, w);
    Narrow(o, out);
  }
}

template <typename T>
void RfftPlanes(const T* in, T* re, T* im, int64_t planes, int h, int w) {
  if constexpr (std::is_same_v<T, double>) {
    RfftPlanesImpl(in, re, im, planes, h, w);
  } else {
    const int64_t n = planes * h * (w / 2 + 1);
    std::vector<double> r(n), i(n);
    RfftPlanesImpl(Widen(in, planes * h * w).data(), r.data(), i.data(), planes,
                   h, w);
    Narrow(r, re);
    Narrow(i, im);
  }
}

template <typename T>
void IrfftPlanes(const T* re, const T* im, T* out, int64_t planes, int h, int w,
                 bool hermitian_weights) {
  if constexpr (std::is_same_v<T, double>) {
    IrfftPlanesImpl(re, im, out, planes, h, w, hermitian_weights);
  } else {
    const int64_t n = planes * h * (w / 2 + 1);
    std::vector<double> o(planes * h * w);
    IrfftPlanesImpl(Widen(re, n).data(), Widen(im, n).data(), o.data(), planes,
                    h, w, hermitian_weights);
    Narrow(o, out);
  }
}

template <typename T>
void IrfftAdjointPlanes(const T* in, T* re, T* im, int64_t planes, int h,
                        int w) {
  const int half = w / 2 + 1;
  RfftPlanes<T>(in, re, im, planes, h, w);
  for (int64_t r = 0; r < planes * h; ++r) {
    for (int k = 0; k < half; ++k) {
      const T c = static_cast<T>(HermitianWeight(k, w));
      re[r * half + k] *= c;
      im[r * half + k] *= c;
    }
  }
}

}  // namespace spectral

template <typename T>
absl::StatusOr<Spectrum<T>> Dct2(const Tensor<T>& plane) {
  if (plane.rank() != 2 || plane.dim(0) < 1 || plane.dim(1) < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dct2 expects an (H, W) plane, got ", ShapeString(plane.shape())));
  }
  FDIN_RETURN_IF_ERROR(CheckFinite(plane, "dct2"));
  Spectrum<T> out(plane.shape());
  spectral::Dct2Planes(plane.data(), out.data(), 1, plane.dim(0), plane.dim(1));
  return out;
}

template <typename T>
absl::StatusOr<Tensor<T>> Idct2(const Spectrum<T>& spectrum) {
  if (spectrum.rank() != 2 || spectrum.dim(0) < 1 || spectrum.dim(1) < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("idct2 expects an (H, W) spectrum, got ",
                     ShapeString(spectrum.shape())));
  }
  FDIN_RETURN_IF_ERROR(CheckFinite(spectrum, "idct2"));
  Tensor<T> out(spectrum.shape());
  spectral::Idct2Planes(spectrum.data(), out.data(), 1, spectrum.dim(0),
                        spectrum.dim(1));
  return out;
}

template <typename T>
absl::StatusOr<ComplexSpectrum<T>> RfftSpatial(const Tensor<T>& volume) {
  if (volume.rank() < 2 || volume.dim(-1) < 1 || volume.dim(-2) < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "rfft_spatial expects (..., H, W), got ", ShapeString(volume.shape())));
  }
  FDIN_RETURN_IF_ERROR(CheckFinite(volume, "rfft_spatial"));
  const int h = volume.dim(-2), w = volume.dim(-1);
  Shape shape = volume.shape();
  shape.back() = w / 2 + 1;
  ComplexSpectrum<T> out{Tensor<T>(shape), Tensor<T>(shape)};
  spectral::RfftPlanes(volume.data(), out.real.data(), out.imag.data(),
                       volume.size() / (int64_t(h) * w), h, w);
  return out;
}

template <typename T>
absl::StatusOr<Tensor<T>> IrfftSpatial(const ComplexSpectrum<T>& spectrum,
                                       int64_t out_h, int64_t out_w) {
  const Tensor<T>& re = spectrum.real;
  if (!re.SameShape(spectrum.imag) || re.rank() < 2) {
    return absl::InvalidArgumentError(
        "irfft_spatial: real and imaginary parts must share a rank>=2 shape");
  }
  if (out_h < 1 || out_w < 1 || re.dim(-2) != out_h ||
      re.dim(-1) != out_w / 2 + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "irfft_spatial: target (", out_h, ",", out_w,
        ") inconsistent with half spectrum ", ShapeString(re.shape())));
  }
  FDIN_RETURN_IF_ERROR(CheckFinite(re, "irfft_spatial"));
  FDIN_RETURN_IF_ERROR(CheckFinite(spectrum.imag, "irfft_spatial"));
  Shape shape = re.shape();
  shape.back() = out_w;
  Tensor<T> out(shape);
  spectral::IrfftPlanes(re.data(), spectrum.imag.data(), out.data(),
                        re.size() / re.dim(-1) / out_h, out_h, out_w, true);
  return out;
}

#define FDIN_INSTANTIATE(T)                                                    \
  template absl::StatusOr<Spectrum<T>> Dct2<T>(const Tensor<T>&);              \
  template absl::StatusOr<Tensor<T>> Idct2<T>(const Spectrum<T>&);             \
  template absl::StatusOr<ComplexSpectrum<T>> RfftSpatial<T>(                  \
      const Tensor<T>&);                                                       \
  template absl::StatusOr<Tensor<T>> IrfftSpatial<T>(                          \
      const ComplexSpectrum<T>&, int64_t, int64_t);                            \
  template void spectral::Dct2Planes<T>(const T*, T*, int64_t, int, int);      \
  template void spectral::Idct2Planes<T>(const T*, T*, int64_t, int, int);     \
  template void spectral::RfftPlanes<T>(const T*, T*, T*, int64_t, int, int);  \
  template void spectral::IrfftPlanes<T>(const T*, const T*, T*, int64_t, int, \
                                         int, bool);                           \
  template void spectral::IrfftAdjointPlanes<T>(const T*, T*, T*, int64_t,     \
                                                int, int);
FDIN_INSTANTIATE(float)
FDIN_INSTANTIATE(double)
#undef FDIN_INSTANTIATE

}  // namespace fdin

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

#include "fdin/tensor.h"

#include <cmath>
#include <cstring>

#include "absl/strings/str_join.h"

namespace fdin {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  return "(" + absl::StrJoin(shape, ",") + ")";
}

template <typename T>
bool AllFinite(const Tensor<T>& t) {
  for (T v : t.values()) {
    if (!std::isfinite(static_cast<double>(v))) return false;
  }
  return true;
}

template <typename T>
T MaxAbsDiff(const Tensor<T>& a, const Tensor<T>& b) {
  FDIN_CHECK(a.SameShape(b));
  T m = 0;
  for (int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
T Dot(const Tensor<T>& a, const Tensor<T>& b) {
  FDIN_CHECK(a.size() == b.size());
  double s = 0;
  for (int64_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return static_cast<T>(s);
}

template <typename T>
Tensor<T> ConcatChannels(const Tensor<T>& a, const Tensor<T>& b) {
  FDIN_CHECK(a.rank() >= 2 && a.rank() == b.rank());
  FDIN_CHECK(a.dim(0) == b.dim(0));
  for (int d = 2; d < a.rank(); ++d) FDIN_CHECK(a.dim(d) == b.dim(d));
  const int64_t n = a.dim(0);
  const int64_t a_block = a.size() / n;
  const int64_t b_block = b.size() / n;
  Shape shape = a.shape();
  shape[1] += b.dim(1);
  Tensor<T> out(shape);
  for (int64_t i = 0; i < n; ++i) {
    T* dst = out.data() + i * (a_block + b_block);
    std::memcpy(dst, a.data() + i * a_block, a_block * sizeof(T));
    std::memcpy(dst + a_block, b.data() + i * b_block, b_block * sizeof(T));
  }
  return out;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> SplitChannels(const Tensor<T>& x,
                                              int64_t first_channels) {
  FDIN_CHECK(x.rank() >= 2 && first_channels > 0 && first_channels < x.dim(1));
  const int64_t n = x.dim(0);
  const int64_t inner = x.size() / (n * x.dim(1));
  Shape sa = x.shape(), sb = x.shape();
  sa[1] = first_channels;
  sb[1] = x.dim(1) - first_channels;
  Tensor<T> a(sa), b(sb);
  const int64_t a_block = first_channels * inner;
  const int64_t b_block = sb[1] * inner;
  for (int64_t i = 0; i < n; ++i) {
    const T* src = x.data() + i * (a_block + b_block);
    std::memcpy(a.data() + i * a_block, src, a_block * sizeof(T));
    std::memcpy(b.data() + i * b_block, src + a_block, b_block * sizeof(T));
  }
  return {std::move(a), std::move(b)};
}

#define FDIN_INSTANTIATE(T)                                                   \
  template bool AllFinite<T>(const Tensor<T>&);                               \
  template T MaxAbsDiff<T>(const Tensor<T>&, const Tensor<T>&);               \
  template T Dot<T>(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> ConcatChannels<T>(const Tensor<T>&, const Tensor<T>&);   \
  template std::pair<Tensor<T>, Tensor<T>> SplitChannels<T>(const Tensor<T>&, \
                                                            int64_t);
FDIN_INSTANTIATE(float)
FDIN_INSTANTIATE(double)
#undef FDIN_INSTANTIATE

}  // namespace fdin

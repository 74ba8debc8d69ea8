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

#ifndef FDIN_TENSOR_H_
#define FDIN_TENSOR_H_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdin/status_macros.h"

namespace fdin {

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

// Dense row-major array. Volumes flowing through the network use the
// (N, C, T, H, W) layout; data-side clips use (T, C, H, W).
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0))
      : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    FDIN_CHECK(static_cast<int64_t>(data_.size()) == NumElements(shape_));
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int i) const { return shape_[i < 0 ? i + rank() : i]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](int64_t i) { return data_[i]; }
  const T& operator[](int64_t i) const { return data_[i]; }

  template <typename... I>
  T& operator()(I... idx) {
    return data_[Offset({static_cast<int64_t>(idx)...})];
  }
  template <typename... I>
  const T& operator()(I... idx) const {
    return data_[Offset({static_cast<int64_t>(idx)...})];
  }

  int64_t Offset(std::initializer_list<int64_t> idx) const {
    FDIN_CHECK(static_cast<int>(idx.size()) == rank());
    int64_t off = 0;
    int d = 0;
    for (int64_t i : idx) off = off * shape_[d++] + i;
    return off;
  }

  void Fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void Reshape(Shape shape) {
    FDIN_CHECK(NumElements(shape) == size());
    shape_ = std::move(shape);
  }
  Tensor Reshaped(Shape shape) const {
    Tensor out = *this;
    out.Reshape(std::move(shape));
    return out;
  }
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  template <typename U>
  Tensor<U> Cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  // this += alpha * other
  void Axpy(T alpha, const Tensor& other) {
    FDIN_CHECK(SameShape(other));
    for (int64_t i = 0; i < size(); ++i) data_[i] += alpha * other.data_[i];
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename T>
bool AllFinite(const Tensor<T>& t);

template <typename T>
T MaxAbsDiff(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
T Dot(const Tensor<T>& a, const Tensor<T>& b);

// Channel-axis concat / split for (N, C, ...) tensors.
template <typename T>
Tensor<T> ConcatChannels(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
std::pair<Tensor<T>, Tensor<T>> SplitChannels(const Tensor<T>& x,
                                              int64_t first_channels);

}  // namespace fdin

#endif  // FDIN_TENSOR_H_

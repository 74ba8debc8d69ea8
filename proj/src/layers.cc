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

#include "fdin/layers.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "fdin/blas.h"

namespace fdin {

template <typename T>
Conv3d<T>::Conv3d(const ConvSpec& spec) : spec_(spec) {
  FDIN_CHECK(spec.in_channels > 0 && spec.out_channels > 0);
  FDIN_CHECK(spec.kernel % 2 == 1 && spec.spatial_stride >= 1);
  const int k = spec.kernel;
  weight_.Reset({spec.out_channels, spec.in_channels, k, k, k});
  if (spec.bias) bias_.Reset({spec.out_channels});
}

template <typename T>
void Conv3d<T>::Init(Rng& rng) {
  const int k = spec_.kernel;
  const double fan_in = double(spec_.in_channels) * k * k * k;
  const double std = std::sqrt(2.0 / fan_in);
  for (T& v : weight_.value.values()) v = static_cast<T>(std * Normal(rng));
  if (spec_.bias) bias_.value.Fill(T(0));
}

template <typename T>
Shape Conv3d<T>::OutputShape(const Shape& in) const {
  const int pad = spec_.kernel / 2, s = spec_.spatial_stride;
  return {in[0], spec_.out_channels, in[2],
          (in[3] + 2 * pad - spec_.kernel) / s + 1,
          (in[4] + 2 * pad - spec_.kernel) / s + 1};
}

namespace {

// Columns per GEMM panel: about 1 MB of im2col data, so a panel stays in L2.
int64_t PanelColumns(int64_t kdim, int64_t p) {
  const int64_t target = std::max<int64_t>(64, (int64_t{1} << 18) / kdim);
  return std::min(target, p);
}

int FloorDiv(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Output offsets q in [0, len) starting at column xo whose input column
// (xo + q) * s + shift lies inside [0, w).
std::pair<int, int> ValidRange(int xo, int len, int s, int shift, int w) {
  const int lo = std::max(0, FloorDiv(-shift + s - 1, s) - xo);
  const int hi = std::min(len, FloorDiv(w - 1 - shift, s) + 1 - xo);
  return {std::min(lo, len), std::max(hi, std::min(lo, len))};
}

template <typename T>
T* Scratch(std::vector<T>& buffer, int64_t size) {
  if (int64_t(buffer.size()) < size) buffer.resize(size);
  return buffer.data();
}

}  // namespace

template <typename T>
void Conv3d<T>::Im2Col(const T* x, const Geometry& g, int64_t j0, int64_t j1,
                       T* cols) const {
  const int k = spec_.kernel, pad = k / 2, s = spec_.spatial_stride;
  const int64_t nc = j1 - j0, plane = int64_t(g.ho) * g.wo;
  int64_t row = 0;
  for (int ci = 0; ci < spec_.in_channels; ++ci) {
    const T* xc = x + int64_t(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < k; ++dt) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx, ++row) {
          T* out = cols + row * nc;
          int to = int(j0 / plane);
          int y = int(j0 % plane) / g.wo, xo = int(j0 % g.wo);
          for (int64_t j = j0; j < j1;) {
            const int len = int(std::min<int64_t>(g.wo - xo, j1 - j));
            T* o = out + (j - j0);
            const int ti = to + dt - pad, hi = y * s + dy - pad;
            if (ti < 0 || ti >= g.t || hi < 0 || hi >= g.h) {
              std::memset(o, 0, sizeof(T) * len);
            } else {
              const T* src = xc + (int64_t(ti) * g.h + hi) * g.w;
              const auto [lo, hi_q] = ValidRange(xo, len, s, dx - pad, g.w);
              std::fill(o, o + lo, T(0));
              const T* sp = src + (xo + lo) * s + dx - pad;
              if (s == 1) {
                std::copy(sp, sp + (hi_q - lo), o + lo);
              } else {
                for (int q = lo; q < hi_q; ++q) o[q] = sp[(q - lo) * s];
              }
              std::fill(o + hi_q, o + len, T(0));
            }
            j += len;
            xo += len;
            if (xo == g.wo) {
              xo = 0;
              if (++y == g.ho) y = 0, ++to;
            }
          }
        }
      }
    }
  }
}

template <typename T>
void Conv3d<T>::Col2Im(const T* cols, const Geometry& g, int64_t j0, int64_t j1,
                       T* dx_out) const {
  const int k = spec_.kernel, pad = k / 2, s = spec_.spatial_stride;
  const int64_t nc = j1 - j0, plane = int64_t(g.ho) * g.wo;
  int64_t row = 0;
  for (int ci = 0; ci < spec_.in_channels; ++ci) {
    T* dxc = dx_out + int64_t(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < k; ++dt) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx, ++row) {
          const T* in = cols + row * nc;
          int to = int(j0 / plane);
          int y = int(j0 % plane) / g.wo, xo = int(j0 % g.wo);
          for (int64_t j = j0; j < j1;) {
            const int len = int(std::min<int64_t>(g.wo - xo, j1 - j));
            const T* c = in + (j - j0);
            const int ti = to + dt - pad, hi = y * s + dy - pad;
            if (ti >= 0 && ti < g.t && hi >= 0 && hi < g.h) {
              T* dst = dxc + (int64_t(ti) * g.h + hi) * g.w;
              const auto [lo, hi_q] = ValidRange(xo, len, s, dx - pad, g.w);
              T* dp = dst + (xo + lo) * s + dx - pad;
              for (int q = lo; q < hi_q; ++q) dp[(q - lo) * s] += c[q];
            }
            j += len;
            xo += len;
            if (xo == g.wo) {
              xo = 0;
              if (++y == g.ho) y = 0, ++to;
            }
          }
        }
      }
    }
  }
}

template <typename T>
Tensor<T> Conv3d<T>::Forward(const Tensor<T>& x) {
  FDIN_CHECK(x.rank() == 5 && x.dim(1) == spec_.in_channels);
  input_ = x;
  const Shape out_shape = OutputShape(x.shape());
  Tensor<T> y(out_shape);
  const Geometry g{int(x.dim(2)), int(x.dim(3)), int(x.dim(4)),
                   int(out_shape[3]), int(out_shape[4])};
  const int n = x.dim(0), cout = spec_.out_channels;
  const int64_t p = int64_t(g.t) * g.ho * g.wo;
  const int64_t in_size = int64_t(spec_.in_channels) * g.t * g.h * g.w;
  const int64_t kdim =
      int64_t(spec_.in_channels) * spec_.kernel * spec_.kernel * spec_.kernel;
  const bool pointwise = spec_.kernel == 1 && spec_.spatial_stride == 1;
  const int64_t panel = PanelColumns(kdim, p);
  thread_local std::vector<T> buffer;
  T* cols = pointwise ? nullptr : Scratch(buffer, kdim * panel);
  for (int i = 0; i < n; ++i) {
    const T* xi = x.data() + i * in_size;
    T* yi = y.data() + int64_t(i) * cout * p;
    for (int64_t j0 = 0; j0 < p; j0 += panel) {
      const int64_t j1 = std::min(p, j0 + panel);
      const T* b = xi + j0;
      int64_t ldb = p;
      if (!pointwise) {
        Im2Col(xi, g, j0, j1, cols);
        b = cols;
        ldb = j1 - j0;
      }
      Gemm(false, false, cout, int(j1 - j0), int(kdim), T(1),
           weight_.value.data(), int(kdim), b, int(ldb), T(0), yi + j0, int(p));
    }
    if (spec_.bias) {
      for (int co = 0; co < cout; ++co) {
        const T bv = bias_.value[co];
        T* row = yi + co * p;
        for (int64_t j = 0; j < p; ++j) row[j] += bv;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv3d<T>::Backward(const Tensor<T>& dy) {
  const Tensor<T>& x = input_;
  FDIN_CHECK(dy.shape() == OutputShape(x.shape()));
  Tensor<T> dx(x.shape());
  const Geometry g{int(x.dim(2)), int(x.dim(3)), int(x.dim(4)), int(dy.dim(3)),
                   int(dy.dim(4))};
  const int n = x.dim(0), cout = spec_.out_channels;
  const int64_t p = int64_t(g.t) * g.ho * g.wo;
  const int64_t in_size = int64_t(spec_.in_channels) * g.t * g.h * g.w;
  const int64_t kdim =
      int64_t(spec_.in_channels) * spec_.kernel * spec_.kernel * spec_.kernel;
  const bool pointwise = spec_.kernel == 1 && spec_.spatial_stride == 1;
  const int64_t panel = PanelColumns(kdim, p);
  thread_local std::vector<T> col_buffer, dcol_buffer;
  T* cols = pointwise ? nullptr : Scratch(col_buffer, kdim * panel);
  T* dcols = pointwise ? nullptr : Scratch(dcol_buffer, kdim * panel);
  for (int i = 0; i < n; ++i) {
    const T* xi = x.data() + i * in_size;
    T* dxi = dx.data() + i * in_size;
    const T* dyi = dy.data() + int64_t(i) * cout * p;
    for (int64_t j0 = 0; j0 < p; j0 += panel) {
      const int64_t j1 = std::min(p, j0 + panel);
      const int nc = int(j1 - j0);
      if (pointwise) {
        Gemm(false, true, cout, int(kdim), nc, T(1), dyi + j0, int(p), xi + j0,
             int(p), T(1), weight_.grad.data(), int(kdim));
        Gemm(true, false, int(kdim), nc, cout, T(1), weight_.value.data(),
             int(kdim), dyi + j0, int(p), T(0), dxi + j0, int(p));
        continue;
      }
      Im2Col(xi, g, j0, j1, cols);
      // dW += dY * cols^T
      Gemm(false, true, cout, int(kdim), nc, T(1), dyi + j0, int(p), cols, nc,
           T(1), weight_.grad.data(), int(kdim));
      // dcols = W^T * dY
      Gemm(true, false, int(kdim), nc, cout, T(1), weight_.value.data(),
           int(kdim), dyi + j0, int(p), T(0), dcols, nc);
      Col2Im(dcols, g, j0, j1, dxi);
    }
    if (spec_.bias) {
      for (int co = 0; co < cout; ++co) {
        double s = 0;
        for (int64_t j = 0; j < p; ++j) s += dyi[co * p + j];
        bias_.grad[co] += static_cast<T>(s);
      }
    }
  }
  return dx;
}

template <typename T>
void Conv3d<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  set->params.push_back({prefix + ".weight", &weight_});
  if (spec_.bias) set->params.push_back({prefix + ".bias", &bias_});
}

template <typename T>
BatchNorm3d<T>::BatchNorm3d(int channels) : channels_(channels) {
  gamma_.Reset({channels});
  gamma_.value.Fill(T(1));
  beta_.Reset({channels});
  running_mean_ = Tensor<T>({channels}, T(0));
  running_var_ = Tensor<T>({channels}, T(1));
}

template <typename T>
Tensor<T> BatchNorm3d<T>::Forward(const Tensor<T>& x, bool training) {
  FDIN_CHECK(x.rank() == 5 && x.dim(1) == channels_);
  const int64_t n = x.dim(0);
  const int64_t inner = x.size() / (n * channels_);
  const int64_t count = n * inner;
  Tensor<T> y(x.shape());
  xhat_ = Tensor<T>(x.shape());
  inv_std_.assign(channels_, T(0));
  last_training_ = training;
  for (int c = 0; c < channels_; ++c) {
    double mean, var;
    if (training) {
      double s = 0, ss = 0;
      for (int64_t i = 0; i < n; ++i) {
        const T* p = x.data() + (i * channels_ + c) * inner;
        for (int64_t j = 0; j < inner; ++j) s += p[j];
      }
      mean = s / count;
      for (int64_t i = 0; i < n; ++i) {
        const T* p = x.data() + (i * channels_ + c) * inner;
        for (int64_t j = 0; j < inner; ++j) {
          const double d = p[j] - mean;
          ss += d * d;
        }
      }
      var = ss / count;
      const double unbiased = count > 1 ? ss / (count - 1) : var;
      running_mean_[c] =
          static_cast<T>((1 - kMomentum) * running_mean_[c] + kMomentum * mean);
      running_var_[c] = static_cast<T>((1 - kMomentum) * running_var_[c] +
                                       kMomentum * unbiased);
    } else {
      mean = running_mean_[c];
      var = running_var_[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + kEpsilon);
    inv_std_[c] = static_cast<T>(inv_std);
    const T g = gamma_.value[c], b = beta_.value[c];
    const T m = static_cast<T>(mean), is = static_cast<T>(inv_std);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t off = (i * channels_ + c) * inner;
      const T* p = x.data() + off;
      T* xh = xhat_.data() + off;
      T* q = y.data() + off;
      for (int64_t j = 0; j < inner; ++j) {
        xh[j] = (p[j] - m) * is;
        q[j] = g * xh[j] + b;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm3d<T>::Backward(const Tensor<T>& dy) {
  FDIN_CHECK(dy.SameShape(xhat_));
  const int64_t n = dy.dim(0);
  const int64_t inner = dy.size() / (n * channels_);
  const double count = double(n * inner);
  Tensor<T> dx(dy.shape());
  for (int c = 0; c < channels_; ++c) {
    double sum_dy = 0, sum_dy_xhat = 0;
    for (int64_t i = 0; i < n; ++i) {
      const int64_t off = (i * channels_ + c) * inner;
      const T* g = dy.data() + off;
      const T* xh = xhat_.data() + off;
      for (int64_t j = 0; j < inner; ++j) {
        sum_dy += g[j];
        sum_dy_xhat += double(g[j]) * xh[j];
      }
    }
    gamma_.grad[c] += static_cast<T>(sum_dy_xhat);
    beta_.grad[c] += static_cast<T>(sum_dy);
    const double scale = double(gamma_.value[c]) * inv_std_[c];
    const T a = static_cast<T>(scale);
    const T mean_dy = static_cast<T>(sum_dy / count);
    const T mean_dy_xhat = static_cast<T>(sum_dy_xhat / count);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t off = (i * channels_ + c) * inner;
      const T* g = dy.data() + off;
      const T* xh = xhat_.data() + off;
      T* d = dx.data() + off;
      if (last_training_) {
        for (int64_t j = 0; j < inner; ++j) {
          d[j] = a * (g[j] - mean_dy - xh[j] * mean_dy_xhat);
        }
      } else {
        for (int64_t j = 0; j < inner; ++j) d[j] = a * g[j];
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm3d<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  set->params.push_back({prefix + ".gamma", &gamma_});
  set->params.push_back({prefix + ".beta", &beta_});
  set->buffers.push_back({prefix + ".running_mean", &running_mean_});
  set->buffers.push_back({prefix + ".running_var", &running_var_});
}

template <typename T>
Tensor<T> Relu<T>::Forward(const Tensor<T>& x) {
  output_ = x;
  for (T& v : output_.values()) v = v > T(0) ? v : T(0);
  return output_;
}

template <typename T>
Tensor<T> Relu<T>::Backward(const Tensor<T>& dy) const {
  FDIN_CHECK(dy.SameShape(output_));
  Tensor<T> dx(dy.shape());
  for (int64_t i = 0; i < dy.size(); ++i) {
    dx[i] = output_[i] > T(0) ? dy[i] : T(0);
  }
  return dx;
}

template <typename T>
Tensor<T> Upsample2x(const Tensor<T>& x) {
  FDIN_CHECK(x.rank() == 5);
  const int64_t planes = x.dim(0) * x.dim(1) * x.dim(2);
  const int64_t h = x.dim(3), w = x.dim(4);
  Tensor<T> y({x.dim(0), x.dim(1), x.dim(2), 2 * h, 2 * w});
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = x.data() + p * h * w;
    T* dst = y.data() + p * 4 * h * w;
    for (int64_t r = 0; r < 2 * h; ++r) {
      const T* srow = src + (r / 2) * w;
      T* drow = dst + r * 2 * w;
      for (int64_t c = 0; c < 2 * w; ++c) drow[c] = srow[c / 2];
    }
  }
  return y;
}

template <typename T>
Tensor<T> Upsample2xBackward(const Tensor<T>& dy) {
  FDIN_CHECK(dy.rank() == 5 && dy.dim(3) % 2 == 0 && dy.dim(4) % 2 == 0);
  const int64_t planes = dy.dim(0) * dy.dim(1) * dy.dim(2);
  const int64_t h = dy.dim(3) / 2, w = dy.dim(4) / 2;
  Tensor<T> dx({dy.dim(0), dy.dim(1), dy.dim(2), h, w});
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = dy.data() + p * 4 * h * w;
    T* dst = dx.data() + p * h * w;
    for (int64_t r = 0; r < 2 * h; ++r) {
      const T* srow = src + r * 2 * w;
      T* drow = dst + (r / 2) * w;
      for (int64_t c = 0; c < 2 * w; ++c) drow[c / 2] += srow[c];
    }
  }
  return dx;
}

template class Conv3d<float>;
template class Conv3d<double>;
template class BatchNorm3d<float>;
template class BatchNorm3d<double>;
template class Relu<float>;
template class Relu<double>;
template Tensor<float> Upsample2x<float>(const Tensor<float>&);
template Tensor<double> Upsample2x<double>(const Tensor<double>&);
template Tensor<float> Upsample2xBackward<float>(const Tensor<float>&);
template Tensor<double> Upsample2xBackward<double>(const Tensor<double>&);

}  // namespace fdin

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

#ifndef FDIN_BLAS_H_
#define FDIN_BLAS_H_

namespace fdin {

// Row-major C = alpha * op(A) * op(B) + beta * C.
void Gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
          const float* a, int lda, const float* b, int ldb, float beta,
          float* c, int ldc);
void Gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta,
          double* c, int ldc);

// Caps BLAS worker threads; reads FDIN_NUM_THREADS when n <= 0.
void SetNumThreads(int n);
int NumThreads();

}  // namespace fdin

#endif  // FDIN_BLAS_H_

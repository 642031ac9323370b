/*
 * Copyright 2026 The meanfield Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <complex>
#include <span>

namespace meanfield::detail {

// Unnormalized 2-D complex DFTs of an n0 x n1 row-major array, backed by FFTW.
// Plans are created once per shape under a lock; execution is reentrant.
void fft2_forward(int n0, int n1, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out);
void fft2_backward(int n0, int n1, std::span<const std::complex<double>> in,
                   std::span<std::complex<double>> out);

}  // namespace meanfield::detail

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

#include "fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>
#include <tuple>

namespace meanfield::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan plan_for(int n0, int n1, int sign) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto key = std::make_tuple(n0, n1, sign);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;
  // Planning with FFTW_ESTIMATE does not touch the buffers.
  auto* in = fftw_alloc_complex(static_cast<std::size_t>(n0) * n1);
  auto* out = fftw_alloc_complex(static_cast<std::size_t>(n0) * n1);
  fftw_plan plan = fftw_plan_dft_2d(n0, n1, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  c.plans.emplace(key, plan);
  return plan;
}

void execute(int n0, int n1, int sign, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  assert(in.size() == static_cast<std::size_t>(n0) * n1);
  assert(out.size() == in.size());
  fftw_plan plan = plan_for(n0, n1, sign);
  // fftw_execute_dft never writes to its input for out-of-place c2c plans.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace

void fft2_forward(int n0, int n1, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) {
  execute(n0, n1, FFTW_FORWARD, in, out);
}

void fft2_backward(int n0, int n1, std::span<const std::complex<double>> in,
                   std::span<std::complex<double>> out) {
  execute(n0, n1, FFTW_BACKWARD, in, out);
}

}  // namespace meanfield::detail

// Copyright 2026 The wmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

#include "wmlab/error.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {
namespace {

// FFTW's planner is not reentrant; execution of an existing plan on fresh
// aligned buffers is. Plans are cached per (w, h, direction) for the
// lifetime of the process.
class PlanCache {
 public:
  fftw_plan Get(int w, int h, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(w, h, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& Plans() {
  static auto* cache = new PlanCache();
  return *cache;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexPlane Run(const ComplexPlane& in, int sign) {
  const int w = in.width();
  const int h = in.height();
  const std::size_t n = in.size();
  Buffer a(fftw_alloc_complex(n));
  Buffer b(fftw_alloc_complex(n));
  static_assert(sizeof(Complex) == sizeof(fftw_complex));
  std::memcpy(a.get(), in.data().data(), n * sizeof(Complex));
  fftw_execute_dft(Plans().Get(w, h, sign), a.get(), b.get());
  ComplexPlane out(w, h);
  std::memcpy(out.data().data(), b.get(), n * sizeof(Complex));
  return out;
}

}  // namespace

ComplexPlane::ComplexPlane(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidParameter, "plane dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height, Complex(0.0, 0.0));
}

ComplexPlane Fft2(const GrayF& plane) {
  ComplexPlane c(plane.width(), plane.height());
  auto src = plane.data();
  for (std::size_t i = 0; i < src.size(); ++i) c.data()[i] = src[i];
  return Run(c, FFTW_FORWARD);
}

ComplexPlane Fft2(const ComplexPlane& plane) { return Run(plane, FFTW_FORWARD); }

ComplexPlane Ifft2Complex(const ComplexPlane& spec) {
  ComplexPlane out = Run(spec, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spec.size());
  for (Complex& v : out.data()) v *= scale;
  return out;
}

GrayF Ifft2(const ComplexPlane& spec) {
  ComplexPlane c = Ifft2Complex(spec);
  GrayF out(spec.width(), spec.height());
  for (std::size_t i = 0; i < c.size(); ++i) out.data()[i] = c.data()[i].real();
  return out;
}

}  // namespace wmlab

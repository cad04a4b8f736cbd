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

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmlab/codecs.hpp"
#include "wmlab/error.hpp"

namespace wmlab {

double Ncx2Cdf(double x, int dof, double lambda) {
  if (dof < 1 || !(lambda >= 0.0) || std::isnan(x) || x < 0.0 ||
      !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidParameter, "ncx2_cdf arguments out of range");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double mu = lambda / 2.0;
  const double half_x = x / 2.0;
  const double half_k = dof / 2.0;
  if (mu == 0.0) return boost::math::gamma_p(half_k, half_x);

  // Poisson weights in log space; the series runs until the remaining
  // Poisson mass drops below 1e-12 past the mode.
  double sum = 0.0;
  double mass = 0.0;
  const double log_mu = std::log(mu);
  const long cap = static_cast<long>(mu + 60.0 * std::sqrt(mu) + 200.0);
  for (long j = 0; j <= cap; ++j) {
    const double logw = -mu + j * log_mu - std::lgamma(j + 1.0);
    const double w = std::exp(logw);
    if (w > 0.0) {
      sum += w * boost::math::gamma_p(half_k + j, half_x);
      mass += w;
    }
    if (j > mu && 1.0 - mass < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace wmlab

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

#include <chrono>

#include "wmlab/attacks.hpp"
#include "wmlab/error.hpp"

namespace wmlab {
namespace {

constexpr double kFallbackEllipseCoverage = 0.25;

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& log) : log_(log) {}

  template <typename F>
  auto Run(const char* stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    log_.push_back({stage, dt.count()});
    return result;
  }

 private:
  std::vector<StageTiming>& log_;
};

}  // namespace

std::string BuildSummarizeRequest(const std::array<std::string, 3>& answers) {
  std::string text(kSummarizeInstruction);
  for (const std::string& a : answers) text += "\n" + a;
  return text;
}

BuiltinBackends::BuiltinBackends(std::uint64_t seed,
                                 std::optional<SceneDescriptor> descriptor)
    : rng_(seed), descriptor_(std::move(descriptor)) {}

std::array<std::string, 3> BuiltinBackends::Caption(const ImageF&) {
  if (descriptor_) {
    return {descriptor_->object_name, descriptor_->background_name,
            descriptor_->style_name};
  }
  return {"object", "background", "plain"};
}

std::vector<BinaryMask> BuiltinBackends::Segment(const ImageF& img, const std::string&) {
  return BuiltinSegment(img);
}

std::string BuiltinBackends::Summarize(const std::string&,
                                       const std::array<std::string, 3>& answers) {
  return "A " + answers[1] + " rendered in " + answers[2] + " style.";
}

ImageF BuiltinBackends::Inpaint(const ImageF& img, const BinaryMask& region,
                                const std::string&) {
  return BuiltinInpaint(img, region, rng_);
}

AttackResult SemanticRegen(const ImageF& img, StageBackends& backends, double tau,
                           double tau_max) {
  if (!(tau > 0.0 && tau < tau_max && tau_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need 0 < tau < tau_max <= 1");
  }
  AttackResult result;
  StageClock clock(result.stage_log);

  const auto answers = clock.Run("caption", [&] { return backends.Caption(img); });
  std::vector<BinaryMask> candidates =
      clock.Run("segment", [&] { return backends.Segment(img, answers[0]); });
  for (const BinaryMask& m : candidates) {
    if (m.width() != img.width() || m.height() != img.height()) {
      throw BackendFailure("segment", "mask size differs from the image");
    }
  }
  if (candidates.empty()) {
    candidates.push_back(
        CenteredEllipse(img.width(), img.height(), kFallbackEllipseCoverage));
  }
  const AccumulatedMask acc = AccumulateMasks(candidates, tau, tau_max);
  result.fallback_used = acc.fallback_used;

  const std::string request = BuildSummarizeRequest(answers);
  result.prompt_used =
      clock.Run("summarize", [&] { return backends.Summarize(request, answers); });

  // Normally the background is regenerated; past tau_max the roles swap.
  const BinaryMask region = acc.fallback_used ? acc.foreground : InvertMask(acc.foreground);
  if (region.CountTrue() == region.size()) {
    throw Error(ErrorCode::kFullMask, "regeneration region covers the frame");
  }
  const ImageF painted = clock.Run(
      "inpaint", [&] { return backends.Inpaint(img, region, result.prompt_used); });
  if (painted.width() != img.width() || painted.height() != img.height()) {
    throw BackendFailure("inpaint", "returned image size differs from the input");
  }
  result.preserved_mask = InvertMask(region);
  result.image = Composite(img, painted, result.preserved_mask);
  return result;
}

AttackResult RunAttack(const AttackSpec& spec, const ImageF& img, RngStream& rng,
                       const AttackContext& ctx) {
  if (const auto* sem = std::get_if<SemanticAttack>(&spec)) {
    ValidateAttackSpec(spec);
    if (sem->external_command.empty()) {
      BuiltinBackends backends(rng.NextU64(), ctx.descriptor);
      return SemanticRegen(img, backends, sem->tau, sem->tau_max);
    }
    ExternalBackends backends(sem->external_command, ctx.stage_timeout);
    return SemanticRegen(img, backends, sem->tau, sem->tau_max);
  }
  AttackResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.image = ApplyDistortion(img, spec, rng);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  result.stage_log.push_back({"distort", dt.count()});
  result.preserved_mask = BinaryMask(img.width(), img.height());
  return result;
}

}  // namespace wmlab

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

#ifndef WMLAB_ATTACKS_HPP_
#define WMLAB_ATTACKS_HPP_

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wmlab/imagecore.hpp"
#include "wmlab/rng.hpp"
#include "wmlab/scenegen.hpp"

namespace wmlab {

struct IdentityAttack {};
struct BlurAttack {
  double sigma = 1.0;
};
struct JpegAttack {
  int quality = 50;
};
struct ResizeAttack {
  double factor = 0.5;
};
struct NoiseAttack {
  double sigma = 0.02;
};
struct RegenAttack {
  double strength = 0.005;
  int steps = 1;
};
struct RinseAttack {
  int cycles = 4;
  double strength = 0.005;
  int steps = 1;
};
struct SemanticAttack {
  double tau = 0.5;
  double tau_max = 0.85;
  // Empty for the built-in backends, else a shell command line.
  std::string external_command;
};

using AttackSpec = std::variant<IdentityAttack, BlurAttack, JpegAttack, ResizeAttack,
                                NoiseAttack, RegenAttack, RinseAttack, SemanticAttack>;

/// Parses "name:key=value,..." strings such as "blur:sigma=1",
/// "rinse:cycles=4,strength=0.005,steps=3" or
/// "semregen:tau=0.5,backend=exec:python3 adapter.py". The exec command
/// takes the rest of the string. InvalidParameter on bad input.
AttackSpec ParseAttackSpec(std::string_view text);
/// Canonical string form; ParseAttackSpec(AttackSpecToString(s)) == s.
std::string AttackSpecToString(const AttackSpec& spec);
void ValidateAttackSpec(const AttackSpec& spec);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct AttackResult {
  ImageF image;
  // Pixels guaranteed copied from the input; all false for global attacks.
  BinaryMask preserved_mask;
  std::string prompt_used;
  std::vector<StageTiming> stage_log;
  bool fallback_used = false;
};

// Questions put to the caption stage, in order.
inline constexpr std::array<std::string_view, 3> kCaptionQuestions = {
    "What is the prominent object in this image?",
    "What is the background?",
    "What is the artistic direction of the image?",
};

inline constexpr std::string_view kSummarizeInstruction =
    "Given the following sentences that describe an image, write in one "
    "sentence what the background setting is and in what art style.";

/// Instruction followed by the three answers, one per line.
std::string BuildSummarizeRequest(const std::array<std::string, 3>& answers);

/// The four model stages of the semantic attack.
class StageBackends {
 public:
  virtual ~StageBackends() = default;
  virtual std::array<std::string, 3> Caption(const ImageF& img) = 0;
  virtual std::vector<BinaryMask> Segment(const ImageF& img,
                                          const std::string& phrase) = 0;
  virtual std::string Summarize(const std::string& request,
                                const std::array<std::string, 3>& answers) = 0;
  virtual ImageF Inpaint(const ImageF& img, const BinaryMask& region,
                         const std::string& prompt) = 0;
};

/// Deterministic in-process stages. Captions come from `descriptor` when
/// known; otherwise fixed generic answers.
class BuiltinBackends : public StageBackends {
 public:
  BuiltinBackends(std::uint64_t seed, std::optional<SceneDescriptor> descriptor);

  std::array<std::string, 3> Caption(const ImageF& img) override;
  std::vector<BinaryMask> Segment(const ImageF& img, const std::string& phrase) override;
  std::string Summarize(const std::string& request,
                        const std::array<std::string, 3>& answers) override;
  ImageF Inpaint(const ImageF& img, const BinaryMask& region,
                 const std::string& prompt) override;

 private:
  RngStream rng_;
  std::optional<SceneDescriptor> descriptor_;
};

inline constexpr std::chrono::milliseconds kDefaultStageTimeout{120000};

/// Child process speaking the line-delimited JSON plugin protocol on its
/// stdin/stdout. Started lazily; the handshake runs on first use.
class ExternalBackends : public StageBackends {
 public:
  explicit ExternalBackends(std::string command,
                            std::chrono::milliseconds timeout = kDefaultStageTimeout);
  ~ExternalBackends() override;
  ExternalBackends(const ExternalBackends&) = delete;
  ExternalBackends& operator=(const ExternalBackends&) = delete;

  std::array<std::string, 3> Caption(const ImageF& img) override;
  std::vector<BinaryMask> Segment(const ImageF& img, const std::string& phrase) override;
  std::string Summarize(const std::string& request,
                        const std::array<std::string, 3>& answers) override;
  ImageF Inpaint(const ImageF& img, const BinaryMask& region,
                 const std::string& prompt) override;

  class Process;

 private:
  Process& Ensure();

  std::string command_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<Process> process_;
};

std::string Base64Encode(std::span<const std::uint8_t> bytes);
/// Standard alphabet with padding; InvalidParameter on malformed input.
std::vector<std::uint8_t> Base64Decode(std::string_view text);

ImageF ApplyDistortion(const ImageF& img, const AttackSpec& spec, RngStream& rng);
ImageF RegenProxy(const ImageF& img, double strength, int steps, RngStream& rng);
ImageF Rinse(const ImageF& img, int cycles, double strength, int steps, RngStream& rng);

struct AccumulatedMask {
  BinaryMask foreground;
  bool fallback_used = false;
};

AccumulatedMask AccumulateMasks(const std::vector<BinaryMask>& candidates, double tau,
                                double tau_max);

/// Spectral-residual saliency segmenter; ranked largest first.
std::vector<BinaryMask> BuiltinSegment(const ImageF& img);
/// Harmonic fill of `region` plus band-matched value noise.
ImageF BuiltinInpaint(const ImageF& img, const BinaryMask& region, RngStream& rng);
/// Centred ellipse covering about a quarter of the frame.
BinaryMask CenteredEllipse(int width, int height, double coverage = 0.25);
/// Otsu threshold over a 256-bin histogram; nullopt if the data is flat.
std::optional<double> OtsuThreshold(std::span<const double> values);

AttackResult SemanticRegen(const ImageF& img, StageBackends& backends, double tau,
                           double tau_max);

struct AttackContext {
  std::optional<SceneDescriptor> descriptor;
  std::chrono::milliseconds stage_timeout = kDefaultStageTimeout;
};

/// Runs any attack; randomness comes from `rng` only.
AttackResult RunAttack(const AttackSpec& spec, const ImageF& img, RngStream& rng,
                       const AttackContext& ctx = {});

}  // namespace wmlab

#endif  // WMLAB_ATTACKS_HPP_

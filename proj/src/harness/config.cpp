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

#include <charconv>
#include <sstream>

#include "wmlab/error.hpp"
#include "wmlab/harness.hpp"
#include "wmlab/io.hpp"

namespace wmlab {
namespace {

constexpr std::string_view kConfigHeader = "wmlab-config 1";

[[noreturn]] void Bad(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, msg);
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& v) {
  T out{};
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    Bad("config key '" + key + "': bad number '" + v + "'");
  }
  return out;
}

}  // namespace

std::vector<AttackSpec> DefaultAttacks() {
  std::vector<AttackSpec> a = {IdentityAttack{}, BlurAttack{1.0}, JpegAttack{50},
                               ResizeAttack{0.5}, NoiseAttack{0.02},
                               RegenAttack{0.005, 3}};
  for (int steps = 1; steps <= 6; ++steps) a.push_back(RinseAttack{4, 0.005, steps});
  a.push_back(SemanticAttack{});
  return a;
}

BenchConfig ParseConfig(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t != kConfigHeader) Bad("config must start with '" + std::string(kConfigHeader) + "'");
    header = true;
    break;
  }
  if (!header) Bad("empty config");

  BenchConfig cfg;
  std::map<long, AttackSpec> attacks;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) Bad("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = Trim(std::string_view(t).substr(0, eq));
    const std::string val = Trim(std::string_view(t).substr(eq + 1));
    if (key == "image_size") {
      cfg.image_size = ParseNumber<int>(key, val);
    } else if (key == "seed_count") {
      cfg.seed_count = ParseNumber<int>(key, val);
    } else if (key == "base_seed") {
      cfg.base_seed = ParseNumber<std::uint64_t>(key, val);
    } else if (key == "key_seed") {
      cfg.key_seed = ParseNumber<std::uint64_t>(key, val);
    } else if (key == "workers") {
      cfg.workers = ParseNumber<int>(key, val);
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "stage_timeout_ms") {
      cfg.stage_timeout = std::chrono::milliseconds(ParseNumber<long>(key, val));
    } else if (key == "watermarks") {
      cfg.watermarks.clear();
      std::istringstream items(val);
      std::string item;
      while (std::getline(items, item, ',')) {
        const std::string name = Trim(item);
        if (name.empty()) continue;
        try {
          cfg.watermarks.push_back(ParseCodecKind(name));
        } catch (const Error& e) {
          Bad(e.what());
        }
      }
    } else if (key.rfind("attack.", 0) == 0) {
      const long idx = ParseNumber<long>(key, key.substr(7));
      if (attacks.count(idx)) Bad("duplicate " + key);
      try {
        attacks.emplace(idx, ParseAttackSpec(val));
      } catch (const Error& e) {
        Bad(key + ": " + e.what());
      }
    } else if (key.rfind("codec.", 0) == 0) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos) Bad("expected codec.<name>.<param>: " + key);
      CodecKind kind;
      try {
        kind = ParseCodecKind(key.substr(6, dot - 6));
      } catch (const Error& e) {
        Bad(e.what());
      }
      cfg.codec_params[kind][key.substr(dot + 1)] = val;
    } else {
      Bad("unknown config key '" + key + "'");
    }
  }
  if (attacks.empty()) {
    cfg.attacks = DefaultAttacks();
  } else {
    for (auto& [idx, spec] : attacks) cfg.attacks.push_back(spec);
  }
  ValidateConfig(cfg);
  return cfg;
}

BenchConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadTextFile(path));
}

void ValidateConfig(const BenchConfig& cfg) {
  if (cfg.seed_count < 1) Bad("seed_count must be >= 1");
  if (cfg.workers < 1) Bad("workers must be >= 1");
  if (cfg.image_size < 64) Bad("image_size must be >= 64");
  if (cfg.watermarks.empty()) Bad("no watermarks selected");
  if (cfg.attacks.empty()) Bad("no attacks selected");
  if (cfg.stage_timeout.count() < 1) Bad("stage_timeout_ms must be >= 1");
  for (CodecKind k : cfg.watermarks) {
    if ((k == CodecKind::kRing || k == CodecKind::kLatentBit) &&
        (cfg.image_size & (cfg.image_size - 1)) != 0) {
      Bad("image_size must be a power of two for the " + std::string(CodecName(k)) +
          " codec");
    }
  }
  for (const AttackSpec& a : cfg.attacks) {
    try {
      ValidateAttackSpec(a);
    } catch (const Error& e) {
      Bad(e.what());
    }
  }
  for (CodecKind k : cfg.watermarks) {
    try {
      BenchKey(cfg, k);
    } catch (const Error& e) {
      Bad(std::string("codec ") + std::string(CodecName(k)) + ": " + e.what());
    }
  }
}

WatermarkKey BenchKey(const BenchConfig& cfg, CodecKind kind) {
  std::map<std::string, std::string> params;
  if (auto it = cfg.codec_params.find(kind); it != cfg.codec_params.end()) {
    params = it->second;
  }
  if (kind == CodecKind::kSpread) params["size"] = std::to_string(cfg.image_size);
  const std::uint64_t seed = DeriveSeed(cfg.key_seed, {"bench-key", CodecName(kind)});
  return MakeKey(kind, seed, params);
}

std::string ConfigToText(const BenchConfig& cfg) {
  std::ostringstream out;
  out << kConfigHeader << "\n";
  out << "image_size = " << cfg.image_size << "\n";
  out << "seed_count = " << cfg.seed_count << "\n";
  out << "base_seed = " << cfg.base_seed << "\n";
  out << "key_seed = " << cfg.key_seed << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "stage_timeout_ms = " << cfg.stage_timeout.count() << "\n";
  out << "watermarks = ";
  for (std::size_t i = 0; i < cfg.watermarks.size(); ++i) {
    out << (i ? ", " : "") << CodecName(cfg.watermarks[i]);
  }
  out << "\n";
  for (std::size_t i = 0; i < cfg.attacks.size(); ++i) {
    out << "attack." << i << " = " << AttackSpecToString(cfg.attacks[i]) << "\n";
  }
  for (const auto& [kind, params] : cfg.codec_params) {
    for (const auto& [k, v] : params) {
      out << "codec." << CodecName(kind) << "." << k << " = " << v << "\n";
    }
  }
  return out.str();
}

}  // namespace wmlab

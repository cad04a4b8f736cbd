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
#include <cmath>
#include <map>

#include "wmlab/attacks.hpp"
#include "wmlab/error.hpp"

namespace wmlab {
namespace {

std::string Fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void Bad(const std::string& msg) {
  throw Error(ErrorCode::kInvalidParameter, "attack spec: " + msg);
}

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    Bad(key + " is not a number: '" + v + "'");
  }
  return out;
}

int ToInt(const std::string& key, const std::string& v) {
  int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    Bad(key + " is not an integer: '" + v + "'");
  }
  return out;
}

// Consumes parameters, complaining about any left over.
class Params {
 public:
  explicit Params(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  double Double(const std::string& k, double def) {
    auto it = kv_.find(k);
    if (it == kv_.end()) return def;
    const double v = ToDouble(k, it->second);
    kv_.erase(it);
    return v;
  }
  int Int(const std::string& k, int def) {
    auto it = kv_.find(k);
    if (it == kv_.end()) return def;
    const int v = ToInt(k, it->second);
    kv_.erase(it);
    return v;
  }
  std::optional<std::string> Str(const std::string& k) {
    auto it = kv_.find(k);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }
  void Finish(const std::string& name) const {
    if (!kv_.empty()) Bad("unknown parameter '" + kv_.begin()->first + "' for " + name);
  }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace

AttackSpec ParseAttackSpec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      // An exec backend swallows the remainder, commas included.
      constexpr std::string_view kExec = "backend=exec:";
      if (rest.substr(0, kExec.size()) == kExec) {
        kv["backend"] = "exec:" + std::string(rest.substr(kExec.size()));
        break;
      }
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        Bad("expected key=value, got '" + std::string(item) + "'");
      }
      const std::string key(item.substr(0, eq));
      if (kv.count(key)) Bad("duplicate parameter '" + key + "'");
      kv[key] = std::string(item.substr(eq + 1));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  Params p(std::move(kv));
  AttackSpec spec;
  if (name == "identity" || name == "none") {
    spec = IdentityAttack{};
  } else if (name == "blur") {
    spec = BlurAttack{p.Double("sigma", 1.0)};
  } else if (name == "jpeg") {
    spec = JpegAttack{p.Int("quality", 50)};
  } else if (name == "resize") {
    spec = ResizeAttack{p.Double("factor", 0.5)};
  } else if (name == "noise") {
    spec = NoiseAttack{p.Double("sigma", 0.02)};
  } else if (name == "regen") {
    RegenAttack r;
    r.strength = p.Double("strength", r.strength);
    r.steps = p.Int("steps", r.steps);
    spec = r;
  } else if (name == "rinse") {
    RinseAttack r;
    r.cycles = p.Int("cycles", r.cycles);
    r.strength = p.Double("strength", r.strength);
    r.steps = p.Int("steps", r.steps);
    spec = r;
  } else if (name == "semregen") {
    SemanticAttack s;
    s.tau = p.Double("tau", s.tau);
    s.tau_max = p.Double("tau_max", s.tau_max);
    if (auto b = p.Str("backend")) {
      if (b->rfind("exec:", 0) == 0) {
        s.external_command = b->substr(5);
        if (s.external_command.empty()) Bad("empty exec command");
      } else if (*b != "builtin") {
        Bad("backend must be builtin or exec:<command>");
      }
    }
    spec = s;
  } else {
    Bad("unknown attack '" + name + "'");
  }
  p.Finish(name);
  ValidateAttackSpec(spec);
  return spec;
}

void ValidateAttackSpec(const AttackSpec& spec) {
  std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, BlurAttack>) {
          if (!(a.sigma > 0.0)) Bad("blur sigma must be > 0");
        } else if constexpr (std::is_same_v<T, JpegAttack>) {
          if (a.quality < 1 || a.quality > 100) Bad("jpeg quality must be in 1..100");
        } else if constexpr (std::is_same_v<T, ResizeAttack>) {
          if (!(a.factor > 0.0) || a.factor > 4.0) Bad("resize factor must be in (0, 4]");
        } else if constexpr (std::is_same_v<T, NoiseAttack>) {
          if (!(a.sigma >= 0.0)) Bad("noise sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, RegenAttack>) {
          if (!(a.strength >= 0.0)) Bad("regen strength must be >= 0");
          if (a.steps < 1) Bad("regen steps must be >= 1");
        } else if constexpr (std::is_same_v<T, RinseAttack>) {
          if (a.cycles < 1) Bad("rinse cycles must be >= 1");
          if (!(a.strength >= 0.0)) Bad("rinse strength must be >= 0");
          if (a.steps < 1) Bad("rinse steps must be >= 1");
        } else if constexpr (std::is_same_v<T, SemanticAttack>) {
          if (!(a.tau > 0.0 && a.tau < 1.0)) Bad("tau must be in (0, 1)");
          if (!(a.tau_max > a.tau && a.tau_max <= 1.0)) Bad("tau_max must be in (tau, 1]");
        }
      },
      spec);
}

std::string AttackSpecToString(const AttackSpec& spec) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IdentityAttack>) {
          return "identity";
        } else if constexpr (std::is_same_v<T, BlurAttack>) {
          return "blur:sigma=" + Fmt(a.sigma);
        } else if constexpr (std::is_same_v<T, JpegAttack>) {
          return "jpeg:quality=" + std::to_string(a.quality);
        } else if constexpr (std::is_same_v<T, ResizeAttack>) {
          return "resize:factor=" + Fmt(a.factor);
        } else if constexpr (std::is_same_v<T, NoiseAttack>) {
          return "noise:sigma=" + Fmt(a.sigma);
        } else if constexpr (std::is_same_v<T, RegenAttack>) {
          return "regen:strength=" + Fmt(a.strength) + ",steps=" + std::to_string(a.steps);
        } else if constexpr (std::is_same_v<T, RinseAttack>) {
          return "rinse:cycles=" + std::to_string(a.cycles) + ",strength=" +
                 Fmt(a.strength) + ",steps=" + std::to_string(a.steps);
        } else {
          return "semregen:tau=" + Fmt(a.tau) + ",tau_max=" + Fmt(a.tau_max) +
                 ",backend=" +
                 (a.external_command.empty() ? std::string("builtin")
                                             : "exec:" + a.external_command);
        }
      },
      spec);
}

}  // namespace wmlab

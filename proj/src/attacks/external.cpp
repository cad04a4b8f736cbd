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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include "json.hpp"
#include <sstream>

#include "wmlab/attacks.hpp"
#include "wmlab/error.hpp"
#include "wmlab/io.hpp"

extern char** environ;

namespace wmlab {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kStderrTail = 2048;
constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction old {};
    sigaction(SIGPIPE, nullptr, &old);
    if (old.sa_handler == SIG_DFL) signal(SIGPIPE, SIG_IGN);
  });
}

// Last integer token in `text`, if any.
std::optional<long> LastInteger(const std::string& text) {
  std::optional<long> last;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      last = std::stol(text.substr(i, j - i));
      i = j;
    } else {
      ++i;
    }
  }
  return last;
}

}  // namespace

std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> Base64Decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) {
    throw Error(ErrorCode::kInvalidParameter, "base64 length not a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        if (pad > 0 || (v[k] = value(c)) < 0) {
          throw Error(ErrorCode::kInvalidParameter, "invalid base64 character");
        }
      }
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word));
  }
  return out;
}

class ExternalBackends::Process {
 public:
  Process(const std::string& command, std::chrono::milliseconds timeout)
      : timeout_(timeout) {
    IgnoreSigpipeOnce();
    int in[2], out[2], err[2];
    if (pipe2(in, O_CLOEXEC) != 0 || pipe2(out, O_CLOEXEC) != 0 ||
        pipe2(err, O_CLOEXEC) != 0) {
      throw BackendFailure("spawn", std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&fa, err[1], STDERR_FILENO);
    std::string sh = "sh", dash_c = "-c", cmd = command;
    char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
    const int rc = posix_spawn(&pid_, "/bin/sh", &fa, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&fa);
    close(in[0]);
    close(out[1]);
    close(err[1]);
    to_child_ = in[1];
    from_child_ = out[0];
    err_child_ = err[0];
    if (rc != 0) {
      pid_ = -1;
      CloseAll();
      throw BackendFailure("spawn", std::string("posix_spawn: ") + std::strerror(rc));
    }
    fcntl(from_child_, F_SETFL, fcntl(from_child_, F_GETFL) | O_NONBLOCK);
    fcntl(err_child_, F_SETFL, fcntl(err_child_, F_GETFL) | O_NONBLOCK);
  }

  ~Process() {
    if (to_child_ >= 0) {
      close(to_child_);
      to_child_ = -1;
    }
    if (pid_ > 0) {
      // Give a well-behaved backend a moment to exit on EOF.
      for (int i = 0; i < 20; ++i) {
        if (waitpid(pid_, nullptr, WNOHANG) == pid_) {
          pid_ = -1;
          break;
        }
        usleep(10000);
      }
      if (pid_ > 0) {
        kill(pid_, SIGKILL);
        waitpid(pid_, nullptr, 0);
      }
    }
    CloseAll();
  }

  json Call(const json& request, const std::string& stage) {
    const std::string line = request.dump() + "\n";
    const auto deadline = Clock::now() + timeout_;
    WriteAll(line, deadline, stage);
    std::string reply = ReadLine(deadline, stage);
    json resp;
    try {
      resp = json::parse(reply);
    } catch (const json::exception&) {
      Fail(stage, "malformed response line: '" + reply.substr(0, 120) + "'");
    }
    if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_integer() ||
        resp["id"].get<long long>() != request["id"].get<long long>()) {
      Fail(stage, "response id missing or mismatched");
    }
    if (!resp.contains("ok") || !resp["ok"].is_boolean()) {
      Fail(stage, "response lacks boolean 'ok'");
    }
    if (!resp["ok"].get<bool>()) {
      const std::string e =
          resp.contains("error") && resp["error"].is_string() ? resp["error"].get<std::string>()
                                                             : "unspecified error";
      Fail(stage, "backend reported failure: " + e);
    }
    return resp;
  }

  [[noreturn]] void Fail(const std::string& stage, const std::string& msg) {
    DrainStderr();
    std::string full = msg;
    if (!err_tail_.empty()) full += " [stderr: " + err_tail_ + "]";
    throw BackendFailure(stage, full);
  }

  long long NextId() { return ++next_id_; }

 private:
  void CloseAll() {
    for (int* fd : {&to_child_, &from_child_, &err_child_}) {
      if (*fd >= 0) close(*fd);
      *fd = -1;
    }
  }

  int RemainingMs(Clock::time_point deadline) const {
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() > 0 ? static_cast<int>(left.count()) : 0;
  }

  void DrainStderr() {
    if (err_child_ < 0) return;
    char buf[4096];
    for (;;) {
      const ssize_t n = read(err_child_, buf, sizeof(buf));
      if (n <= 0) break;
      err_tail_.append(buf, static_cast<std::size_t>(n));
    }
    if (err_tail_.size() > kStderrTail) {
      err_tail_ = err_tail_.substr(err_tail_.size() - kStderrTail);
    }
  }

  void KillChild() {
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

  void WriteAll(const std::string& data, Clock::time_point deadline,
                const std::string& stage) {
    std::size_t off = 0;
    while (off < data.size()) {
      pollfd p{to_child_, POLLOUT, 0};
      const int r = poll(&p, 1, RemainingMs(deadline));
      if (r == 0) {
        KillChild();
        Fail(stage, "timeout after " + std::to_string(timeout_.count()) + " ms writing request");
      }
      if (r < 0) {
        if (errno == EINTR) continue;
        Fail(stage, std::string("poll: ") + std::strerror(errno));
      }
      const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        Fail(stage, "backend closed its input (" + std::string(std::strerror(errno)) + ")");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(Clock::time_point deadline, const std::string& stage) {
    for (;;) {
      const auto nl = out_buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = out_buf_.substr(0, nl);
        out_buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd p[2] = {{from_child_, POLLIN, 0}, {err_child_, POLLIN, 0}};
      const int r = poll(p, err_child_ >= 0 ? 2 : 1, RemainingMs(deadline));
      if (r == 0) {
        KillChild();
        Fail(stage, "timeout after " + std::to_string(timeout_.count()) + " ms");
      }
      if (r < 0) {
        if (errno == EINTR) continue;
        Fail(stage, std::string("poll: ") + std::strerror(errno));
      }
      if (err_child_ >= 0 && (p[1].revents & (POLLIN | POLLHUP))) {
        char buf[4096];
        const ssize_t n = read(err_child_, buf, sizeof(buf));
        if (n > 0) {
          err_tail_.append(buf, static_cast<std::size_t>(n));
          if (err_tail_.size() > 4 * kStderrTail) {
            err_tail_ = err_tail_.substr(err_tail_.size() - kStderrTail);
          }
        } else if (n == 0) {
          close(err_child_);
          err_child_ = -1;
        }
      }
      if (p[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[65536];
        const ssize_t n = read(from_child_, buf, sizeof(buf));
        if (n > 0) {
          out_buf_.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0) {
          Fail(stage, "backend exited before replying");
        } else if (errno != EAGAIN && errno != EINTR) {
          Fail(stage, std::string("read: ") + std::strerror(errno));
        }
      }
    }
  }

  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int err_child_ = -1;
  std::string out_buf_;
  std::string err_tail_;
  long long next_id_ = 0;
};

ExternalBackends::ExternalBackends(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

ExternalBackends::~ExternalBackends() = default;

ExternalBackends::Process& ExternalBackends::Ensure() {
  if (!process_) {
    auto p = std::make_unique<Process>(command_, timeout_);
    const json hello = {{"id", 0}, {"stage", "hello"}};
    const json resp = p->Call(hello, "hello");
    const std::string text =
        resp.contains("text") && resp["text"].is_string() ? resp["text"].get<std::string>() : "";
    if (LastInteger(text) != 1L) {
      p->Fail("hello", "unsupported protocol version in '" + text + "'");
    }
    process_ = std::move(p);
  }
  return *process_;
}

namespace {

std::string RequireString(ExternalBackends::Process& p, const json& resp, const char* field,
                          const std::string& stage) {
  if (!resp.contains(field) || !resp[field].is_string()) {
    p.Fail(stage, std::string("response lacks string '") + field + "'");
  }
  return resp[field].get<std::string>();
}

template <typename T, typename F>
T DecodeField(ExternalBackends::Process& p, const json& resp, const char* field,
              const std::string& stage, F&& decode) {
  const std::string b64 = RequireString(p, resp, field, stage);
  try {
    return decode(Base64Decode(b64));
  } catch (const Error& e) {
    p.Fail(stage, std::string("bad '") + field + "' payload: " + e.what());
  }
}

}  // namespace

std::array<std::string, 3> ExternalBackends::Caption(const ImageF& img) {
  Process& p = Ensure();
  const std::string image = Base64Encode(EncodePng(img));
  std::array<std::string, 3> answers;
  for (int q = 0; q < 3; ++q) {
    json req = {{"id", p.NextId()},
                {"stage", "caption"},
                {"image", image},
                {"prompt", std::string(kCaptionQuestions[q])},
                {"params", json::object({{"question", std::to_string(q + 1)}})}};
    answers[q] = RequireString(p, p.Call(req, "caption"), "text", "caption");
  }
  return answers;
}

std::vector<BinaryMask> ExternalBackends::Segment(const ImageF& img,
                                                  const std::string& phrase) {
  Process& p = Ensure();
  json req = {{"id", p.NextId()},
              {"stage", "segment"},
              {"image", Base64Encode(EncodePng(img))},
              {"prompt", phrase},
              {"params", json::object()}};
  const json resp = p.Call(req, "segment");
  if (!resp.contains("mask") || resp["mask"].is_null()) return {};
  return {DecodeField<BinaryMask>(p, resp, "mask", "segment", [](const auto& bytes) {
    return DecodeMaskPng(bytes);
  })};
}

std::string ExternalBackends::Summarize(const std::string& request,
                                        const std::array<std::string, 3>& answers) {
  Process& p = Ensure();
  json req = {{"id", p.NextId()},
              {"stage", "summarize"},
              {"prompt", request},
              {"params", json::object({{"object", answers[0]},
                                       {"background", answers[1]},
                                       {"style", answers[2]}})}};
  return RequireString(p, p.Call(req, "summarize"), "text", "summarize");
}

ImageF ExternalBackends::Inpaint(const ImageF& img, const BinaryMask& region,
                                 const std::string& prompt) {
  Process& p = Ensure();
  json req = {{"id", p.NextId()},
              {"stage", "inpaint"},
              {"image", Base64Encode(EncodePng(img))},
              {"prompt", prompt},
              {"params", json::object({{"mask", Base64Encode(EncodeMaskPng(region))}})}};
  const json resp = p.Call(req, "inpaint");
  return DecodeField<ImageF>(p, resp, "image", "inpaint",
                             [](const auto& bytes) { return DecodePng(bytes); });
}

}  // namespace wmlab

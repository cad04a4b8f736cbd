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

// Minimal plugin-protocol server used by the protocol tests.
//
//   stub_backend [--mode identity|blur|malformed|sleep|badversion|crash]
//                [--answers A|B|C] [--sleep-ms N]
//
// identity: captions echo the configured answers, segment returns a centred
// ellipse, summarize echoes a fixed sentence, inpaint returns the image.
// malformed: valid handshake, then a garbage line for every request.
// sleep: valid handshake, then sleeps before answering anything.
// badversion: answers the handshake with protocol version 2.
// crash: exits right after the handshake.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"
#include "wmlab/attacks.hpp"
#include "wmlab/io.hpp"
#include "wmlab/transforms.hpp"

using nlohmann::json;

namespace {

constexpr char kStubSummary[] = "A quiet stub background in flat style.";

std::string Arg(int argc, char** argv, const std::string& name, const std::string& def) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (argv[i] == name) return argv[i + 1];
  }
  return def;
}

json Handle(const json& req, const std::string& mode, const std::string answers[3]) {
  const long long id = req.at("id").get<long long>();
  const std::string stage = req.at("stage").get<std::string>();
  json resp = {{"id", id}, {"ok", true}};
  if (stage == "hello") {
    resp["text"] = mode == "badversion" ? "protocol-version 2" : "protocol-version 1";
  } else if (stage == "caption") {
    const std::string prompt = req.at("prompt").get<std::string>();
    int q = 0;
    for (int i = 0; i < 3; ++i) {
      if (prompt == wmlab::kCaptionQuestions[i]) q = i;
    }
    resp["text"] = answers[q];
  } else if (stage == "segment") {
    const wmlab::ImageF img =
        wmlab::DecodePng(wmlab::Base64Decode(req.at("image").get<std::string>()));
    resp["mask"] = wmlab::Base64Encode(
        wmlab::EncodeMaskPng(wmlab::CenteredEllipse(img.width(), img.height())));
  } else if (stage == "summarize") {
    resp["text"] = kStubSummary;
  } else if (stage == "inpaint") {
    const auto bytes = wmlab::Base64Decode(req.at("image").get<std::string>());
    if (mode == "blur") {
      const wmlab::ImageF img = wmlab::DecodePng(bytes);
      const wmlab::BinaryMask region = wmlab::DecodeMaskPng(
          wmlab::Base64Decode(req.at("params").at("mask").get<std::string>()));
      const wmlab::ImageF blurred = wmlab::GaussianBlur(img, 2.0);
      resp["image"] = wmlab::Base64Encode(
          wmlab::EncodePng(wmlab::Composite(blurred, img, region)));
    } else {
      resp["image"] = req.at("image");
    }
  } else {
    resp = {{"id", id}, {"ok", false}, {"error", "unknown stage " + stage}};
  }
  return resp;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = Arg(argc, argv, "--mode", "identity");
  const int sleep_ms = std::atoi(Arg(argc, argv, "--sleep-ms", "5000").c_str());
  std::string answers[3] = {"A", "B", "C"};
  {
    std::istringstream in(Arg(argc, argv, "--answers", "A|B|C"));
    for (auto& a : answers) std::getline(in, a, '|');
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception& e) {
      std::cout << json{{"id", -1}, {"ok", false}, {"error", e.what()}}.dump() << std::endl;
      continue;
    }
    const bool hello = req.value("stage", "") == "hello";
    if (!hello) {
      if (mode == "crash") {
        std::cerr << "stub backend crashing on purpose" << std::endl;
        return 3;
      }
      if (mode == "sleep") std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
      if (mode == "malformed") {
        std::cerr << "stub backend emitting garbage" << std::endl;
        std::cout << "this is not json" << std::endl;
        continue;
      }
    }
    try {
      std::cout << Handle(req, mode, answers).dump() << std::endl;
    } catch (const std::exception& e) {
      std::cout << json{{"id", req.value("id", -1LL)}, {"ok", false}, {"error", e.what()}}.dump()
                << std::endl;
    }
  }
  return 0;
}

// Copyright 2026 The Shapeprog Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/llm.hpp"

namespace shapeprog {

/// Binary eval frame, all fields little-endian:
///   char[4]  magic "SPEV"
///   u32      version (1)
///   u32      part count P
///   P times:
///     u32      node index into the session's part list
///     u32      instance (0 = original part, k = k-th generated member)
///     u32      vertex count V
///     f32[24]  cage corners, corner-major xyz
///     f32[3V]  vertex positions, vertex-major xyz
inline constexpr char kEvalFrameMagic[4] = {'S', 'P', 'E', 'V'};
inline constexpr std::uint32_t kEvalFrameVersion = 1;

std::string encode_eval_frame(const DeformedShape& d);

struct DecodedPart {
  std::uint32_t part = 0;
  std::uint32_t instance = 0;
  std::vector<float> cage;      // 24 values
  std::vector<float> vertices;  // 3V values
};
/// Throws std::invalid_argument on a malformed frame.
std::vector<DecodedPart> decode_eval_frame(std::string_view bytes);

using ProviderFactory = std::function<std::shared_ptr<Provider>(std::string_view kind)>;

struct ServiceConfig {
  std::filesystem::path mock_root = "fixtures/mock";
  /// Defaults to "mock" -> MockProvider(mock_root), "remote" -> HttpProvider from the environment.
  ProviderFactory providers;
  InferOptions infer;
  PropagateOptions propagate;
};

/// HTTP control plane plus binary eval frames:
///   POST /session                    {fixture | manifest | graph} -> {id, graph summary}
///   GET  /session/{id}               summary, parameters, history
///   POST /session/{id}/request       {text, provider?, votes?, wait?} -> 202 job | 200 result
///   GET  /session/{id}/request       job status or result
///   POST /session/{id}/eval          {params: {name: value}} -> eval frame
///   POST /session/{id}/compose       {program: id} | {text: program} -> stacked program
///   GET  /session/{id}/program       active program text
///   GET  /session/{id}/report        solver report of the latest request
/// Errors: 404 unknown session, 409 job in flight, 422 bad input, 502 provider failure.
class Service {
 public:
  explicit Service(ServiceConfig cfg = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Blocking.
  void run();
  void stop();
  void wait_until_ready();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shapeprog

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

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shapeprog/llm.hpp"

// After Eigen: a system header pulled in by httplib defines macros that
// collide with Eigen's parameter names.
#include <httplib.h>
#include <json.hpp>

namespace shapeprog {

namespace {

std::vector<std::string> split_responses(const std::string& text) {
  std::vector<std::string> out(1);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::string t = line;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    if (t == "=====") {
      out.emplace_back();
      continue;
    }
    out.back() += line + "\n";
  }
  return out;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::string request_slug(std::string_view request) {
  std::string out;
  bool gap = false;
  for (char c : request) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (gap && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      gap = false;
    } else {
      gap = true;
    }
  }
  return out;
}

std::filesystem::path MockProvider::transcript_path(const CompletionRequest& req) const {
  const auto shape_dir = root_ / req.shape;
  if (req.workflow == Workflow::kRequests) return shape_dir / "requests.txt";
  const auto dir = shape_dir / request_slug(req.request);
  if (req.workflow == Workflow::kValidity) {
    auto specific = dir / ("validity_" + req.key + ".txt");
    if (std::filesystem::exists(specific)) return specific;
  }
  return dir / (std::string(workflow_name(req.workflow)) + ".txt");
}

std::string MockProvider::complete(const CompletionRequest& req) {
  const auto path = transcript_path(req);
  std::ifstream in(path);
  if (!in) throw ProviderUnavailable("no mock transcript " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto responses = split_responses(ss.str());
  return responses[static_cast<std::size_t>(req.sample) % responses.size()];
}

HttpProvider::HttpProvider(std::string endpoint, std::string model, std::string api_key,
                           double timeout_seconds)
    : model_(std::move(model)), api_key_(std::move(api_key)), timeout_(timeout_seconds) {
  std::string rest = endpoint;
  const std::string scheme = "http://";
  if (rest.rfind("https://", 0) == 0)
    throw ProviderUnavailable("https endpoints are not supported; use a local http proxy");
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    try {
      port_ = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ProviderUnavailable("bad endpoint port in '" + endpoint + "'");
    }
    authority = authority.substr(0, colon);
  }
  host_ = authority;
  if (host_.empty()) throw ProviderUnavailable("bad endpoint '" + endpoint + "'");
}

std::unique_ptr<HttpProvider> HttpProvider::FromEnvironment() {
  const std::string endpoint = env_or("SHAPEPROG_LLM_ENDPOINT", "");
  if (endpoint.empty()) throw ProviderUnavailable("SHAPEPROG_LLM_ENDPOINT is not set");
  return std::make_unique<HttpProvider>(endpoint, env_or("SHAPEPROG_LLM_MODEL", "gpt-4"),
                                        env_or("SHAPEPROG_LLM_API_KEY", ""));
}

std::string HttpProvider::complete(const CompletionRequest& req) {
  nlohmann::json body = {{"model", model_},
                         {"messages", {{{"role", "user"}, {"content", req.prompt}}}},
                         {"temperature", req.temperature}};
  if (req.seed) body["seed"] = *req.seed;

  httplib::Client cli(host_, port_);
  const auto secs = static_cast<time_t>(timeout_);
  const auto usecs = static_cast<time_t>((timeout_ - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  // One retry for a dropped connection; HTTP-level failures are not retried.
  if (!res) res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw ProviderUnavailable("completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderError("completion endpoint returned HTTP " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 200));
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed completion response: ") + e.what());
  }
}

}  // namespace shapeprog

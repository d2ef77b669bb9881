/*
 * Copyright 2026 The DragForge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dragforge/retrieval.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace dragforge {
namespace {

bool transient_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string url, HttpProviderOptions options)
    : url_(std::move(url)), options_(std::move(options)), dim_(options_.expected_dim) {
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("embedding endpoint '" + url_ + "' has no scheme");
  }
  const auto path_start = url_.find('/', scheme_end + 3);
  base_ = url_.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url_.substr(path_start);
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
    std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += options_.batch_size) {
    const auto count = std::min(options_.batch_size, texts.size() - begin);
    auto batch = post_batch(texts.subspan(begin, count));
    for (auto& v : batch) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::post_batch(
    std::span<const std::string> texts) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  const std::string body = nlohmann::json{{"texts", texts}}.dump();
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      options_.sleep(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(backoff.count()) * options_.backoff_multiplier));
    }
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderError(url_ + ": HTTP " + std::to_string(res->status));
    }

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProviderError(url_ + ": response is not JSON");
    }
    if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array()) {
      throw ProviderError(url_ + ": response lacks a 'vectors' array");
    }
    const auto& arr = j["vectors"];
    if (arr.size() != texts.size()) {
      throw ProviderError(url_ + ": " + std::to_string(arr.size()) + " vectors for " +
                          std::to_string(texts.size()) + " texts");
    }
    std::vector<EmbeddingVector> vecs;
    vecs.reserve(arr.size());
    for (const auto& row : arr) {
      if (!row.is_array() || row.empty()) throw ProviderError(url_ + ": malformed vector");
      if (dim_ == 0) dim_ = row.size();
      if (row.size() != dim_) {
        throw ProviderError(url_ + ": vector of dimension " + std::to_string(row.size()) +
                            ", expected " + std::to_string(dim_));
      }
      EmbeddingVector v(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) throw ProviderError(url_ + ": non-numeric vector component");
        v[static_cast<Eigen::Index>(i)] = row[i].get<float>();
      }
      vecs.push_back(std::move(v));
    }
    return vecs;
  }
  throw ProviderError(url_ + ": giving up after " + std::to_string(options_.max_retries + 1) +
                      " attempts (" + last_error + ")");
}

}  // namespace dragforge

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

#include "dragforge/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <memory>
#include <system_error>

#include <json.hpp>

#include "dragforge/error.hpp"

namespace dragforge::io {
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return content;
}

std::vector<std::string> split_lines(std::string_view content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

namespace {

fs::path temp_sibling(const fs::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  return tmp;
}

void write_raw(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void rename_over(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::rename(from, to, ec);
  if (ec) {
    fs::remove(from, ec);
    throw IoError("cannot move output into place at " + to.string());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  const auto tmp = temp_sibling(path);
  try {
    write_raw(tmp, content);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  rename_over(tmp, path);
}

OutputBatch::~OutputBatch() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& tmp : staged_) fs::remove(tmp, ec);
}

void OutputBatch::add(fs::path path, std::string content) {
  pending_.emplace_back(std::move(path), std::move(content));
}

void OutputBatch::commit() {
  for (const auto& [path, content] : pending_) {
    auto tmp = temp_sibling(path);
    staged_.push_back(tmp);
    write_raw(tmp, content);
  }
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    rename_over(staged_[i], pending_[i].first);
  }
  committed_ = true;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw IoError("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::map<std::string, double> read_score_jsonl(const fs::path& path) {
  const auto lines = split_lines(read_file(path));
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto where = path.string() + ":" + std::to_string(i + 1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error&) {
      throw ValidationError(where + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("score")) {
      throw ValidationError(where + ": expected object with id and score");
    }
    const auto& id = j["id"];
    std::string key = id.is_string() ? id.get<std::string>() : id.dump();
    if (!j["score"].is_number()) {
      throw ValidationError(where + ": non-numeric score for id " + key);
    }
    if (!scores.emplace(key, j["score"].get<double>()).second) {
      throw ValidationError(where + ": duplicate id " + key);
    }
  }
  return scores;
}

}  // namespace dragforge::io

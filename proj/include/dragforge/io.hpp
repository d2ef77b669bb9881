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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dragforge::io {

std::string read_file(const std::filesystem::path& path);

// Splits on LF, dropping a trailing CR from each line and the empty piece
// after a final newline.
std::vector<std::string> split_lines(std::string_view content);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Stages several outputs and publishes them together; nothing is visible at
// the final paths until commit() and staged temp files are removed if the
// batch is destroyed uncommitted.
class OutputBatch {
 public:
  OutputBatch() = default;
  OutputBatch(const OutputBatch&) = delete;
  OutputBatch& operator=(const OutputBatch&) = delete;
  ~OutputBatch();

  void add(std::filesystem::path path, std::string content);
  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> pending_;
  std::vector<std::filesystem::path> staged_;
  bool committed_ = false;
};

std::string sha256_hex(std::string_view bytes);

// JSONL of {id, score}. Duplicate ids and non-numeric scores are errors.
std::map<std::string, double> read_score_jsonl(const std::filesystem::path& path);

}  // namespace dragforge::io

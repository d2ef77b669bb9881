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

// UTF-8 helpers shared by every module. Text is stored as UTF-8 std::string
// and decoded to std::u32string wherever offsets must be counted in Unicode
// scalar values.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dragforge::text {

// Throws ValidationError on malformed UTF-8 (overlongs, surrogates, truncation).
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

// Number of Unicode scalar values; assumes valid UTF-8.
std::size_t codepoint_length(std::string_view utf8);

bool is_valid_utf8(std::string_view utf8) noexcept;

bool is_space(char32_t cp) noexcept;
bool is_cjk(char32_t cp) noexcept;

// A codepoint that can be part of a whole token: not whitespace and not
// ASCII / general punctuation.
bool is_word_char(char32_t cp) noexcept;

// Simple case folding: ASCII and Latin-1 uppercase letters.
char32_t fold_case(char32_t cp) noexcept;
std::u32string fold_case(std::u32string_view s);

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view utf8);

// Split on runs of Unicode whitespace.
std::vector<std::string> whitespace_tokens(std::string_view utf8);
// Every non-whitespace codepoint is its own token.
std::vector<std::string> char_tokens(std::string_view utf8);

std::size_t cjk_count(std::string_view utf8);

}  // namespace dragforge::text

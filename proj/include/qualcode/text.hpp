// Copyright 2026 The Qualcode Authors
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

#ifndef QUALCODE_TEXT_HPP_
#define QUALCODE_TEXT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the loaders, parser and prompt builder.
// Case folding is ASCII-only; bytes >= 0x80 pass through unchanged, which
// keeps UTF-8 sequences intact.
namespace qualcode::text {

bool is_valid_utf8(std::string_view s);
std::size_t utf8_length(std::string_view s);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every run of whitespace to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Case-fold + collapse whitespace.
std::string normalize_for_match(std::string_view s);

// Case-fold + collapse whitespace + strip ASCII punctuation at both ends.
// Used for theme-name merging and default label equivalence.
std::string normalize_label(std::string_view s);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

void replace_all(std::string& s, std::string_view from, std::string_view to);

// Parses an optionally signed decimal integer occupying the whole string
// (after trimming).
std::optional<long long> parse_int(std::string_view s);

// Parses the leading integer of a string such as "5 participants".
std::optional<long long> parse_leading_int(std::string_view s);

// Removes a UTF-8 byte order mark if present.
std::string_view strip_bom(std::string_view s);

}  // namespace qualcode::text

#endif  // QUALCODE_TEXT_HPP_

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

#include "qualcode/chunker.hpp"

#include <cmath>

#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

void TokenBudget::validate() const {
  if (!(chars_per_token > 0.0) || !std::isfinite(chars_per_token)) {
    throw Error(ErrorCode::kInvalidBudget, "chars_per_token must be positive");
  }
  if (max_tokens_per_request == 0 ||
      max_tokens_per_request <= prompt_overhead_tokens) {
    throw Error(ErrorCode::kInvalidBudget,
                "max_tokens_per_request must exceed prompt_overhead_tokens");
  }
}

std::size_t estimate_tokens(std::string_view s, double chars_per_token) {
  const auto chars = static_cast<double>(text::utf8_length(s));
  if (chars == 0) return 0;
  return static_cast<std::size_t>(std::ceil(chars / chars_per_token));
}

std::vector<Chunk> segment_sizes(std::span<const std::size_t> sizes,
                                 std::size_t usable) {
  std::vector<Chunk> chunks;
  auto open_chunk = [&](std::size_t first) {
    Chunk c;
    c.chunk_index = chunks.size();
    c.first = first;
    chunks.push_back(c);
  };
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t s = sizes[i];
    if (s > usable) {
      open_chunk(i);
      chunks.back().count = 1;
      chunks.back().estimated_tokens = s;
      chunks.back().oversized = true;
      continue;
    }
    if (chunks.empty() || chunks.back().oversized ||
        chunks.back().estimated_tokens + s > usable) {
      open_chunk(i);
    }
    chunks.back().count += 1;
    chunks.back().estimated_tokens += s;
  }
  return chunks;
}

std::string format_payload_line(const DataEntry& entry) {
  std::string line = "[" + std::to_string(entry.index) + "] ";
  if (entry.speaker) line += "(" + *entry.speaker + ") ";
  // Keep one entry on one payload line.
  std::string body = entry.text;
  text::replace_all(body, "\r\n", " ");
  text::replace_all(body, "\n", " ");
  line += body;
  return line;
}

std::vector<Chunk> segment(const Corpus& corpus, const TokenBudget& budget) {
  budget.validate();
  std::vector<std::size_t> sizes;
  sizes.reserve(corpus.size());
  for (const auto& e : corpus.entries()) {
    sizes.push_back(estimate_tokens(format_payload_line(e), budget.chars_per_token) + 1);
  }
  return segment_sizes(sizes, budget.usable());
}

}  // namespace qualcode

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

#ifndef QUALCODE_CHUNKER_HPP_
#define QUALCODE_CHUNKER_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qualcode/corpus.hpp"

namespace qualcode {

// Per-request token budget. Tokens are estimated from the character count,
// so the overhead should leave headroom for instructions and the response.
struct TokenBudget {
  std::size_t max_tokens_per_request = 3000;
  double chars_per_token = 4.0;
  std::size_t prompt_overhead_tokens = 1000;

  // Throws kInvalidBudget unless max > overhead and chars_per_token > 0.
  void validate() const;
  std::size_t usable() const { return max_tokens_per_request - prompt_overhead_tokens; }
};

// ceil(code points / chars_per_token).
std::size_t estimate_tokens(std::string_view text, double chars_per_token = 4.0);

// A Chunk refers to a contiguous run [first, first + count) of corpus entries.
struct Chunk {
  std::size_t chunk_index = 0;
  std::size_t first = 0;
  std::size_t count = 0;
  std::size_t estimated_tokens = 0;
  bool oversized = false;  // a single entry larger than the usable budget

  std::span<const DataEntry> entries(const Corpus& corpus) const {
    return std::span<const DataEntry>(corpus.entries()).subspan(first, count);
  }
};

// Greedy first-fit over per-entry sizes: each size joins the current chunk
// unless that would push it past `usable`, in which case a new chunk starts.
// A size that alone exceeds `usable` gets a chunk of its own, flagged.
std::vector<Chunk> segment_sizes(std::span<const std::size_t> sizes,
                                 std::size_t usable);

// Per-entry cost is the estimate for the entry's rendered payload line
// (see format_payload_line) plus one token for the line break.
std::vector<Chunk> segment(const Corpus& corpus, const TokenBudget& budget);

// `[index] (speaker) text`, or `[index] text` without a speaker.
std::string format_payload_line(const DataEntry& entry);

}  // namespace qualcode

#endif  // QUALCODE_CHUNKER_HPP_

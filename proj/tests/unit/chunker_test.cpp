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

#include <gtest/gtest.h>

#include "properties.hpp"
#include "qualcode/error.hpp"

namespace qualcode {
namespace {

using testing::Gen;

TEST(EstimateTokens, CeilOfCodePointsOverRatio) {
  EXPECT_EQ(estimate_tokens(""), 0u);
  EXPECT_EQ(estimate_tokens("abcdefgh"), 2u);
  EXPECT_EQ(estimate_tokens("abcdefghi"), 3u);
  EXPECT_EQ(estimate_tokens("abc", 1.5), 2u);
  // Four code points, eight bytes.
  EXPECT_EQ(estimate_tokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9"), 1u);
}

TEST(EstimateTokens, MonotoneInLength) {
  std::string s;
  std::size_t prev = 0;
  for (int i = 0; i < 100; ++i) {
    s += 'x';
    const std::size_t t = estimate_tokens(s, 3.0);
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(SegmentSizes, GreedyFirstFit) {
  const std::vector<std::size_t> sizes = {10, 10, 10};
  const auto chunks = segment_sizes(sizes, 25);
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].first, 0u);
  EXPECT_EQ(chunks[0].count, 2u);
  EXPECT_EQ(chunks[0].estimated_tokens, 20u);
  EXPECT_EQ(chunks[1].first, 2u);
  EXPECT_EQ(chunks[1].count, 1u);
}

TEST(SegmentSizes, OversizedEntryGetsItsOwnFlaggedChunk) {
  const std::vector<std::size_t> sizes = {5, 100, 5};
  const auto chunks = segment_sizes(sizes, 50);
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_FALSE(chunks[0].oversized);
  EXPECT_TRUE(chunks[1].oversized);
  EXPECT_EQ(chunks[1].count, 1u);
  EXPECT_FALSE(chunks[2].oversized);
}

TEST(SegmentSizes, ExactFitStaysInChunk) {
  const std::vector<std::size_t> sizes = {25, 25};
  const auto chunks = segment_sizes(sizes, 50);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].estimated_tokens, 50u);
}

TEST(Segment, SingleEntryIsOneChunk) {
  Corpus c;
  c.add(std::nullopt, "a short entry");
  const auto chunks = segment(c, TokenBudget{});
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].count, 1u);
}

TEST(Segment, CostIncludesRenderedLineAndBreak) {
  Corpus c;
  c.add(std::string("P1"), "abcd");  // "[0] (P1) abcd" = 13 chars
  TokenBudget b{100, 4.0, 0};
  EXPECT_EQ(segment(c, b)[0].estimated_tokens, 4u + 1u);
}

TEST(TokenBudget, ValidateRejectsBadValues) {
  EXPECT_THROW((TokenBudget{100, 4.0, 100}.validate()), Error);
  EXPECT_THROW((TokenBudget{100, 0.0, 10}.validate()), Error);
  EXPECT_NO_THROW(TokenBudget{}.validate());
  EXPECT_EQ(TokenBudget{}.usable(), 2000u);
}

TEST(PayloadLine, FormatsIndexSpeakerAndFlattensNewlines) {
  DataEntry e;
  e.index = 7;
  e.speaker = "Ana";
  e.text = "line one\nline two";
  EXPECT_EQ(format_payload_line(e), "[7] (Ana) line one line two");
  e.speaker.reset();
  EXPECT_EQ(format_payload_line(e), "[7] line one line two");
}

TEST(SegmentProperties, RandomCorporaArePartitionedWithinBudget) {
  Gen g(314159);
  for (int trial = 0; trial < 300; ++trial) {
    const Corpus c = testing::random_corpus(g);
    const TokenBudget b = testing::random_budget(g);
    const auto chunks = segment(c, b);
    EXPECT_EQ(testing::check_partition(c, b, chunks), "") << "trial " << trial;
    EXPECT_EQ(segment(c, b).size(), chunks.size());  // deterministic
  }
}

TEST(SegmentProperties, CheckerCatchesBrokenPartitions) {
  Corpus c;
  for (int i = 0; i < 6; ++i) c.add(std::nullopt, "entry number " + std::to_string(i));
  TokenBudget b{20, 4.0, 0};
  auto chunks = segment(c, b);
  ASSERT_GT(chunks.size(), 1u);
  auto dropped = chunks;
  dropped.pop_back();
  EXPECT_NE(testing::check_partition(c, b, dropped), "");
  auto shifted = chunks;
  shifted[1].first += 1;
  EXPECT_NE(testing::check_partition(c, b, shifted), "");
}

}  // namespace
}  // namespace qualcode

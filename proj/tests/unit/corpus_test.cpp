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

#include "qualcode/corpus.hpp"

#include <gtest/gtest.h>

#include "properties.hpp"
#include "qualcode/error.hpp"
#include "test_util.hpp"
#include "zip_writer.hpp"

namespace qualcode {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kPrecondition;
}

TEST(LoadTxt, LinePerEntrySkipsBlankLines) {
  const Corpus c = load_txt("a\n\nb\n", TxtMode::kLinePerEntry);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "a");
  EXPECT_EQ(c[1].text, "b");
  EXPECT_EQ(c[1].index, 1u);
  EXPECT_EQ(c[1].source.unit, 3u);
  EXPECT_EQ(c.load_report().total_units, 3u);
  EXPECT_EQ(c.load_report().skipped, 1u);
}

TEST(LoadTxt, SpeakerTurns) {
  const Corpus c = load_txt("Interviewer: hi\nInterviewee: hello\n", TxtMode::kSpeakerTurns);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].speaker, std::optional<std::string>("Interviewer"));
  EXPECT_EQ(c[0].text, "hi");
  EXPECT_EQ(c[1].speaker, std::optional<std::string>("Interviewee"));
  EXPECT_EQ(c.roles(), (std::vector<std::string>{"Interviewer", "Interviewee"}));
}

TEST(LoadTxt, TurnsContinueAcrossLines) {
  const Corpus c = load_txt("P1: one\nstill one\n\nP2: two\n", TxtMode::kSpeakerTurns);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "one\nstill one");
}

TEST(LoadTxt, EmptyAndInvalidInput) {
  EXPECT_EQ(code_of([] { load_txt("", TxtMode::kLinePerEntry); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(code_of([] { load_txt("  \n\n", TxtMode::kLinePerEntry); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(code_of([] { load_txt("bad \xff byte", TxtMode::kLinePerEntry); }),
            ErrorCode::kInvalidEncoding);
}

TEST(SpeakerPrefix, Rules) {
  EXPECT_EQ(parse_speaker_prefix("P1: I liked it")->first, "P1");
  EXPECT_EQ(parse_speaker_prefix("P1: I liked it")->second, "I liked it");
  EXPECT_TRUE(parse_speaker_prefix("Moderator:")) << "colon at end of unit";
  EXPECT_EQ(parse_speaker_prefix("Time: 10:30")->second, "10:30");
  EXPECT_FALSE(parse_speaker_prefix("see http://x.org"));
  EXPECT_FALSE(parse_speaker_prefix("ratio 3:1 is fine"));
  EXPECT_FALSE(parse_speaker_prefix(" P1: leading space"));
  EXPECT_FALSE(parse_speaker_prefix(std::string(41, 'a') + ": too long"));
}

TEST(LoadCsv, TextAndSpeakerColumns) {
  const Corpus c = load_csv("who,msg\nA,x\nB,y\n", ColumnSpec{"msg", "who"});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].speaker, std::optional<std::string>("B"));
  EXPECT_EQ(c[1].source.unit_kind, "row");
}

TEST(LoadCsv, BlankTextRowsAreSkippedAndCounted) {
  const Corpus c = load_csv("msg\nx\n\"  \"\ny\n", ColumnSpec{"msg", std::nullopt});
  EXPECT_EQ(c.size(), 2u);
  const auto& r = c.load_report();
  EXPECT_EQ(r.kept + r.skipped, r.total_units);
  // Units are file rows, counting the header.
  EXPECT_EQ(r.skipped_units, (std::vector<std::size_t>{3}));
  EXPECT_EQ(c[0].source.unit, 2u);
  EXPECT_EQ(c[1].source.unit, 4u);
}

TEST(LoadCsv, Errors) {
  EXPECT_EQ(code_of([] { load_csv("msg\nx\n", ColumnSpec{"nope", std::nullopt}); }),
            ErrorCode::kMissingColumn);
  EXPECT_EQ(code_of([] { load_csv("msg\n\"open\n", ColumnSpec{"msg", std::nullopt}); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(code_of([] { load_csv("msg,who\nx\n", ColumnSpec{"msg", std::nullopt}); }),
            ErrorCode::kMalformedCsv);
}

TEST(LoadCsv, BundledSocialPostsHaveTwoHundredEntries) {
  const Corpus c = load_csv(testing::read_data("social_posts_200.csv"), ColumnSpec{});
  EXPECT_EQ(c.size(), 200u);
}

TEST(CanonicalCsv, RoundTripsRandomCorpora) {
  testing::Gen g(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = testing::random_corpus(g, 30);
    const Corpus back = load_csv(to_canonical_csv(c), ColumnSpec{"text", "speaker"});
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(back[i].index, c[i].index);
      EXPECT_EQ(back[i].speaker, c[i].speaker);
      EXPECT_EQ(back[i].text, c[i].text);
    }
  }
}

TEST(LoadDocx, ParagraphsWithSpeakerPrefix) {
  for (bool deflate : {false, true}) {
    const std::string docx =
        testing::make_docx({"P1: I liked |remote work", "", "Plain & simple"}, deflate);
    const Corpus c = load_docx(docx);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].speaker, std::optional<std::string>("P1"));
    EXPECT_EQ(c[0].text, "I liked remote work");
    EXPECT_EQ(c[1].text, "Plain & simple");
    EXPECT_EQ(c[1].source.unit, 3u);
    EXPECT_EQ(c.load_report().skipped, 1u);
  }
}

TEST(LoadDocx, CorruptedZipIsMalformed) {
  std::string docx = testing::make_docx({"text"});
  EXPECT_EQ(code_of([&] { load_docx(docx.substr(0, docx.size() / 2)); }),
            ErrorCode::kMalformedDocument);
  EXPECT_EQ(code_of([] { load_docx("not a zip at all"); }), ErrorCode::kMalformedDocument);
  const std::string no_doc = testing::make_zip({{"other.xml", "<a/>"}});
  EXPECT_EQ(code_of([&] { load_docx(no_doc); }), ErrorCode::kMalformedDocument);
}

TEST(LoadXlsx, MirrorsCsv) {
  const std::string xlsx = testing::make_xlsx(
      {{"who", "msg"}, {"A", "x"}, {"B", ""}, {"C", "z"}}, "Posts", true);
  const Corpus c = load_xlsx(xlsx, std::nullopt, ColumnSpec{"msg", "who"});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].text, "z");
  EXPECT_EQ(c[1].speaker, std::optional<std::string>("C"));
  EXPECT_EQ(c.load_report().skipped, 1u);
  EXPECT_EQ(code_of([&] { load_xlsx(xlsx, "Missing", ColumnSpec{"msg", std::nullopt}); }),
            ErrorCode::kMalformedDocument);
  EXPECT_EQ(code_of([&] { load_xlsx(xlsx, "Posts", ColumnSpec{"nope", std::nullopt}); }),
            ErrorCode::kMissingColumn);
}

TEST(LoadBytes, DispatchesOnExtension) {
  EXPECT_EQ(format_from_name("a.DOCX"), InputFormat::kDocx);
  EXPECT_EQ(format_from_name("a.csv"), InputFormat::kCsv);
  EXPECT_EQ(format_from_name("notes"), InputFormat::kTxt);
  LoadOptions lo;
  EXPECT_EQ(load_bytes("l1\nl2\n", "x.txt", lo).size(), 2u);
  EXPECT_EQ(load_bytes("text\nl1\n", "x.csv", lo).size(), 1u);
}

TEST(Codebook, BundledFiftyFourLabels) {
  const Codebook cb = load_codebook_csv(testing::read_data("codebook_54.csv"));
  EXPECT_EQ(cb.size(), 54u);
  EXPECT_EQ(cb.irrelevant_id(), 0);
  EXPECT_EQ(cb.other_id(), 53);
}

TEST(Codebook, ReservedIdsAndErrors) {
  const Codebook cb = load_codebook_csv("id,name,definition\n0,a,\n1,b,\n2,c,\n");
  EXPECT_EQ(cb.other_id(), 2);
  EXPECT_EQ(cb.find_by_name("  B ")->id, 1);
  EXPECT_EQ(code_of([] { load_codebook_csv("id,name,definition\n0,a,\n0,b,\n"); }),
            ErrorCode::kDuplicateId);
  EXPECT_EQ(code_of([] { load_codebook_csv("id,name,definition\nx,a,\n"); }),
            ErrorCode::kNonIntegerId);
  EXPECT_EQ(code_of([] { load_codebook_csv("id,label\n0,a\n"); }), ErrorCode::kMissingColumn);
  EXPECT_EQ(code_of([] { load_codebook_csv("id,name,definition\n0,a,\n", 0, 9); }),
            ErrorCode::kInvalidCodebook);
  const Codebook custom = load_codebook_csv("id,name,definition\n0,a,\n1,b,\n2,c,\n", 1, 0);
  EXPECT_EQ(custom.irrelevant_id(), 1);
  EXPECT_EQ(custom.other_id(), 0);
}

TEST(Codebook, CsvRoundTrip) {
  const Codebook cb = load_codebook_csv(testing::read_data("codebook_54.csv"));
  const Codebook back = load_codebook_csv(to_codebook_csv(cb));
  ASSERT_EQ(back.size(), cb.size());
  for (std::size_t i = 0; i < cb.size(); ++i) {
    EXPECT_EQ(back.labels()[i].name, cb.labels()[i].name);
    EXPECT_EQ(back.labels()[i].definition, cb.labels()[i].definition);
  }
}

TEST(PriorExamples, BundledFiftyExamples) {
  const auto ex = load_prior_examples_csv(testing::read_data("prior_examples_50.csv"));
  EXPECT_EQ(ex.size(), 50u);
}

TEST(Corpus, AddRejectsBlankText) {
  Corpus c;
  EXPECT_EQ(code_of([&] { c.add(std::nullopt, "   "); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(c.add(std::string("R"), "  padded  "), 0u);
  EXPECT_EQ(c[0].text, "padded");
  EXPECT_EQ(c.roles(), (std::vector<std::string>{"R"}));
}

}  // namespace
}  // namespace qualcode

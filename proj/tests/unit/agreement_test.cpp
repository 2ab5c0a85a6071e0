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

#include "qualcode/agreement.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "kappa_oracle.hpp"
#include "qualcode/error.hpp"
#include "test_util.hpp"

namespace qualcode {
namespace {

using testing::Gen;

std::vector<Label> repeat(std::initializer_list<std::pair<const char*, int>> runs) {
  std::vector<Label> out;
  for (const auto& [label, n] : runs) out.insert(out.end(), n, label);
  return out;
}

PairedLabels cohen_fixture() {
  // 20 yes/yes, 20 no/no, 5 yes/no, 5 no/yes
  const auto a = repeat({{"yes", 20}, {"no", 20}, {"yes", 5}, {"no", 5}});
  const auto b = repeat({{"yes", 20}, {"no", 20}, {"no", 5}, {"yes", 5}});
  return PairedLabels::from_vectors(a, b);
}

MultiRaterMatrix fleiss_fixture() {
  return MultiRaterMatrix{{{"A", "A", "A"}, {"A", "A", "B"}, {"B", "B", "B"}}};
}

TEST(CohenKappa, HandComputedFixtureIsExactlyThreeFifths) {
  const auto r = cohen_kappa(cohen_fixture());
  EXPECT_EQ(r.exact, (Ratio{3, 5}));
  EXPECT_DOUBLE_EQ(r.observed_agreement, 0.8);
  EXPECT_DOUBLE_EQ(r.expected_agreement, 0.5);
  EXPECT_EQ(r.band, KappaBand::kModerate);
  EXPECT_EQ(r.statistic, Statistic::kCohen);
}

TEST(CohenKappa, IdenticalVectorsGiveOne) {
  const std::vector<Label> a = {"x", "y", "z", "x"};
  EXPECT_EQ(cohen_kappa(PairedLabels::from_vectors(a, a)).exact, (Ratio{1, 1}));
}

TEST(CohenKappa, SingleCategoryAgreementIsOneNotNaN) {
  const std::vector<Label> a(5, "only");
  const auto r = cohen_kappa(PairedLabels::from_vectors(a, a));
  EXPECT_EQ(r.value, 1.0);
}

TEST(CohenKappa, ErrorsOnEmptyAndLengthMismatch) {
  try {
    cohen_kappa(PairedLabels{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
  const std::vector<Label> a = {"a"}, b = {"a", "b"};
  try {
    PairedLabels::from_vectors(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(CohenKappa, ChanceLevelCanBeNegative) {
  const std::vector<Label> a = {"A", "B", "A", "B"}, b = {"B", "A", "B", "A"};
  const auto r = cohen_kappa(PairedLabels::from_vectors(a, b));
  EXPECT_EQ(r.exact, (Ratio{-1, 1}));
  EXPECT_EQ(r.band, KappaBand::kPoor);
}

TEST(FleissKappa, HandComputedFixtureIsExactlyElevenTwentieths) {
  const auto r = fleiss_kappa(fleiss_fixture());
  EXPECT_EQ(r.exact, (Ratio{11, 20}));
  EXPECT_DOUBLE_EQ(r.observed_agreement, 7.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.expected_agreement, 41.0 / 81.0);
  EXPECT_EQ(r.band, KappaBand::kModerate);
}

TEST(FleissKappa, AllIdenticalGivesOne) {
  MultiRaterMatrix m{{{"a", "a", "a", "a"}, {"b", "b", "b", "b"}, {"a", "a", "a", "a"}}};
  EXPECT_EQ(fleiss_kappa(m).exact, (Ratio{1, 1}));
}

TEST(FleissKappa, RaggedMatrixIsRejected) {
  MultiRaterMatrix m{{{"a", "a"}, {"a"}}};
  try {
    fleiss_kappa(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRaggedMatrix);
  }
}

TEST(FleissKappa, SingleRaterIsRejected) {
  MultiRaterMatrix m{{{"a"}, {"b"}}};
  EXPECT_THROW(fleiss_kappa(m), Error);
}

TEST(FleissKappa, TwoRatersDifferFromCohenOnConcreteInstance) {
  const std::vector<Label> a = {"A", "A", "B", "B"}, b = {"A", "B", "B", "B"};
  const auto cohen = cohen_kappa(PairedLabels::from_vectors(a, b));
  std::vector<std::vector<Label>> runs = {a, b};
  const auto fleiss = fleiss_kappa(MultiRaterMatrix::from_runs(runs));
  EXPECT_EQ(cohen.exact, (Ratio{1, 2}));
  EXPECT_EQ(fleiss.exact, (Ratio{7, 15}));
  EXPECT_NE(cohen.exact, fleiss.exact);
}

TEST(PercentAgreement, TwoRatersIsShareOfIdenticalItems) {
  std::vector<std::vector<Label>> runs = {{"a", "b", "c", "d"}, {"a", "b", "x", "d"}};
  const auto r = percent_agreement(MultiRaterMatrix::from_runs(runs));
  EXPECT_EQ(r.exact, (Ratio{3, 4}));
}

TEST(PercentAgreement, ThreeRatersAveragesAgreeingPairs) {
  EXPECT_EQ(percent_agreement(fleiss_fixture()).exact, (Ratio{7, 9}));
}

TEST(KappaBand, BoundariesAreHalfOpenUpward) {
  EXPECT_EQ(kappa_band(-0.01), KappaBand::kPoor);
  EXPECT_EQ(kappa_band(0.0), KappaBand::kSlight);
  EXPECT_EQ(kappa_band(0.20), KappaBand::kSlight);
  EXPECT_EQ(kappa_band(0.2000001), KappaBand::kFair);
  EXPECT_EQ(kappa_band(0.40), KappaBand::kFair);
  EXPECT_EQ(kappa_band(0.60), KappaBand::kModerate);
  EXPECT_EQ(kappa_band(0.80), KappaBand::kSubstantial);
  EXPECT_EQ(kappa_band(0.8000001), KappaBand::kAlmostPerfect);
  EXPECT_EQ(kappa_band(1.0), KappaBand::kAlmostPerfect);
}

TEST(KappaBand, ReportedValuesMapToTheirWording) {
  EXPECT_EQ(kappa_band(0.73), KappaBand::kSubstantial);
  EXPECT_EQ(kappa_band(0.87), KappaBand::kAlmostPerfect);
  EXPECT_EQ(kappa_band(0.46), KappaBand::kModerate);
  EXPECT_EQ(kappa_band(0.57), KappaBand::kModerate);
  EXPECT_EQ(kappa_band(0.42), KappaBand::kModerate);
  EXPECT_EQ(kappa_band_name(KappaBand::kAlmostPerfect), "AlmostPerfect");
}

TEST(KappaProperties, MatchOracleOnRandomInstances) {
  Gen g(20240901);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t items = g.size(1, 20), cats = g.size(1, 5), raters = g.size(2, 4);
    std::vector<std::vector<Label>> runs(raters);
    for (auto& r : runs) {
      for (std::size_t i = 0; i < items; ++i) r.push_back(g.label(cats));
    }
    const auto paired = PairedLabels::from_vectors(runs[0], runs[1]);
    try {
      const double got = cohen_kappa(paired).value;
      EXPECT_NEAR(got, oracle::cohen(runs[0], runs[1]), 1e-9) << "trial " << trial;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateMarginals);
    }
    const auto m = MultiRaterMatrix::from_runs(runs);
    try {
      EXPECT_NEAR(fleiss_kappa(m).value, oracle::fleiss(m.items), 1e-9) << "trial " << trial;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateMarginals);
    }
  }
}

TEST(KappaProperties, CohenIsSymmetric) {
  Gen g(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> a, b;
    const std::size_t n = g.size(2, 15);
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(g.label(4));
      b.push_back(g.coin(0.6) ? a.back() : g.label(4));
    }
    try {
      EXPECT_EQ(cohen_kappa(PairedLabels::from_vectors(a, b)).exact,
                cohen_kappa(PairedLabels::from_vectors(b, a)).exact);
    } catch (const Error&) {
    }
  }
}

TEST(KappaProperties, RelabelingLeavesValuesUnchanged) {
  Gen g(99);
  const std::map<Label, Label> rename = {{"A", "zeta"}, {"B", "alpha"}, {"C", "mu"}, {"D", "B"}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<Label>> runs(3);
    const std::size_t n = g.size(2, 15);
    for (auto& r : runs) {
      for (std::size_t i = 0; i < n; ++i) r.push_back(g.label(4));
    }
    auto renamed = runs;
    for (auto& r : renamed) {
      for (auto& l : r) l = rename.at(l);
    }
    try {
      const auto m0 = MultiRaterMatrix::from_runs(runs), m1 = MultiRaterMatrix::from_runs(renamed);
      EXPECT_EQ(fleiss_kappa(m0).exact, fleiss_kappa(m1).exact);
      EXPECT_EQ(cohen_kappa(PairedLabels::from_vectors(runs[0], runs[1])).exact,
                cohen_kappa(PairedLabels::from_vectors(renamed[0], renamed[1])).exact);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateMarginals);
    }
  }
}

TEST(Consistency, DefaultPredicateNormalizesCaseSpaceAndPunctuation) {
  const std::vector<Label> a = {"Remote work", "reputation of developer", "x"};
  const std::vector<Label> b = {"  remote   WORK.", "Twitch user behavior and reputation", "x"};
  const auto m = mark_consistency(a, b);
  EXPECT_EQ(m.marks, (std::vector<int>{1, 0, 1}));
  EXPECT_DOUBLE_EQ(m.proportion, 2.0 / 3.0);
}

TEST(Consistency, SynonymPredicateMatchesDeclaredGroups) {
  const auto eq = synonym_equivalence({{"twitch merch", "Twitch merchandise"}});
  const std::vector<Label> a = {"twitch merch"}, b = {"Twitch merchandise"};
  EXPECT_EQ(mark_consistency(a, b, eq).marks, (std::vector<int>{1}));
  EXPECT_EQ(mark_consistency(a, b).marks, (std::vector<int>{0}));
}

TEST(Consistency, LengthMismatchThrows) {
  const std::vector<Label> a = {"a"}, b;
  EXPECT_THROW(mark_consistency(a, b), Error);
}

TEST(Canonicalize, EquivalentLabelsShareOneRepresentative) {
  const std::vector<Label> a = {"Remote Work", "pay"}, b = {"remote work!", "Pay"};
  const auto [ca, cb] = canonicalize(a, b);
  EXPECT_EQ(ca, (std::vector<Label>{"Remote Work", "pay"}));
  EXPECT_EQ(cb, (std::vector<Label>{"Remote Work", "pay"}));
  EXPECT_EQ(cohen_kappa(PairedLabels::from_vectors(ca, cb)).value, 1.0);
}

TEST(Consensus, AgreementTiesAndPolicies) {
  std::vector<std::vector<Label>> runs = {{"A", "A", "A"}, {"A", "B", "B"}, {"A", "C", "A"}};
  const auto first = majority_consensus(runs, TiePolicy::kFirstRun);
  EXPECT_EQ(first.labels[0], Label("A"));
  EXPECT_EQ(first.labels[1], Label("A"));  // A, B, C tie: earliest run wins
  EXPECT_EQ(first.labels[2], Label("A"));  // strict majority
  EXPECT_TRUE(first.unresolved.empty());

  const auto strict = majority_consensus(runs, TiePolicy::kUnresolved);
  EXPECT_FALSE(strict.labels[1].has_value());
  EXPECT_EQ(strict.unresolved, (std::set<std::size_t>{1}));
}

TEST(Consensus, RequiresTwoEqualRuns) {
  std::vector<std::vector<Label>> one = {{"A"}};
  EXPECT_THROW(majority_consensus(one, TiePolicy::kFirstRun), Error);
  std::vector<std::vector<Label>> uneven = {{"A"}, {"A", "B"}};
  try {
    majority_consensus(uneven, TiePolicy::kFirstRun);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(RatingsCsv, ReadsHeaderAsRaterIds) {
  std::vector<std::string> ids;
  const auto m = read_ratings_csv("r1,r2\na,a\nb,c\n", &ids);
  EXPECT_EQ(ids, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(m.items.size(), 2u);
}

TEST(RatingsCsv, BlankCellOrShortRowIsRagged) {
  for (const char* bad : {"r1,r2\na,\n", "r1,r2\na\n"}) {
    try {
      read_ratings_csv(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kRaggedMatrix) << bad;
    }
  }
}

}  // namespace
}  // namespace qualcode

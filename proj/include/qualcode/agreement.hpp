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

#ifndef QUALCODE_AGREEMENT_HPP_
#define QUALCODE_AGREEMENT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qualcode {

using Label = std::string;

// Exact fraction, always reduced with a positive denominator.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Ratio make(__int128 num, __int128 den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

enum class Statistic { kCohen, kFleiss, kPercentAgreement };
std::string_view statistic_name(Statistic s);

// Landis & Koch interpretation bands.
enum class KappaBand { kPoor, kSlight, kFair, kModerate, kSubstantial, kAlmostPerfect };
std::string_view kappa_band_name(KappaBand band);

// <0 Poor, [0,0.20] Slight, (0.20,0.40] Fair, (0.40,0.60] Moderate,
// (0.60,0.80] Substantial, (0.80,1] AlmostPerfect.
KappaBand kappa_band(double value);

struct AgreementResult {
  Statistic statistic = Statistic::kCohen;
  double value = 0.0;
  KappaBand band = KappaBand::kPoor;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  Ratio exact;  // value as a fraction of integer counts
};

struct PairedLabels {
  std::vector<std::pair<Label, Label>> items;

  static PairedLabels from_vectors(std::span<const Label> a, std::span<const Label> b);
};

// items x raters; every row must have the same number (>= 2) of ratings.
struct MultiRaterMatrix {
  std::vector<std::vector<Label>> items;

  // Throws kRaggedMatrix for unequal rows, kInsufficientData for no items or
  // fewer than two raters.
  void validate() const;
  std::size_t raters() const { return items.empty() ? 0 : items.front().size(); }
  // Transposes equal-length per-rater vectors (e.g. repeated runs).
  static MultiRaterMatrix from_runs(std::span<const std::vector<Label>> runs);
};

// kappa = (p_o - p_e) / (1 - p_e) with p_e from the two raters' marginals.
// Returns 1 when p_o = 1; throws kDegenerateMarginals for p_e = 1 with p_o < 1
// and kInsufficientData for an empty list.
AgreementResult cohen_kappa(const PairedLabels& paired);

// Fleiss' kappa from per-item category counts. Returns 1 when the mean
// per-item agreement is 1.
AgreementResult fleiss_kappa(const MultiRaterMatrix& matrix);

// Share of agreeing rater pairs, averaged over items. For two raters this is
// the fraction of items with identical labels.
AgreementResult percent_agreement(const MultiRaterMatrix& matrix);

using Equivalence = std::function<bool(const Label&, const Label&)>;

// Case-fold, collapse whitespace, strip punctuation at the ends, then compare.
bool normalized_equal(const Label& a, const Label& b);

// Equivalence from explicit synonym groups; labels compare by normalized form
// first, then by shared group membership.
Equivalence synonym_equivalence(std::vector<std::vector<Label>> groups);

struct ConsistencyMarks {
  std::vector<int> marks;  // 1 = consistent
  double proportion = 0.0;
};

// marks[i] = equivalence(a[i], b[i]). Throws kLengthMismatch.
ConsistencyMarks mark_consistency(std::span<const Label> a, std::span<const Label> b,
                                  const Equivalence& equivalence = normalized_equal);

// Replaces each label with the first label seen (across both vectors, a then
// b) that is equivalent to it, so kappa can be computed on equivalence
// classes rather than raw strings.
std::pair<std::vector<Label>, std::vector<Label>> canonicalize(
    std::span<const Label> a, std::span<const Label> b,
    const Equivalence& equivalence = normalized_equal);

enum class TiePolicy {
  kFirstRun,    // among the tied labels, take the one that appears in the earliest run
  kUnresolved,  // leave the item unresolved
};

struct Consensus {
  std::vector<std::optional<Label>> labels;  // nullopt only for unresolved items
  std::set<std::size_t> unresolved;
};

// Per item, the strictly most frequent label across runs. Throws
// kLengthMismatch for unequal runs and kInsufficientData for fewer than two.
Consensus majority_consensus(std::span<const std::vector<Label>> runs, TiePolicy policy);

// Ratings CSV: header row of rater ids, then one row per item. Blank cells
// make the matrix ragged and throw kRaggedMatrix.
MultiRaterMatrix read_ratings_csv(std::string_view bytes, std::vector<std::string>* rater_ids = nullptr);

}  // namespace qualcode

#endif  // QUALCODE_AGREEMENT_HPP_

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

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "qualcode/csv.hpp"
#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

AgreementResult finish(Statistic stat, Ratio exact, double observed, double expected) {
  AgreementResult r;
  r.statistic = stat;
  r.exact = exact;
  r.value = exact.value();
  r.band = kappa_band(r.value);
  r.observed_agreement = observed;
  r.expected_agreement = expected;
  return r;
}

struct FleissCounts {
  __int128 total_ratings = 0;   // T = N * n
  __int128 sum_sq_cells = 0;    // sum_i sum_j n_ij^2
  __int128 sum_sq_columns = 0;  // sum_j c_j^2
  std::int64_t raters = 0;
};

FleissCounts fleiss_counts(const MultiRaterMatrix& m) {
  m.validate();
  FleissCounts fc;
  fc.raters = static_cast<std::int64_t>(m.raters());
  std::unordered_map<Label, __int128> columns;
  for (const auto& row : m.items) {
    std::unordered_map<Label, std::int64_t> cells;
    for (const auto& l : row) ++cells[l];
    for (const auto& [label, n] : cells) {
      fc.sum_sq_cells += static_cast<__int128>(n) * n;
      columns[label] += n;
    }
  }
  for (const auto& [_, c] : columns) fc.sum_sq_columns += c * c;
  fc.total_ratings = static_cast<__int128>(m.items.size()) * fc.raters;
  return fc;
}

}  // namespace

Ratio Ratio::make(__int128 num, __int128 den) {
  if (den == 0) throw Error(ErrorCode::kDegenerateMarginals, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  const __int128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || num < -lim || den > lim) {
    throw Error(ErrorCode::kInsufficientData, "agreement counts overflow 64-bit fraction");
  }
  return Ratio{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::string_view statistic_name(Statistic s) {
  switch (s) {
    case Statistic::kCohen: return "Cohen";
    case Statistic::kFleiss: return "Fleiss";
    case Statistic::kPercentAgreement: return "PercentAgreement";
  }
  return "Cohen";
}

std::string_view kappa_band_name(KappaBand band) {
  switch (band) {
    case KappaBand::kPoor: return "Poor";
    case KappaBand::kSlight: return "Slight";
    case KappaBand::kFair: return "Fair";
    case KappaBand::kModerate: return "Moderate";
    case KappaBand::kSubstantial: return "Substantial";
    case KappaBand::kAlmostPerfect: return "AlmostPerfect";
  }
  return "Poor";
}

KappaBand kappa_band(double v) {
  if (v < 0.0) return KappaBand::kPoor;
  if (v <= 0.20) return KappaBand::kSlight;
  if (v <= 0.40) return KappaBand::kFair;
  if (v <= 0.60) return KappaBand::kModerate;
  if (v <= 0.80) return KappaBand::kSubstantial;
  return KappaBand::kAlmostPerfect;
}

PairedLabels PairedLabels::from_vectors(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label vectors have lengths " +
                                                std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()));
  }
  PairedLabels p;
  p.items.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p.items.emplace_back(a[i], b[i]);
  return p;
}

void MultiRaterMatrix::validate() const {
  if (items.empty()) throw Error(ErrorCode::kInsufficientData, "no items to compare");
  const std::size_t n = items.front().size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != n) {
      throw Error(ErrorCode::kRaggedMatrix, "item " + std::to_string(i) + " has " +
                                                std::to_string(items[i].size()) +
                                                " ratings, expected " + std::to_string(n));
    }
  }
  if (n < 2) throw Error(ErrorCode::kInsufficientData, "at least two raters are required");
}

MultiRaterMatrix MultiRaterMatrix::from_runs(std::span<const std::vector<Label>> runs) {
  MultiRaterMatrix m;
  if (runs.empty()) return m;
  const std::size_t n = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != n) throw Error(ErrorCode::kLengthMismatch, "runs differ in length");
  }
  m.items.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& r : runs) m.items[i].push_back(r[i]);
  }
  return m;
}

AgreementResult cohen_kappa(const PairedLabels& paired) {
  const auto n_items = static_cast<__int128>(paired.items.size());
  if (n_items == 0) throw Error(ErrorCode::kInsufficientData, "no items to compare");
  std::unordered_map<Label, std::int64_t> ca, cb;
  __int128 agree = 0;
  for (const auto& [a, b] : paired.items) {
    ++ca[a];
    ++cb[b];
    if (a == b) ++agree;
  }
  __int128 s = 0;
  for (const auto& [label, count] : ca) {
    auto it = cb.find(label);
    if (it != cb.end()) s += static_cast<__int128>(count) * it->second;
  }
  const __int128 n2 = n_items * n_items;
  const double po = static_cast<double>(agree) / static_cast<double>(n_items);
  const double pe = static_cast<double>(s) / static_cast<double>(n2);
  if (agree == n_items) return finish(Statistic::kCohen, Ratio{1, 1}, po, pe);
  if (s == n2) {
    throw Error(ErrorCode::kDegenerateMarginals, "expected agreement is 1 but raters disagree");
  }
  return finish(Statistic::kCohen, Ratio::make(agree * n_items - s, n2 - s), po, pe);
}

AgreementResult fleiss_kappa(const MultiRaterMatrix& matrix) {
  const FleissCounts fc = fleiss_counts(matrix);
  const __int128 t = fc.total_ratings;
  const __int128 n1 = fc.raters - 1;
  // P_bar = (S2 - T) / (T (n - 1)), P_e = C / T^2
  const __int128 pbar_num = fc.sum_sq_cells - t;
  const __int128 pbar_den = t * n1;
  const double pbar = static_cast<double>(pbar_num) / static_cast<double>(pbar_den);
  const double pe = static_cast<double>(fc.sum_sq_columns) / static_cast<double>(t * t);
  if (pbar_num == pbar_den) return finish(Statistic::kFleiss, Ratio{1, 1}, pbar, pe);
  if (fc.sum_sq_columns == t * t) {
    throw Error(ErrorCode::kDegenerateMarginals, "expected agreement is 1 but raters disagree");
  }
  return finish(Statistic::kFleiss,
                Ratio::make(pbar_num * t - fc.sum_sq_columns * n1, n1 * (t * t - fc.sum_sq_columns)),
                pbar, pe);
}

AgreementResult percent_agreement(const MultiRaterMatrix& matrix) {
  const FleissCounts fc = fleiss_counts(matrix);
  const Ratio r = Ratio::make(fc.sum_sq_cells - fc.total_ratings,
                              fc.total_ratings * (fc.raters - 1));
  return finish(Statistic::kPercentAgreement, r, r.value(), 0.0);
}

bool normalized_equal(const Label& a, const Label& b) {
  return text::normalize_label(a) == text::normalize_label(b);
}

Equivalence synonym_equivalence(std::vector<std::vector<Label>> groups) {
  std::vector<std::set<std::string>> normalized;
  normalized.reserve(groups.size());
  for (const auto& g : groups) {
    std::set<std::string> s;
    for (const auto& l : g) s.insert(text::normalize_label(l));
    normalized.push_back(std::move(s));
  }
  return [normalized = std::move(normalized)](const Label& a, const Label& b) {
    const std::string na = text::normalize_label(a);
    const std::string nb = text::normalize_label(b);
    if (na == nb) return true;
    for (const auto& g : normalized) {
      if (g.count(na) && g.count(nb)) return true;
    }
    return false;
  };
}

ConsistencyMarks mark_consistency(std::span<const Label> a, std::span<const Label> b,
                                  const Equivalence& equivalence) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label vectors have lengths " +
                                                std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()));
  }
  ConsistencyMarks out;
  out.marks.reserve(a.size());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int m = equivalence(a[i], b[i]) ? 1 : 0;
    ones += static_cast<std::size_t>(m);
    out.marks.push_back(m);
  }
  out.proportion = a.empty() ? 0.0 : static_cast<double>(ones) / static_cast<double>(a.size());
  return out;
}

std::pair<std::vector<Label>, std::vector<Label>> canonicalize(std::span<const Label> a,
                                                               std::span<const Label> b,
                                                               const Equivalence& equivalence) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label vectors differ in length");
  }
  std::vector<Label> representatives;
  auto canon = [&](const Label& l) -> Label {
    for (const auto& r : representatives) {
      if (equivalence(r, l)) return r;
    }
    representatives.push_back(l);
    return l;
  };
  std::vector<Label> ca, cb;
  ca.reserve(a.size());
  cb.reserve(b.size());
  for (const auto& l : a) ca.push_back(canon(l));
  for (const auto& l : b) cb.push_back(canon(l));
  return {std::move(ca), std::move(cb)};
}

Consensus majority_consensus(std::span<const std::vector<Label>> runs, TiePolicy policy) {
  if (runs.size() < 2) throw Error(ErrorCode::kInsufficientData, "at least two runs are required");
  const std::size_t n = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != n) throw Error(ErrorCode::kLengthMismatch, "runs differ in length");
  }
  Consensus out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Run order doubles as first-appearance order for tie-breaking.
    std::vector<std::pair<Label, std::size_t>> counts;
    for (const auto& r : runs) {
      auto it = std::find_if(counts.begin(), counts.end(),
                             [&](const auto& p) { return p.first == r[i]; });
      if (it == counts.end()) {
        counts.emplace_back(r[i], 1);
      } else {
        ++it->second;
      }
    }
    std::size_t best = 0;
    for (const auto& [_, c] : counts) best = std::max(best, c);
    std::size_t n_best = 0;
    const Label* first_best = nullptr;
    for (const auto& [label, c] : counts) {
      if (c == best) {
        if (!first_best) first_best = &label;
        ++n_best;
      }
    }
    if (n_best == 1 || policy == TiePolicy::kFirstRun) {
      out.labels[i] = *first_best;
    } else {
      out.unresolved.insert(i);
    }
  }
  return out;
}

MultiRaterMatrix read_ratings_csv(std::string_view bytes, std::vector<std::string>* rater_ids) {
  csv::Table table = [&] {
    try {
      return csv::parse_table(bytes);
    } catch (const Error& e) {
      throw Error(ErrorCode::kRaggedMatrix, e.detail());
    }
  }();
  if (rater_ids) *rater_ids = table.header;
  MultiRaterMatrix m;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const bool all_blank = std::all_of(row.begin(), row.end(),
                                       [](const std::string& c) { return text::trim(c).empty(); });
    if (all_blank) continue;
    std::vector<Label> labels;
    for (const auto& c : row) {
      if (text::trim(c).empty()) {
        throw Error(ErrorCode::kRaggedMatrix,
                    "line " + std::to_string(table.row_lines[r]) + " has a blank rating");
      }
      labels.emplace_back(text::trim(c));
    }
    m.items.push_back(std::move(labels));
  }
  m.validate();
  return m;
}

}  // namespace qualcode

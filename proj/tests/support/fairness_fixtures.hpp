// Copyright 2026 The twinbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWINBENCH_TESTS_FAIRNESS_FIXTURES_HPP_
#define TWINBENCH_TESTS_FAIRNESS_FIXTURES_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "twinbench/fairness.hpp"

namespace twinbench::testing {

// Demographics that land in the given groups under the default policy
// (true = privileged), ordered Age, Gender, Race, Education, Income.
inline DemographicTier demo_for(const std::array<bool, 5>& priv) {
  DemographicTier d;
  d.age = priv[0] ? 52 : 27;
  d.sex = priv[1] ? Sex::kMale : Sex::kFemale;
  d.race = priv[2] ? Race::kWhite : Race::kBlackOrAfricanAmerican;
  d.education = priv[3] ? Education::kCollegeGraduate : Education::kHighSchool;
  d.income = priv[4] ? Income::k50kTo75k : Income::k20kTo35k;
  return d;
}

inline std::array<bool, 5> mask_bits(int mask) {
  std::array<bool, 5> b{};
  for (int a = 0; a < 5; ++a) b[a] = ((mask >> a) & 1) != 0;
  return b;
}

// `n` records in the cell, the first `pos` predicted positive.
inline void add_cell(std::vector<LabeledPrediction>& out, const std::array<bool, 5>& priv, int n,
                     int pos, const std::string& condition = "zero-shot",
                     const std::string& model = "m") {
  for (int i = 0; i < n; ++i) {
    LabeledPrediction p;
    p.persona_id = "c" + std::to_string(out.size());
    p.predicted_positive = i < pos;
    p.score = i < pos ? 0.8 : 0.2;
    p.gold = p.score;
    p.demographics = demo_for(priv);
    p.condition = condition;
    p.model = model;
    out.push_back(std::move(p));
  }
}

// Every one of the 32 intersection cells has positive rate 1/2.
inline std::vector<LabeledPrediction> balanced_corpus(int per_cell = 4) {
  std::vector<LabeledPrediction> out;
  for (int mask = 0; mask < 32; ++mask) add_cell(out, mask_bits(mask), per_cell, per_cell / 2);
  return out;
}

// Only fully privileged (rate 0.6) and fully unprivileged (rate 0.3) records.
inline std::vector<LabeledPrediction> skew_corpus() {
  std::vector<LabeledPrediction> out;
  add_cell(out, mask_bits(31), 10, 6);
  add_cell(out, mask_bits(0), 10, 3);
  return out;
}

}  // namespace twinbench::testing

#endif  // TWINBENCH_TESTS_FAIRNESS_FIXTURES_HPP_

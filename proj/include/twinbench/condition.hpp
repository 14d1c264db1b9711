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

#ifndef TWINBENCH_CONDITION_HPP_
#define TWINBENCH_CONDITION_HPP_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinbench/persona.hpp"

namespace twinbench {

enum class ConditionKind {
  kPersonaOracle,
  kPersonaFewShot,
  kPersonaZeroShot,
  kFewShotOracle,
  kZeroShot,
};

// One of the eight information-availability settings. Few-shot conditions
// carry the withheld question; the others carry none.
class Condition {
 public:
  static Condition persona_oracle() { return Condition(ConditionKind::kPersonaOracle, {}); }
  static Condition persona_few_shot(QuestionDimension withheld) {
    return Condition(ConditionKind::kPersonaFewShot, withheld);
  }
  static Condition persona_zero_shot() { return Condition(ConditionKind::kPersonaZeroShot, {}); }
  static Condition few_shot_oracle() { return Condition(ConditionKind::kFewShotOracle, {}); }
  static Condition zero_shot() { return Condition(ConditionKind::kZeroShot, {}); }

  // All eight, in canonical order: oracle, four few-shot variants (survey
  // question order), persona zero-shot, few-shot oracle, zero-shot.
  static const std::array<Condition, 8>& all();

  ConditionKind kind() const { return kind_; }
  std::optional<QuestionDimension> withheld() const { return withheld_; }

  // Position in all(); defines the stable sort order of stored records.
  int index() const;
  // Machine id, e.g. "persona-few-shot-anxiety".
  std::string id() const;
  // Human label, e.g. "Persona Few-shot (Anxiety)".
  std::string display_name() const;

  bool operator==(const Condition&) const = default;
  std::strong_ordering operator<=>(const Condition& other) const {
    return index() <=> other.index();
  }

 private:
  Condition(ConditionKind kind, std::optional<QuestionDimension> withheld)
      : kind_(kind), withheld_(withheld) {}

  ConditionKind kind_;
  std::optional<QuestionDimension> withheld_;
};

// Parses a Condition id. Throws Error(kUnknownEnumValue).
Condition parse_condition(std::string_view id);

// Parses a command-line selection: a single id, "persona-few-shot" (all four
// variants) or "all". Duplicates are removed; result is in canonical order.
std::vector<Condition> parse_condition_list(const std::vector<std::string>& names);

// Report rows. The four few-shot variants collapse into one row.
enum class ConditionGroup {
  kPersonaOracle,
  kFewShotOracle,
  kPersonaFewShot,
  kPersonaZeroShot,
  kZeroShot,
};

inline constexpr std::array<ConditionGroup, 5> kConditionGroupOrder = {
    ConditionGroup::kPersonaOracle, ConditionGroup::kFewShotOracle,
    ConditionGroup::kPersonaFewShot, ConditionGroup::kPersonaZeroShot,
    ConditionGroup::kZeroShot};

ConditionGroup group_of(const Condition& c);
std::string_view group_label(ConditionGroup g);  // "Persona Few-shot"

struct ConditionPlan {
  Condition condition = Condition::zero_shot();
  bool include_tiers = false;
  std::vector<QuestionDimension> revealed;  // survey order
  std::vector<QuestionDimension> targets;   // survey order

  bool operator==(const ConditionPlan&) const = default;
};

// Questions the twin answers under `c`; depends on the condition only.
std::vector<QuestionDimension> targets_of(const Condition& c);

// Throws Error(kMissingGoldResponse) when a revealed answer is absent on r.
ConditionPlan plan_condition(const Condition& c, const PersonaRecord& r);

}  // namespace twinbench

#endif  // TWINBENCH_CONDITION_HPP_

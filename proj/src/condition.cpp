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

#include "twinbench/condition.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "twinbench/error.hpp"

namespace twinbench {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view base_id(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kPersonaOracle: return "persona-oracle";
    case ConditionKind::kPersonaFewShot: return "persona-few-shot";
    case ConditionKind::kPersonaZeroShot: return "persona-zero-shot";
    case ConditionKind::kFewShotOracle: return "few-shot-oracle";
    case ConditionKind::kZeroShot: return "zero-shot";
  }
  return "";
}

}  // namespace

const std::array<Condition, 8>& Condition::all() {
  static const std::array<Condition, 8> conditions = {
      Condition::persona_oracle(),
      Condition::persona_few_shot(QuestionDimension::kNumeracy),
      Condition::persona_few_shot(QuestionDimension::kAnxiety),
      Condition::persona_few_shot(QuestionDimension::kTrustPhys),
      Condition::persona_few_shot(QuestionDimension::kSubjectiveLit),
      Condition::persona_zero_shot(),
      Condition::few_shot_oracle(),
      Condition::zero_shot(),
  };
  return conditions;
}

int Condition::index() const {
  switch (kind_) {
    case ConditionKind::kPersonaOracle: return 0;
    case ConditionKind::kPersonaFewShot: return 1 + static_cast<int>(*withheld_);
    case ConditionKind::kPersonaZeroShot: return 5;
    case ConditionKind::kFewShotOracle: return 6;
    case ConditionKind::kZeroShot: return 7;
  }
  return -1;
}

std::string Condition::id() const {
  std::string out(base_id(kind_));
  if (withheld_) out += "-" + lowercase(question_name(*withheld_));
  return out;
}

std::string Condition::display_name() const {
  std::string out(group_label(group_of(*this)));
  if (withheld_) out += fmt::format(" ({})", question_name(*withheld_));
  return out;
}

Condition parse_condition(std::string_view id) {
  const std::string wanted = lowercase(id);
  for (const Condition& c : Condition::all()) {
    if (c.id() == wanted) return c;
  }
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown condition '{}'", id));
}

std::vector<Condition> parse_condition_list(const std::vector<std::string>& names) {
  std::vector<Condition> out;
  for (const std::string& name : names) {
    const std::string n = lowercase(name);
    if (n == "all") {
      out.insert(out.end(), Condition::all().begin(), Condition::all().end());
    } else if (n == base_id(ConditionKind::kPersonaFewShot)) {
      for (QuestionDimension q : kQuestionOrder) out.push_back(Condition::persona_few_shot(q));
    } else {
      out.push_back(parse_condition(n));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConditionGroup group_of(const Condition& c) {
  switch (c.kind()) {
    case ConditionKind::kPersonaOracle: return ConditionGroup::kPersonaOracle;
    case ConditionKind::kPersonaFewShot: return ConditionGroup::kPersonaFewShot;
    case ConditionKind::kPersonaZeroShot: return ConditionGroup::kPersonaZeroShot;
    case ConditionKind::kFewShotOracle: return ConditionGroup::kFewShotOracle;
    case ConditionKind::kZeroShot: return ConditionGroup::kZeroShot;
  }
  return ConditionGroup::kZeroShot;
}

std::string_view group_label(ConditionGroup g) {
  switch (g) {
    case ConditionGroup::kPersonaOracle: return "Persona Oracle";
    case ConditionGroup::kFewShotOracle: return "Few-shot Oracle";
    case ConditionGroup::kPersonaFewShot: return "Persona Few-shot";
    case ConditionGroup::kPersonaZeroShot: return "Persona Zero-shot";
    case ConditionGroup::kZeroShot: return "Zero-shot";
  }
  return "";
}

std::vector<QuestionDimension> targets_of(const Condition& c) {
  if (c.kind() == ConditionKind::kPersonaFewShot) return {*c.withheld()};
  return {kQuestionOrder.begin(), kQuestionOrder.end()};
}

ConditionPlan plan_condition(const Condition& c, const PersonaRecord& r) {
  ConditionPlan plan;
  plan.condition = c;
  plan.targets = targets_of(c);
  switch (c.kind()) {
    case ConditionKind::kPersonaOracle:
      plan.include_tiers = true;
      plan.revealed.assign(kQuestionOrder.begin(), kQuestionOrder.end());
      break;
    case ConditionKind::kPersonaFewShot:
      plan.include_tiers = true;
      for (QuestionDimension q : kQuestionOrder) {
        if (q != *c.withheld()) plan.revealed.push_back(q);
      }
      break;
    case ConditionKind::kPersonaZeroShot:
      plan.include_tiers = true;
      break;
    case ConditionKind::kFewShotOracle:
      plan.revealed.assign(kQuestionOrder.begin(), kQuestionOrder.end());
      break;
    case ConditionKind::kZeroShot:
      break;
  }
  for (QuestionDimension q : plan.revealed) {
    if (r.gold_response(q) == nullptr) {
      throw Error(ErrorCode::kMissingGoldResponse,
                  fmt::format("persona '{}' has no {} answer required by {}", r.id,
                              question_name(q), c.id()));
    }
  }
  return plan;
}

}  // namespace twinbench

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

#include "twinbench/twin.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "twinbench/error.hpp"
#include "twinbench/templates.hpp"

namespace twinbench {

std::string_view provenance_name(Provenance p) {
  return p == Provenance::kRealUser ? "RealUser" : "Generated";
}

TwinState init_twin(const ConditionPlan& plan, const PersonaRecord& r,
                    const MappingTable& mapping) {
  TwinState t;
  t.persona_id = r.id;
  t.condition = plan.condition;
  if (plan.include_tiers) {
    t.tier_prompts.demographic = render_demographic_template(r.demographic, mapping);
    std::string beh = render_behavioral_template(r.behavioral, mapping);
    if (!beh.empty()) t.tier_prompts.behavioral = std::move(beh);
    if (r.psychological) {
      t.tier_prompts.psychological = render_psychological_template(*r.psychological, mapping);
    }
  }
  return t;
}

TwinState update_twin(const TwinState& t, QuestionDimension q, std::string_view response,
                      Provenance provenance) {
  const bool blank = std::all_of(response.begin(), response.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
  if (blank) {
    throw Error(ErrorCode::kEmptyResponse,
                fmt::format("empty {} response for persona '{}'", question_name(q), t.persona_id));
  }
  TwinState next = t;
  for (ConversationTurn& turn : next.history) {
    if (turn.question == q) turn.staleness_tag = std::string(kStaleTag);
  }
  next.history.push_back({q, std::string(response), provenance, std::nullopt});
  ++next.iteration;
  return next;
}

TwinState prepare_twin(const ConditionPlan& plan, const PersonaRecord& r,
                       const MappingTable& mapping) {
  TwinState t = init_twin(plan, r, mapping);
  for (QuestionDimension q : plan.revealed) {
    const std::string* answer = r.gold_response(q);
    if (answer == nullptr) {
      throw Error(ErrorCode::kMissingGoldResponse,
                  fmt::format("persona '{}' has no {} answer", r.id, question_name(q)));
    }
    t = update_twin(t, q, *answer, Provenance::kRealUser);
  }
  return t;
}

std::vector<ChatMessage> build_chat_messages(const TwinState& t, QuestionDimension target,
                                             const MappingTable& mapping) {
  const auto targets = targets_of(t.condition);
  if (std::find(targets.begin(), targets.end(), target) == targets.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} is not a target of {}", question_name(target), t.condition.id()));
  }

  std::vector<ChatMessage> messages;
  const std::string persona = compose_prompt(t.tier_prompts.demographic,
                                             t.tier_prompts.behavioral,
                                             t.tier_prompts.psychological);
  messages.push_back(
      {"system", persona.empty() ? mapping.minimal_framing
                                 : persona + "\n\n" + mapping.persona_framing});

  std::vector<const ConversationTurn*> turns;
  for (const auto& turn : t.history) turns.push_back(&turn);
  std::stable_sort(turns.begin(), turns.end(), [](const auto* a, const auto* b) {
    return a->question < b->question;
  });
  for (const ConversationTurn* turn : turns) {
    messages.push_back({"user", std::string(question_prompt(turn->question))});
    messages.push_back({"assistant", turn->staleness_tag
                                         ? mapping.stale_prefix + turn->response
                                         : turn->response});
  }
  messages.push_back({"user", std::string(question_prompt(target))});
  return messages;
}

}  // namespace twinbench

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

// The digital twin: composed tier prompts plus an append-only conversation
// history, refined one answered question at a time.

#ifndef TWINBENCH_TWIN_HPP_
#define TWINBENCH_TWIN_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinbench/chat.hpp"
#include "twinbench/condition.hpp"
#include "twinbench/mapping.hpp"
#include "twinbench/persona.hpp"

namespace twinbench {

enum class Provenance { kRealUser, kGenerated };

std::string_view provenance_name(Provenance p);

inline constexpr std::string_view kStaleTag = "possible past data";

struct ConversationTurn {
  QuestionDimension question = QuestionDimension::kNumeracy;
  std::string response;
  Provenance provenance = Provenance::kRealUser;
  // Set once a later turn for the same question supersedes this one.
  std::optional<std::string> staleness_tag;

  bool operator==(const ConversationTurn&) const = default;
};

struct TierPrompts {
  std::optional<std::string> demographic;
  std::optional<std::string> behavioral;
  std::optional<std::string> psychological;

  bool operator==(const TierPrompts&) const = default;
};

struct TwinState {
  std::string persona_id;
  Condition condition = Condition::zero_shot();
  TierPrompts tier_prompts;
  std::vector<ConversationTurn> history;
  int iteration = 0;  // number of update_twin applications

  bool operator==(const TwinState&) const = default;
};

// Renders tier prompts iff plan.include_tiers; empty history, iteration 0.
TwinState init_twin(const ConditionPlan& plan, const PersonaRecord& r,
                    const MappingTable& mapping = MappingTable::builtin());

// Appends one turn. Earlier turns for the same question keep their text and
// position but gain the "possible past data" tag. Throws
// Error(kEmptyResponse) on blank responses.
TwinState update_twin(const TwinState& t, QuestionDimension q, std::string_view response,
                      Provenance provenance);

// init_twin followed by one RealUser update per revealed question, in survey
// order.
TwinState prepare_twin(const ConditionPlan& plan, const PersonaRecord& r,
                       const MappingTable& mapping = MappingTable::builtin());

// Wire transcript for asking `target`: system framing (with the composed tier
// prompt when present), one user/assistant pair per history turn in survey
// order, then the target question verbatim. Throws Error(kInvalidArgument)
// when `target` is not a target of the twin's condition.
std::vector<ChatMessage> build_chat_messages(const TwinState& t, QuestionDimension target,
                                             const MappingTable& mapping = MappingTable::builtin());

}  // namespace twinbench

#endif  // TWINBENCH_TWIN_HPP_

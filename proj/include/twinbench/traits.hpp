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

// Big Five estimation from a twin's generated answers.

#ifndef TWINBENCH_TRAITS_HPP_
#define TWINBENCH_TRAITS_HPP_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "twinbench/chat.hpp"
#include "twinbench/mapping.hpp"
#include "twinbench/persona.hpp"

namespace twinbench {

// "Q: <prompt>\nA: <answer>" blocks in survey order, blank-line separated.
std::string trait_transcript(const std::map<QuestionDimension, std::string>& answers);

std::vector<ChatMessage> trait_messages(const std::string& transcript,
                                        const MappingTable& mapping = MappingTable::builtin());

// Reads "Trait: n" lines (any order, case-insensitive, list markers and
// emphasis ignored). Every trait must appear with one integer in 1..5.
// Ratings are returned in kBigFiveOrder. Throws Error(kUnparsableRating).
std::array<int, 5> parse_trait_ratings(std::string_view reply);

}  // namespace twinbench

#endif  // TWINBENCH_TRAITS_HPP_

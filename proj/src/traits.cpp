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

#include "twinbench/traits.hpp"

#include <fmt/format.h>

#include <cctype>
#include <optional>
#include <sstream>

#include "twinbench/error.hpp"

namespace twinbench {

std::string trait_transcript(const std::map<QuestionDimension, std::string>& answers) {
  std::string out;
  for (QuestionDimension q : kQuestionOrder) {
    auto it = answers.find(q);
    if (it == answers.end()) continue;
    if (!out.empty()) out += "\n\n";
    out += fmt::format("Q: {}\nA: {}", question_prompt(q), it->second);
  }
  return out;
}

std::vector<ChatMessage> trait_messages(const std::string& transcript, const MappingTable& mapping) {
  return {{"system", mapping.trait_system_prompt},
          {"user", substitute(mapping.trait_user_prompt, "transcript", transcript)}};
}

namespace {

std::string strip(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '*' && c != '_' && c != '`') out.push_back(c);
  }
  const size_t b = out.find_first_not_of(" \t\r-•");
  if (b == std::string::npos) return {};
  const size_t e = out.find_last_not_of(" \t\r.");
  return out.substr(b, e - b + 1);
}

}  // namespace

std::array<int, 5> parse_trait_ratings(std::string_view reply) {
  std::array<std::optional<int>, 5> got;
  std::istringstream in{std::string(reply)};
  for (std::string line; std::getline(in, line);) {
    const std::string s = strip(line);
    const size_t colon = s.find(':');
    if (colon == std::string::npos) continue;
    BigFiveTrait trait;
    try {
      trait = parse_trait(strip(s.substr(0, colon)));
    } catch (const Error&) {
      continue;  // not a rating line
    }
    const std::string value = strip(s.substr(colon + 1));
    if (value.size() != 1 || value[0] < '1' || value[0] > '5') {
      throw Error(ErrorCode::kUnparsableRating,
                  fmt::format("rating for {} is not an integer in 1..5: '{}'", label(trait), value));
    }
    auto& slot = got[static_cast<size_t>(trait)];
    const int v = value[0] - '0';
    if (slot && *slot != v) {
      throw Error(ErrorCode::kUnparsableRating, fmt::format("conflicting ratings for {}", label(trait)));
    }
    slot = v;
  }
  std::array<int, 5> out{};
  for (BigFiveTrait t : kBigFiveOrder) {
    const auto& slot = got[static_cast<size_t>(t)];
    if (!slot) throw Error(ErrorCode::kUnparsableRating, fmt::format("no rating for {}", label(t)));
    out[static_cast<size_t>(t)] = *slot;
  }
  return out;
}

}  // namespace twinbench

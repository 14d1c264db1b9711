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

#ifndef TWINBENCH_MAPPING_HPP_
#define TWINBENCH_MAPPING_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace twinbench {

// Phrase tables that turn tier values into second-person sentences, plus the
// fixed framing texts used around the twin's chat transcript. Loaded from a
// versioned JSON document (see docs/mapping-schema.md). Validation requires
// every Likert level and every enum value to be covered, so rendering is
// total over valid tiers.
struct MappingTable {
  struct CountPhrases {
    std::string zero;
    std::string one;
    std::string other;  // contains {n}
  };

  std::string version;

  std::string age_sentence;     // contains {age}
  std::string possession_lead;  // "You have"
  std::map<std::string, std::string, std::less<>> sex;
  // Keyed by enum identifier. PreferNotToAnswer / Unsure are never rendered.
  std::map<std::string, std::string, std::less<>> race;
  std::map<std::string, std::string, std::less<>> education;
  std::map<std::string, std::string, std::less<>> income;

  CountPhrases prescription_count;
  std::string has_physician;
  std::string no_physician;
  CountPhrases physician_visits;
  CountPhrases activity_hours;
  std::array<std::string, 5> eating_habits;
  std::map<std::string, std::string, std::less<>> smoking;
  std::map<std::string, std::string, std::less<>> drinking;
  std::array<std::string, 5> health_consciousness;
  std::array<std::string, 5> overall_health;

  std::string trait_sentence;  // contains {level} and {trait}
  std::array<std::string, 5> agreement_levels;
  std::map<std::string, std::string, std::less<>> trait_descriptions;

  std::string persona_framing;
  std::string minimal_framing;
  std::string stale_prefix;

  std::string trait_prompt_version;
  std::string trait_system_prompt;
  std::string trait_user_prompt;  // contains {transcript}

  // The table shipped with the library (data/mapping_v1.json).
  static const MappingTable& builtin();
  static MappingTable from_json_text(std::string_view text);
  static MappingTable load(const std::filesystem::path& path);
};

// Replaces every occurrence of `{key}` with `value`.
std::string substitute(std::string_view templ, std::string_view key, std::string_view value);

}  // namespace twinbench

#endif  // TWINBENCH_MAPPING_HPP_

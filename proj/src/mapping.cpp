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

#include "twinbench/mapping.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "builtin_mapping.hpp"
#include "twinbench/error.hpp"
#include "twinbench/persona.hpp"

namespace twinbench {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaMismatch, fmt::format("mapping table: {}: {}", path, what));
}

const json& child(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) schema_error(path, "missing key '" + key + "'");
  return node.at(key);
}

std::string text(const json& node, const std::string& key, const std::string& path) {
  const json& v = child(node, key, path);
  if (!v.is_string()) schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::array<std::string, 5> likert(const json& node, const std::string& key,
                                  const std::string& path) {
  const json& table = child(node, key, path);
  std::array<std::string, 5> out;
  for (int level = 1; level <= 5; ++level) {
    out[level - 1] = text(table, std::to_string(level), path + "." + key);
  }
  return out;
}

template <typename E, size_t N>
std::map<std::string, std::string, std::less<>> enum_table(const json& node,
                                                           const std::string& key,
                                                           const std::string& path,
                                                           const std::array<E, N>& required) {
  const json& table = child(node, key, path);
  std::map<std::string, std::string, std::less<>> out;
  for (E v : required) {
    const std::string id(identifier(v));
    out.emplace(id, text(table, id, path + "." + key));
  }
  return out;
}

MappingTable::CountPhrases counts(const json& node, const std::string& key,
                                  const std::string& path) {
  const json& table = child(node, key, path);
  const std::string p = path + "." + key;
  return {text(table, "0", p), text(table, "1", p), text(table, "other", p)};
}

constexpr std::array<Sex, 2> kAllSexes = {Sex::kMale, Sex::kFemale};
constexpr std::array<Race, 7> kRenderedRaces = {
    Race::kWhite,           Race::kBlackOrAfricanAmerican, Race::kAsian, Race::kNativeAmerican,
    Race::kPacificIslander, Race::kMultiracial,            Race::kOther};
constexpr std::array<Education, 5> kAllEducation = {
    Education::kLessThanHighSchool, Education::kHighSchool, Education::kSomeCollege,
    Education::kCollegeGraduate, Education::kGraduateDegree};
constexpr std::array<Income, 6> kRenderedIncomes = {Income::kBelow20k,  Income::k20kTo35k,
                                                    Income::k35kTo50k,  Income::k50kTo75k,
                                                    Income::k75kTo90k,  Income::k90kOrMore};
constexpr std::array<Frequency, 5> kAllFrequencies = {Frequency::kNever, Frequency::kRarely,
                                                      Frequency::kSometimes, Frequency::kOften,
                                                      Frequency::kDaily};

}  // namespace

std::string substitute(std::string_view templ, std::string_view key, std::string_view value) {
  const std::string needle = "{" + std::string(key) + "}";
  std::string out;
  size_t pos = 0;
  while (true) {
    const size_t hit = templ.find(needle, pos);
    if (hit == std::string_view::npos) break;
    out.append(templ.substr(pos, hit - pos));
    out.append(value);
    pos = hit + needle.size();
  }
  out.append(templ.substr(pos));
  return out;
}

MappingTable MappingTable::from_json_text(std::string_view text_in) {
  json doc;
  try {
    doc = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("mapping table: {}", e.what()));
  }
  MappingTable m;
  m.version = text(doc, "version", "$");

  const json& dem = child(doc, "demographic", "$");
  m.age_sentence = text(dem, "age", "demographic");
  m.possession_lead = text(dem, "possession_lead", "demographic");
  m.sex = enum_table(dem, "sex", "demographic", kAllSexes);
  m.race = enum_table(dem, "race", "demographic", kRenderedRaces);
  m.education = enum_table(dem, "education", "demographic", kAllEducation);
  m.income = enum_table(dem, "income", "demographic", kRenderedIncomes);

  const json& beh = child(doc, "behavioral", "$");
  m.prescription_count = counts(beh, "prescription_count", "behavioral");
  const json& phys = child(beh, "has_primary_physician", "behavioral");
  m.has_physician = text(phys, "true", "behavioral.has_primary_physician");
  m.no_physician = text(phys, "false", "behavioral.has_primary_physician");
  m.physician_visits = counts(beh, "physician_visits_2yr", "behavioral");
  m.activity_hours = counts(beh, "activity_hours_per_week", "behavioral");
  m.eating_habits = likert(beh, "eating_habits", "behavioral");
  m.smoking = enum_table(beh, "smoking_frequency", "behavioral", kAllFrequencies);
  m.drinking = enum_table(beh, "drinking_frequency", "behavioral", kAllFrequencies);
  m.health_consciousness = likert(beh, "health_consciousness", "behavioral");
  m.overall_health = likert(beh, "overall_health", "behavioral");

  const json& psy = child(doc, "psychological", "$");
  m.trait_sentence = text(psy, "sentence", "psychological");
  m.agreement_levels = likert(psy, "levels", "psychological");
  m.trait_descriptions = enum_table(psy, "traits", "psychological", kBigFiveOrder);

  const json& framing = child(doc, "framing", "$");
  m.persona_framing = text(framing, "persona", "framing");
  m.minimal_framing = text(framing, "minimal", "framing");
  m.stale_prefix = text(framing, "stale_prefix", "framing");

  const json& traits = child(doc, "trait_estimation", "$");
  m.trait_prompt_version = text(traits, "version", "trait_estimation");
  m.trait_system_prompt = text(traits, "system", "trait_estimation");
  m.trait_user_prompt = text(traits, "user", "trait_estimation");
  if (m.trait_user_prompt.find("{transcript}") == std::string::npos) {
    schema_error("trait_estimation.user", "missing {transcript} placeholder");
  }
  return m;
}

MappingTable MappingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile,
                fmt::format("cannot read mapping table '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

const MappingTable& MappingTable::builtin() {
  static const MappingTable table = from_json_text(internal::kBuiltinMappingJson);
  return table;
}

}  // namespace twinbench

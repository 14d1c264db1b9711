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

#include "twinbench/templates.hpp"

#include <vector>

namespace twinbench {
namespace {

std::string lookup(const std::map<std::string, std::string, std::less<>>& table,
                   std::string_view key) {
  const auto it = table.find(key);
  return it == table.end() ? std::string() : it->second;
}

std::string count_sentence(const MappingTable::CountPhrases& phrases, double n) {
  if (n == 0) return phrases.zero;
  if (n == 1) return phrases.one;
  return substitute(phrases.other, "n", format_real(n));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.append(sep);
    out.append(p);
  }
  return out;
}

}  // namespace

std::string render_demographic_template(const DemographicTier& tier,
                                        const MappingTable& mapping) {
  std::string first = substitute(mapping.age_sentence, "age", std::to_string(tier.age));
  for (const std::string& part : {lookup(mapping.sex, identifier(tier.sex)),
                                  lookup(mapping.race, identifier(tier.race))}) {
    if (!part.empty()) first += ", " + part;
  }
  first += ".";

  const std::string holdings = join({lookup(mapping.education, identifier(tier.education)),
                                     lookup(mapping.income, identifier(tier.income))},
                                    " and ");
  if (holdings.empty()) return first;
  return first + " " + mapping.possession_lead + " " + holdings + ".";
}

std::string render_behavioral_template(const BehavioralTier& tier, const MappingTable& mapping) {
  std::vector<std::string> sentences;
  if (tier.prescription_count) {
    sentences.push_back(count_sentence(mapping.prescription_count, *tier.prescription_count));
  }
  if (tier.has_primary_physician) {
    sentences.push_back(*tier.has_primary_physician ? mapping.has_physician
                                                    : mapping.no_physician);
  }
  if (tier.physician_visits_2yr) {
    sentences.push_back(count_sentence(mapping.physician_visits, *tier.physician_visits_2yr));
  }
  if (tier.activity_hours_per_week) {
    sentences.push_back(count_sentence(mapping.activity_hours, *tier.activity_hours_per_week));
  }
  if (tier.eating_habits) sentences.push_back(mapping.eating_habits[*tier.eating_habits - 1]);
  if (tier.smoking_frequency) {
    sentences.push_back(lookup(mapping.smoking, identifier(*tier.smoking_frequency)));
  }
  if (tier.drinking_frequency) {
    sentences.push_back(lookup(mapping.drinking, identifier(*tier.drinking_frequency)));
  }
  if (tier.health_consciousness) {
    sentences.push_back(mapping.health_consciousness[*tier.health_consciousness - 1]);
  }
  if (tier.overall_health) sentences.push_back(mapping.overall_health[*tier.overall_health - 1]);
  return join(sentences, " ");
}

std::string render_psychological_template(const PsychologicalTier& tier,
                                          const MappingTable& mapping) {
  std::vector<std::string> sentences;
  for (BigFiveTrait trait : kBigFiveOrder) {
    std::string s = substitute(mapping.trait_sentence, "level",
                               mapping.agreement_levels[tier.rating(trait) - 1]);
    sentences.push_back(
        substitute(s, "trait", lookup(mapping.trait_descriptions, identifier(trait))));
  }
  return join(sentences, " ");
}

std::string compose_prompt(const std::optional<std::string>& demographic,
                           const std::optional<std::string>& behavioral,
                           const std::optional<std::string>& psychological) {
  std::vector<std::string> parts;
  for (const auto* tier : {&demographic, &behavioral, &psychological}) {
    if (tier->has_value()) parts.push_back(**tier);
  }
  return join(parts, "\n\n");
}

}  // namespace twinbench

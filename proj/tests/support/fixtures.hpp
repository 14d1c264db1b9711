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

// Shared persona fixtures for the unit and acceptance suites.

#ifndef TWINBENCH_TESTS_FIXTURES_HPP_
#define TWINBENCH_TESTS_FIXTURES_HPP_

#include <map>
#include <random>
#include <string>

#include "twinbench/persona.hpp"

namespace twinbench::testing {

// Raw row for the worked persona: 25-year-old male, Black or African
// American, college graduate, $20,000-$34,999.
inline std::map<std::string, std::string> worked_example_row() {
  return {
      {"id", "p-0001"},
      {"age", "25"},
      {"sex", "Male"},
      {"race", "Black or African American"},
      {"education", "College graduate"},
      {"income", "$20,000-$34,999"},
      {"prescription_count", "1"},
      {"has_primary_physician", "Yes"},
      {"physician_visits_2yr", "4"},
      {"activity_hours_per_week", "2.5"},
      {"eating_habits", "3"},
      {"smoking_frequency", "Never"},
      {"drinking_frequency", "Sometimes"},
      {"health_consciousness", "3"},
      {"overall_health", "4"},
      {"big5_extraverted", "5"},
      {"big5_agreeable", "4"},
      {"big5_conscientious", "3"},
      {"big5_stable", "5"},
      {"big5_open", "3"},
      {"text_numeracy", "I have asthma which often has me rush to the doctor for check ups."},
      {"text_anxiety", "To find out what is wrong with me and sometimes I don't want to hear the truth."},
      {"text_trustphys", "Sometimes I think they take things out of control because everyone's body is different."},
      {"text_subjectivelit", "When I visit a doctor I try to get as much information that is needed for my health."},
      {"score_trust", "3.25"},
  };
}

inline PersonaRecord worked_example() { return normalize_record(worked_example_row()); }

// Random valid persona with distinct, id-tagged gold answers.
inline PersonaRecord random_persona(std::mt19937_64& rng, const std::string& id) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  static const char* kRaces[] = {"White", "Black or African American", "Asian",
                                 "Native American or American Indian",
                                 "Native Hawaiian or Pacific Islander",
                                 "Multiracial or Biracial", "Other", "Prefer not to answer"};
  static const char* kEducation[] = {"Less than high school", "High school graduate",
                                     "Some college", "College graduate", "Graduate degree"};
  static const char* kIncome[] = {"Less than $20,000", "$20,000-$34,999", "$35,000-$49,999",
                                  "$50,000-$74,999",   "$75,000-$89,999", "$90,000 or more",
                                  "Unsure",            "Prefer not to answer"};
  static const char* kFreq[] = {"Never", "Rarely", "Sometimes", "Often", "Daily"};
  static const char* kWords[] = {"doctor", "visit", "worried", "numbers", "trust", "nurse",
                                 "pills",  "clinic", "results", "waiting", "blood", "pressure"};
  std::map<std::string, std::string> row{
      {"id", id},
      {"age", std::to_string(pick(18, 99))},
      {"sex", pick(0, 1) ? "Male" : "Female"},
      {"race", kRaces[pick(0, 7)]},
      {"education", kEducation[pick(0, 4)]},
      {"income", kIncome[pick(0, 7)]},
      {"prescription_count", std::to_string(pick(0, 6))},
      {"has_primary_physician", pick(0, 1) ? "Yes" : "No"},
      {"physician_visits_2yr", std::to_string(pick(0, 10))},
      {"activity_hours_per_week", std::to_string(pick(0, 20))},
      {"eating_habits", std::to_string(pick(1, 5))},
      {"smoking_frequency", kFreq[pick(0, 4)]},
      {"drinking_frequency", kFreq[pick(0, 4)]},
      {"health_consciousness", std::to_string(pick(1, 5))},
      {"overall_health", std::to_string(pick(1, 5))},
      {"score_trust", std::to_string(pick(1, 5))},
  };
  for (const char* trait : {"extraverted", "agreeable", "conscientious", "stable", "open"}) {
    row[std::string("big5_") + trait] = std::to_string(pick(1, 5));
  }
  for (const char* q : {"numeracy", "anxiety", "trustphys", "subjectivelit"}) {
    std::string text = std::string("[") + id + "/" + q + "]";
    const int words = pick(4, 14);
    for (int i = 0; i < words; ++i) text += std::string(" ") + kWords[pick(0, 11)];
    row[std::string("text_") + q] = text + ".";
  }
  return normalize_record(row);
}

}  // namespace twinbench::testing

#endif  // TWINBENCH_TESTS_FIXTURES_HPP_

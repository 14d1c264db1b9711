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

// Persona records: the three attribute tiers (demographic, behavioral,
// psychological), the gold free-text answers to the four survey questions and
// the psychometric gold scores used as downstream labels.

#ifndef TWINBENCH_PERSONA_HPP_
#define TWINBENCH_PERSONA_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twinbench {

enum class Sex { kMale, kFemale };

enum class Race {
  kWhite,
  kBlackOrAfricanAmerican,
  kAsian,
  kNativeAmerican,
  kPacificIslander,
  kMultiracial,
  kOther,
  kPreferNotToAnswer,
};

// Ordered from lowest to highest attainment.
enum class Education {
  kLessThanHighSchool,
  kHighSchool,
  kSomeCollege,
  kCollegeGraduate,
  kGraduateDegree,
};

// Ordered brackets; kUnsure and kPreferNotToAnswer sort after every bracket
// and are not comparable to them.
enum class Income {
  kBelow20k,
  k20kTo35k,
  k35kTo50k,
  k50kTo75k,
  k75kTo90k,
  k90kOrMore,
  kUnsure,
  kPreferNotToAnswer,
};

enum class Frequency { kNever, kRarely, kSometimes, kOften, kDaily };

enum class BigFiveTrait { kExtraverted, kAgreeable, kConscientious, kStable, kOpen };

inline constexpr std::array<BigFiveTrait, 5> kBigFiveOrder = {
    BigFiveTrait::kExtraverted, BigFiveTrait::kAgreeable, BigFiveTrait::kConscientious,
    BigFiveTrait::kStable, BigFiveTrait::kOpen};

enum class QuestionDimension { kNumeracy, kAnxiety, kTrustPhys, kSubjectiveLit };

// Survey question order, used for the update loop and chat serialization.
inline constexpr std::array<QuestionDimension, 4> kQuestionOrder = {
    QuestionDimension::kNumeracy, QuestionDimension::kAnxiety,
    QuestionDimension::kTrustPhys, QuestionDimension::kSubjectiveLit};

// Column order used by the similarity and ROUGE report tables.
inline constexpr std::array<QuestionDimension, 4> kReportQuestionOrder = {
    QuestionDimension::kAnxiety, QuestionDimension::kNumeracy,
    QuestionDimension::kSubjectiveLit, QuestionDimension::kTrustPhys};

// Exact survey wording posed to respondents (and to the twin).
std::string_view question_prompt(QuestionDimension q);
// Identifier such as "Numeracy" or "TrustPhys".
std::string_view question_name(QuestionDimension q);
// Short table label: N, A, TP, SL.
std::string_view question_abbrev(QuestionDimension q);
QuestionDimension parse_question(std::string_view text);

// Canonical human labels ("Black or African American", "$20,000-$34,999").
std::string_view label(Sex v);
std::string_view label(Race v);
std::string_view label(Education v);
std::string_view label(Income v);
std::string_view label(Frequency v);
std::string_view label(BigFiveTrait v);

// Enum identifiers without the k prefix ("BlackOrAfricanAmerican").
std::string_view identifier(Sex v);
std::string_view identifier(Race v);
std::string_view identifier(Education v);
std::string_view identifier(Income v);
std::string_view identifier(Frequency v);
std::string_view identifier(BigFiveTrait v);

// Accept either the label or the identifier, case-insensitively.
// Throw Error(kUnknownEnumValue) otherwise.
Sex parse_sex(std::string_view text);
Race parse_race(std::string_view text);
Education parse_education(std::string_view text);
Income parse_income(std::string_view text);
Frequency parse_frequency(std::string_view text);
BigFiveTrait parse_trait(std::string_view text);

struct DemographicTier {
  int age = 18;
  Sex sex = Sex::kMale;
  Race race = Race::kPreferNotToAnswer;
  Education education = Education::kLessThanHighSchool;
  Income income = Income::kPreferNotToAnswer;

  bool operator==(const DemographicTier&) const = default;
};

// Every field is optional; absent fields are omitted from rendered prompts.
struct BehavioralTier {
  std::optional<int> prescription_count;
  std::optional<bool> has_primary_physician;
  std::optional<int> physician_visits_2yr;
  std::optional<double> activity_hours_per_week;
  std::optional<int> eating_habits;
  std::optional<Frequency> smoking_frequency;
  std::optional<Frequency> drinking_frequency;
  std::optional<int> health_consciousness;
  std::optional<int> overall_health;

  bool operator==(const BehavioralTier&) const = default;
};

// Self-rated Big Five, Likert 1..5, all five traits always present.
class PsychologicalTier {
 public:
  PsychologicalTier() = default;

  // Requires each trait exactly once; order of `ratings` is irrelevant.
  static PsychologicalTier from_ratings(
      std::span<const std::pair<BigFiveTrait, int>> ratings);

  int rating(BigFiveTrait trait) const { return ratings_[static_cast<size_t>(trait)]; }

  bool operator==(const PsychologicalTier&) const = default;

 private:
  std::array<int, 5> ratings_{3, 3, 3, 3, 3};
};

struct PersonaRecord {
  std::string id;
  DemographicTier demographic;
  BehavioralTier behavioral;
  std::optional<PsychologicalTier> psychological;
  std::map<QuestionDimension, std::string> gold_responses;
  std::map<std::string, double> gold_scores;
  // Schema field names of optional inputs that were absent.
  std::set<std::string> missing_fields;

  const std::string* gold_response(QuestionDimension q) const;

  bool operator==(const PersonaRecord&) const = default;
};

// Column names of the corpus schema.
namespace field {
inline constexpr std::string_view kId = "id";
inline constexpr std::string_view kAge = "age";
inline constexpr std::string_view kSex = "sex";
inline constexpr std::string_view kRace = "race";
inline constexpr std::string_view kEducation = "education";
inline constexpr std::string_view kIncome = "income";
inline constexpr std::string_view kPrescriptionCount = "prescription_count";
inline constexpr std::string_view kHasPrimaryPhysician = "has_primary_physician";
inline constexpr std::string_view kPhysicianVisits = "physician_visits_2yr";
inline constexpr std::string_view kActivityHours = "activity_hours_per_week";
inline constexpr std::string_view kEatingHabits = "eating_habits";
inline constexpr std::string_view kSmoking = "smoking_frequency";
inline constexpr std::string_view kDrinking = "drinking_frequency";
inline constexpr std::string_view kHealthConsciousness = "health_consciousness";
inline constexpr std::string_view kOverallHealth = "overall_health";
inline constexpr std::string_view kScorePrefix = "score_";
}  // namespace field

std::string trait_field(BigFiveTrait trait);        // "big5_extraverted"
std::string gold_text_field(QuestionDimension q);   // "text_numeracy"

// Every fixed column in canonical order (gold score columns excluded).
const std::vector<std::string>& schema_columns();

// Parses and validates one raw row. Empty strings count as absent.
// Rejects (never clamps) out-of-range values.
PersonaRecord normalize_record(const std::map<std::string, std::string>& raw);

// Inverse of normalize_record using canonical labels; absent fields are
// left out so that normalize_record(to_raw(r)) == r.
std::map<std::string, std::string> to_raw(const PersonaRecord& record);

// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

}  // namespace twinbench

#endif  // TWINBENCH_PERSONA_HPP_

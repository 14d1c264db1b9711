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

#include "twinbench/persona.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "twinbench/error.hpp"

namespace twinbench {
namespace {

template <typename E>
struct EnumEntry {
  E value;
  std::string_view identifier;
  std::string_view label;
};

constexpr EnumEntry<Sex> kSexes[] = {
    {Sex::kMale, "Male", "Male"},
    {Sex::kFemale, "Female", "Female"},
};

constexpr EnumEntry<Race> kRaces[] = {
    {Race::kWhite, "White", "White"},
    {Race::kBlackOrAfricanAmerican, "BlackOrAfricanAmerican", "Black or African American"},
    {Race::kAsian, "Asian", "Asian"},
    {Race::kNativeAmerican, "NativeAmerican", "Native American or American Indian"},
    {Race::kPacificIslander, "PacificIslander", "Native Hawaiian or Pacific Islander"},
    {Race::kMultiracial, "Multiracial", "Multiracial or Biracial"},
    {Race::kOther, "Other", "Other"},
    {Race::kPreferNotToAnswer, "PreferNotToAnswer", "Prefer not to answer"},
};

constexpr EnumEntry<Education> kEducations[] = {
    {Education::kLessThanHighSchool, "LessThanHighSchool", "Less than high school"},
    {Education::kHighSchool, "HighSchool", "High school graduate"},
    {Education::kSomeCollege, "SomeCollege", "Some college"},
    {Education::kCollegeGraduate, "CollegeGraduate", "College graduate"},
    {Education::kGraduateDegree, "GraduateDegree", "Graduate degree"},
};

constexpr EnumEntry<Income> kIncomes[] = {
    {Income::kBelow20k, "Below20k", "Less than $20,000"},
    {Income::k20kTo35k, "20kTo35k", "$20,000-$34,999"},
    {Income::k35kTo50k, "35kTo50k", "$35,000-$49,999"},
    {Income::k50kTo75k, "50kTo75k", "$50,000-$74,999"},
    {Income::k75kTo90k, "75kTo90k", "$75,000-$89,999"},
    {Income::k90kOrMore, "90kOrMore", "$90,000 or more"},
    {Income::kUnsure, "Unsure", "Unsure"},
    {Income::kPreferNotToAnswer, "PreferNotToAnswer", "Prefer not to answer"},
};

constexpr EnumEntry<Frequency> kFrequencies[] = {
    {Frequency::kNever, "Never", "Never"},
    {Frequency::kRarely, "Rarely", "Rarely"},
    {Frequency::kSometimes, "Sometimes", "Sometimes"},
    {Frequency::kOften, "Often", "Often"},
    {Frequency::kDaily, "Daily", "Daily"},
};

constexpr EnumEntry<BigFiveTrait> kTraits[] = {
    {BigFiveTrait::kExtraverted, "Extraverted", "Extraverted"},
    {BigFiveTrait::kAgreeable, "Agreeable", "Agreeable"},
    {BigFiveTrait::kConscientious, "Conscientious", "Conscientious"},
    {BigFiveTrait::kStable, "Stable", "Stable"},
    {BigFiveTrait::kOpen, "Open", "Open"},
};

struct QuestionEntry {
  QuestionDimension value;
  std::string_view name;
  std::string_view abbrev;
  std::string_view prompt;
};

constexpr QuestionEntry kQuestions[] = {
    {QuestionDimension::kNumeracy, "Numeracy", "N",
     "In a few sentences, please describe an experience in your life that demonstrated your "
     "knowledge of health or medical issues."},
    {QuestionDimension::kAnxiety, "Anxiety", "A",
     "In a few sentences, please describe what makes you feel most anxious or worried when "
     "visiting the doctor's office."},
    {QuestionDimension::kTrustPhys, "TrustPhys", "TP",
     "In a few sentences, please explain the reasons why you trust or distrust your primary "
     "care physician. If you do not have a primary care physician, please answer in regard to "
     "doctors in general."},
    {QuestionDimension::kSubjectiveLit, "SubjectiveLit", "SL",
     "In a few sentences, please describe to what degree do you feel you have the capacity to "
     "obtain, process, and understand basic health information and services needed to make "
     "appropriate health decisions?"},
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename E, size_t N>
const EnumEntry<E>& entry_of(const EnumEntry<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e;
  }
  return table[0];
}

template <typename E, size_t N>
E parse_enum(const EnumEntry<E> (&table)[N], std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  for (const auto& e : table) {
    if (iequals(t, e.label) || iequals(t, e.identifier)) return e.value;
  }
  throw Error(ErrorCode::kUnknownEnumValue,
              fmt::format("unknown {} value '{}'", what, std::string(text)));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

long long parse_integer(std::string_view text, std::string_view field_name) {
  const std::string_view t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kMalformedValue,
                fmt::format("{}: '{}' is not an integer", field_name, std::string(text)));
  }
  return value;
}

double parse_double(std::string_view text, std::string_view field_name) {
  const std::string t(trim(text));
  size_t used = 0;
  double value = 0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kMalformedValue,
                fmt::format("{}: '{}' is not a finite number", field_name, t));
  }
  return value;
}

int parse_bounded(std::string_view text, std::string_view field_name, long long lo, long long hi) {
  const long long v = parse_integer(text, field_name);
  if (v < lo || v > hi) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("{}: {} outside [{}, {}]", field_name, v, lo, hi));
  }
  return static_cast<int>(v);
}

constexpr long long kMaxCount = 1'000'000;

int parse_likert(std::string_view text, std::string_view field_name) {
  return parse_bounded(text, field_name, 1, 5);
}

bool parse_bool(std::string_view text, std::string_view field_name) {
  const std::string_view t = trim(text);
  for (std::string_view yes : {"yes", "true", "1", "y"}) {
    if (iequals(t, yes)) return true;
  }
  for (std::string_view no : {"no", "false", "0", "n"}) {
    if (iequals(t, no)) return false;
  }
  throw Error(ErrorCode::kUnknownEnumValue,
              fmt::format("{}: '{}' is not a yes/no value", field_name, std::string(text)));
}

class RawRow {
 public:
  explicit RawRow(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  // Present and non-empty after trimming.
  std::optional<std::string_view> get(std::string_view name) const {
    const auto it = raw_.find(std::string(name));
    if (it == raw_.end()) return std::nullopt;
    const std::string_view v = trim(it->second);
    if (v.empty()) return std::nullopt;
    return v;
  }

  std::string_view require(std::string_view name) const {
    auto v = get(name);
    if (!v) {
      throw Error(ErrorCode::kMissingRequiredField,
                  fmt::format("missing required field '{}'", name));
    }
    return *v;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

}  // namespace

std::string_view question_prompt(QuestionDimension q) {
  return kQuestions[static_cast<size_t>(q)].prompt;
}
std::string_view question_name(QuestionDimension q) {
  return kQuestions[static_cast<size_t>(q)].name;
}
std::string_view question_abbrev(QuestionDimension q) {
  return kQuestions[static_cast<size_t>(q)].abbrev;
}

QuestionDimension parse_question(std::string_view text) {
  const std::string_view t = trim(text);
  for (const auto& e : kQuestions) {
    if (iequals(t, e.name) || iequals(t, e.abbrev)) return e.value;
  }
  throw Error(ErrorCode::kUnknownEnumValue,
              fmt::format("unknown question dimension '{}'", std::string(text)));
}

std::string_view label(Sex v) { return entry_of(kSexes, v).label; }
std::string_view label(Race v) { return entry_of(kRaces, v).label; }
std::string_view label(Education v) { return entry_of(kEducations, v).label; }
std::string_view label(Income v) { return entry_of(kIncomes, v).label; }
std::string_view label(Frequency v) { return entry_of(kFrequencies, v).label; }
std::string_view label(BigFiveTrait v) { return entry_of(kTraits, v).label; }

std::string_view identifier(Sex v) { return entry_of(kSexes, v).identifier; }
std::string_view identifier(Race v) { return entry_of(kRaces, v).identifier; }
std::string_view identifier(Education v) { return entry_of(kEducations, v).identifier; }
std::string_view identifier(Income v) { return entry_of(kIncomes, v).identifier; }
std::string_view identifier(Frequency v) { return entry_of(kFrequencies, v).identifier; }
std::string_view identifier(BigFiveTrait v) { return entry_of(kTraits, v).identifier; }

Sex parse_sex(std::string_view text) { return parse_enum(kSexes, text, "sex"); }
Race parse_race(std::string_view text) { return parse_enum(kRaces, text, "race"); }
Education parse_education(std::string_view text) {
  return parse_enum(kEducations, text, "education");
}
Income parse_income(std::string_view text) { return parse_enum(kIncomes, text, "income"); }
Frequency parse_frequency(std::string_view text) {
  return parse_enum(kFrequencies, text, "frequency");
}
BigFiveTrait parse_trait(std::string_view text) { return parse_enum(kTraits, text, "trait"); }

PsychologicalTier PsychologicalTier::from_ratings(
    std::span<const std::pair<BigFiveTrait, int>> ratings) {
  PsychologicalTier tier;
  std::array<bool, 5> seen{};
  for (const auto& [trait, value] : ratings) {
    const auto idx = static_cast<size_t>(trait);
    if (seen[idx]) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("trait {} given twice", identifier(trait)));
    }
    if (value < 1 || value > 5) {
      throw Error(ErrorCode::kOutOfRange,
                  fmt::format("trait {}: {} outside [1, 5]", identifier(trait), value));
    }
    seen[idx] = true;
    tier.ratings_[idx] = value;
  }
  for (BigFiveTrait trait : kBigFiveOrder) {
    if (!seen[static_cast<size_t>(trait)]) {
      throw Error(ErrorCode::kMissingRequiredField,
                  fmt::format("missing trait {}", identifier(trait)));
    }
  }
  return tier;
}

const std::string* PersonaRecord::gold_response(QuestionDimension q) const {
  const auto it = gold_responses.find(q);
  return it == gold_responses.end() ? nullptr : &it->second;
}

std::string trait_field(BigFiveTrait trait) {
  return "big5_" + lowercase(identifier(trait));
}

std::string gold_text_field(QuestionDimension q) {
  return "text_" + lowercase(question_name(q));
}

const std::vector<std::string>& schema_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c;
    for (std::string_view f :
         {field::kId, field::kAge, field::kSex, field::kRace, field::kEducation, field::kIncome,
          field::kPrescriptionCount, field::kHasPrimaryPhysician, field::kPhysicianVisits,
          field::kActivityHours, field::kEatingHabits, field::kSmoking, field::kDrinking,
          field::kHealthConsciousness, field::kOverallHealth}) {
      c.emplace_back(f);
    }
    for (BigFiveTrait t : kBigFiveOrder) c.push_back(trait_field(t));
    for (QuestionDimension q : kQuestionOrder) c.push_back(gold_text_field(q));
    return c;
  }();
  return columns;
}

PersonaRecord normalize_record(const std::map<std::string, std::string>& raw) {
  const RawRow row(raw);
  PersonaRecord r;
  r.id = std::string(row.require(field::kId));

  auto& d = r.demographic;
  d.age = parse_bounded(row.require(field::kAge), field::kAge, 18, 99);
  d.sex = parse_sex(row.require(field::kSex));
  d.education = parse_education(row.require(field::kEducation));
  if (auto v = row.get(field::kRace)) {
    d.race = parse_race(*v);
  } else {
    d.race = Race::kPreferNotToAnswer;
    r.missing_fields.emplace(field::kRace);
  }
  if (auto v = row.get(field::kIncome)) {
    d.income = parse_income(*v);
  } else {
    d.income = Income::kPreferNotToAnswer;
    r.missing_fields.emplace(field::kIncome);
  }

  auto& b = r.behavioral;
  auto optional_field = [&](std::string_view name, auto parse) {
    using T = decltype(parse(std::string_view{}));
    std::optional<T> out;
    if (auto v = row.get(name)) {
      out = parse(*v);
    } else {
      r.missing_fields.emplace(name);
    }
    return out;
  };
  b.prescription_count = optional_field(field::kPrescriptionCount, [](std::string_view v) {
    return parse_bounded(v, field::kPrescriptionCount, 0, kMaxCount);
  });
  b.has_primary_physician = optional_field(field::kHasPrimaryPhysician, [](std::string_view v) {
    return parse_bool(v, field::kHasPrimaryPhysician);
  });
  b.physician_visits_2yr = optional_field(field::kPhysicianVisits, [](std::string_view v) {
    return parse_bounded(v, field::kPhysicianVisits, 0, kMaxCount);
  });
  b.activity_hours_per_week = optional_field(field::kActivityHours, [](std::string_view v) {
    const double h = parse_double(v, field::kActivityHours);
    if (h < 0 || h > 168) {
      throw Error(ErrorCode::kOutOfRange,
                  fmt::format("{}: {} outside [0, 168]", field::kActivityHours, h));
    }
    return h;
  });
  b.eating_habits = optional_field(field::kEatingHabits, [](std::string_view v) {
    return parse_likert(v, field::kEatingHabits);
  });
  b.smoking_frequency = optional_field(field::kSmoking, [](std::string_view v) {
    return parse_frequency(v);
  });
  b.drinking_frequency = optional_field(field::kDrinking, [](std::string_view v) {
    return parse_frequency(v);
  });
  b.health_consciousness = optional_field(field::kHealthConsciousness, [](std::string_view v) {
    return parse_likert(v, field::kHealthConsciousness);
  });
  b.overall_health = optional_field(field::kOverallHealth, [](std::string_view v) {
    return parse_likert(v, field::kOverallHealth);
  });

  // The psychological tier is all-or-nothing.
  std::vector<std::pair<BigFiveTrait, int>> ratings;
  std::vector<std::string> absent_traits;
  for (BigFiveTrait t : kBigFiveOrder) {
    const std::string name = trait_field(t);
    if (auto v = row.get(name)) {
      ratings.emplace_back(t, parse_likert(*v, name));
    } else {
      absent_traits.push_back(name);
    }
  }
  if (absent_traits.size() == kBigFiveOrder.size()) {
    r.missing_fields.insert(absent_traits.begin(), absent_traits.end());
  } else if (!absent_traits.empty()) {
    throw Error(ErrorCode::kMissingRequiredField,
                fmt::format("incomplete Big Five ratings: missing '{}'", absent_traits.front()));
  } else {
    r.psychological = PsychologicalTier::from_ratings(ratings);
  }

  for (QuestionDimension q : kQuestionOrder) {
    const std::string name = gold_text_field(q);
    if (auto v = row.get(name)) {
      r.gold_responses.emplace(q, std::string(*v));
    } else {
      r.missing_fields.insert(name);
    }
  }

  for (const auto& [key, value] : raw) {
    if (key.size() > field::kScorePrefix.size() && key.starts_with(field::kScorePrefix) &&
        !trim(value).empty()) {
      r.gold_scores.emplace(key.substr(field::kScorePrefix.size()), parse_double(value, key));
    }
  }
  return r;
}

std::string format_real(double value) { return fmt::format("{}", value); }

std::map<std::string, std::string> to_raw(const PersonaRecord& r) {
  std::map<std::string, std::string> raw;
  auto put = [&](std::string_view key, std::string value) {
    raw.emplace(std::string(key), std::move(value));
  };
  put(field::kId, r.id);
  put(field::kAge, std::to_string(r.demographic.age));
  put(field::kSex, std::string(label(r.demographic.sex)));
  put(field::kEducation, std::string(label(r.demographic.education)));
  if (!r.missing_fields.contains(std::string(field::kRace))) {
    put(field::kRace, std::string(label(r.demographic.race)));
  }
  if (!r.missing_fields.contains(std::string(field::kIncome))) {
    put(field::kIncome, std::string(label(r.demographic.income)));
  }

  const auto& b = r.behavioral;
  if (b.prescription_count) put(field::kPrescriptionCount, std::to_string(*b.prescription_count));
  if (b.has_primary_physician) {
    put(field::kHasPrimaryPhysician, *b.has_primary_physician ? "Yes" : "No");
  }
  if (b.physician_visits_2yr) put(field::kPhysicianVisits, std::to_string(*b.physician_visits_2yr));
  if (b.activity_hours_per_week) put(field::kActivityHours, format_real(*b.activity_hours_per_week));
  if (b.eating_habits) put(field::kEatingHabits, std::to_string(*b.eating_habits));
  if (b.smoking_frequency) put(field::kSmoking, std::string(label(*b.smoking_frequency)));
  if (b.drinking_frequency) put(field::kDrinking, std::string(label(*b.drinking_frequency)));
  if (b.health_consciousness) {
    put(field::kHealthConsciousness, std::to_string(*b.health_consciousness));
  }
  if (b.overall_health) put(field::kOverallHealth, std::to_string(*b.overall_health));

  if (r.psychological) {
    for (BigFiveTrait t : kBigFiveOrder) {
      put(trait_field(t), std::to_string(r.psychological->rating(t)));
    }
  }
  for (const auto& [q, text] : r.gold_responses) put(gold_text_field(q), text);
  for (const auto& [name, score] : r.gold_scores) {
    put(std::string(field::kScorePrefix) + name, format_real(score));
  }
  return raw;
}

}  // namespace twinbench

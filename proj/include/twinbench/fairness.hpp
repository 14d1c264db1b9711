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

// Disparate impact over demographic groups and the downstream metric table.

#ifndef TWINBENCH_FAIRNESS_HPP_
#define TWINBENCH_FAIRNESS_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twinbench/persona.hpp"

namespace twinbench {

enum class Attribute { kAge, kGender, kRace, kEducation, kIncome };

inline constexpr std::array<Attribute, 5> kAttributeOrder = {
    Attribute::kAge, Attribute::kGender, Attribute::kRace, Attribute::kEducation,
    Attribute::kIncome};

std::string_view attribute_name(Attribute a);  // "Age", "Gender", ...
Attribute parse_attribute(std::string_view s);

enum class Group { kPrivileged, kUnprivileged, kExcluded };

struct BinarizedAttributes {
  std::array<Group, 5> groups{};
  Group of(Attribute a) const { return groups[static_cast<size_t>(a)]; }
};

// How each attribute splits into privileged and unprivileged. Categorical
// attributes list their privileged values; when `unprivileged` is empty,
// every other answered value is unprivileged, otherwise a value in neither
// set is unmappable. PreferNotToAnswer and Unsure are always excluded.
struct BinarizationPolicy {
  std::string version = "1";
  int age_privileged_min = 45;
  std::set<Sex> gender_privileged = {Sex::kMale};
  std::set<Sex> gender_unprivileged;
  std::set<Race> race_privileged = {Race::kWhite};
  std::set<Race> race_unprivileged;
  Education education_privileged_min = Education::kCollegeGraduate;
  Income income_privileged_min = Income::k50kTo75k;
  // Attributes whose privileged/unprivileged labels are swapped.
  std::set<Attribute> inverted;

  static BinarizationPolicy from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Throws Error(kUnmappableValue).
BinarizedAttributes binarize(const DemographicTier& d, const BinarizationPolicy& policy);

struct LabeledPrediction {
  std::string persona_id;
  double score = 0;
  bool predicted_positive = false;
  double gold = 0;
  DemographicTier demographics;
  std::string condition;  // may be empty
  std::string model;      // may be empty
};

// Positive-prediction rate of the unprivileged group over that of the
// privileged group. Throws kEmptyGroup or kZeroPrivilegedRate.
double di_single(std::span<const LabeledPrediction> preds, Attribute attr,
                 const BinarizationPolicy& policy = {});

struct InteractionDi {
  double value = 0;
  int combinations_used = 0;
  int combinations_skipped = 0;
};

// Mean over attribute combinations of the given arity of DI(all-unprivileged
// cell vs all-privileged cell). Combinations with an empty cell or a zero
// privileged rate are skipped. Throws kNoValidCombination.
InteractionDi di_interaction(std::span<const LabeledPrediction> preds,
                             const std::vector<Attribute>& attrs, int arity,
                             const BinarizationPolicy& policy = {});

inline constexpr std::array<std::string_view, 11> kFairnessColumns = {
    "MSE", "Pearson's r", "F1", "AUC", "DI_Age", "DI_Gender", "DI_Race", "DI_Education",
    "DI_Income", "DI+", "DI++"};

struct FairnessRow {
  std::string condition;
  std::string model;
  size_t n = 0;
  // Ordered as kFairnessColumns; NaN where the metric is undefined.
  std::array<double, 11> values{};
  std::vector<std::string> notes;  // reasons for NaN cells
};

// One row per (condition, model) in first-seen order. Gold scores are
// median-binarized per row for F1 and AUC.
std::vector<FairnessRow> fairness_report(std::span<const LabeledPrediction> preds,
                                         const BinarizationPolicy& policy = {});

// Reads prediction JSONL and joins demographics by persona id. Throws
// kUnreadableFile, kSchemaMismatch (missing field) or kInvalidArgument
// (unknown persona id).
std::vector<LabeledPrediction> load_predictions(
    const std::filesystem::path& path, const std::map<std::string, DemographicTier>& personas);

// Downstream metrics per row, as fed to the lift table.
struct DownstreamMetrics {
  std::string condition;
  std::string model;
  double mse = 0;
  double pearson_r = 0;
  double f1 = 0;
  double auc = 0;
};

// Reads CSV with header condition,model,mse,pearson_r,f1,auc.
std::vector<DownstreamMetrics> load_downstream_metrics(const std::filesystem::path& path);

// (value - baseline) / baseline, or (baseline - value) / baseline for
// lower-is-better metrics. NaN when the baseline is 0.
double lift(double value, double baseline, bool lower_is_better);

struct LiftRow {
  DownstreamMetrics metrics;
  // MSE, Pearson's r, F1, AUC; absent on the baseline row itself.
  std::optional<std::array<double, 4>> lifts;
};

// Lift of every row over the row with `baseline_condition` for the same
// model. Throws kInvalidArgument when a model has no baseline row.
std::vector<LiftRow> lift_table(const std::vector<DownstreamMetrics>& rows,
                                const std::string& baseline_condition);

DownstreamMetrics downstream_of(const FairnessRow& r);

}  // namespace twinbench

#endif  // TWINBENCH_FAIRNESS_HPP_

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

#include "twinbench/fairness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "twinbench/csv.hpp"
#include "twinbench/error.hpp"
#include "twinbench/metrics.hpp"

namespace twinbench {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Group flip(Group g, bool inverted) {
  if (!inverted || g == Group::kExcluded) return g;
  return g == Group::kPrivileged ? Group::kUnprivileged : Group::kPrivileged;
}

template <typename E>
Group categorical(E v, const std::set<E>& priv, const std::set<E>& unpriv, Attribute a) {
  if (priv.count(v) != 0) return Group::kPrivileged;
  if (unpriv.empty() || unpriv.count(v) != 0) return Group::kUnprivileged;
  throw Error(ErrorCode::kUnmappableValue,
              fmt::format("policy does not place {} value '{}' in either group", attribute_name(a),
                          label(v)));
}

template <typename E, typename Parse>
std::set<E> parse_set(const json& arr, Parse parse) {
  std::set<E> out;
  for (const auto& v : arr) out.insert(parse(v.get<std::string>()));
  return out;
}

template <typename E>
json dump_set(const std::set<E>& s) {
  json arr = json::array();
  for (auto v : s) arr.push_back(std::string(label(v)));
  return arr;
}

double rate(int pos, int total) { return static_cast<double>(pos) / total; }

}  // namespace

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::kAge: return "Age";
    case Attribute::kGender: return "Gender";
    case Attribute::kRace: return "Race";
    case Attribute::kEducation: return "Education";
    case Attribute::kIncome: return "Income";
  }
  return "?";
}

Attribute parse_attribute(std::string_view s) {
  const std::string l = lower(s);
  for (auto a : kAttributeOrder) {
    if (lower(attribute_name(a)) == l) return a;
  }
  if (l == "sex") return Attribute::kGender;
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown attribute '{}'", s));
}

BinarizationPolicy BinarizationPolicy::from_json(const json& j) {
  BinarizationPolicy p;
  try {
    p.version = j.value("version", p.version);
    if (j.contains("age")) p.age_privileged_min = j["age"].value("privileged_min", p.age_privileged_min);
    if (j.contains("gender")) {
      const auto& g = j["gender"];
      if (g.contains("privileged")) p.gender_privileged = parse_set<Sex>(g["privileged"], parse_sex);
      if (g.contains("unprivileged")) p.gender_unprivileged = parse_set<Sex>(g["unprivileged"], parse_sex);
    }
    if (j.contains("race")) {
      const auto& r = j["race"];
      if (r.contains("privileged")) p.race_privileged = parse_set<Race>(r["privileged"], parse_race);
      if (r.contains("unprivileged")) p.race_unprivileged = parse_set<Race>(r["unprivileged"], parse_race);
    }
    if (j.contains("education") && j["education"].contains("privileged_min")) {
      p.education_privileged_min = parse_education(j["education"]["privileged_min"].get<std::string>());
    }
    if (j.contains("income") && j["income"].contains("privileged_min")) {
      p.income_privileged_min = parse_income(j["income"]["privileged_min"].get<std::string>());
    }
    if (j.contains("invert")) {
      for (const auto& a : j["invert"]) p.inverted.insert(parse_attribute(a.get<std::string>()));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("binarization policy: {}", e.what()));
  }
  if (p.income_privileged_min == Income::kUnsure || p.income_privileged_min == Income::kPreferNotToAnswer) {
    throw Error(ErrorCode::kInvalidArgument, "binarization policy: income threshold must be a bracket");
  }
  return p;
}

json BinarizationPolicy::to_json() const {
  json inv = json::array();
  for (auto a : inverted) inv.push_back(std::string(attribute_name(a)));
  return json{{"version", version},
              {"age", {{"privileged_min", age_privileged_min}}},
              {"gender", {{"privileged", dump_set(gender_privileged)},
                          {"unprivileged", dump_set(gender_unprivileged)}}},
              {"race", {{"privileged", dump_set(race_privileged)},
                        {"unprivileged", dump_set(race_unprivileged)}}},
              {"education", {{"privileged_min", std::string(label(education_privileged_min))}}},
              {"income", {{"privileged_min", std::string(label(income_privileged_min))}}},
              {"invert", inv}};
}

BinarizedAttributes binarize(const DemographicTier& d, const BinarizationPolicy& policy) {
  BinarizedAttributes b;
  auto set = [&](Attribute a, Group g) {
    b.groups[static_cast<size_t>(a)] = flip(g, policy.inverted.count(a) != 0);
  };
  set(Attribute::kAge, d.age >= policy.age_privileged_min ? Group::kPrivileged : Group::kUnprivileged);
  set(Attribute::kGender,
      categorical(d.sex, policy.gender_privileged, policy.gender_unprivileged, Attribute::kGender));
  set(Attribute::kRace,
      d.race == Race::kPreferNotToAnswer
          ? Group::kExcluded
          : categorical(d.race, policy.race_privileged, policy.race_unprivileged, Attribute::kRace));
  set(Attribute::kEducation, d.education >= policy.education_privileged_min ? Group::kPrivileged
                                                                            : Group::kUnprivileged);
  if (d.income == Income::kUnsure || d.income == Income::kPreferNotToAnswer) {
    set(Attribute::kIncome, Group::kExcluded);
  } else {
    set(Attribute::kIncome,
        d.income >= policy.income_privileged_min ? Group::kPrivileged : Group::kUnprivileged);
  }
  return b;
}

namespace {

// Positive counts and totals of the all-unprivileged and all-privileged cells.
struct CellCounts {
  int unpriv_pos = 0, unpriv_n = 0, priv_pos = 0, priv_n = 0;
};

CellCounts count_cells(std::span<const LabeledPrediction> preds,
                       const std::vector<BinarizedAttributes>& bins,
                       const std::vector<Attribute>& combo) {
  CellCounts c;
  for (size_t i = 0; i < preds.size(); ++i) {
    bool all_priv = true, all_unpriv = true;
    for (auto a : combo) {
      const Group g = bins[i].of(a);
      all_priv = all_priv && g == Group::kPrivileged;
      all_unpriv = all_unpriv && g == Group::kUnprivileged;
    }
    if (all_priv) {
      ++c.priv_n;
      c.priv_pos += preds[i].predicted_positive ? 1 : 0;
    } else if (all_unpriv) {
      ++c.unpriv_n;
      c.unpriv_pos += preds[i].predicted_positive ? 1 : 0;
    }
  }
  return c;
}

std::vector<BinarizedAttributes> binarize_all(std::span<const LabeledPrediction> preds,
                                              const BinarizationPolicy& policy) {
  std::vector<BinarizedAttributes> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(binarize(p.demographics, policy));
  return out;
}

double di_from_counts(const CellCounts& c, std::string_view what) {
  if (c.priv_n == 0 || c.unpriv_n == 0) {
    throw Error(ErrorCode::kEmptyGroup, fmt::format("DI {}: empty {} group", what,
                                                    c.priv_n == 0 ? "privileged" : "unprivileged"));
  }
  if (c.priv_pos == 0) {
    throw Error(ErrorCode::kZeroPrivilegedRate,
                fmt::format("DI {}: privileged positive rate is 0", what));
  }
  return rate(c.unpriv_pos, c.unpriv_n) / rate(c.priv_pos, c.priv_n);
}

void combinations(const std::vector<Attribute>& attrs, int k, size_t start,
                  std::vector<Attribute>& cur, std::vector<std::vector<Attribute>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (size_t i = start; i < attrs.size(); ++i) {
    cur.push_back(attrs[i]);
    combinations(attrs, k, i + 1, cur, out);
    cur.pop_back();
  }
}

InteractionDi interaction_from_bins(std::span<const LabeledPrediction> preds,
                                    const std::vector<BinarizedAttributes>& bins,
                                    const std::vector<Attribute>& attrs, int arity) {
  if (arity < 2) throw Error(ErrorCode::kInvalidArgument, "interaction arity must be >= 2");
  std::vector<Attribute> unique(attrs);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<std::vector<Attribute>> combos;
  std::vector<Attribute> cur;
  if (static_cast<int>(unique.size()) >= arity) combinations(unique, arity, 0, cur, combos);

  InteractionDi r;
  double sum = 0;
  for (const auto& combo : combos) {
    const CellCounts c = count_cells(preds, bins, combo);
    if (c.priv_n == 0 || c.unpriv_n == 0 || c.priv_pos == 0) {
      ++r.combinations_skipped;
      continue;
    }
    sum += rate(c.unpriv_pos, c.unpriv_n) / rate(c.priv_pos, c.priv_n);
    ++r.combinations_used;
  }
  if (r.combinations_used == 0) {
    throw Error(ErrorCode::kNoValidCombination,
                fmt::format("no usable {}-way combination among {} attributes", arity, unique.size()));
  }
  r.value = sum / r.combinations_used;
  return r;
}

}  // namespace

double di_single(std::span<const LabeledPrediction> preds, Attribute attr,
                 const BinarizationPolicy& policy) {
  const auto bins = binarize_all(preds, policy);
  return di_from_counts(count_cells(preds, bins, {attr}), attribute_name(attr));
}

InteractionDi di_interaction(std::span<const LabeledPrediction> preds,
                             const std::vector<Attribute>& attrs, int arity,
                             const BinarizationPolicy& policy) {
  return interaction_from_bins(preds, binarize_all(preds, policy), attrs, arity);
}

std::vector<FairnessRow> fairness_report(std::span<const LabeledPrediction> preds,
                                         const BinarizationPolicy& policy) {
  if (preds.empty()) throw Error(ErrorCode::kInvalidArgument, "fairness report: no predictions");
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<LabeledPrediction>> groups;
  for (const auto& p : preds) {
    auto key = std::make_pair(p.condition, p.model);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(p);
  }

  std::vector<FairnessRow> rows;
  for (const auto& key : order) {
    const auto& g = groups[key];
    FairnessRow row;
    row.condition = key.first;
    row.model = key.second;
    row.n = g.size();
    row.values.fill(kNaN);
    std::vector<double> score, gold;
    std::vector<bool> pred;
    for (const auto& p : g) {
      score.push_back(p.score);
      gold.push_back(p.gold);
      pred.push_back(p.predicted_positive);
    }
    auto guarded = [&](size_t col, auto fn) {
      try {
        row.values[col] = fn();
      } catch (const Error& e) {
        row.notes.push_back(fmt::format("{}: {}", kFairnessColumns[col], e.what()));
      }
    };
    guarded(0, [&] { return mse(score, gold); });
    guarded(1, [&] { return pearson_r(score, gold); });
    const auto gold_bin = median_binarize(gold);
    guarded(2, [&] { return f1_binary(pred, gold_bin); });
    guarded(3, [&] { return auc_roc(score, gold_bin); });
    const auto bins = binarize_all(g, policy);
    for (size_t a = 0; a < kAttributeOrder.size(); ++a) {
      guarded(4 + a, [&] {
        return di_from_counts(count_cells(g, bins, {kAttributeOrder[a]}),
                              attribute_name(kAttributeOrder[a]));
      });
    }
    const std::vector<Attribute> all(kAttributeOrder.begin(), kAttributeOrder.end());
    guarded(9, [&] { return interaction_from_bins(g, bins, all, 2).value; });
    guarded(10, [&] { return interaction_from_bins(g, bins, all, 3).value; });
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LabeledPrediction> load_predictions(
    const std::filesystem::path& path, const std::map<std::string, DemographicTier>& personas) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path.string());
  std::vector<LabeledPrediction> out;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LabeledPrediction p;
    try {
      const json j = json::parse(line);
      p.persona_id = j.at("persona_id").get<std::string>();
      p.score = j.at("score").get<double>();
      p.predicted_positive = j.at("predicted_positive").get<bool>();
      p.gold = j.at("gold").get<double>();
      p.condition = j.value("condition", std::string());
      p.model = j.value("model", std::string());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch,
                  fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
    auto it = personas.find(p.persona_id);
    if (it == personas.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{}:{}: unknown persona id '{}'", path.string(), lineno, p.persona_id));
    }
    p.demographics = it->second;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DownstreamMetrics> load_downstream_metrics(const std::filesystem::path& path) {
  const auto rows = read_csv_file(path);
  if (rows.empty()) throw Error(ErrorCode::kSchemaMismatch, path.string() + ": empty file");
  const std::vector<std::string> want = {"condition", "model", "mse", "pearson_r", "f1", "auc"};
  std::map<std::string, size_t> col;
  for (size_t i = 0; i < rows[0].size(); ++i) col[lower(rows[0][i])] = i;
  for (const auto& w : want) {
    if (col.count(w) == 0) {
      throw Error(ErrorCode::kSchemaMismatch, fmt::format("{}: missing column '{}'", path.string(), w));
    }
  }
  std::vector<DownstreamMetrics> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    auto cell = [&](const std::string& name) -> const std::string& {
      const size_t c = col[name];
      if (c >= row.size()) {
        throw Error(ErrorCode::kSchemaMismatch, fmt::format("{}: row {} is short", path.string(), r + 1));
      }
      return row[c];
    };
    auto num = [&](const std::string& name) {
      try {
        size_t used = 0;
        const double v = std::stod(cell(name), &used);
        if (used != cell(name).size()) throw std::invalid_argument("trailing characters");
        return v;
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        throw Error(ErrorCode::kMalformedValue,
                    fmt::format("{}: row {}: bad number '{}' for {}", path.string(), r + 1, cell(name), name));
      }
    };
    out.push_back({cell("condition"), cell("model"), num("mse"), num("pearson_r"), num("f1"), num("auc")});
  }
  return out;
}

double lift(double value, double baseline, bool lower_is_better) {
  if (baseline == 0.0) return kNaN;
  return lower_is_better ? (baseline - value) / baseline : (value - baseline) / baseline;
}

std::vector<LiftRow> lift_table(const std::vector<DownstreamMetrics>& rows,
                                const std::string& baseline_condition) {
  std::map<std::string, const DownstreamMetrics*> base;
  for (const auto& r : rows) {
    if (r.condition == baseline_condition) base.emplace(r.model, &r);
  }
  std::vector<LiftRow> out;
  for (const auto& r : rows) {
    LiftRow lr{r, std::nullopt};
    if (r.condition != baseline_condition) {
      auto it = base.find(r.model);
      if (it == base.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("no '{}' row for model '{}'", baseline_condition, r.model));
      }
      const auto& b = *it->second;
      lr.lifts = std::array<double, 4>{lift(r.mse, b.mse, true), lift(r.pearson_r, b.pearson_r, false),
                                       lift(r.f1, b.f1, false), lift(r.auc, b.auc, false)};
    }
    out.push_back(std::move(lr));
  }
  return out;
}

DownstreamMetrics downstream_of(const FairnessRow& r) {
  return {r.condition, r.model, r.values[0], r.values[1], r.values[2], r.values[3]};
}

}  // namespace twinbench

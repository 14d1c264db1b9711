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

// Fidelity and prediction metrics. All functions are pure.

#ifndef TWINBENCH_METRICS_HPP_
#define TWINBENCH_METRICS_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twinbench/embedding_vector.hpp"

namespace twinbench {

// <a,b> / (|a||b|). Throws kModelMismatch, kLengthMismatch or kZeroVector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct RougeScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Lowercases ASCII letters, turns every ASCII character that is not a letter
// or digit into a separator and splits on the separators. Bytes >= 0x80 are
// kept inside tokens.
std::vector<std::string> rouge_tokenize(std::string_view text);

// Clipped n-gram overlap. An empty side (or fewer than n tokens) scores 0.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);
RougeScore rouge_n_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference, int n);

// Longest-common-subsequence overlap: P = LCS/|cand|, R = LCS/|ref|.
RougeScore rouge_l(std::string_view candidate, std::string_view reference);
RougeScore rouge_l_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference);
size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct TTestResult {
  double t_stat = 0;
  int dof = 0;
  double p_two_sided = 1;
  int n_pairs = 0;
};

// Paired t-test on x[i] - y[i]. Differences that are all zero give t = 0,
// p = 1; constant non-zero differences give t = +/-inf, p = 0.
// Throws kLengthMismatch or kTooFewPairs (fewer than two pairs).
TTestResult paired_t_test(std::span<const double> x, std::span<const double> y);

// I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);
// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

double mse(std::span<const double> pred, std::span<const double> gold);
// Throws kDegenerateLabels when either side has zero variance.
double pearson_r(std::span<const double> pred, std::span<const double> gold);
// Positive class F1. Throws kDegenerateLabels unless gold has both classes.
double f1_binary(const std::vector<bool>& pred, const std::vector<bool>& gold);
// Mann-Whitney rank statistic with average ranks for ties.
double auc_roc(std::span<const double> scores, const std::vector<bool>& gold);

double median(std::span<const double> values);
// gold[i] > median(gold).
std::vector<bool> median_binarize(std::span<const double> gold);

}  // namespace twinbench

#endif  // TWINBENCH_METRICS_HPP_

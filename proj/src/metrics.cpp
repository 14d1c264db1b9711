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

#include "twinbench/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "twinbench/error.hpp"

namespace twinbench {
namespace {

void require_same_length(size_t a, size_t b, std::string_view what) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch, fmt::format("{}: lengths {} and {} differ", what, a, b));
  }
}

double f1_from(double precision, double recall) {
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

RougeScore score_from_counts(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0 ? overlap / cand_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  s.f1 = f1_from(s.precision, s.recall);
  return s;
}

std::string ngram_key(std::span<const std::string> tokens, size_t start, int n) {
  // Tokens never contain ASCII separators, so a space join is unambiguous.
  std::string key = tokens[start];
  for (int k = 1; k < n; ++k) {
    key.push_back(' ');
    key += tokens[start + k];
  }
  return key;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::string model_id, std::vector<double> values)
    : model_id_(std::move(model_id)), values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding vector has no dimensions");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "embedding vector has non-finite values");
    }
  }
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.model_id() != b.model_id()) {
    throw Error(ErrorCode::kModelMismatch,
                fmt::format("cannot compare '{}' and '{}' embeddings", a.model_id(), b.model_id()));
  }
  return cosine_similarity(a.values(), b.values());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "cosine_similarity");
  long double dot = 0;
  long double aa = 0;
  long double bb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  if (aa == 0 || bb == 0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  const long double value = dot / (std::sqrt(aa) * std::sqrt(bb));
  return static_cast<double>(std::clamp<long double>(value, -1.0L, 1.0L));
}

std::vector<std::string> rouge_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

RougeScore rouge_n_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "rouge_n requires n >= 1");
  const auto count = [n](std::span<const std::string> tokens) {
    return tokens.size() >= static_cast<size_t>(n) ? tokens.size() - n + 1 : 0;
  };
  const size_t cand_total = count(candidate);
  const size_t ref_total = count(reference);
  if (cand_total == 0 || ref_total == 0) return {};

  std::unordered_map<std::string, long> ref_counts;
  for (size_t i = 0; i < ref_total; ++i) ++ref_counts[ngram_key(reference, i, n)];
  long overlap = 0;
  for (size_t i = 0; i < cand_total; ++i) {
    auto it = ref_counts.find(ngram_key(candidate, i, n));
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return score_from_counts(overlap, cand_total, ref_total);
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  const auto c = rouge_tokenize(candidate);
  const auto r = rouge_tokenize(reference);
  return rouge_n_tokens(c, r, n);
}

// Bit-parallel LCS: one bit per position of `b`, one word-vector update per
// token of `a`.
size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  const size_t words = (b.size() + 63) / 64;
  std::unordered_map<std::string_view, std::vector<uint64_t>> match;
  for (size_t j = 0; j < b.size(); ++j) {
    auto& mask = match[b[j]];
    if (mask.empty()) mask.assign(words, 0);
    mask[j / 64] |= uint64_t{1} << (j % 64);
  }
  std::vector<uint64_t> v(words, ~uint64_t{0});
  const std::vector<uint64_t> none(words, 0);
  for (const std::string& token : a) {
    const auto it = match.find(token);
    const std::vector<uint64_t>& m = it == match.end() ? none : it->second;
    uint64_t carry = 0;
    for (size_t w = 0; w < words; ++w) {
      const uint64_t u = v[w] & m[w];
      const uint64_t sum = v[w] + u;
      const uint64_t with_carry = sum + carry;
      carry = (sum < v[w] || with_carry < sum) ? 1 : 0;
      v[w] = with_carry | (v[w] & ~m[w]);
    }
  }
  size_t zeros = 0;
  for (size_t w = 0; w < words; ++w) {
    const size_t bits = (w + 1 == words && b.size() % 64 != 0) ? b.size() % 64 : 64;
    const uint64_t mask = bits == 64 ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
    zeros += bits - static_cast<size_t>(std::popcount(v[w] & mask));
  }
  return zeros;
}

RougeScore rouge_l_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return score_from_counts(lcs, candidate.size(), reference.size());
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = rouge_tokenize(candidate);
  const auto r = rouge_tokenize(reference);
  return rouge_l_tokens(c, r);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0 || b <= 0 || x < 0 || x > 1) {
    throw Error(ErrorCode::kInvalidArgument, "incomplete beta outside its domain");
  }
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0) return 1.0;
  const double p = regularized_incomplete_beta(dof / 2, 0.5, dof / (dof + t * t));
  return std::clamp(p, 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "paired_t_test");
  if (x.size() < 2) {
    throw Error(ErrorCode::kTooFewPairs,
                fmt::format("paired t-test needs at least 2 pairs, got {}", x.size()));
  }
  const size_t n = x.size();
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];

  TTestResult r;
  r.n_pairs = static_cast<int>(n);
  r.dof = static_cast<int>(n) - 1;
  const bool constant =
      std::all_of(diff.begin(), diff.end(), [&](double d) { return d == diff.front(); });
  if (constant) {
    if (diff.front() == 0) {
      r.t_stat = 0;
      r.p_two_sided = 1;
    } else {
      r.t_stat = std::copysign(std::numeric_limits<double>::infinity(), diff.front());
      r.p_two_sided = 0;
    }
    return r;
  }
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
  double ss = 0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (n - 1));
  r.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_two_sided = student_t_two_sided_p(r.t_stat, r.dof);
  return r;
}

double mse(std::span<const double> pred, std::span<const double> gold) {
  require_same_length(pred.size(), gold.size(), "mse");
  if (pred.empty()) throw Error(ErrorCode::kInvalidArgument, "mse of an empty sample");
  double sum = 0;
  for (size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - gold[i]) * (pred[i] - gold[i]);
  return sum / pred.size();
}

double pearson_r(std::span<const double> pred, std::span<const double> gold) {
  require_same_length(pred.size(), gold.size(), "pearson_r");
  const size_t n = pred.size();
  if (n < 2) throw Error(ErrorCode::kDegenerateLabels, "pearson_r needs at least 2 points");
  const double mp = std::accumulate(pred.begin(), pred.end(), 0.0) / n;
  const double mg = std::accumulate(gold.begin(), gold.end(), 0.0) / n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (pred[i] - mp) * (gold[i] - mg);
    sxx += (pred[i] - mp) * (pred[i] - mp);
    syy += (gold[i] - mg) * (gold[i] - mg);
  }
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorCode::kDegenerateLabels, "pearson_r of a constant sample");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double f1_binary(const std::vector<bool>& pred, const std::vector<bool>& gold) {
  require_same_length(pred.size(), gold.size(), "f1_binary");
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long positives = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    positives += gold[i];
    if (pred[i] && gold[i]) ++tp;
    if (pred[i] && !gold[i]) ++fp;
    if (!pred[i] && gold[i]) ++fn;
  }
  if (positives == 0 || positives == static_cast<long>(gold.size())) {
    throw Error(ErrorCode::kDegenerateLabels, "f1 needs both classes in gold");
  }
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double auc_roc(std::span<const double> scores, const std::vector<bool>& gold) {
  require_same_length(scores.size(), gold.size(), "auc_roc");
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0;
  double positives = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) {
      if (gold[order[k]]) {
        positive_rank_sum += rank;
        positives += 1;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kDegenerateLabels, "auc needs both classes in gold");
  }
  return (positive_rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives);
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t mid = sorted.size() / 2;
  return sorted.size() % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
}

std::vector<bool> median_binarize(std::span<const double> gold) {
  const double m = median(gold);
  std::vector<bool> out(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) out[i] = gold[i] > m;
  return out;
}

}  // namespace twinbench

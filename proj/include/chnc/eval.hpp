#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chnc/error.hpp"

namespace chnc {

inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) config_error("accuracy: prediction/truth length mismatch");
  if (pred.empty()) config_error("accuracy: empty input");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

/// Mean of true positive rate and true negative rate.
inline double balanced_accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) config_error("balanced accuracy: length mismatch");
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] > 0) {
      ++pos;
      tp += pred[i] > 0;
    } else {
      ++neg;
      tn += pred[i] <= 0;
    }
  }
  if (pos == 0 || neg == 0) config_error("balanced accuracy is undefined for single-class truth");
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                static_cast<double>(tn) / static_cast<double>(neg));
}

struct NoiseScores {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// Recall |N & D| / |N|, precision |N & D| / |D|; an empty side scores 0.
inline NoiseScores noise_prf(std::span<const int> detected, std::span<const int> actual) {
  std::vector<int> d(detected.begin(), detected.end()), n(actual.begin(), actual.end());
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  std::vector<int> both;
  std::set_intersection(d.begin(), d.end(), n.begin(), n.end(), std::back_inserter(both));
  NoiseScores s;
  if (!n.empty()) s.recall = static_cast<double>(both.size()) / static_cast<double>(n.size());
  if (!d.empty()) s.precision = static_cast<double>(both.size()) / static_cast<double>(d.size());
  if (s.recall + s.precision > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

/// Percent change of acc_a relative to acc_b.
inline double accuracy_improvement(double acc_a, double acc_b) {
  if (!(acc_b > 0.0)) config_error("accuracy improvement needs a positive baseline accuracy");
  return (acc_a / acc_b - 1.0) * 100.0;
}

/// scores[method][dataset] -> per-method mean percent gap from the best method
/// on each dataset (0 for the best, negative otherwise).
inline std::vector<double> avg_gap_from_max(const std::vector<std::vector<double>>& scores) {
  if (scores.empty()) return {};
  const std::size_t n_sets = scores.front().size();
  for (const auto& row : scores)
    if (row.size() != n_sets) data_error("avg gap from max: missing score for some dataset");
  if (n_sets == 0) data_error("avg gap from max: no datasets");
  std::vector<double> gap(scores.size(), 0.0);
  for (std::size_t d = 0; d < n_sets; ++d) {
    double best = scores.front()[d];
    for (const auto& row : scores) {
      if (!std::isfinite(row[d])) data_error("avg gap from max: missing score for some dataset");
      best = std::max(best, row[d]);
    }
    if (!(best > 0.0)) data_error("avg gap from max: best score must be > 0");
    for (std::size_t m = 0; m < scores.size(); ++m) gap[m] += (scores[m][d] - best) / best * 100.0;
  }
  for (auto& g : gap) g /= static_cast<double>(n_sets);
  return gap;
}

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> balanced_accuracy;  // unset for single-class truth
  NoiseScores noise;
  std::size_t n_test = 0;
  std::size_t n_noisy = 0;
  std::size_t n_detected = 0;
};

/// Left-aligned first column, right-aligned others, columns padded to width.
inline std::string format_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& r) {
    require(r.size() == header.size(), "table row width mismatch");
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  };
  widen(header);
  for (const auto& r : rows) widen(r);
  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? r[c] + pad : pad + r[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  emit(header);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c > 0) rule += "  ";
    rule += std::string(width[c], '-');
  }
  out += rule + '\n';
  for (const auto& r : rows) emit(r);
  return out;
}

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace chnc

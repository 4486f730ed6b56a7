#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chnc/confidence.hpp"
#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/folds.hpp"
#include "chnc/hnc_graphs.hpp"
#include "chnc/paramcut.hpp"
#include "chnc/simgraph.hpp"

namespace chnc {

struct LambdaGridSpec {
  double min = -1.0;
  double max = 1.0;
  double step = 0.002;

  void validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step))
      config_error("lambda grid bounds must be finite");
    if (!(step > 0.0)) config_error("lambda grid step must be > 0");
    if (!(min < max)) config_error("lambda grid needs min < max");
  }

  /// Values min + k * step; the count is rounded so that max itself is hit
  /// when (max - min) is a multiple of step up to rounding noise.
  std::vector<double> values() const {
    validate();
    const double span = (max - min) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (count > 10'000'000) config_error("lambda grid has too many points");
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
      out[k] = min + static_cast<double>(k) * step;
      if (std::abs(out[k]) < 1e-9 * step) out[k] = 0.0;
    }
    if (std::abs(out.back() - max) <= 1e-9 * std::max(1.0, std::abs(max))) out.back() = max;
    return out;
  }
};

/// Parses "min:max:step".
inline LambdaGridSpec parse_lambda_grid(const std::string& text) {
  LambdaGridSpec g;
  std::vector<std::string> fields;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 3) config_error("lambda grid must look like min:max:step, got '" + text + "'");
  double* dst[3] = {&g.min, &g.max, &g.step};
  for (int k = 0; k < 3; ++k) {
    const auto v = detail::parse_real(detail::trim(fields[static_cast<std::size_t>(k)]));
    if (!v) config_error("bad number '" + fields[static_cast<std::size_t>(k)] + "' in lambda grid");
    *dst[k] = *v;
  }
  g.validate();
  return g;
}

struct CvEntry {
  double lambda = 0.0;
  double acc = 0.0;
};

struct LambdaSelection {
  double lambda_star = 0.0;
  std::vector<CvEntry> cv_table;
};

struct ChncResult {
  double lambda_star = 0.0;
  std::vector<int> source_set;
  std::vector<int> unlabeled;        // ids of U, ascending
  std::vector<int> predictions;      // aligned with `unlabeled`, +1/-1
  std::vector<int> detected_noisy;   // ascending labeled ids
  std::vector<CvEntry> cv_table;
};

/// Index of the best mean accuracy; ties go to the smallest |lambda|, then the
/// smallest lambda.
inline std::size_t best_lambda_index(std::span<const CvEntry> table) {
  require(!table.empty(), "empty CV table");
  std::size_t best = 0;
  for (std::size_t k = 1; k < table.size(); ++k) {
    const auto& a = table[k];
    const auto& b = table[best];
    if (a.acc > b.acc + 1e-12) {
      best = k;
    } else if (std::abs(a.acc - b.acc) <= 1e-12) {
      if (std::abs(a.lambda) < std::abs(b.lambda) ||
          (std::abs(a.lambda) == std::abs(b.lambda) && a.lambda < b.lambda))
        best = k;
    }
  }
  return best;
}

/// Cross-validates lambda: in each fold the held-out seeds become unlabeled
/// nodes, one parametric run over the grid predicts them for every lambda,
/// and accuracy is measured against their given labels.
inline LambdaSelection select_lambda(const SimilarityGraph& G, const SeedSpec& seeds,
                                     const ConfidenceVector& gamma,
                                     std::span<const double> lambdas, std::size_t n_folds,
                                     std::uint64_t seed,
                                     ParametricStrategy strategy = ParametricStrategy::bisection) {
  const auto grid = detail::ascending_grid(lambdas);
  const std::size_t q = grid.size();
  require(seeds.size() == G.n, "seed spec size does not match graph");

  std::vector<int> labeled, labels;
  for (std::size_t v = 0; v < G.n; ++v)
    if (seeds[v] != Role::unlabeled) {
      labeled.push_back(static_cast<int>(v));
      labels.push_back(label_of(seeds[v]));
    }
  const auto fold = stratified_folds(labels, n_folds, seed);

  std::vector<double> acc_sum(q, 0.0);
  for (std::size_t f = 0; f < n_folds; ++f) {
    SeedSpec train = seeds;
    std::vector<std::size_t> held;
    for (std::size_t a = 0; a < labeled.size(); ++a)
      if (fold[a] == static_cast<int>(f)) {
        held.push_back(a);
        train.role[static_cast<std::size_t>(labeled[a])] = Role::unlabeled;
      }
    if (held.empty()) config_error("fold " + std::to_string(f) + " has no held-out samples");
    if (train.count(Role::positive) == 0 || train.count(Role::negative) == 0)
      config_error("stratification error: training fold " + std::to_string(f) +
                   " lacks one of the classes");

    const NestedCuts cuts = parametric_min_cut(build_chnc_graph(G, train, gamma), grid, strategy);
    // correct[k] via a difference array over grid positions.
    std::vector<long long> diff(q + 1, 0);
    for (std::size_t a : held) {
      const auto qi = static_cast<std::size_t>(cuts.q_index[static_cast<std::size_t>(labeled[a])]);
      if (labels[a] > 0) {
        diff[qi] += 1;
      } else {
        diff[0] += 1;
        diff[qi] -= 1;
      }
    }
    long long running = 0;
    for (std::size_t k = 0; k < q; ++k) {
      running += diff[k];
      acc_sum[k] += static_cast<double>(running) / static_cast<double>(held.size());
    }
  }

  LambdaSelection sel;
  sel.cv_table.resize(q);
  for (std::size_t k = 0; k < q; ++k)
    sel.cv_table[k] = {grid[k], acc_sum[k] / static_cast<double>(n_folds)};
  sel.lambda_star = sel.cv_table[best_lambda_index(sel.cv_table)].lambda;
  return sel;
}

/// Minimal minimum cut of the CHNC graph at lambda_star.
inline ChncResult fit_predict(const SimilarityGraph& G, const SeedSpec& seeds,
                              const ConfidenceVector& gamma, double lambda_star) {
  const CutResult cut = min_cut(build_chnc_graph(G, seeds, gamma), lambda_star);
  require(!cut.infinite, "CHNC minimum cut crosses an unsaturable arc");
  const auto in_s = cut.membership(G.n);
  ChncResult r;
  r.lambda_star = lambda_star;
  r.source_set = cut.source_set;
  for (std::size_t v = 0; v < G.n; ++v) {
    const bool s_side = in_s[v] != 0;
    switch (seeds[v]) {
      case Role::unlabeled:
        r.unlabeled.push_back(static_cast<int>(v));
        r.predictions.push_back(s_side ? 1 : -1);
        break;
      case Role::positive:
        if (!s_side) r.detected_noisy.push_back(static_cast<int>(v));
        break;
      case Role::negative:
        if (s_side) r.detected_noisy.push_back(static_cast<int>(v));
        break;
    }
  }
  return r;
}

}  // namespace chnc

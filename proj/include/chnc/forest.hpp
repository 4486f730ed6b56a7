#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/folds.hpp"
#include "chnc/random.hpp"

namespace chnc {

struct ForestConfig {
  std::size_t n_trees = 100;
  double min_samples_leaf_fraction = 0.001;
  std::vector<double> candidate_fractions = {0.001, 0.002, 0.005, 0.01};
  std::size_t cv_folds = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_trees < 1) config_error("n_trees must be >= 1");
    if (cv_folds < 2) config_error("cv_folds must be >= 2");
    auto ok = [](double f) { return f > 0.0 && f <= 0.5; };
    if (!ok(min_samples_leaf_fraction)) config_error("leaf fraction must lie in (0, 0.5]");
    if (candidate_fractions.empty()) config_error("need at least one candidate leaf fraction");
    for (double f : candidate_fractions)
      if (!ok(f)) config_error("candidate leaf fractions must lie in (0, 0.5]");
  }
};

/// Row-major feature matrix with +1/-1 targets.
struct TrainingSet {
  std::vector<double> x;
  std::vector<int> y;
  std::size_t n_features = 0;

  std::size_t size() const { return y.size(); }
  double at(std::size_t i, std::size_t h) const { return x[i * n_features + h]; }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * n_features, n_features};
  }

  TrainingSet subset(std::span<const std::size_t> ids) const {
    TrainingSet out;
    out.n_features = n_features;
    out.x.reserve(ids.size() * n_features);
    for (std::size_t i : ids) {
      const auto r = row(i);
      out.x.insert(out.x.end(), r.begin(), r.end());
      out.y.push_back(y[i]);
    }
    return out;
  }
};

/// Labeled rows of `ds` with their given (possibly noisy) labels.
inline TrainingSet labeled_training_set(const Dataset& ds) {
  TrainingSet t;
  t.n_features = ds.n_features;
  for (std::size_t i = 0; i < ds.n; ++i) {
    if (ds.role[i] == Role::unlabeled) continue;
    const auto r = ds.row(i);
    t.x.insert(t.x.end(), r.begin(), r.end());
    t.y.push_back(ds.given_label[i]);
  }
  return t;
}

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double positive_fraction = 0.0;
  std::size_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::vector<double> importance;  // summed weighted Gini decrease per feature

  double predict_proba(std::span<const double> x) const {
    int k = 0;
    while (!nodes[k].is_leaf())
      k = x[nodes[k].feature] <= nodes[k].threshold ? nodes[k].left : nodes[k].right;
    return nodes[k].positive_fraction;
  }

  bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  double predict_proba(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict_proba(x);
    return sum / static_cast<double>(trees.size());
  }

  int predict(std::span<const double> x) const { return predict_proba(x) > 0.5 ? 1 : -1; }

  double accuracy(const TrainingSet& data) const {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < data.size(); ++i) hit += predict(data.row(i)) == data.y[i];
    return static_cast<double>(hit) / static_cast<double>(data.size());
  }
};

namespace detail {

// Node size times binary Gini impurity, from the positive count.
inline double gini_mass(double pos, double total) {
  return total > 0.0 ? 2.0 * pos * (total - pos) / total : 0.0;
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingSet& data, std::size_t min_leaf, std::uint64_t seed)
      : data_(data),
        min_leaf_(std::max<std::size_t>(min_leaf, 1)),
        max_features_(std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data.n_features))))),
        rng_(seed) {}

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    tree.importance.assign(data_.n_features, 0.0);
    const double root_size = static_cast<double>(samples.size());
    std::vector<std::size_t> features(data_.n_features);
    std::iota(features.begin(), features.end(), std::size_t{0});

    struct Pending {
      int node;
      std::size_t begin, end;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, samples.size()});
    while (!stack.empty()) {
      const Pending cur = stack.back();
      stack.pop_back();
      const std::size_t m = cur.end - cur.begin;
      std::size_t pos = 0;
      for (std::size_t k = cur.begin; k < cur.end; ++k) pos += data_.y[samples[k]] > 0;
      {
        TreeNode& node = tree.nodes[cur.node];
        node.n_samples = m;
        node.positive_fraction = static_cast<double>(pos) / static_cast<double>(m);
      }
      if (pos == 0 || pos == m || m < 2 * min_leaf_) continue;

      const Split best = find_split(samples, cur.begin, cur.end, pos, features);
      if (best.feature < 0) continue;

      auto mid_it = std::partition(
          samples.begin() + static_cast<long>(cur.begin),
          samples.begin() + static_cast<long>(cur.end), [&](std::size_t i) {
            return data_.at(i, static_cast<std::size_t>(best.feature)) <= best.threshold;
          });
      const auto mid = static_cast<std::size_t>(mid_it - samples.begin());
      const double parent_mass = gini_mass(static_cast<double>(pos), static_cast<double>(m));
      tree.importance[static_cast<std::size_t>(best.feature)] +=
          (parent_mass - best.child_mass) / root_size;

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[cur.node];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid, cur.end});
      stack.push_back({left, cur.begin, mid});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double child_mass = 0.0;
  };

  Split find_split(const std::vector<std::size_t>& samples, std::size_t begin, std::size_t end,
                   std::size_t pos_total, std::vector<std::size_t>& features) {
    const std::size_t m = end - begin;
    Split best;
    best.child_mass = std::numeric_limits<double>::infinity();
    // Draw features without replacement until max_features non-constant ones
    // have been examined (constant features do not count toward the budget).
    std::size_t visited = 0;
    for (std::size_t drawn = 0; drawn < features.size() && visited < max_features_; ++drawn) {
      std::swap(features[drawn], features[drawn + rng_.below(features.size() - drawn)]);
      const std::size_t f = features[drawn];

      buffer_.clear();
      for (std::size_t k = begin; k < end; ++k)
        buffer_.emplace_back(data_.at(samples[k], f), data_.y[samples[k]] > 0);
      std::sort(buffer_.begin(), buffer_.end());
      if (buffer_.front().first == buffer_.back().first) continue;
      ++visited;

      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < m; ++k) {
        left_pos += buffer_[k].second;
        const std::size_t n_left = k + 1;
        if (buffer_[k].first == buffer_[k + 1].first) continue;
        if (n_left < min_leaf_ || m - n_left < min_leaf_) continue;
        const double mass =
            gini_mass(static_cast<double>(left_pos), static_cast<double>(n_left)) +
            gini_mass(static_cast<double>(pos_total - left_pos), static_cast<double>(m - n_left));
        if (mass < best.child_mass - 1e-12) {
          best.feature = static_cast<int>(f);
          best.child_mass = mass;
          const double a = buffer_[k].first, b = buffer_[k + 1].first;
          double thr = a + (b - a) / 2.0;
          if (thr >= b) thr = a;
          best.threshold = thr;
        }
      }
    }
    return best;
  }

  const TrainingSet& data_;
  std::size_t min_leaf_;
  std::size_t max_features_;
  Rng rng_;
  std::vector<std::pair<double, bool>> buffer_;
};

}  // namespace detail

/// Smallest child size a split may produce: ceil(fraction * n_labeled).
inline std::size_t min_leaf_size(double fraction, std::size_t n_labeled) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_labeled) - 1e-9)));
}

/// Fits one CART tree on explicit bootstrap indices.
inline DecisionTree fit_tree(const TrainingSet& data, std::vector<std::size_t> bootstrap,
                             std::size_t min_leaf, std::uint64_t seed) {
  require(!bootstrap.empty(), "empty bootstrap sample");
  detail::TreeBuilder builder(data, min_leaf, seed);
  return builder.build(std::move(bootstrap));
}

inline ForestModel fit_forest(const TrainingSet& data, const ForestConfig& cfg) {
  cfg.validate();
  if (data.size() < 2) config_error("training error: need at least two labeled samples");
  const bool has_pos = std::find(data.y.begin(), data.y.end(), 1) != data.y.end();
  const bool has_neg = std::find(data.y.begin(), data.y.end(), -1) != data.y.end();
  if (!has_pos || !has_neg) config_error("training error: labeled set has a single class");

  const std::size_t min_leaf = min_leaf_size(cfg.min_samples_leaf_fraction, data.size());
  ForestModel model;
  model.n_features = data.n_features;
  model.trees.reserve(cfg.n_trees);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Rng boot(derive_seed(cfg.seed, 2 * t));
    std::vector<std::size_t> sample(data.size());
    for (auto& s : sample) s = boot.below(data.size());
    model.trees.push_back(fit_tree(data, std::move(sample), min_leaf, derive_seed(cfg.seed, 2 * t + 1)));
  }
  return model;
}

/// Picks the candidate leaf fraction with the best mean stratified-CV
/// accuracy. Ties go to the smallest fraction.
inline double tune_leaf_fraction(const TrainingSet& data, const ForestConfig& cfg) {
  cfg.validate();
  std::vector<double> candidates = cfg.candidate_fractions;
  std::sort(candidates.begin(), candidates.end());
  if (candidates.size() == 1) return candidates.front();

  const auto fold = stratified_folds(data.y, cfg.cv_folds, derive_seed(cfg.seed, "folds"));
  std::vector<TrainingSet> train(cfg.cv_folds), test(cfg.cv_folds);
  for (std::size_t f = 0; f < cfg.cv_folds; ++f) {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < data.size(); ++i)
      (fold[i] == static_cast<int>(f) ? out : in).push_back(i);
    train[f] = data.subset(in);
    test[f] = data.subset(out);
  }

  double best_score = -1.0;
  double best = candidates.front();
  for (double frac : candidates) {
    double score = 0.0;
    for (std::size_t f = 0; f < cfg.cv_folds; ++f) {
      ForestConfig sub = cfg;
      sub.min_samples_leaf_fraction = frac;
      sub.seed = derive_seed(cfg.seed, f);
      score += fit_forest(train[f], sub).accuracy(test[f]);
    }
    score /= static_cast<double>(cfg.cv_folds);
    if (score > best_score + 1e-12) {
      best_score = score;
      best = frac;
    }
  }
  return best;
}

struct ImportanceVector {
  std::vector<double> rho;

  static ImportanceVector uniform(std::size_t n_features) {
    return {std::vector<double>(n_features, 1.0)};
  }

  /// Rescales raw importances so they sum to their count; an all-zero input
  /// maps to uniform weights.
  static ImportanceVector from_raw(std::span<const double> raw) {
    double sum = 0.0;
    for (double v : raw) {
      require(v >= 0.0 && std::isfinite(v), "raw importances must be finite and >= 0");
      sum += v;
    }
    if (!(sum > 0.0)) return uniform(raw.size());
    ImportanceVector out;
    const double scale = static_cast<double>(raw.size()) / sum;
    for (double v : raw) out.rho.push_back(v * scale);
    return out;
  }
};

inline ImportanceVector feature_importances(const ForestModel& model) {
  std::vector<double> raw(model.n_features, 0.0);
  for (const auto& t : model.trees)
    for (std::size_t h = 0; h < raw.size(); ++h) raw[h] += t.importance[h];
  for (auto& v : raw) v /= static_cast<double>(model.trees.size());
  return ImportanceVector::from_raw(raw);
}

}  // namespace chnc

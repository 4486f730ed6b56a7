#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chnc/error.hpp"
#include "chnc/random.hpp"

namespace chnc {

/// Stratified k-fold assignment: each class is shuffled with `seed` and dealt
/// round-robin into folds, so fold sizes per class differ by at most one.
/// Returns the fold index of every entry of `labels` (+1/-1).
inline std::vector<int> stratified_folds(std::span<const int> labels, std::size_t n_folds,
                                         std::uint64_t seed) {
  if (n_folds < 2) config_error("need at least two folds");
  if (labels.size() < n_folds)
    config_error("fewer labeled samples (" + std::to_string(labels.size()) + ") than folds (" +
                 std::to_string(n_folds) + ")");
  std::vector<int> fold(labels.size(), -1);
  Rng rng(seed);
  std::size_t offset = 0;
  for (int cls : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t k = 0; k < members.size(); ++k)
      fold[members[k]] = static_cast<int>((offset + k) % n_folds);
    // Continue the deal where the previous class stopped to balance fold sizes.
    offset = (offset + members.size()) % n_folds;
  }
  for (int f : fold) require(f >= 0, "fold labels must be +1/-1");
  return fold;
}

}  // namespace chnc

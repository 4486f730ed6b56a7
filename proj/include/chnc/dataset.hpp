#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chnc/error.hpp"
#include "chnc/random.hpp"

namespace chnc {

enum class Role : std::uint8_t { unlabeled, positive, negative };

inline int label_of(Role r) {
  return r == Role::positive ? 1 : r == Role::negative ? -1 : 0;
}

inline Role role_of(int label) {
  return label > 0 ? Role::positive : label < 0 ? Role::negative : Role::unlabeled;
}

/// Feature matrix plus per-sample labeling state. Sample ids are row indices.
///
/// `given_label` is +1/-1 for labeled samples and 0 for unlabeled ones. The
/// optional `true_label` and `noisy` vectors are evaluation-only: nothing in
/// the classifier reads them.
struct Dataset {
  std::size_t n = 0;
  std::size_t n_features = 0;
  std::vector<double> features;  // row-major, n x n_features
  std::vector<Role> role;
  std::vector<int> given_label;
  std::vector<int> true_label;   // empty when unknown
  std::vector<bool> noisy;       // empty when unknown; false for unlabeled

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }

  bool has_truth() const { return !true_label.empty(); }

  std::vector<int> indices_with(Role r) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i)
      if (role[i] == r) out.push_back(static_cast<int>(i));
    return out;
  }

  std::size_t count(Role r) const {
    return static_cast<std::size_t>(std::count(role.begin(), role.end(), r));
  }

  void recompute_noise_flags() {
    if (!has_truth()) {
      noisy.clear();
      return;
    }
    noisy.assign(n, false);
    for (std::size_t i = 0; i < n; ++i)
      noisy[i] = role[i] != Role::unlabeled && given_label[i] != true_label[i];
  }

  void check_invariants() const {
    require(n_features >= 1, "dataset needs at least one feature");
    require(features.size() == n * n_features, "feature matrix size mismatch");
    require(role.size() == n && given_label.size() == n, "label vector size mismatch");
    for (std::size_t i = 0; i < n; ++i)
      require(given_label[i] == label_of(role[i]), "given_label disagrees with role");
    if (has_truth()) {
      require(true_label.size() == n, "true_label size mismatch");
      for (int y : true_label) require(y == 1 || y == -1, "true labels must be +1/-1");
    }
    if (!noisy.empty()) {
      require(noisy.size() == n, "noisy flag size mismatch");
      for (std::size_t i = 0; i < n; ++i) {
        const bool expect = has_truth() && role[i] != Role::unlabeled &&
                            given_label[i] != true_label[i];
        require(noisy[i] == expect, "noisy flag disagrees with labels");
      }
    }
  }

  /// Both labeled classes must be present before classification.
  void require_classifiable() const {
    if (n < 2) config_error("dataset needs at least two samples");
    if (count(Role::positive) == 0 || count(Role::negative) == 0)
      config_error("dataset needs at least one positive and one negative labeled sample");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

inline std::optional<int> parse_label(std::string_view s) {
  if (s == "1" || s == "+1") return 1;
  if (s == "-1") return -1;
  if (s.empty()) return 0;
  return std::nullopt;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string label_token(int y) { return y > 0 ? "+1" : y < 0 ? "-1" : ""; }

}  // namespace detail

/// Reads a CSV with a header row. Every column except `label_column` is a
/// feature. Label cells are "1", "+1", "-1" or empty (unlabeled).
inline Dataset load_csv(const std::string& path, const std::string& label_column = "label") {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) data_error(path + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split_commas(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end())
    data_error(path + ": no column named '" + label_column + "'");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t arity = header.size();
  if (arity < 2) data_error(path + ": need at least one feature column");

  Dataset ds;
  ds.n_features = arity - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != arity)
      data_error(path + ": parse error at line " + std::to_string(line_no) + ": expected " +
                 std::to_string(arity) + " cells, got " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_col) continue;
      const auto v = detail::parse_real(cells[c]);
      if (!v)
        data_error(path + ": parse error at line " + std::to_string(line_no) +
                   ": non-numeric feature '" + std::string(cells[c]) + "'");
      ds.features.push_back(*v);
    }
    const auto y = detail::parse_label(cells[label_col]);
    if (!y)
      data_error(path + ": format error at line " + std::to_string(line_no) +
                 ": unknown label token '" + std::string(cells[label_col]) + "'");
    ds.given_label.push_back(*y);
    ds.role.push_back(role_of(*y));
  }
  ds.n = ds.role.size();
  if (ds.n < 2) data_error(path + ": need at least two data rows");
  return ds;
}

/// Writes features and given labels in the format load_csv reads.
inline void write_csv(const Dataset& ds, const std::string& path,
                      const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) data_error("cannot write " + path);
  for (std::size_t h = 0; h < ds.n_features; ++h) out << 'f' << h << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (double v : ds.row(i)) out << detail::format_real(v) << ',';
    out << detail::label_token(ds.given_label[i]) << '\n';
  }
  if (!out) data_error("write failed: " + path);
}

/// Truth sidecar: "id,label" rows holding the hidden true class of every sample.
inline void write_truth(const Dataset& ds, const std::string& path) {
  require(ds.has_truth(), "write_truth needs true labels");
  std::ofstream out(path);
  if (!out) data_error("cannot write " + path);
  out << "id,label\n";
  for (std::size_t i = 0; i < ds.n; ++i)
    out << i << ',' << detail::label_token(ds.true_label[i]) << '\n';
  if (!out) data_error("write failed: " + path);
}

inline void load_truth(Dataset& ds, const std::string& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) data_error(path + ": missing header row");
  std::vector<int> truth(ds.n, 0);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    const auto id = cells.size() == 2 ? detail::parse_real(cells[0]) : std::nullopt;
    const auto y = cells.size() == 2 ? detail::parse_label(cells[1]) : std::nullopt;
    if (!id || !y || *y == 0 || *id < 0 || *id >= static_cast<double>(ds.n))
      data_error(path + ": bad truth row at line " + std::to_string(line_no));
    truth[static_cast<std::size_t>(*id)] = *y;
  }
  if (std::find(truth.begin(), truth.end(), 0) != truth.end())
    data_error(path + ": truth sidecar does not cover every sample");
  ds.true_label = std::move(truth);
  ds.recompute_noise_flags();
}

/// Keeps round(labeled_fraction * n) labels, stratified by class; the rest
/// become unlabeled but keep their class as hidden truth.
inline Dataset split_labeled_unlabeled(const Dataset& ds, double labeled_fraction,
                                       std::uint64_t seed) {
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0))
    config_error("labeled fraction must lie in (0, 1)");
  if (ds.count(Role::unlabeled) != 0)
    config_error("split needs every sample to carry a label");

  std::vector<int> by_class[2] = {ds.indices_with(Role::positive),
                                  ds.indices_with(Role::negative)};
  const auto total = static_cast<std::size_t>(std::llround(labeled_fraction * ds.n));

  // Largest-remainder allocation keeps each class within one sample of the
  // requested fraction while hitting the overall total exactly.
  std::size_t keep[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = labeled_fraction * static_cast<double>(by_class[c].size());
    keep[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += keep[c];
  }
  while (assigned < total) {
    const int c = remainder[0] >= remainder[1] ? 0 : 1;
    keep[c] += 1;
    remainder[c] = -1.0;
    ++assigned;
  }
  for (int c = 0; c < 2; ++c)
    if (keep[c] == 0 || keep[c] >= by_class[c].size())
      config_error("labeled fraction leaves a class empty on one side of the split");

  Dataset out = ds;
  if (!out.has_truth()) out.true_label = ds.given_label;
  Rng rng(seed);
  for (int c = 0; c < 2; ++c) {
    rng.shuffle(std::span<int>(by_class[c]));
    for (std::size_t k = keep[c]; k < by_class[c].size(); ++k) {
      const auto i = static_cast<std::size_t>(by_class[c][k]);
      out.role[i] = Role::unlabeled;
      out.given_label[i] = 0;
    }
  }
  out.recompute_noise_flags();
  return out;
}

/// Flips the given labels of the listed labeled samples.
inline Dataset flip_labels(const Dataset& ds, std::span<const int> ids) {
  Dataset out = ds;
  for (int id : ids) {
    const auto i = static_cast<std::size_t>(id);
    require(out.role[i] != Role::unlabeled, "cannot flip an unlabeled sample");
    out.given_label[i] = -out.given_label[i];
    out.role[i] = role_of(out.given_label[i]);
  }
  out.recompute_noise_flags();
  return out;
}

/// Returns the ids inject_noise would flip: floor(rate * |class|) labeled
/// samples per class, drawn uniformly.
inline std::vector<int> choose_noise(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) config_error("noise rate must lie in [0, 1)");
  std::vector<int> by_class[2] = {ds.indices_with(Role::positive),
                                  ds.indices_with(Role::negative)};
  if (by_class[0].empty() || by_class[1].empty())
    config_error("noise injection needs labeled samples in both classes");
  Rng rng(seed);
  std::vector<int> chosen;
  for (auto& members : by_class) {
    const auto flips = static_cast<std::size_t>(
        std::floor(rate * static_cast<double>(members.size()) + 1e-9));
    rng.shuffle(std::span<int>(members));
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<long>(flips));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline Dataset inject_noise(const Dataset& ds, double rate, std::uint64_t seed) {
  const auto chosen = choose_noise(ds, rate, seed);
  Dataset base = ds;
  if (!base.has_truth()) {
    base.true_label = ds.given_label;
    for (std::size_t i = 0; i < base.n; ++i)
      require(base.true_label[i] != 0, "noise injection without truth needs every sample labeled");
  }
  return flip_labels(base, chosen);
}

enum class CentroidLayout { hypercube, polytope };

struct SyntheticConfig {
  std::size_t n_samples = 1000;
  std::size_t n_features = 5;
  double pos_fraction = 0.5;
  std::size_t clusters_per_class = 2;
  double class_sep = 1.0;
  CentroidLayout layout = CentroidLayout::hypercube;
  std::uint64_t seed = 0;
};

/// Gaussian blobs: each class draws from `clusters_per_class` unit-variance
/// clusters, samples assigned to its clusters round-robin. Hypercube centroids
/// are distinct vertices of [-sep, sep]^H; polytope centroids are random points
/// on the sphere through those vertices. Rows are shuffled.
inline Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_samples < 2) config_error("need at least two samples");
  if (cfg.n_features < 1) config_error("need at least one feature");
  if (!(cfg.pos_fraction > 0.0 && cfg.pos_fraction < 1.0))
    config_error("pos_fraction must lie in (0, 1)");
  if (cfg.clusters_per_class < 1) config_error("clusters_per_class must be >= 1");
  if (!(cfg.class_sep > 0.0)) config_error("class_sep must be > 0");
  const std::size_t n_clusters = 2 * cfg.clusters_per_class;
  const std::size_t H = cfg.n_features;
  if (cfg.layout == CentroidLayout::hypercube && H < 63 &&
      n_clusters > (std::size_t{1} << H))
    config_error("hypercube in " + std::to_string(H) + " dimensions has fewer than " +
                 std::to_string(n_clusters) + " vertices");

  const auto n_pos = static_cast<std::size_t>(std::llround(cfg.pos_fraction * cfg.n_samples));
  if (n_pos == 0 || n_pos == cfg.n_samples)
    config_error("pos_fraction leaves one class empty");

  Rng rng(cfg.seed);
  std::vector<double> centroids(n_clusters * H);
  if (cfg.layout == CentroidLayout::hypercube) {
    std::set<std::vector<bool>> used;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      std::vector<bool> vertex(H);
      do {
        for (std::size_t h = 0; h < H; ++h) vertex[h] = (rng.next() >> 63) != 0;
      } while (!used.insert(vertex).second);
      for (std::size_t h = 0; h < H; ++h)
        centroids[c * H + h] = vertex[h] ? cfg.class_sep : -cfg.class_sep;
    }
  } else {
    const double radius = cfg.class_sep * std::sqrt(static_cast<double>(H));
    for (std::size_t c = 0; c < n_clusters; ++c) {
      double norm = 0.0;
      while (norm < 1e-12) {
        norm = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
          centroids[c * H + h] = rng.normal();
          norm += centroids[c * H + h] * centroids[c * H + h];
        }
        norm = std::sqrt(norm);
      }
      for (std::size_t h = 0; h < H; ++h) centroids[c * H + h] *= radius / norm;
    }
  }

  Dataset ds;
  ds.n = cfg.n_samples;
  ds.n_features = H;
  ds.features.resize(ds.n * H);
  ds.true_label.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const bool positive = i < n_pos;
    const std::size_t rank = positive ? i : i - n_pos;
    const std::size_t cluster =
        (positive ? 0 : cfg.clusters_per_class) + rank % cfg.clusters_per_class;
    for (std::size_t h = 0; h < H; ++h)
      ds.features[i * H + h] = centroids[cluster * H + h] + rng.normal();
    ds.true_label[i] = positive ? 1 : -1;
  }

  std::vector<std::size_t> order(ds.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  Dataset shuffled = ds;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const std::size_t src = order[i];
    std::copy_n(ds.features.begin() + static_cast<long>(src * H), H,
                shuffled.features.begin() + static_cast<long>(i * H));
    shuffled.true_label[i] = ds.true_label[src];
  }
  shuffled.given_label = shuffled.true_label;
  shuffled.role.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) shuffled.role[i] = role_of(shuffled.given_label[i]);
  shuffled.recompute_noise_flags();
  return shuffled;
}

/// Z-scores every feature column over all samples; constant columns become 0.
inline Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  const std::size_t H = ds.n_features;
  for (std::size_t h = 0; h < H; ++h) {
    double lo = ds.features[h], hi = ds.features[h], mean = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
      const double v = ds.features[i * H + h];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= static_cast<double>(ds.n);
    if (lo == hi) {
      for (std::size_t i = 0; i < ds.n; ++i) out.features[i * H + h] = 0.0;
      continue;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
      const double d = ds.features[i * H + h] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(ds.n));
    for (std::size_t i = 0; i < ds.n; ++i)
      out.features[i * H + h] = (ds.features[i * H + h] - mean) / sd;
  }
  return out;
}

}  // namespace chnc

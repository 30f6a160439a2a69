#include "regaug/tree.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace regaug {

DecisionTree::DecisionTree(TreeTask task, int n_classes, std::size_t input_dim,
                           std::vector<TreeNode> nodes, std::vector<std::uint32_t> class_counts)
    : task_(task),
      n_classes_(n_classes),
      input_dim_(input_dim),
      nodes_(std::move(nodes)),
      counts_(std::move(class_counts)) {
  if (nodes_.empty()) throw Error("DecisionTree: no nodes");
  for (const auto& nd : nodes_) {
    if (nd.is_leaf()) {
      if (task_ == TreeTask::classify &&
          static_cast<std::size_t>(nd.counts_at) + static_cast<std::size_t>(n_classes_) > counts_.size()) {
        throw Error("DecisionTree: leaf class counts out of range");
      }
      continue;
    }
    const auto n = static_cast<std::int32_t>(nodes_.size());
    if (nd.left <= 0 || nd.right <= 0 || nd.left >= n || nd.right >= n ||
        static_cast<std::size_t>(nd.feature) >= input_dim_) {
      throw Error("DecisionTree: malformed internal node");
    }
  }
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& nd = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
  }
  return i;
}

std::vector<double> DecisionTree::predict(const Table& X) const {
  if (X.cols() != input_dim_) throw Error("DecisionTree::predict: dimension mismatch");
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

std::span<const std::uint32_t> DecisionTree::leaf_counts(std::size_t node) const {
  if (task_ != TreeTask::classify || !nodes_.at(node).is_leaf()) return {};
  return {counts_.data() + nodes_[node].counts_at, static_cast<std::size_t>(n_classes_)};
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Point {
  double x;
  double y;
};

struct SweepResult {
  bool valid = false;
  double threshold = 0.0;
  /// Quantity to maximize: sum_child (sum y)^2 / n for regression,
  /// sum_child sum_k c_k^2 / n for classification.
  double score = -std::numeric_limits<double>::infinity();
};

double midpoint(double a, double b) {
  double mid = a + (b - a) / 2.0;
  // Adjacent doubles can round the midpoint up to b, which would send b left.
  if (!(mid < b)) mid = a;
  return mid;
}

/// `pts` must be sorted by x and contain at least two distinct x values.
SweepResult sweep(std::span<const Point> pts, TreeTask task, int n_classes, std::size_t min_leaf,
                  std::vector<double>& left_counts, std::span<const double> total_counts,
                  double total_sum) {
  SweepResult best;
  const std::size_t m = pts.size();
  if (task == TreeTask::regress) {
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      left_sum += pts[k].y;
      const std::size_t nl = k + 1;
      const std::size_t nr = m - nl;
      if (nl < min_leaf) continue;
      if (nr < min_leaf) break;
      if (!(pts[k].x < pts[k + 1].x)) continue;
      const double right_sum = total_sum - left_sum;
      const double score = left_sum * left_sum / static_cast<double>(nl) +
                           right_sum * right_sum / static_cast<double>(nr);
      if (score > best.score) {
        best.valid = true;
        best.score = score;
        best.threshold = midpoint(pts[k].x, pts[k + 1].x);
      }
    }
    return best;
  }
  std::fill(left_counts.begin(), left_counts.end(), 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    left_counts[static_cast<std::size_t>(pts[k].y)] += 1.0;
    const std::size_t nl = k + 1;
    const std::size_t nr = m - nl;
    if (nl < min_leaf) continue;
    if (nr < min_leaf) break;
    if (!(pts[k].x < pts[k + 1].x)) continue;
    double sl = 0.0;
    double sr = 0.0;
    for (int c = 0; c < n_classes; ++c) {
      const double l = left_counts[static_cast<std::size_t>(c)];
      const double r = total_counts[static_cast<std::size_t>(c)] - l;
      sl += l * l;
      sr += r * r;
    }
    const double score = sl / static_cast<double>(nl) + sr / static_cast<double>(nr);
    if (score > best.score) {
      best.valid = true;
      best.score = score;
      best.threshold = midpoint(pts[k].x, pts[k + 1].x);
    }
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const Table& X, std::span<const double> y, const TreeParams& params, TreeTask task,
              std::uint64_t seed)
      : X_(X), y_(y), params_(params), task_(task), rng_(seed), perm_(X.cols()) {
    if (task_ == TreeTask::classify) {
      if (params_.n_classes < 2) throw Error("fit_tree: n_classes must be >= 2");
      k_ = static_cast<std::size_t>(params_.n_classes);
    }
    left_counts_.resize(k_);
    node_counts_.resize(k_);
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    nodes_.emplace_back();
    struct Pending {
      std::size_t node;
      std::size_t begin;
      std::size_t end;
      int depth;
    };
    std::vector<Pending> stack{{0, 0, rows_.size(), 0}};
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      const auto split = process(p.node, p.begin, p.end, p.depth);
      if (!split) continue;
      const auto [mid] = *split;
      const auto left = static_cast<std::int32_t>(nodes_.size());
      nodes_.emplace_back();
      nodes_.emplace_back();
      nodes_[p.node].left = left;
      nodes_[p.node].right = left + 1;
      stack.push_back({static_cast<std::size_t>(left + 1), mid, p.end, p.depth + 1});
      stack.push_back({static_cast<std::size_t>(left), p.begin, mid, p.depth + 1});
    }
    const int classes = task_ == TreeTask::classify ? params_.n_classes : 0;
    return DecisionTree(task_, classes, X_.cols(), std::move(nodes_), std::move(counts_));
  }

 private:
  struct Partition {
    std::size_t mid;
  };

  std::optional<Partition> process(std::size_t node, std::size_t begin, std::size_t end, int depth) {
    const std::size_t m = end - begin;
    double sum = 0.0;
    bool pure = true;
    if (task_ == TreeTask::regress) {
      const double first = y_[rows_[begin]];
      for (std::size_t i = begin; i < end; ++i) {
        const double v = y_[rows_[i]];
        sum += v;
        pure = pure && v == first;
      }
    } else {
      std::fill(node_counts_.begin(), node_counts_.end(), 0.0);
      for (std::size_t i = begin; i < end; ++i) {
        const double v = y_[rows_[i]];
        if (!(v >= 0.0) || v >= static_cast<double>(k_) || v != std::floor(v)) {
          throw Error("fit_tree: class label out of range");
        }
        node_counts_[static_cast<std::size_t>(v)] += 1.0;
      }
      std::size_t nonzero = 0;
      for (double c : node_counts_) nonzero += c > 0.0;
      pure = nonzero <= 1;
    }

    const bool depth_reached = params_.max_depth >= 0 && depth >= params_.max_depth;
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    if (pure || depth_reached || m < 2 * min_leaf) {
      make_leaf(node, m, sum);
      return std::nullopt;
    }

    const std::size_t d = X_.cols();
    const bool subsample = params_.max_features > 0 && params_.max_features < d;
    const std::size_t budget = subsample ? params_.max_features : d;
    for (std::size_t f = 0; f < d; ++f) perm_[f] = f;

    SweepResult best;
    std::size_t best_feature = 0;
    std::size_t evaluated = 0;
    for (std::size_t j = 0; j < d && evaluated < budget; ++j) {
      if (subsample) std::swap(perm_[j], perm_[j + rng_.index(d - j)]);
      const std::size_t f = perm_[j];
      points_.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = rows_[begin + i];
        points_[i] = {X_(r, f), y_[r]};
      }
      std::sort(points_.begin(), points_.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
      if (!(points_.front().x < points_.back().x)) continue;  // constant here, not counted
      ++evaluated;
      const auto res = sweep(points_, task_, params_.n_classes, min_leaf, left_counts_, node_counts_, sum);
      if (res.valid && res.score > best.score) {
        best = res;
        best_feature = f;
      }
    }
    if (!best.valid) {
      make_leaf(node, m, sum);
      return std::nullopt;
    }

    auto& nd = nodes_[node];
    nd.feature = static_cast<std::int32_t>(best_feature);
    nd.threshold = best.threshold;
    const auto first = rows_.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = rows_.begin() + static_cast<std::ptrdiff_t>(end);
    const double thr = best.threshold;
    const auto it = std::stable_partition(first, last, [&](std::size_t r) { return X_(r, best_feature) <= thr; });
    return Partition{static_cast<std::size_t>(it - rows_.begin())};
  }

  void make_leaf(std::size_t node, std::size_t m, double sum) {
    auto& nd = nodes_[node];
    nd.feature = -1;
    if (task_ == TreeTask::regress) {
      nd.value = sum / static_cast<double>(m);
      return;
    }
    nd.counts_at = static_cast<std::uint32_t>(counts_.size());
    std::size_t majority = 0;
    for (std::size_t c = 0; c < k_; ++c) {
      counts_.push_back(static_cast<std::uint32_t>(node_counts_[c]));
      // Strict comparison: ties go to the lowest class index.
      if (node_counts_[c] > node_counts_[majority]) majority = c;
    }
    nd.value = static_cast<double>(majority);
  }

  const Table& X_;
  std::span<const double> y_;
  TreeParams params_;
  TreeTask task_;
  Rng rng_;
  std::size_t k_ = 0;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> perm_;
  std::vector<Point> points_;
  std::vector<double> left_counts_;
  std::vector<double> node_counts_;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> counts_;
};

}  // namespace

DecisionTree fit_tree(const Table& X, std::span<const double> y, const TreeParams& params,
                      TreeTask task, std::uint64_t seed, std::span<const std::size_t> sample) {
  if (X.rows() != y.size()) throw Error("fit_tree: X and y row counts differ");
  if (X.rows() == 0 || X.cols() == 0) throw Error("fit_tree: empty training table");
  std::vector<std::size_t> rows;
  if (sample.empty()) {
    rows.resize(X.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  } else {
    rows.assign(sample.begin(), sample.end());
    for (auto r : rows) {
      if (r >= X.rows()) throw Error("fit_tree: sample index out of range");
    }
  }
  return TreeBuilder(X, y, params, task, seed).build(std::move(rows));
}

SplitCandidate best_split(const Table& X, std::span<const double> y, std::span<const std::size_t> rows,
                          std::size_t feature, TreeTask task, int n_classes,
                          std::size_t min_samples_leaf) {
  std::vector<Point> pts;
  pts.reserve(rows.size());
  for (auto r : rows) pts.push_back({X(r, feature), y[r]});
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  if (pts.size() < 2 || !(pts.front().x < pts.back().x)) return {};

  const std::size_t k = task == TreeTask::classify ? static_cast<std::size_t>(n_classes) : 0;
  std::vector<double> totals(k, 0.0);
  std::vector<double> left(k, 0.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& p : pts) {
    sum += p.y;
    sum_sq += p.y * p.y;
    if (k) totals[static_cast<std::size_t>(p.y)] += 1.0;
  }
  const auto res = sweep(pts, task, n_classes, std::max<std::size_t>(1, min_samples_leaf), left, totals, sum);
  if (!res.valid) return {};
  SplitCandidate out;
  out.valid = true;
  out.threshold = res.threshold;
  // n * impurity = sum_sq - score (regression) or n - score (Gini).
  out.weighted_impurity = (task == TreeTask::regress ? sum_sq : static_cast<double>(pts.size())) - res.score;
  return out;
}

}  // namespace regaug

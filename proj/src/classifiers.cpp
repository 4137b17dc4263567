#include "barrier/classifiers.hpp"

#include "barrier/error.hpp"
#include "barrier/eval.hpp"
#include "barrier/rng.hpp"
#include "barrier/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

namespace barrier {

// ---------------------------------------------------------------------------
// Families and hyperparameters

std::string_view family_tag(ModelFamily family) {
  switch (family) {
    case ModelFamily::Uniform: return "uniform";
    case ModelFamily::Stratified: return "stratified";
    case ModelFamily::MostFrequent: return "most-frequent";
    case ModelFamily::SVM: return "svm";
    case ModelFamily::KNN: return "knn";
    case ModelFamily::DecisionTree: return "decision-tree";
    case ModelFamily::RandomForest: return "random-forest";
    case ModelFamily::NaiveBayes: return "naive-bayes";
  }
  return "unknown";
}

std::string_view family_display_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::Uniform: return "Uniform";
    case ModelFamily::Stratified: return "Stratified";
    case ModelFamily::MostFrequent: return "Most Frequent";
    case ModelFamily::SVM: return "SVM";
    case ModelFamily::KNN: return "kNN";
    case ModelFamily::DecisionTree: return "Decision Tree";
    case ModelFamily::RandomForest: return "Random Forest";
    case ModelFamily::NaiveBayes: return "Naive Bayes";
  }
  return "Unknown";
}

std::optional<ModelFamily> parse_family(std::string_view s) {
  const auto t = text::trim(s);
  for (auto f : kAllFamilies) {
    if (text::iequals(t, family_tag(f)) || text::iequals(t, family_display_name(f))) return f;
  }
  return std::nullopt;
}

bool is_baseline(ModelFamily family) {
  return family == ModelFamily::Uniform || family == ModelFamily::Stratified ||
         family == ModelFamily::MostFrequent;
}

Hyperparameters default_hyperparameters(ModelFamily family) {
  switch (family) {
    case ModelFamily::SVM: return {{"lambda", 1e-3}, {"epochs", 50}};
    case ModelFamily::KNN: return {{"k", 5}};
    case ModelFamily::DecisionTree: return {{"max_leaf_nodes", 0}};
    case ModelFamily::RandomForest:
      return {{"n_estimators", 100}, {"max_features", 0}, {"max_leaf_nodes", 0}, {"bootstrap", 1}};
    case ModelFamily::NaiveBayes: return {{"var_smoothing", 1e-9}};
    default: return {};
  }
}

double ModelSpec::param(std::string_view name) const {
  if (auto it = hyperparameters.find(name); it != hyperparameters.end()) return it->second;
  const auto defaults = default_hyperparameters(family);
  if (auto it = defaults.find(name); it != defaults.end()) return it->second;
  throw Error(Errc::InvalidArgument, std::string(family_tag(family)) +
                                         " has no hyperparameter '" + std::string(name) + "'");
}

ModelSpec make_spec(ModelFamily family, std::uint64_t seed, const Hyperparameters& overrides) {
  ModelSpec spec{family, default_hyperparameters(family), seed};
  for (const auto& [name, value] : overrides) {
    if (!spec.hyperparameters.contains(name)) {
      throw Error(Errc::InvalidArgument, std::string(family_tag(family)) +
                                             " has no hyperparameter '" + name + "'");
    }
    spec.hyperparameters[name] = value;
  }
  return spec;
}

HyperparameterGrid default_grid(ModelFamily family) {
  HyperparameterGrid grid;
  switch (family) {
    case ModelFamily::SVM:
      for (double l : {1e-4, 1e-3, 1e-2}) grid.push_back({{"lambda", l}});
      break;
    case ModelFamily::KNN:
      for (double k : {1, 3, 5, 7, 9, 11, 15}) grid.push_back({{"k", k}});
      break;
    case ModelFamily::DecisionTree:
      for (double m : {2, 4, 8, 16, 32, 64, 128, 256}) grid.push_back({{"max_leaf_nodes", m}});
      break;
    case ModelFamily::RandomForest:
      for (double n : {10, 50, 100, 200}) grid.push_back({{"n_estimators", n}});
      break;
    default:
      break;
  }
  return grid;
}

HyperparameterGrid parse_grid(std::string_view spec) {
  HyperparameterGrid grid{{}};
  if (text::trim(spec).empty()) return {};
  for (const auto& axis : text::split(spec, ';')) {
    const auto colon = axis.find(':');
    if (colon == std::string::npos) {
      throw Error(Errc::InvalidArgument, "grid axis '" + axis + "' needs name:v1,v2,...");
    }
    const auto name = std::string(text::trim(std::string_view(axis).substr(0, colon)));
    std::vector<double> values;
    for (const auto& v : text::split(std::string_view(axis).substr(colon + 1), ',')) {
      const auto parsed = text::parse_double(v);
      if (!parsed || !std::isfinite(*parsed)) {
        throw Error(Errc::InvalidArgument, "grid value '" + v + "' is not a number");
      }
      values.push_back(*parsed);
    }
    if (name.empty() || values.empty()) {
      throw Error(Errc::InvalidArgument, "grid axis '" + axis + "' is empty");
    }
    HyperparameterGrid next;
    for (const auto& point : grid) {
      for (double v : values) {
        auto p = point;
        p[name] = v;
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

std::string format_grid(const HyperparameterGrid& grid) {
  if (grid.empty()) return "";
  // recover axes in first-appearance order of the cartesian layout
  std::vector<std::string> names;
  for (const auto& [name, v] : grid.front()) names.push_back(name);
  std::string out;
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::vector<double> values;
    for (const auto& point : grid) {
      const double v = point.at(names[a]);
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    if (a) out += ';';
    out += names[a] + ':';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ',';
      out += text::format_double(values[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization

Standardization Standardization::fit(const matrix_t& X) {
  Standardization s;
  const auto n = static_cast<scalar_t>(X.rows());
  s.mean = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const scalar_t var = (X.col(j).array() - s.mean[j]).square().sum() / n;
    if (var > 0) {
      s.scale[j] = std::sqrt(var);
    } else {
      s.mean[j] = 0;
      s.scale[j] = 1;
    }
  }
  return s;
}

matrix_t Standardization::apply_rows(const matrix_t& X) const {
  return ((X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array())
      .matrix();
}

// ---------------------------------------------------------------------------
// Linear SVM: stochastic subgradient descent on the regularized hinge loss,
// bias folded in as a constant feature.

LinearParams svm_fit(const matrix_t& Xs, const labels_t& y, double lambda, int epochs,
                     std::uint64_t seed) {
  if (!(lambda > 0)) throw Error(Errc::InvalidArgument, "svm: lambda must be positive");
  if (epochs < 1) throw Error(Errc::InvalidArgument, "svm: epochs must be >= 1");
  const Eigen::Index n = Xs.rows();
  const Eigen::Index d = Xs.cols();
  vector_t w = vector_t::Zero(d);
  scalar_t b = 0;
  const scalar_t radius = 1.0 / std::sqrt(lambda);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (auto i : order) {
      ++t;
      const scalar_t eta = 1.0 / (lambda * static_cast<scalar_t>(t));
      const scalar_t yi = y[i] ? 1.0 : -1.0;
      const scalar_t margin = yi * (Xs.row(i).dot(w) + b);
      const scalar_t decay = 1.0 - eta * lambda;
      w *= decay;
      b *= decay;
      if (margin < 1.0) {
        w.noalias() += (eta * yi) * Xs.row(i).transpose();
        b += eta * yi;
      }
      const scalar_t norm = std::sqrt(w.squaredNorm() + b * b);
      if (norm > radius) {
        w *= radius / norm;
        b *= radius / norm;
      }
    }
  }
  return {std::move(w), b};
}

// ---------------------------------------------------------------------------
// kNN

bool knn_predict(const KnnParams& params, const vector_t& xs) {
  const Eigen::Index n = params.points.rows();
  const vector_t dist = (params.points.rowwise() - xs.transpose()).rowwise().squaredNorm();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(params.k, n));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  std::size_t votes_true = 0;
  for (std::size_t i = 0; i < k; ++i) votes_true += params.labels[idx[i]] ? 1 : 0;
  return votes_true * 2 > k;
}

// ---------------------------------------------------------------------------
// CART

std::size_t TreeParams::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

bool TreeParams::predict(const vector_t& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

namespace {

struct SplitChoice {
  bool valid = false;
  int feature = -1;
  scalar_t threshold = 0;
  /// sum over children of (t^2 + f^2) / n_child; larger is purer
  scalar_t purity = 0;
  scalar_t gain = 0;
};

struct PendingNode {
  int node = 0;
  /// Sample positions sorted by value, one list per feature (all-feature
  /// trees only).
  std::vector<std::vector<std::uint32_t>> sorted;
  /// Sample positions in ascending order (feature-subset trees only).
  std::vector<std::uint32_t> members;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  SplitChoice split;
};

class CartBuilder {
 public:
  CartBuilder(const matrix_t& X, const labels_t& y, std::span<const std::size_t> rows,
              std::size_t max_features, std::uint64_t seed)
      : X_(X), y_(y), rows_(rows), rng_(seed) {
    const auto d = static_cast<std::size_t>(X.cols());
    max_features_ = (max_features == 0 || max_features > d) ? d : max_features;
    presorted_ = max_features_ == d;
    feature_pool_.resize(d);
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
  }

  scalar_t value(std::uint32_t pos, std::size_t feature) const {
    return X_(static_cast<Eigen::Index>(rows_[pos]), static_cast<Eigen::Index>(feature));
  }
  bool label(std::uint32_t pos) const { return y_[static_cast<Eigen::Index>(rows_[pos])]; }

  PendingNode root() {
    PendingNode p;
    const auto m = static_cast<std::uint32_t>(rows_.size());
    std::vector<std::uint32_t> base(m);
    std::iota(base.begin(), base.end(), 0u);
    for (auto pos : base) ++(label(pos) ? p.n_true : p.n_false);
    if (!presorted_) {
      p.members = std::move(base);
      return p;
    }
    p.sorted.resize(feature_pool_.size());
    for (std::size_t f = 0; f < feature_pool_.size(); ++f) {
      p.sorted[f] = base;
      sort_by_value(p.sorted[f], f);
    }
    return p;
  }

  /// Best Gini split over this node's candidate features.
  SplitChoice find_split(const PendingNode& p) {
    SplitChoice best;
    if (p.n_true == 0 || p.n_false == 0) return best;
    const auto n = static_cast<scalar_t>(p.n_true + p.n_false);

    std::vector<std::size_t> features;
    if (max_features_ == feature_pool_.size()) {
      features = feature_pool_;
    } else {
      auto pool = feature_pool_;
      for (std::size_t i = 0; i < max_features_; ++i) {
        const auto j = i + static_cast<std::size_t>(rng_.uniform_index(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      features.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(max_features_));
      std::sort(features.begin(), features.end());
    }

    const scalar_t tt = static_cast<scalar_t>(p.n_true);
    const scalar_t ff = static_cast<scalar_t>(p.n_false);
    const scalar_t parent_purity = (tt * tt + ff * ff) / n;
    for (auto f : features) {
      column_.clear();
      if (presorted_) {
        for (auto pos : p.sorted[f]) column_.emplace_back(value(pos, f), label(pos));
      } else {
        for (auto pos : p.members) column_.emplace_back(value(pos, f), label(pos));
        const auto [lo, hi] = std::minmax_element(
            column_.begin(), column_.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });
        if (!(lo->first < hi->first)) continue;
        // order among equal values does not affect the boundary counts
        std::sort(column_.begin(), column_.end(),
                  [](const auto& u, const auto& v) { return u.first < v.first; });
      }
      std::size_t lt = 0, lf = 0;
      for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
        ++(column_[i].second ? lt : lf);
        const scalar_t a = column_[i].first;
        const scalar_t b = column_[i + 1].first;
        if (!(a < b)) continue;
        const auto nl = static_cast<scalar_t>(lt + lf);
        const auto nr = n - nl;
        const auto rt = tt - static_cast<scalar_t>(lt);
        const auto rf = ff - static_cast<scalar_t>(lf);
        const scalar_t purity =
            (static_cast<scalar_t>(lt * lt + lf * lf)) / nl + (rt * rt + rf * rf) / nr;
        if (!best.valid || purity > best.purity) {
          scalar_t threshold = a + (b - a) / 2;
          if (!(threshold < b)) threshold = a;
          best = {true, static_cast<int>(f), threshold, purity, purity - parent_purity};
        }
      }
    }
    return best;
  }

  std::pair<PendingNode, PendingNode> partition(PendingNode& p) {
    PendingNode left, right;
    left.sorted.resize(p.sorted.size());
    right.sorted.resize(p.sorted.size());
    const auto f = static_cast<std::size_t>(p.split.feature);
    std::vector<char> goes_left(rows_.size(), 0);
    for (auto pos : presorted_ ? p.sorted[f] : p.members) {
      if (value(pos, f) <= p.split.threshold) {
        goes_left[pos] = 1;
        ++(label(pos) ? left.n_true : left.n_false);
      } else {
        ++(label(pos) ? right.n_true : right.n_false);
      }
    }
    for (std::size_t g = 0; g < p.sorted.size(); ++g) {
      auto& src = p.sorted[g];
      left.sorted[g].reserve(left.n_true + left.n_false);
      right.sorted[g].reserve(right.n_true + right.n_false);
      for (auto pos : src) (goes_left[pos] ? left.sorted[g] : right.sorted[g]).push_back(pos);
      std::vector<std::uint32_t>().swap(src);
    }
    for (auto pos : p.members) (goes_left[pos] ? left.members : right.members).push_back(pos);
    std::vector<std::uint32_t>().swap(p.members);
    return {std::move(left), std::move(right)};
  }

 private:
  const matrix_t& X_;
  const labels_t& y_;
  std::span<const std::size_t> rows_;
  Rng rng_;
  std::size_t max_features_ = 0;
  bool presorted_ = true;
  std::vector<std::size_t> feature_pool_;
  std::vector<std::pair<scalar_t, bool>> column_;

  void sort_by_value(std::vector<std::uint32_t>& positions, std::size_t f) const {
    std::stable_sort(positions.begin(), positions.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return value(a, f) < value(b, f); });
  }
};

TreeNode make_leaf(std::size_t n_true, std::size_t n_false) {
  TreeNode node;
  node.n_true = n_true;
  node.n_false = n_false;
  node.label = n_true > n_false;
  return node;
}

}  // namespace

TreeParams cart_fit(const matrix_t& X, const labels_t& y, std::span<const std::size_t> rows,
                    std::size_t max_leaf_nodes, std::size_t max_features, std::uint64_t seed) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "cart: no training rows");
  CartBuilder builder(X, y, rows, max_features, seed);
  TreeParams tree;

  auto root = builder.root();
  tree.nodes.push_back(make_leaf(root.n_true, root.n_false));
  root.node = 0;
  root.split = builder.find_split(root);

  // best-first: larger impurity decrease first, then earlier node
  auto cmp = [](const PendingNode* a, const PendingNode* b) {
    const scalar_t ga = a->split.gain;
    const scalar_t gb = b->split.gain;
    return ga < gb || (ga == gb && a->node > b->node);
  };
  std::vector<std::unique_ptr<PendingNode>> storage;
  std::priority_queue<PendingNode*, std::vector<PendingNode*>, decltype(cmp)> frontier(cmp);
  if (root.split.valid) {
    storage.push_back(std::make_unique<PendingNode>(std::move(root)));
    frontier.push(storage.back().get());
  }

  std::size_t leaves = 1;
  while (!frontier.empty() && (max_leaf_nodes == 0 || leaves < max_leaf_nodes)) {
    PendingNode* p = frontier.top();
    frontier.pop();
    auto [left, right] = builder.partition(*p);

    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(make_leaf(left.n_true, left.n_false));
    const int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(make_leaf(right.n_true, right.n_false));
    auto& parent = tree.nodes[static_cast<std::size_t>(p->node)];
    parent.feature = p->split.feature;
    parent.threshold = p->split.threshold;
    parent.left = left_id;
    parent.right = right_id;
    ++leaves;

    left.node = left_id;
    right.node = right_id;
    for (auto* child : {&left, &right}) {
      child->split = builder.find_split(*child);
      if (child->split.valid) {
        storage.push_back(std::make_unique<PendingNode>(std::move(*child)));
        frontier.push(storage.back().get());
      }
    }
    // release the parent's index lists
    p->sorted.clear();
    p->sorted.shrink_to_fit();
    p->members = {};
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

NaiveBayesParams gaussian_nb_fit(const matrix_t& X, const labels_t& y, double var_smoothing) {
  const Eigen::Index d = X.cols();
  const auto n = static_cast<scalar_t>(X.rows());
  NaiveBayesParams p;
  p.means.setZero(2, d);
  p.variances.setZero(2, d);
  std::array<scalar_t, 2> count{0, 0};
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int c = y[i] ? 1 : 0;
    p.means.row(c) += X.row(i);
    count[static_cast<std::size_t>(c)] += 1;
  }
  for (int c = 0; c < 2; ++c) p.means.row(c) /= count[static_cast<std::size_t>(c)];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int c = y[i] ? 1 : 0;
    p.variances.row(c) += (X.row(i) - p.means.row(c)).array().square().matrix();
  }
  for (int c = 0; c < 2; ++c) p.variances.row(c) /= count[static_cast<std::size_t>(c)];

  const vector_t overall_mean = X.colwise().mean().transpose();
  scalar_t max_var = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    max_var = std::max(max_var, (X.col(j).array() - overall_mean[j]).square().sum() / n);
  }
  const scalar_t epsilon = max_var > 0 ? var_smoothing * max_var : var_smoothing;
  p.variances.array() += epsilon;
  p.log_prior << std::log(count[0] / n), std::log(count[1] / n);
  return p;
}

namespace {

bool nb_predict(const NaiveBayesParams& p, const vector_t& x) {
  std::array<scalar_t, 2> score{};
  for (int c = 0; c < 2; ++c) {
    const auto var = p.variances.row(c).array();
    const auto diff = x.transpose().array() - p.means.row(c).array();
    score[static_cast<std::size_t>(c)] =
        p.log_prior[c] - 0.5 * (2.0 * std::numbers::pi * var).log().sum() -
        0.5 * (diff.square() / var).sum();
  }
  return score[1] > score[0];
}

std::size_t positive_count(double value, std::string_view name) {
  if (!(value >= 0) || value != std::floor(value)) {
    throw Error(Errc::InvalidArgument,
                std::string(name) + " must be a non-negative integer, got " + text::format_double(value));
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

// ---------------------------------------------------------------------------
// train / predict

TrainedModel train(const ModelSpec& spec, const matrix_t& X, const labels_t& y) {
  if (X.rows() == 0) throw Error(Errc::EmptyInput, "train: empty training set");
  if (X.rows() != y.size()) {
    throw Error(Errc::LengthMismatch, "train: " + std::to_string(X.rows()) + " rows but " +
                                          std::to_string(y.size()) + " labels");
  }
  const auto n_true = static_cast<std::size_t>(y.count());
  const auto n_false = static_cast<std::size_t>(y.size()) - n_true;
  const bool single_class = n_true == 0 || n_false == 0;

  TrainedModel model;
  model.spec = spec;
  model.n_features = static_cast<std::size_t>(X.cols());

  switch (spec.family) {
    case ModelFamily::Uniform:
      model.params = RandomParams{0.5, spec.seed};
      break;
    case ModelFamily::Stratified:
      if (single_class) {
        throw Error(Errc::DegenerateTrainingSet, "stratified baseline needs both classes");
      }
      model.params = RandomParams{static_cast<double>(n_true) / static_cast<double>(y.size()),
                                  spec.seed};
      break;
    case ModelFamily::MostFrequent:
      model.params = ConstantParams{n_true > n_false};
      break;
    case ModelFamily::SVM: {
      model.standardization = Standardization::fit(X);
      const auto epochs = positive_count(spec.param("epochs"), "epochs");
      model.params = svm_fit(model.standardization.apply_rows(X), y, spec.param("lambda"),
                             static_cast<int>(epochs), spec.seed);
      break;
    }
    case ModelFamily::KNN: {
      const auto k = positive_count(spec.param("k"), "k");
      if (k == 0) throw Error(Errc::InvalidArgument, "knn: k must be >= 1");
      model.standardization = Standardization::fit(X);
      model.params = KnnParams{model.standardization.apply_rows(X), y, static_cast<int>(k)};
      break;
    }
    case ModelFamily::DecisionTree: {
      std::vector<std::size_t> rows(static_cast<std::size_t>(X.rows()));
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      model.params = cart_fit(X, y, rows, positive_count(spec.param("max_leaf_nodes"), "max_leaf_nodes"),
                              0, spec.seed);
      break;
    }
    case ModelFamily::RandomForest: {
      const auto n_trees = positive_count(spec.param("n_estimators"), "n_estimators");
      if (n_trees == 0) throw Error(Errc::InvalidArgument, "random-forest: n_estimators >= 1");
      auto max_features = positive_count(spec.param("max_features"), "max_features");
      if (max_features == 0) {
        max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));
      }
      const auto max_leaf = positive_count(spec.param("max_leaf_nodes"), "max_leaf_nodes");
      const bool bootstrap = spec.param("bootstrap") != 0;
      const auto n = static_cast<std::size_t>(X.rows());
      ForestParams forest;
      std::vector<std::size_t> rows(n);
      for (std::size_t t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(spec.seed, t, 0));
        for (std::size_t i = 0; i < n; ++i) {
          rows[i] = bootstrap ? static_cast<std::size_t>(rng.uniform_index(n)) : i;
        }
        forest.trees.push_back(
            cart_fit(X, y, rows, max_leaf, max_features, derive_seed(spec.seed, t, 1)));
      }
      model.params = std::move(forest);
      break;
    }
    case ModelFamily::NaiveBayes:
      if (single_class) {
        throw Error(Errc::DegenerateTrainingSet, "naive-bayes needs both classes");
      }
      model.params = gaussian_nb_fit(X, y, spec.param("var_smoothing"));
      break;
  }
  return model;
}

TrainedModel train(const ModelSpec& spec, const std::vector<LabeledInstance>& data) {
  if (data.empty()) throw Error(Errc::EmptyInput, "train: empty training set");
  const auto d = data.front().features.size();
  matrix_t X(static_cast<Eigen::Index>(data.size()), d);
  labels_t y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].features.size() != d) {
      throw Error(Errc::LengthMismatch, "train: ragged feature vectors");
    }
    X.row(static_cast<Eigen::Index>(i)) = data[i].features.transpose();
    y[static_cast<Eigen::Index>(i)] = data[i].label;
  }
  return train(spec, X, y);
}

bool predict(const TrainedModel& model, const vector_t& x, std::uint64_t draw) {
  if (static_cast<std::size_t>(x.size()) != model.n_features) {
    throw Error(Errc::LengthMismatch, "predict: expected " + std::to_string(model.n_features) +
                                          " features, got " + std::to_string(x.size()));
  }
  struct Visitor {
    const TrainedModel& model;
    const vector_t& x;
    std::uint64_t draw;

    bool operator()(const ConstantParams& p) const { return p.label; }
    bool operator()(const RandomParams& p) const {
      return counter_uniform01(p.seed, draw) < p.p_true;
    }
    bool operator()(const LinearParams& p) const {
      return model.standardization.apply(x).dot(p.weights) + p.bias > 0;
    }
    bool operator()(const KnnParams& p) const {
      return knn_predict(p, model.standardization.apply(x));
    }
    bool operator()(const TreeParams& p) const { return p.predict(x); }
    bool operator()(const ForestParams& p) const {
      std::size_t votes = 0;
      for (const auto& tree : p.trees) votes += tree.predict(x) ? 1 : 0;
      return votes * 2 > p.trees.size();
    }
    bool operator()(const NaiveBayesParams& p) const { return nb_predict(p, x); }
  };
  return std::visit(Visitor{model, x, draw}, model.params);
}

labels_t predict(const TrainedModel& model, const matrix_t& X) {
  labels_t out(X.rows());
  vector_t row;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    row = X.row(i).transpose();
    out[i] = predict(model, row, static_cast<std::uint64_t>(i));
  }
  return out;
}

ModelSpec sweep(const ModelSpec& base, const HyperparameterGrid& grid, const matrix_t& X_train,
                const labels_t& y_train, const matrix_t& X_eval, const labels_t& y_eval) {
  if (grid.empty()) throw Error(Errc::InvalidArgument, "sweep: empty grid");
  auto overlay = [&](const Hyperparameters& point) {
    ModelSpec spec = base;
    for (const auto& [name, value] : point) {
      if (!spec.hyperparameters.contains(name)) {
        throw Error(Errc::InvalidArgument, std::string(family_tag(base.family)) +
                                               " has no hyperparameter '" + name + "'");
      }
      spec.hyperparameters[name] = value;
    }
    return spec;
  };
  if (grid.size() == 1) return overlay(grid.front());
  std::optional<ModelSpec> best;
  double best_f1 = -1;
  for (const auto& point : grid) {
    auto spec = overlay(point);
    const auto model = train(spec, X_train, y_train);
    const double f1 = micro_metrics(predict(model, X_eval), y_eval).micro_f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = std::move(spec);
    }
  }
  return *best;
}

ModelSpec sweep(ModelFamily family, const HyperparameterGrid& grid, std::uint64_t seed,
                const matrix_t& X_train, const labels_t& y_train, const matrix_t& X_eval,
                const labels_t& y_eval) {
  return sweep(make_spec(family, seed), grid, X_train, y_train, X_eval, y_eval);
}

}  // namespace barrier

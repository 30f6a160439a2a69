#include "regaug/augment.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "regaug/metrics.hpp"

namespace regaug {

namespace {

constexpr std::string_view kModelMagic = "regaug-augment-model";
constexpr int kModelVersion = 1;

}  // namespace

AugmentModel::AugmentModel(ThresholdSet thresholds, ClassEncoding encoding,
                           std::vector<ForestClassifier> classifiers, std::size_t input_dim)
    : thresholds_(std::move(thresholds)),
      encoding_(encoding),
      classifiers_(std::move(classifiers)),
      input_dim_(input_dim) {
  const std::size_t expected = encoding_ == ClassEncoding::binary_per_threshold ? thresholds_.size() : 1;
  if (classifiers_.size() != expected) throw Error("AugmentModel: classifier count does not match encoding");
  for (const auto& c : classifiers_) {
    if (c.input_dim() != input_dim_) throw Error("AugmentModel: classifier input width mismatch");
  }
  if (encoding_ == ClassEncoding::multiclass_interval &&
      classifiers_.front().n_classes() != static_cast<int>(thresholds_.size() + 1)) {
    throw Error("AugmentModel: multiclass forest must have S + 1 classes");
  }
}

Table AugmentModel::probabilities(const Table& X) const {
  if (X.cols() != input_dim_) {
    throw Error("augment: expected " + std::to_string(input_dim_) + " input columns, got " +
                std::to_string(X.cols()));
  }
  const std::size_t s = thresholds_.size();
  Table out(X.rows(), s);
  if (encoding_ == ClassEncoding::binary_per_threshold) {
    for (std::size_t i = 0; i < s; ++i) {
      const auto p = classifiers_[i].predict_proba(X);
      for (std::size_t r = 0; r < X.rows(); ++r) out(r, i) = p[r];
    }
    return out;
  }
  // P(y <= y_i) = P(interval index < i), accumulated on the vote-count scale
  // so the result stays on the 1/T grid.
  const auto& forest = classifiers_.front();
  const Table per_class = forest.predict_class_proba(X);
  const auto t = static_cast<double>(forest.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double votes = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      votes += std::round(per_class(r, i) * t);
      out(r, i) = votes / t;
    }
  }
  return out;
}

Table AugmentModel::transform(const Table& X) const { return Table::hconcat(X, probabilities(X)); }

std::uint64_t classifier_seed(std::uint64_t master_seed, std::size_t i) {
  return derive_seed(master_seed, "clf", i);
}

AugmentModel fit_augmenter(const Table& X_train, std::span<const double> y_train, const AugmentOptions& options) {
  if (X_train.rows() != y_train.size()) throw Error("fit_augmenter: X and y row counts differ");
  if (options.s == 0) throw Error("fit_augmenter: S must be >= 1");
  ThresholdSet ts = make_thresholds(y_train, options.s, options.method);
  const ClassLabels labels = encode_labels(y_train, ts, options.encoding);

  ForestParams fp;
  fp.n_trees = options.n_trees;
  std::vector<ForestClassifier> classifiers;
  if (options.encoding == ClassEncoding::binary_per_threshold) {
    classifiers.resize(options.s);
    parallel_for(options.s, options.threads, [&](std::size_t i) {
      classifiers[i] = fit_forest_classifier(X_train, labels.binary[i], fp, classifier_seed(options.seed, i));
    });
  } else {
    fp.threads = options.threads;
    classifiers.push_back(fit_forest_classifier(X_train, labels.interval, fp,
                                                derive_seed(options.seed, "clf-multiclass"),
                                                static_cast<int>(options.s + 1)));
  }
  return AugmentModel(std::move(ts), options.encoding, std::move(classifiers), X_train.cols());
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void write_tree(std::ostream& out, const DecisionTree& tree) {
  out << "tree " << (tree.task() == TreeTask::classify ? "classify" : "regress") << ' ' << tree.n_classes()
      << ' ' << tree.input_dim() << ' ' << tree.nodes().size() << ' ' << tree.class_counts().size() << '\n';
  for (const auto& nd : tree.nodes()) {
    out << nd.feature << ' ' << nd.left << ' ' << nd.right << ' ' << nd.counts_at << ' '
        << format_double(nd.threshold) << ' ' << format_double(nd.value) << '\n';
  }
  out << "counts";
  for (auto c : tree.class_counts()) out << ' ' << c;
  out << '\n';
}

std::string expect_word(std::istream& in, std::string_view word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw Error("augment model: expected '" + std::string(word) + "', found '" + got + "'");
  }
  return got;
}

template <typename T>
T read_value(std::istream& in, std::string_view what) {
  T v{};
  if (!(in >> v)) throw Error("augment model: cannot read " + std::string(what));
  return v;
}

double read_double(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw Error("augment model: truncated number");
  return parse_double(tok);
}

DecisionTree read_tree(std::istream& in) {
  expect_word(in, "tree");
  const auto task_word = read_value<std::string>(in, "tree task");
  const auto n_classes = read_value<int>(in, "class count");
  const auto input_dim = read_value<std::size_t>(in, "input width");
  const auto n_nodes = read_value<std::size_t>(in, "node count");
  const auto n_counts = read_value<std::size_t>(in, "count length");
  std::vector<TreeNode> nodes(n_nodes);
  for (auto& nd : nodes) {
    nd.feature = read_value<std::int32_t>(in, "feature");
    nd.left = read_value<std::int32_t>(in, "left");
    nd.right = read_value<std::int32_t>(in, "right");
    nd.counts_at = read_value<std::uint32_t>(in, "counts offset");
    nd.threshold = read_double(in);
    nd.value = read_double(in);
  }
  expect_word(in, "counts");
  std::vector<std::uint32_t> counts(n_counts);
  for (auto& c : counts) c = read_value<std::uint32_t>(in, "class count");
  const TreeTask task = task_word == "classify" ? TreeTask::classify : TreeTask::regress;
  return DecisionTree(task, n_classes, input_dim, std::move(nodes), std::move(counts));
}

}  // namespace

void save_augment_model(std::ostream& out, const AugmentModel& model) {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "encoding " << to_string(model.encoding()) << '\n';
  out << "method " << to_string(model.thresholds().method) << '\n';
  out << "input_dim " << model.input_dim() << '\n';
  out << "thresholds " << model.s();
  for (double t : model.thresholds().thresholds) out << ' ' << format_double(t);
  out << '\n';
  out << "classifiers " << model.classifiers().size() << '\n';
  for (const auto& forest : model.classifiers()) {
    out << "forest " << forest.n_classes() << ' ' << forest.size() << '\n';
    for (const auto& tree : forest.trees()) write_tree(out, tree);
  }
  out << "end\n";
  if (!out) throw Error("augment model: write failed");
}

AugmentModel load_augment_model(std::istream& in) {
  expect_word(in, kModelMagic);
  const int version = read_value<int>(in, "version");
  if (version != kModelVersion) {
    throw Error("augment model: unsupported version " + std::to_string(version));
  }
  expect_word(in, "encoding");
  const ClassEncoding encoding = parse_encoding(read_value<std::string>(in, "encoding"));
  expect_word(in, "method");
  ThresholdSet ts;
  ts.method = parse_discretization(read_value<std::string>(in, "method"));
  expect_word(in, "input_dim");
  const auto input_dim = read_value<std::size_t>(in, "input width");
  expect_word(in, "thresholds");
  const auto s = read_value<std::size_t>(in, "threshold count");
  ts.thresholds.resize(s);
  for (auto& t : ts.thresholds) t = read_double(in);
  expect_word(in, "classifiers");
  const auto n_forests = read_value<std::size_t>(in, "classifier count");
  std::vector<ForestClassifier> forests;
  forests.reserve(n_forests);
  for (std::size_t f = 0; f < n_forests; ++f) {
    expect_word(in, "forest");
    const auto n_classes = read_value<int>(in, "class count");
    const auto n_trees = read_value<std::size_t>(in, "tree count");
    std::vector<DecisionTree> trees;
    trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) trees.push_back(read_tree(in));
    forests.emplace_back(std::move(trees), n_classes, input_dim);
  }
  expect_word(in, "end");
  return AugmentModel(std::move(ts), encoding, std::move(forests), input_dim);
}

// ---------------------------------------------------------------------------

ArmScores evaluate_arm(const Table& X_train, std::span<const double> y_train, const Table& X_test,
                       std::span<const double> y_test, RegressorKind kind, const GridSearchSpec& grid,
                       std::uint64_t regressor_seed) {
  const auto model = fit_with_protocol(X_train, y_train, kind, grid, regressor_seed);
  ArmScores s;
  s.rmse_train = rmse(y_train, model.predict(X_train));
  s.rmse_test = X_test.rows() ? rmse(y_test, model.predict(X_test)) : 0.0;
  return s;
}

NativeVsAugmented run_native_vs_augmented(const Dataset& train, const Dataset& test, RegressorKind kind,
                                          const AugmentOptions& options, const GridSearchSpec& grid,
                                          std::uint64_t regressor_seed) {
  const Table X_train = train.features();
  const Table X_test = test.features();
  NativeVsAugmented out;
  out.native = evaluate_arm(X_train, train.target, X_test, test.target, kind, grid, regressor_seed);
  const AugmentModel am = fit_augmenter(X_train, train.target, options);
  out.augmented = evaluate_arm(am.transform(X_train), train.target, am.transform(X_test), test.target, kind, grid,
                               regressor_seed);
  return out;
}

}  // namespace regaug

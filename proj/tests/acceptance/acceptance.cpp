// Acceptance checks. One line per criterion: PASS, FAIL or SKIP.
// Exits non-zero when any criterion fails.

#include "barrier/error.hpp"
#include "barrier/eval.hpp"
#include "barrier/pipeline.hpp"
#include "barrier/synth.hpp"

#include "../generators.hpp"
#include "../support.hpp"
#include "../verdicts.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

using namespace barrier;

namespace {

constexpr double kMetricsBudgetSeconds = 1.0;
constexpr double kOracleBudgetSeconds = 10.0;
constexpr double kClassifierBudgetSeconds = 30.0;
constexpr double kThreshold = 0.9;
constexpr double kThresholdNudge = 1e-9;
constexpr double kBaselineExact = 0.70;
constexpr double kBaselineExactTolerance = 1e-12;
constexpr double kSanityMinF1 = 0.99;
constexpr double kSeparableMargin = 0.5;
constexpr std::size_t kSeparablePoints = 200;
constexpr std::uint64_t kSeparableSets = 8;
constexpr std::size_t kOracleArticles = 500;
constexpr std::size_t kRandomTrials = 1000;
constexpr std::size_t kFolds = 10;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::Skip, std::move(d)}; }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Outcome metric_identity() {
  Stopwatch clock;
  Rng rng(0xA11CE);
  for (std::size_t t = 0; t < kRandomTrials; ++t) {
    const auto n = 1 + rng.uniform_index(500);
    const auto p = gen::labels(rng, n, rng.uniform01());
    const auto g = gen::labels(rng, n, rng.uniform01());
    const auto m = micro_metrics(p, g);
    if (m.micro_precision != m.classification_accuracy || m.micro_recall != m.classification_accuracy ||
        m.micro_f1 != m.classification_accuracy) {
      return fail("trial " + std::to_string(t) + " (n=" + std::to_string(n) + ") differs");
    }
  }
  const double s = clock.seconds();
  if (s >= kMetricsBudgetSeconds) return fail("took " + fmt(s, 2) + " s");
  return pass(std::to_string(kRandomTrials) + " vectors, " + fmt(s, 3) + " s");
}

char planted_code(PlantedLabel l) {
  return l == PlantedLabel::True ? 'T' : l == PlantedLabel::False ? 'F' : 'D';
}

Outcome oracle_equivalence() {
  Stopwatch clock;
  SyntheticSpec spec;
  spec.n_articles = kOracleArticles;
  const auto corpus = generate_synthetic(spec);
  testing::TempDir dir("acceptance-oracle");
  write_synthetic(corpus, dir.path());
  const auto mine = testing::pipeline_verdicts(testing::corpus_config(dir.path(), spec.event_label));
  const auto oracle = oracle::reannotate(dir.path(), kThreshold);
  if (oracle.size() != kOracleArticles || corpus.truth.size() != kOracleArticles) {
    return fail("expected " + std::to_string(kOracleArticles) + " examples, oracle saw " +
                std::to_string(oracle.size()));
  }
  std::array<std::size_t, 5> agree{};
  std::array<std::size_t, 5> kept{};
  for (std::size_t i = 0; i < kOracleArticles; ++i) {
    const auto& truth = corpus.truth[i];
    const auto it = mine.find(truth.article_id);
    for (std::size_t b = 0; b < 5; ++b) {
      const char planted = planted_code(truth.labels[b]);
      const char got = it == mine.end() ? '?' : it->second[b];
      kept[b] += planted != 'D';
      agree[b] += oracle[i].article_id == truth.article_id && oracle[i].labels[b] == planted &&
                  got == planted;
    }
  }
  const double s = clock.seconds();
  std::string detail;
  bool ok = true;
  for (std::size_t b = 0; b < 5; ++b) {
    detail += (b ? ", " : "") + std::string(barrier_slug(kAllBarriers[b])) + " " +
              std::to_string(agree[b]) + "/" + std::to_string(kOracleArticles) + " (" +
              std::to_string(kept[b]) + " labelled)";
    ok = ok && agree[b] == kOracleArticles;
  }
  detail += "; " + fmt(s, 2) + " s";
  if (s >= kOracleBudgetSeconds) ok = false;
  return ok ? pass(detail) : fail(detail);
}

Outcome threshold_semantics() {
  // (9,3,3,1,0,0) against e0: 9 / sqrt(100) = 0.9 exactly in binary64.
  vector_t u = vector_t::Zero(6);
  u[0] = 1;
  vector_t v(6);
  v << 9, 3, 3, 1, 0, 0;
  const double exact = cosine_similarity(u, v);
  const bool at = annotate_vector_barrier(u, v, kThreshold);
  const bool above = label_from_similarity(kThreshold + kThresholdNudge, kThreshold);
  const bool below = label_from_similarity(kThreshold - kThresholdNudge, kThreshold);
  const std::string detail = "cos=" + fmt(exact, 17) + " -> " + (at ? "TRUE" : "FALSE") +
                             ", 0.9+1e-9 -> " + (above ? "TRUE" : "FALSE");
  if (exact != kThreshold) return fail("constructed similarity is not exactly 0.9: " + detail);
  return at && !above && below ? pass(detail) : fail(detail);
}

Outcome baseline_fidelity() {
  const auto spec = make_spec(ModelFamily::MostFrequent, 1);
  ExperimentOptions options;
  options.folds = kFolds;
  Rng rng(0xBA5E);
  const auto data = gen::dataset(rng, 30, 70);
  const auto row = run_experiment(data, {spec}, options).rows.at(0).metrics;
  if (std::abs(row.classification_accuracy - kBaselineExact) > kBaselineExactTolerance ||
      std::abs(row.micro_f1 - kBaselineExact) > kBaselineExactTolerance) {
    return fail("70/30 gives CA " + fmt(row.classification_accuracy) + ", F1 " + fmt(row.micro_f1));
  }
  std::size_t checked = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    const auto n_true = kFolds + rng.uniform_index(120);
    const auto n_false = kFolds + rng.uniform_index(120);
    const auto ds = gen::dataset(rng, n_true, n_false);
    options.seed = rng.next();
    const auto m = run_experiment(ds, {spec}, options).rows.at(0).metrics;
    const double n = static_cast<double>(n_true + n_false);
    const double majority = static_cast<double>(std::max(n_true, n_false)) / n;
    if (std::abs(m.classification_accuracy - majority) > 1.0 / n + 1e-12) {
      return fail("dataset " + std::to_string(n_true) + "/" + std::to_string(n_false) + ": CA " +
                  fmt(m.classification_accuracy) + " vs majority " + fmt(majority));
    }
    ++checked;
  }
  return pass("70/30 row reads " + fmt(row.classification_accuracy, 2) + " " +
              fmt(row.micro_precision, 2) + " " + fmt(row.micro_recall, 2) + " " +
              fmt(row.micro_f1, 2) + "; " + std::to_string(checked) + " random datasets within 1/n");
}

BarrierDataset as_dataset(const gen::Separable& sep) {
  BarrierDataset data;
  for (Eigen::Index i = 0; i < sep.X.rows(); ++i) {
    LabeledInstance inst;
    inst.article_id = "p" + std::to_string(i);
    inst.features = sep.X.row(i).transpose();
    inst.label = sep.y[i];
    ++(inst.label ? data.n_true : data.n_false);
    data.instances.push_back(std::move(inst));
  }
  return data;
}

Outcome classifier_sanity() {
  Stopwatch clock;
  auto options = run_experiment_options(PipelineConfig::with_defaults());
  options.folds = kFolds;
  double svm_min = 1, cart_min = 1;
  std::size_t cart_short = 0;
  for (std::uint64_t seed = 1; seed <= kSeparableSets; ++seed) {
    Rng rng(seed);
    const auto data = as_dataset(gen::separable(rng, kSeparablePoints, 2, kSeparableMargin));
    const auto rows = run_experiment(
        data, {make_spec(ModelFamily::SVM, seed), make_spec(ModelFamily::DecisionTree, seed)},
        options).rows;
    svm_min = std::min(svm_min, rows[0].metrics.micro_f1);
    cart_min = std::min(cart_min, rows[1].metrics.micro_f1);
    cart_short += rows[1].metrics.micro_f1 < kSanityMinF1;
  }

  Rng rng(0x5EED);
  const matrix_t X = gen::gaussian(rng, 300, 4);
  const labels_t y = gen::labels(rng, 300, 0.5);
  const auto knn = train(make_spec(ModelFamily::KNN, 1, {{"k", 1}}), X, y);
  const double knn_acc =
      static_cast<double>((predict(knn, X) == y).count()) / static_cast<double>(y.size());
  const double s = clock.seconds();
  const std::string detail =
      std::to_string(kSeparableSets) + " separable sets: min svm F1 " + fmt(svm_min) +
      ", min cart F1 " + fmt(cart_min) + " (" + std::to_string(cart_short) +
      " below " + fmt(kSanityMinF1, 2) + "); knn(k=1) train acc " + fmt(knn_acc) + "; " + fmt(s, 2) + " s";
  const bool ok = svm_min >= kSanityMinF1 && cart_min >= kSanityMinF1 && knn_acc == 1.0 &&
                  s < kClassifierBudgetSeconds;
  return ok ? pass(detail) : fail(detail);
}

Outcome stratification_property() {
  Rng rng(0xF01D);
  for (std::size_t t = 0; t < kRandomTrials; ++t) {
    const auto n_true = kFolds + rng.uniform_index(200);
    const auto n_false = kFolds + rng.uniform_index(200);
    const auto data = gen::dataset(rng, n_true, n_false);
    const auto f = stratified_kfold(data, kFolds, rng.next());
    std::vector<std::size_t> appearances(data.instances.size(), 0);
    std::vector<std::size_t> t_count(kFolds, 0), f_count(kFolds, 0);
    for (std::size_t k = 0; k < kFolds; ++k) {
      for (auto i : f.test_indices(k)) {
        ++appearances[i];
        ++(data.instances[i].label ? t_count : f_count)[k];
      }
    }
    for (auto a : appearances) {
      if (a != 1) return fail("trial " + std::to_string(t) + ": an instance is tested " + std::to_string(a) + " times");
    }
    for (std::size_t k = 0; k < kFolds; ++k) {
      const double et = static_cast<double>(n_true) / kFolds;
      const double ef = static_cast<double>(n_false) / kFolds;
      if (std::abs(static_cast<double>(t_count[k]) - et) > 1.0 ||
          std::abs(static_cast<double>(f_count[k]) - ef) > 1.0) {
        return fail("trial " + std::to_string(t) + ": fold " + std::to_string(k) + " off balance");
      }
    }
  }
  return pass(std::to_string(kRandomTrials) + " random datasets");
}

struct RealEvent {
  const char* name;
  /// economic, cultural, geographical, time-zone, political
  std::array<std::size_t, 5> expected;
};

// Published per-barrier counts, reordered from the time-zone, cultural,
// political, geographical, economical column order.
constexpr std::array<RealEvent, 3> kRealEvents = {{
    {"FIFA", {634, 699, 726, 724, 143}},
    {"Earthquake", {1010, 1113, 1113, 1102, 227}},
    {"GlobalWarming", {463, 445, 487, 586, 108}},
}};

std::optional<std::filesystem::path> real_data_dir() {
  const char* dir = std::getenv("BARRIER_IPONEWS_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir);
}

PipelineConfig real_config(const std::filesystem::path& root, const RealEvent& event) {
  auto config = PipelineConfig::with_defaults();
  config.pairs = root / event.name / "pairs.csv";
  config.concepts = root / event.name / "concepts.jsonl";
  config.countries = root / "countries.csv";
  config.publishers = root / "publishers.csv";
  config.event_label = event.name;
  return config;
}

Outcome real_counts() {
  const auto root = real_data_dir();
  if (!root) return skip("set BARRIER_IPONEWS_DIR to the released corpus");
  std::string detail;
  bool ok = true;
  for (const auto& event : kRealEvents) {
    const auto config = real_config(*root, event);
    check_inputs(config);
    const auto kb = load_knowledge(config);
    const auto ingest = run_ingest(config, kb);
    const auto annotated = run_annotate(config, kb, ingest);
    detail += std::string(detail.empty() ? "" : "; ") + event.name + ":";
    for (const auto& ds : annotated.datasets) {
      const auto b = static_cast<std::size_t>(ds.barrier);
      const bool exact = ds.instances.size() == event.expected[b];
      const bool accounted = ds.instances.size() + ds.total_drops() == ingest.result.examples.size();
      detail += " " + std::string(barrier_slug(ds.barrier)) + " " + std::to_string(ds.instances.size()) +
                (exact ? "" : "/" + std::to_string(event.expected[b]) + (accounted ? " (drops account)" : " (unaccounted)"));
      ok = ok && (exact || accounted);
      if (ds.barrier == BarrierKind::Cultural || ds.barrier == BarrierKind::Political) {
        if (ds.n_false <= ds.n_true) {
          detail += " majority TRUE";
          ok = false;
        }
      }
    }
  }
  return ok ? pass(detail) : fail(detail);
}

Outcome real_ordering() {
  const auto root = real_data_dir();
  if (!root) return skip("set BARRIER_IPONEWS_DIR to the released corpus");
  std::string detail;
  bool ok = true;
  for (const auto& event : kRealEvents) {
    const auto config = real_config(*root, event);
    const auto kb = load_knowledge(config);
    const auto ingest = run_ingest(config, kb);
    const auto annotated = run_annotate(config, kb, ingest);
    for (const auto& ds : annotated.datasets) {
      const auto rows = run_experiment(ds, run_specs(config), run_experiment_options(config)).rows;
      auto f1 = [&](ModelFamily f) {
        for (const auto& r : rows) {
          if (r.model == f) return r.metrics.micro_f1;
        }
        return 0.0;
      };
      const double stratified = f1(ModelFamily::Stratified);
      const double most = f1(ModelFamily::MostFrequent);
      bool beats_most = false;
      for (const auto& r : rows) {
        if (is_baseline(r.model)) continue;
        if (r.metrics.micro_f1 < stratified) {
          ok = false;
          detail += std::string(detail.empty() ? "" : "; ") + event.name + " " +
                    std::string(barrier_slug(ds.barrier)) + ": " +
                    std::string(family_display_name(r.model)) + " below Stratified";
        }
        beats_most = beats_most || r.metrics.micro_f1 > most;
      }
      if ((ds.barrier == BarrierKind::Geographical || ds.barrier == BarrierKind::TimeZone) && !beats_most) {
        ok = false;
        detail += std::string(detail.empty() ? "" : "; ") + event.name + " " +
                  std::string(barrier_slug(ds.barrier)) + ": no model beats Most Frequent";
      }
    }
  }
  return ok ? pass(detail.empty() ? "ordering holds on every event and barrier" : detail) : fail(detail);
}

Outcome determinism() {
  SyntheticSpec spec;
  spec.n_articles = 200;
  spec.seed = 9;
  testing::TempDir dir("acceptance-det");
  write_synthetic(generate_synthetic(spec), dir / "corpus");
  auto config = testing::corpus_config(dir / "corpus", spec.event_label);
  config.output_dir = dir / "a";
  run_pipeline(config);
  config.output_dir = dir / "b";
  run_pipeline(config);
  const auto a = testing::read_file(dir / "a" / "report.csv");
  const auto b = testing::read_file(dir / "b" / "report.csv");
  const auto rows = parse_report_csv(a);
  const std::string detail = std::to_string(rows.size()) + " rows, " + std::to_string(a.size()) + " bytes";
  return !a.empty() && a == b ? pass("report.csv identical, " + detail) : fail("report.csv differs, " + detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric identity", metric_identity},
      {"annotation oracle equivalence", oracle_equivalence},
      {"threshold semantics", threshold_semantics},
      {"baseline fidelity", baseline_fidelity},
      {"classifier sanity", classifier_sanity},
      {"stratification property", stratification_property},
      {"released corpus counts", real_counts},
      {"released corpus model ordering", real_ordering},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{Status::Fail, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Skip ? "SKIP" : "FAIL";
    failures += o.status == Status::Fail;
    std::cout << tag << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

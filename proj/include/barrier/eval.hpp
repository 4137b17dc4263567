#pragma once

#include "barrier/annotate.hpp"
#include "barrier/classifiers.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace barrier {

inline constexpr std::size_t kDefaultFolds = 10;

struct FoldAssignment {
  std::size_t k = kDefaultFolds;
  std::uint64_t seed = 0;
  /// fold_of[i] is the test fold of instance i.
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified split. Within each class, instances are ordered by
/// (id, position), shuffled with a seeded Fisher-Yates, and dealt to folds
/// round-robin, each class starting at fold 0. Throws Error(TooFewPerClass) when a class has
/// fewer than k members, Error(InvalidArgument) when k < 2 or ids and
/// labels differ in length.
FoldAssignment stratified_kfold(std::span<const std::string> ids, const labels_t& labels,
                                std::size_t k, std::uint64_t seed);
FoldAssignment stratified_kfold(const BarrierDataset& data, std::size_t k, std::uint64_t seed);

struct MetricSet {
  double classification_accuracy = 0;
  double micro_precision = 0;
  double micro_recall = 0;
  double micro_f1 = 0;
};

struct ConfusionCounts {
  std::size_t tp_sum = 0;
  std::size_t fp_sum = 0;
  std::size_t fn_sum = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

/// Class-summed TP/FP/FN over both labels.
ConfusionCounts micro_counts(const labels_t& predictions, const labels_t& gold);

/// Micro precision/recall/F1 from summed counts, plus accuracy. Throws
/// Error(LengthMismatch) or Error(EmptyInput).
MetricSet micro_metrics(const labels_t& predictions, const labels_t& gold);

struct ReportRow {
  BarrierKind barrier = BarrierKind::Economic;
  ModelFamily model = ModelFamily::MostFrequent;
  MetricSet metrics;
};

struct ExperimentOptions {
  std::size_t folds = kDefaultFolds;
  std::uint64_t seed = 0;
  /// Per-family grids; a family without an entry (or with an empty grid)
  /// trains with its spec as given.
  std::map<ModelFamily, HyperparameterGrid> grids;
  /// Select hyperparameters by inner stratified CV on the training folds
  /// instead of the held-out fold.
  bool nested = false;
  std::size_t inner_folds = 3;
  /// Report the mean of per-fold metrics instead of pooled predictions.
  bool fold_mean = false;
};

struct ExperimentResult {
  std::vector<ReportRow> rows;
  /// Pooled out-of-fold predictions per spec, in instance order.
  std::vector<labels_t> predictions;
  /// Selected hyperparameters per spec and fold.
  std::vector<std::vector<Hyperparameters>> selected;
};

ExperimentResult run_experiment(const BarrierDataset& data, const std::vector<ModelSpec>& specs,
                                const ExperimentOptions& options);

/// Size, class counts and drops of one dataset, printed under the report.
struct DatasetSummary {
  BarrierKind barrier = BarrierKind::Economic;
  std::size_t instances = 0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::map<DatasetDrop, std::size_t> drops;
};

DatasetSummary summarize(const BarrierDataset& data);

enum class ReportFormat { Markdown, Csv };

/// Rows grouped by barrier, models in report order. Markdown rounds to two
/// decimals; CSV keeps full precision. Throws Error(EmptyInput).
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format,
                          const std::vector<DatasetSummary>& summaries = {});
std::vector<ReportRow> parse_report_csv(std::string_view text);

}  // namespace barrier

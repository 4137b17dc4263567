#include "barrier/eval.hpp"

#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/rng.hpp"
#include "barrier/text.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace barrier {

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(std::span<const std::string> ids, const labels_t& labels,
                                std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidArgument, "stratified_kfold: k must be >= 2");
  if (static_cast<Eigen::Index>(ids.size()) != labels.size()) {
    throw Error(Errc::InvalidArgument, "stratified_kfold: ids and labels differ in length");
  }
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.assign(ids.size(), 0);

  for (bool cls : {false, true}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (labels[static_cast<Eigen::Index>(i)] == cls) members.push_back(i);
    }
    if (members.size() < k) {
      throw Error(Errc::TooFewPerClass, std::string("class ") + (cls ? "TRUE" : "FALSE") +
                                            " has " + std::to_string(members.size()) +
                                            " instances, fewer than k = " + std::to_string(k));
    }
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return ids[a] < ids[b] || (ids[a] == ids[b] && a < b);
    });
    Rng rng(derive_seed(seed, cls ? 1 : 0));
    rng.shuffle(std::span(members));
    for (std::size_t r = 0; r < members.size(); ++r) {
      folds.fold_of[members[r]] = r % k;
    }
  }
  return folds;
}

FoldAssignment stratified_kfold(const BarrierDataset& data, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(data.instances.size());
  for (const auto& inst : data.instances) ids.push_back(inst.article_id);
  return stratified_kfold(ids, data.labels(), k, seed);
}

// ---------------------------------------------------------------------------
// Metrics

ConfusionCounts micro_counts(const labels_t& predictions, const labels_t& gold) {
  ConfusionCounts c;
  c.total = static_cast<std::size_t>(gold.size());
  for (Eigen::Index i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i];
    const bool g = gold[i];
    // per class: TRUE then FALSE
    for (bool cls : {true, false}) {
      if (p == cls && g == cls) ++c.tp_sum;
      if (p == cls && g != cls) ++c.fp_sum;
      if (p != cls && g == cls) ++c.fn_sum;
    }
    if (p == g) ++c.correct;
  }
  return c;
}

MetricSet micro_metrics(const labels_t& predictions, const labels_t& gold) {
  if (predictions.size() != gold.size()) {
    throw Error(Errc::LengthMismatch, "micro_metrics: " + std::to_string(predictions.size()) +
                                          " predictions vs " + std::to_string(gold.size()) +
                                          " gold labels");
  }
  if (gold.size() == 0) throw Error(Errc::EmptyInput, "micro_metrics: no predictions");
  const auto c = micro_counts(predictions, gold);
  MetricSet m;
  m.classification_accuracy = static_cast<double>(c.correct) / static_cast<double>(c.total);
  m.micro_precision = static_cast<double>(c.tp_sum) / static_cast<double>(c.tp_sum + c.fp_sum);
  m.micro_recall = static_cast<double>(c.tp_sum) / static_cast<double>(c.tp_sum + c.fn_sum);
  // harmonic mean of P and R written over the integer counts
  m.micro_f1 = static_cast<double>(2 * c.tp_sum) /
               static_cast<double>(2 * c.tp_sum + c.fp_sum + c.fn_sum);
  if (!(m.micro_precision == m.classification_accuracy && m.micro_recall == m.micro_precision &&
        m.micro_f1 == m.micro_precision)) {
    throw std::logic_error("micro metric identity violated");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

matrix_t gather_rows(const matrix_t& X, const std::vector<std::size_t>& idx) {
  matrix_t out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

labels_t gather(const labels_t& y, const std::vector<std::size_t>& idx) {
  labels_t out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(idx[i])];
  }
  return out;
}

ModelSpec with_point(ModelSpec spec, const Hyperparameters& point) {
  for (const auto& [name, value] : point) {
    if (!spec.hyperparameters.contains(name)) {
      throw Error(Errc::InvalidArgument, std::string(family_tag(spec.family)) +
                                             " has no hyperparameter '" + name + "'");
    }
    spec.hyperparameters[name] = value;
  }
  return spec;
}

/// Grid point with the best pooled inner-CV micro-F1 on the training part.
Hyperparameters nested_select(const ModelSpec& base, const HyperparameterGrid& grid,
                              const matrix_t& X, const labels_t& y,
                              std::span<const std::string> ids, std::size_t inner_folds) {
  FoldAssignment inner;
  try {
    inner = stratified_kfold(ids, y, inner_folds, derive_seed(base.seed, 0x1ee7));
  } catch (const Error& e) {
    if (e.code() != Errc::TooFewPerClass) throw;
    return grid.front();
  }
  std::optional<std::size_t> best;
  double best_f1 = -1;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto spec = with_point(base, grid[g]);
    labels_t pooled(y.size());
    for (std::size_t f = 0; f < inner.k; ++f) {
      const auto tr = inner.train_indices(f);
      const auto te = inner.test_indices(f);
      const auto model = train(spec, gather_rows(X, tr), gather(y, tr));
      const auto pred = predict(model, gather_rows(X, te));
      for (std::size_t i = 0; i < te.size(); ++i) {
        pooled[static_cast<Eigen::Index>(te[i])] = pred[static_cast<Eigen::Index>(i)];
      }
    }
    const double f1 = micro_metrics(pooled, y).micro_f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = g;
    }
  }
  return grid[*best];
}

}  // namespace

ExperimentResult run_experiment(const BarrierDataset& data, const std::vector<ModelSpec>& specs,
                                const ExperimentOptions& options) {
  const auto folds = stratified_kfold(data, options.folds, options.seed);
  const matrix_t X = data.features();
  const labels_t y = data.labels();
  std::vector<std::string> ids;
  for (const auto& inst : data.instances) ids.push_back(inst.article_id);

  std::vector<std::vector<std::size_t>> train_idx(folds.k), test_idx(folds.k);
  std::vector<matrix_t> X_train(folds.k), X_test(folds.k);
  std::vector<labels_t> y_train(folds.k), y_test(folds.k);
  for (std::size_t f = 0; f < folds.k; ++f) {
    train_idx[f] = folds.train_indices(f);
    test_idx[f] = folds.test_indices(f);
    X_train[f] = gather_rows(X, train_idx[f]);
    X_test[f] = gather_rows(X, test_idx[f]);
    y_train[f] = gather(y, train_idx[f]);
    y_test[f] = gather(y, test_idx[f]);
  }

  ExperimentResult result;
  for (const auto& spec : specs) {
    labels_t pooled(y.size());
    std::vector<MetricSet> per_fold;
    std::vector<Hyperparameters> chosen;
    const auto grid_it = options.grids.find(spec.family);
    const HyperparameterGrid* grid =
        (grid_it != options.grids.end() && !grid_it->second.empty()) ? &grid_it->second : nullptr;

    for (std::size_t f = 0; f < folds.k; ++f) {
      ModelSpec fold_spec = spec;
      fold_spec.seed = derive_seed(spec.seed, f);
      if (grid) {
        if (options.nested) {
          std::vector<std::string> fold_ids;
          for (auto i : train_idx[f]) fold_ids.push_back(ids[i]);
          fold_spec = with_point(fold_spec, nested_select(fold_spec, *grid, X_train[f],
                                                          y_train[f], fold_ids,
                                                          options.inner_folds));
        } else {
          // select on the held-out fold itself
          fold_spec = sweep(fold_spec, *grid, X_train[f], y_train[f], X_test[f], y_test[f]);
        }
      }
      chosen.push_back(fold_spec.hyperparameters);
      const auto model = train(fold_spec, X_train[f], y_train[f]);
      const auto pred = predict(model, X_test[f]);
      for (std::size_t i = 0; i < test_idx[f].size(); ++i) {
        pooled[static_cast<Eigen::Index>(test_idx[f][i])] = pred[static_cast<Eigen::Index>(i)];
      }
      if (options.fold_mean) per_fold.push_back(micro_metrics(pred, y_test[f]));
    }

    ReportRow row;
    row.barrier = data.barrier;
    row.model = spec.family;
    if (options.fold_mean) {
      const auto n = static_cast<double>(per_fold.size());
      for (const auto& m : per_fold) {
        row.metrics.classification_accuracy += m.classification_accuracy / n;
        row.metrics.micro_precision += m.micro_precision / n;
        row.metrics.micro_recall += m.micro_recall / n;
        row.metrics.micro_f1 += m.micro_f1 / n;
      }
    } else {
      row.metrics = micro_metrics(pooled, y);
    }
    result.rows.push_back(row);
    result.predictions.push_back(std::move(pooled));
    result.selected.push_back(std::move(chosen));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Report

DatasetSummary summarize(const BarrierDataset& data) {
  return {data.barrier, data.instances.size(), data.n_true, data.n_false, data.drops};
}

namespace {

std::size_t barrier_rank(BarrierKind k) {
  return static_cast<std::size_t>(std::find(kAllBarriers.begin(), kAllBarriers.end(), k) -
                                  kAllBarriers.begin());
}

std::size_t family_rank(ModelFamily f) {
  return static_cast<std::size_t>(std::find(kAllFamilies.begin(), kAllFamilies.end(), f) -
                                  kAllFamilies.begin());
}

}  // namespace

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format,
                          const std::vector<DatasetSummary>& summaries) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "render_report: no rows");
  auto ordered = rows;
  std::stable_sort(ordered.begin(), ordered.end(), [](const ReportRow& a, const ReportRow& b) {
    const auto ka = std::pair(barrier_rank(a.barrier), family_rank(a.model));
    const auto kb = std::pair(barrier_rank(b.barrier), family_rank(b.model));
    return ka < kb;
  });

  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    csv::write_row(out, {"barrier", "model", "CA", "Mic-Pre", "Mic-Rec", "Mic-F1"});
    for (const auto& r : ordered) {
      csv::write_row(out, {std::string(barrier_display_name(r.barrier)),
                           std::string(family_display_name(r.model)),
                           text::format_double(r.metrics.classification_accuracy),
                           text::format_double(r.metrics.micro_precision),
                           text::format_double(r.metrics.micro_recall),
                           text::format_double(r.metrics.micro_f1)});
    }
    return out.str();
  }

  out << "| Barrier | Model | CA | Mic-Pre | Mic-Rec | Mic-F1 |\n"
      << "|---|---|---:|---:|---:|---:|\n";
  std::optional<BarrierKind> current;
  for (const auto& r : ordered) {
    const bool first = !current || *current != r.barrier;
    current = r.barrier;
    out << "| " << (first ? barrier_display_name(r.barrier) : "") << " | "
        << family_display_name(r.model) << " | "
        << text::format_fixed(r.metrics.classification_accuracy, 2) << " | "
        << text::format_fixed(r.metrics.micro_precision, 2) << " | "
        << text::format_fixed(r.metrics.micro_recall, 2) << " | "
        << text::format_fixed(r.metrics.micro_f1, 2) << " |\n";
  }
  if (!summaries.empty()) {
    out << "\n| Barrier | Instances | TRUE | FALSE | Dropped |\n"
        << "|---|---:|---:|---:|---|\n";
    auto sorted = summaries;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return barrier_rank(a.barrier) < barrier_rank(b.barrier);
    });
    for (const auto& s : sorted) {
      std::string dropped;
      std::size_t total = 0;
      for (const auto& [reason, n] : s.drops) {
        if (!dropped.empty()) dropped += ", ";
        dropped += std::string(dataset_drop_name(reason)) + " " + std::to_string(n);
        total += n;
      }
      out << "| " << barrier_display_name(s.barrier) << " | " << s.instances << " | " << s.n_true
          << " | " << s.n_false << " | " << total << (dropped.empty() ? "" : " (" + dropped + ")")
          << " |\n";
    }
  }
  return out.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view content) {
  const auto table = csv::parse_table(content, "report.csv");
  const auto b = table.require_column("barrier");
  const auto m = table.require_column("model");
  const std::array<std::size_t, 4> cols = {
      table.require_column("CA"), table.require_column("Mic-Pre"),
      table.require_column("Mic-Rec"), table.require_column("Mic-F1")};
  std::vector<ReportRow> rows;
  for (const auto& rec : table.rows()) {
    ReportRow r;
    const auto barrier = parse_barrier(rec.fields[b]);
    const auto model = parse_family(rec.fields[m]);
    if (!barrier || !model) {
      throw Error(Errc::MalformedRow, "report.csv: line " + std::to_string(rec.line) +
                                          ": unknown barrier or model");
    }
    r.barrier = *barrier;
    r.model = *model;
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto parsed = text::parse_double(rec.fields[cols[i]]);
      if (!parsed) {
        throw Error(Errc::MalformedRow,
                    "report.csv: line " + std::to_string(rec.line) + ": bad metric value");
      }
      v[i] = *parsed;
    }
    r.metrics = {v[0], v[1], v[2], v[3]};
    rows.push_back(r);
  }
  return rows;
}

}  // namespace barrier

#include "barrier/annotate.hpp"

#include "barrier/csv.hpp"
#include "barrier/text.hpp"

#include <numeric>
#include <sstream>

namespace barrier {

namespace {

const PublisherRecord& require_publisher(const KnowledgeBase& knowledge, const std::string& uri) {
  const auto* p = knowledge.publishers.find(uri);
  if (!p) throw Error(Errc::IncompleteMetadata, "publisher " + uri + " is not in the store");
  return *p;
}

const CountryProfile& require_country(const PublisherView& view) {
  if (!view.country) {
    throw Error(Errc::IncompleteMetadata,
                "publisher " + view.publisher->publisher_uri + " has no country profile");
  }
  return *view.country;
}

}  // namespace

bool annotate_equality_barrier(const PublisherView& source, const PublisherView& target,
                               BarrierKind kind) {
  if (!source.publisher || !target.publisher) {
    throw Error(Errc::IncompleteMetadata, "publisher missing");
  }
  switch (kind) {
    case BarrierKind::Geographical: {
      const auto& a = require_country(source);
      const auto& b = require_country(target);
      if (a.country_code == b.country_code) return false;
      const bool same_point = std::abs(a.latitude - b.latitude) <= kCoordinateEpsilon &&
                              std::abs(a.longitude - b.longitude) <= kCoordinateEpsilon;
      return !same_point;
    }
    case BarrierKind::TimeZone:
      return require_country(source).utc_offset != require_country(target).utc_offset;
    case BarrierKind::Political: {
      const auto& a = source.publisher->political_alignment;
      const auto& b = target.publisher->political_alignment;
      if (!a || !b) {
        throw Error(Errc::IncompleteMetadata, "political alignment unknown for " +
                                                  (a ? target : source).publisher->publisher_uri);
      }
      return *a != *b;
    }
    case BarrierKind::Economic:
    case BarrierKind::Cultural:
      break;
  }
  throw Error(Errc::InvalidArgument, "annotate_equality_barrier: vector barrier kind");
}

bool annotate_example(const SpreadingExample& example, BarrierKind kind,
                      const KnowledgeBase& knowledge, double threshold) {
  const auto& src = require_publisher(knowledge, example.source_publisher_uri);
  const auto& dst = require_publisher(knowledge, example.target_publisher_uri);
  const PublisherView source{&src, knowledge.country_of(src)};
  const PublisherView target{&dst, knowledge.country_of(dst)};

  switch (kind) {
    case BarrierKind::Economic: {
      const auto& a = require_country(source);
      const auto& b = require_country(target);
      if (!a.economic || !b.economic) {
        throw Error(Errc::IncompleteMetadata, "economic profile missing");
      }
      return annotate_vector_barrier(select_economic(*a.economic, knowledge.options),
                                     select_economic(*b.economic, knowledge.options), threshold);
    }
    case BarrierKind::Cultural: {
      const auto& a = require_country(source);
      const auto& b = require_country(target);
      if (!a.cultural || !b.cultural) {
        throw Error(Errc::IncompleteMetadata, "cultural profile missing");
      }
      return annotate_vector_barrier(*a.cultural, *b.cultural, threshold);
    }
    default:
      return annotate_equality_barrier(source, target, kind);
  }
}

std::string_view dataset_drop_name(DatasetDrop reason) {
  switch (reason) {
    case DatasetDrop::MissingPublisher: return "MissingPublisher";
    case DatasetDrop::IncompleteMetadata: return "IncompleteMetadata";
    case DatasetDrop::ZeroVector: return "ZeroVector";
  }
  return "Unknown";
}

std::size_t BarrierDataset::total_drops() const {
  return std::accumulate(drops.begin(), drops.end(), std::size_t{0},
                         [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

std::size_t BarrierDataset::feature_width() const {
  return instances.empty() ? 0 : static_cast<std::size_t>(instances.front().features.size());
}

matrix_t BarrierDataset::features() const {
  matrix_t X(static_cast<Eigen::Index>(instances.size()),
             static_cast<Eigen::Index>(feature_width()));
  for (std::size_t i = 0; i < instances.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = instances[i].features.transpose();
  }
  return X;
}

labels_t BarrierDataset::labels() const {
  labels_t y(static_cast<Eigen::Index>(instances.size()));
  for (std::size_t i = 0; i < instances.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = instances[i].label;
  }
  return y;
}

BarrierDataset build_barrier_dataset(const std::vector<SpreadingExample>& examples,
                                     BarrierKind kind, const KnowledgeBase& knowledge,
                                     const ConceptVocabulary& vocab,
                                     const AnnotationOptions& options) {
  BarrierDataset data;
  data.barrier = kind;
  data.profile_columns = profile_column_names(kind, knowledge);
  for (const auto& example : examples) {
    if (!knowledge.publishers.find(example.source_publisher_uri) ||
        !knowledge.publishers.find(example.target_publisher_uri)) {
      ++data.drops[DatasetDrop::MissingPublisher];
      continue;
    }
    try {
      const bool label = annotate_example(example, kind, knowledge, options.threshold);
      data.instances.push_back(
          assemble_instance(example, kind, vocab, knowledge, label, options.profile_side));
      ++(label ? data.n_true : data.n_false);
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::IncompleteMetadata:
        case Errc::UnknownAlignment:
          ++data.drops[DatasetDrop::IncompleteMetadata];
          break;
        case Errc::ZeroVector:
          ++data.drops[DatasetDrop::ZeroVector];
          break;
        default:
          throw;
      }
    }
  }
  return data;
}

std::string write_dataset(const BarrierDataset& dataset, std::size_t vocab_size) {
  std::ostringstream out;
  std::vector<std::string> header = {"article_id", "label"};
  for (std::size_t i = 0; i < vocab_size; ++i) header.push_back("c" + std::to_string(i));
  header.insert(header.end(), dataset.profile_columns.begin(), dataset.profile_columns.end());
  csv::write_row(out, header);

  std::vector<std::string> row;
  for (const auto& inst : dataset.instances) {
    row.clear();
    row.push_back(inst.article_id);
    row.emplace_back(inst.label ? "TRUE" : "FALSE");
    for (Eigen::Index j = 0; j < inst.features.size(); ++j) {
      row.push_back(text::format_double(inst.features[j]));
    }
    csv::write_row(out, row);
  }
  return out.str();
}

BarrierDataset read_dataset(const std::filesystem::path& path, BarrierKind kind) {
  const auto table = csv::read_table(path);
  const auto id_idx = table.require_column("article_id");
  const auto label_idx = table.require_column("label");
  if (id_idx != 0 || label_idx != 1) {
    throw Error(Errc::MalformedRow, path.string() + ": expected article_id,label first");
  }
  BarrierDataset data;
  data.barrier = kind;
  for (std::size_t j = 2; j < table.header().size(); ++j) {
    if (!(table.header()[j].size() > 1 && table.header()[j][0] == 'c' &&
          text::parse_int(std::string_view(table.header()[j]).substr(1)))) {
      data.profile_columns.push_back(table.header()[j]);
    }
  }
  const auto width = static_cast<Eigen::Index>(table.header().size() - 2);
  for (const auto& row : table.rows()) {
    LabeledInstance inst;
    inst.article_id = row.fields[0];
    inst.barrier = kind;
    const auto label = text::parse_bool(row.fields[1]);
    if (!label) {
      throw Error(Errc::MalformedRow,
                  path.string() + ": line " + std::to_string(row.line) + ": bad label");
    }
    inst.label = *label;
    inst.features.resize(width);
    for (Eigen::Index j = 0; j < width; ++j) {
      const auto v = text::parse_double(row.fields[static_cast<std::size_t>(j) + 2]);
      if (!v || !std::isfinite(*v)) {
        throw Error(Errc::NonFiniteValue, path.string() + ": line " + std::to_string(row.line) +
                                              ", column " + table.header()[j + 2]);
      }
      inst.features[j] = *v;
    }
    ++(inst.label ? data.n_true : data.n_false);
    data.instances.push_back(std::move(inst));
  }
  return data;
}

}  // namespace barrier

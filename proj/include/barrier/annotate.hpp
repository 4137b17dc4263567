#pragma once

#include "barrier/error.hpp"
#include "barrier/features.hpp"
#include "barrier/knowledge.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace barrier {

inline constexpr double kDefaultSimilarityThreshold = 0.9;
inline constexpr double kCoordinateEpsilon = 1e-6;

/// dot(u, v) / (|u| |v|). Throws Error(LengthMismatch) or Error(ZeroVector).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                                            const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) {
    throw Error(Errc::LengthMismatch, "cosine_similarity: lengths " + std::to_string(u.size()) +
                                          " and " + std::to_string(v.size()));
  }
  const Scalar nu = u.squaredNorm();
  const Scalar nv = v.squaredNorm();
  if (!(nu > Scalar(0)) || !(nv > Scalar(0))) {
    throw Error(Errc::ZeroVector, "cosine_similarity: zero-norm argument");
  }
  const Scalar s = u.dot(v.template cast<Scalar>()) / (std::sqrt(nu) * std::sqrt(nv));
  // rounding can push |s| a hair past 1
  return std::clamp(s, Scalar(-1), Scalar(1));
}

/// TRUE (barrier present) unless the similarity is strictly above threshold.
inline bool label_from_similarity(double similarity, double threshold) {
  return !(similarity > threshold);
}

template <typename DerivedA, typename DerivedB>
bool annotate_vector_barrier(const Eigen::MatrixBase<DerivedA>& profile_a,
                             const Eigen::MatrixBase<DerivedB>& profile_b,
                             double threshold = kDefaultSimilarityThreshold) {
  return label_from_similarity(cosine_similarity(profile_a, profile_b), threshold);
}

/// A publisher together with its resolved country (nullptr when unknown).
struct PublisherView {
  const PublisherRecord* publisher = nullptr;
  const CountryProfile* country = nullptr;
};

/// Geographical, TimeZone or Political label: FALSE when the relevant
/// metadata coincides. Throws Error(IncompleteMetadata) when either side
/// lacks the field, Error(InvalidArgument) for the vector barriers.
bool annotate_equality_barrier(const PublisherView& source, const PublisherView& target,
                               BarrierKind kind);

enum class DatasetDrop { MissingPublisher, IncompleteMetadata, ZeroVector };

std::string_view dataset_drop_name(DatasetDrop reason);

struct AnnotationOptions {
  double threshold = kDefaultSimilarityThreshold;
  ProfileSide profile_side = ProfileSide::Source;
};

struct BarrierDataset {
  BarrierKind barrier = BarrierKind::Economic;
  std::vector<LabeledInstance> instances;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::map<DatasetDrop, std::size_t> drops;
  /// Names of the profile-block columns, for CSV output.
  std::vector<std::string> profile_columns;

  std::size_t total_drops() const;
  std::size_t feature_width() const;

  /// Design matrix, one row per instance.
  matrix_t features() const;
  labels_t labels() const;
};

/// Label for one example; throws the same errors as the per-kind rules.
bool annotate_example(const SpreadingExample& example, BarrierKind kind,
                      const KnowledgeBase& knowledge, double threshold);

/// Annotates and vectorizes every example; failures become drop counts.
/// Instance order follows example order.
BarrierDataset build_barrier_dataset(const std::vector<SpreadingExample>& examples,
                                     BarrierKind kind, const KnowledgeBase& knowledge,
                                     const ConceptVocabulary& vocab,
                                     const AnnotationOptions& options = {});

/// article_id,label,c0..c{K-1},<profile columns>
std::string write_dataset(const BarrierDataset& dataset, std::size_t vocab_size);
/// Reads a dataset CSV back. Drop counts are not stored in the file.
BarrierDataset read_dataset(const std::filesystem::path& path, BarrierKind kind);

}  // namespace barrier

#pragma once

#include "barrier/corpus.hpp"
#include "barrier/knowledge.hpp"
#include "barrier/types.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace barrier {

inline constexpr std::size_t kDefaultVocabularySize = 300;

struct VocabularyEntry {
  std::string concept_id;
  std::size_t frequency = 0;

  bool operator==(const VocabularyEntry&) const = default;
};

/// Ranked concepts; the position is the feature index.
class ConceptVocabulary {
 public:
  ConceptVocabulary() = default;
  explicit ConceptVocabulary(std::vector<VocabularyEntry> entries);

  std::size_t size() const { return entries_.size(); }
  const std::vector<VocabularyEntry>& entries() const { return entries_; }
  const VocabularyEntry& operator[](std::size_t i) const { return entries_[i]; }

  bool operator==(const ConceptVocabulary&) const = default;

 private:
  std::vector<VocabularyEntry> entries_;
};

/// Top-k concepts by document frequency; ties go to the lexicographically
/// smaller identifier. Throws Error(EmptyCorpus) when no example has a
/// concept, Error(InvalidArgument) when k == 0.
ConceptVocabulary build_vocabulary(const std::vector<SpreadingExample>& examples, std::size_t k);
/// Same ranking over every annotated article of an index.
ConceptVocabulary build_vocabulary(const ConceptIndex& index, std::size_t k);

/// Two-column CSV (concept,frequency) in rank order.
std::string write_vocabulary(const ConceptVocabulary& vocab);
ConceptVocabulary read_vocabulary(const std::filesystem::path& path);

/// Binary presence vector of length vocab.size().
vector_t vectorize_concepts(const ConceptSet& concepts, const ConceptVocabulary& vocab);

/// Whose publisher metadata fills the profile block.
enum class ProfileSide { Source, Target, Difference };

struct LabeledInstance {
  std::string article_id;
  BarrierKind barrier = BarrierKind::Economic;
  vector_t features;
  bool label = false;
};

/// features = [concept block | profile block]. With ProfileSide::Difference
/// the profile block is target minus source. Errors propagate from
/// barrier_profile (IncompleteMetadata, UnknownAlignment), or
/// IncompleteMetadata when a publisher is missing from the store.
LabeledInstance assemble_instance(const SpreadingExample& example, BarrierKind kind,
                                  const ConceptVocabulary& vocab, const KnowledgeBase& knowledge,
                                  bool label, ProfileSide side = ProfileSide::Source);

}  // namespace barrier

#pragma once

#include "barrier/knowledge.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace barrier {

enum class PropagationClass { InformationPropagated, Unsure, InformationNotPropagated };

/// Spelling used in pair files: Information-Propagated, Unsure,
/// Information-Not-Propagated.
std::string_view propagation_class_name(PropagationClass c);

inline constexpr double kPropagatedMinWeight = 0.7;
inline constexpr double kNotPropagatedMaxWeight = 0.4;

struct ArticlePair {
  std::string from_id;
  std::string to_id;
  double weight = 0;
  PropagationClass propagation_class = PropagationClass::Unsure;
  std::string from_publisher;
  std::string to_publisher;
  std::string from_publisher_uri;
  std::string to_publisher_uri;
};

/// False when the class disagrees with the 0.7 / 0.4 weight thresholds.
bool class_consistent(const ArticlePair& pair);

/// Header: from,to,weight,Class,from-publisher,to-publisher,from-pub-uri,to-pub-uri
inline constexpr std::array<std::string_view, 8> kPairColumns = {
    "from", "to", "weight", "Class", "from-publisher", "to-publisher", "from-pub-uri",
    "to-pub-uri"};

/// Errors: NotFound, MissingColumn, MalformedRow (row number in message),
/// UnknownClassLabel.
std::vector<ArticlePair> parse_pairs(const std::filesystem::path& path);
std::vector<ArticlePair> parse_pairs_text(std::string_view content, std::string_view source_name);
std::string write_pairs(const std::vector<ArticlePair>& pairs);

/// Pairs labelled InformationPropagated, order preserved.
std::vector<ArticlePair> filter_propagated(const std::vector<ArticlePair>& pairs);

using ConceptSet = std::set<std::string, std::less<>>;

/// article id -> set of concept identifiers.
class ConceptIndex {
 public:
  void add(std::string_view article_id, const std::vector<std::string>& concepts);
  /// nullptr when the article has no annotation line.
  const ConceptSet* find(std::string_view article_id) const;
  std::size_t size() const { return index_.size(); }
  const std::map<std::string, ConceptSet, std::less<>>& entries() const { return index_; }

 private:
  std::map<std::string, ConceptSet, std::less<>> index_;
};

/// One JSON object per line: {"article": "...", "concepts": ["...", ...]}.
/// Blank lines are ignored; anything else malformed throws
/// Error(MalformedLine) with the line number.
ConceptIndex load_concept_annotations(const std::filesystem::path& path);
ConceptIndex parse_concept_annotations(std::string_view content, std::string_view source_name);

struct SpreadingExample {
  std::string article_id;
  std::string source_publisher_uri;
  std::string target_publisher_uri;
  std::string event_label;
  ConceptSet concepts;
};

enum class IngestDrop { MissingPublisher, MissingConcepts };

std::string_view ingest_drop_name(IngestDrop reason);

struct IngestReport {
  std::size_t pairs_in = 0;
  std::size_t examples = 0;
  std::size_t unique_articles = 0;
  /// Pairs whose class disagrees with the weight thresholds.
  std::size_t class_weight_inconsistencies = 0;
  std::map<IngestDrop, std::size_t> drops;

  std::size_t total_drops() const;
};

/// Plain-text summary with per-reason counts. `parsed_pairs` is the size of
/// the unfiltered pair file when known.
std::string render_ingest_report(const IngestReport& report, std::size_t parsed_pairs,
                                 std::size_t parsed_inconsistencies);

struct IngestResult {
  std::vector<SpreadingExample> examples;
  IngestReport report;
};

/// Reduces each pair to its `from` article. Pairs whose publishers are not
/// in the store, or whose article has no non-empty concept annotation, are
/// dropped and counted. Repeated from-ids stay as separate examples.
IngestResult to_spreading_examples(const std::vector<ArticlePair>& pairs,
                                   const ConceptIndex& concepts,
                                   const PublisherStore& publishers,
                                   std::string_view event_label);

}  // namespace barrier

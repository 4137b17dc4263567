#include "barrier/features.hpp"

#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/text.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace barrier {

namespace {

ConceptVocabulary rank_concepts(const std::map<std::string, std::size_t, std::less<>>& counts,
                                std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "vocabulary size must be positive");
  if (counts.empty()) throw Error(Errc::EmptyCorpus, "no concepts in corpus");
  std::vector<VocabularyEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [id, n] : counts) entries.push_back({id, n});
  // map iteration is already identifier-ascending; stable sort keeps that
  // order among equal frequencies
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  if (entries.size() > k) entries.resize(k);
  return ConceptVocabulary(std::move(entries));
}

}  // namespace

ConceptVocabulary::ConceptVocabulary(std::vector<VocabularyEntry> entries)
    : entries_(std::move(entries)) {}

ConceptVocabulary build_vocabulary(const std::vector<SpreadingExample>& examples, std::size_t k) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& e : examples) {
    for (const auto& c : e.concepts) ++counts[c];
  }
  return rank_concepts(counts, k);
}

ConceptVocabulary build_vocabulary(const ConceptIndex& index, std::size_t k) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& [article, concepts] : index.entries()) {
    for (const auto& c : concepts) ++counts[c];
  }
  return rank_concepts(counts, k);
}

std::string write_vocabulary(const ConceptVocabulary& vocab) {
  std::ostringstream out;
  csv::write_row(out, {"concept", "frequency"});
  for (const auto& e : vocab.entries()) {
    csv::write_row(out, {e.concept_id, std::to_string(e.frequency)});
  }
  return out.str();
}

ConceptVocabulary read_vocabulary(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  const auto c_idx = table.require_column("concept");
  const auto f_idx = table.require_column("frequency");
  std::vector<VocabularyEntry> entries;
  for (const auto& row : table.rows()) {
    const auto f = text::parse_int(row.fields[f_idx]);
    if (!f || *f < 0) {
      throw Error(Errc::MalformedRow,
                  path.string() + ": line " + std::to_string(row.line) + ": bad frequency");
    }
    entries.push_back({row.fields[c_idx], static_cast<std::size_t>(*f)});
  }
  return ConceptVocabulary(std::move(entries));
}

vector_t vectorize_concepts(const ConceptSet& concepts, const ConceptVocabulary& vocab) {
  vector_t out = vector_t::Zero(static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (concepts.contains(vocab[i].concept_id)) out[static_cast<Eigen::Index>(i)] = 1.0;
  }
  return out;
}

LabeledInstance assemble_instance(const SpreadingExample& example, BarrierKind kind,
                                  const ConceptVocabulary& vocab, const KnowledgeBase& knowledge,
                                  bool label, ProfileSide side) {
  auto lookup = [&](const std::string& uri) -> const PublisherRecord& {
    const auto* p = knowledge.publishers.find(uri);
    if (!p) throw Error(Errc::IncompleteMetadata, "publisher " + uri + " is not in the store");
    return *p;
  };

  vector_t profile;
  switch (side) {
    case ProfileSide::Source:
      profile = barrier_profile(lookup(example.source_publisher_uri), knowledge, kind);
      break;
    case ProfileSide::Target:
      profile = barrier_profile(lookup(example.target_publisher_uri), knowledge, kind);
      break;
    case ProfileSide::Difference:
      profile = barrier_profile(lookup(example.target_publisher_uri), knowledge, kind) -
                barrier_profile(lookup(example.source_publisher_uri), knowledge, kind);
      break;
  }

  const vector_t concepts = vectorize_concepts(example.concepts, vocab);
  LabeledInstance instance;
  instance.article_id = example.article_id;
  instance.barrier = kind;
  instance.label = label;
  instance.features.resize(concepts.size() + profile.size());
  instance.features << concepts, profile;
  return instance;
}

}  // namespace barrier

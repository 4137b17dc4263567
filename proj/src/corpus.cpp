#include "barrier/corpus.hpp"

#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/text.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace barrier {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, path.string() + ": not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<PropagationClass> parse_class(std::string_view s) {
  const auto t = text::trim(s);
  for (auto c : {PropagationClass::InformationPropagated, PropagationClass::Unsure,
                 PropagationClass::InformationNotPropagated}) {
    if (text::iequals(t, propagation_class_name(c))) return c;
  }
  return std::nullopt;
}

}  // namespace

std::string_view propagation_class_name(PropagationClass c) {
  switch (c) {
    case PropagationClass::InformationPropagated: return "Information-Propagated";
    case PropagationClass::Unsure: return "Unsure";
    case PropagationClass::InformationNotPropagated: return "Information-Not-Propagated";
  }
  return "Unsure";
}

bool class_consistent(const ArticlePair& pair) {
  switch (pair.propagation_class) {
    case PropagationClass::InformationPropagated: return pair.weight >= kPropagatedMinWeight;
    case PropagationClass::InformationNotPropagated: return pair.weight < kNotPropagatedMaxWeight;
    case PropagationClass::Unsure:
      return pair.weight >= kNotPropagatedMaxWeight && pair.weight < kPropagatedMinWeight;
  }
  return false;
}

std::vector<ArticlePair> parse_pairs_text(std::string_view content, std::string_view source) {
  const auto table = csv::parse_table(content, source);
  std::array<std::size_t, kPairColumns.size()> idx{};
  for (std::size_t k = 0; k < kPairColumns.size(); ++k) {
    idx[k] = table.require_column(kPairColumns[k]);
  }

  std::vector<ArticlePair> pairs;
  pairs.reserve(table.size());
  for (const auto& row : table.rows()) {
    const auto where = std::string(source) + ": row at line " + std::to_string(row.line);
    auto field = [&](std::size_t k) { return std::string(text::trim(row.fields[idx[k]])); };

    ArticlePair p;
    p.from_id = field(0);
    p.to_id = field(1);
    if (p.from_id.empty() || p.to_id.empty()) {
      throw Error(Errc::MalformedRow, where + ": empty article id");
    }
    const auto weight = text::parse_double(row.fields[idx[2]]);
    if (!weight || !(*weight >= 0.0 && *weight <= 1.0)) {
      throw Error(Errc::MalformedRow,
                  where + ": weight '" + row.fields[idx[2]] + "' is not a number in [0, 1]");
    }
    p.weight = *weight;
    const auto cls = parse_class(row.fields[idx[3]]);
    if (!cls) {
      throw Error(Errc::UnknownClassLabel, where + ": unknown class '" + row.fields[idx[3]] + "'");
    }
    p.propagation_class = *cls;
    p.from_publisher = field(4);
    p.to_publisher = field(5);
    p.from_publisher_uri = field(6);
    p.to_publisher_uri = field(7);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<ArticlePair> parse_pairs(const std::filesystem::path& path) {
  return parse_pairs_text(read_file(path), path.string());
}

std::string write_pairs(const std::vector<ArticlePair>& pairs) {
  std::ostringstream out;
  csv::write_row(out, {kPairColumns.begin(), kPairColumns.end()});
  for (const auto& p : pairs) {
    csv::write_row(out, {p.from_id, p.to_id, text::format_double(p.weight),
                         std::string(propagation_class_name(p.propagation_class)),
                         p.from_publisher, p.to_publisher, p.from_publisher_uri,
                         p.to_publisher_uri});
  }
  return out.str();
}

std::vector<ArticlePair> filter_propagated(const std::vector<ArticlePair>& pairs) {
  std::vector<ArticlePair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out), [](const ArticlePair& p) {
    return p.propagation_class == PropagationClass::InformationPropagated;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Concept annotations

void ConceptIndex::add(std::string_view article_id, const std::vector<std::string>& concepts) {
  auto it = index_.find(article_id);
  if (it == index_.end()) it = index_.emplace(std::string(article_id), ConceptSet{}).first;
  it->second.insert(concepts.begin(), concepts.end());
}

const ConceptSet* ConceptIndex::find(std::string_view article_id) const {
  auto it = index_.find(article_id);
  return it == index_.end() ? nullptr : &it->second;
}

ConceptIndex parse_concept_annotations(std::string_view content, std::string_view source) {
  ConceptIndex index;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const auto line = text::trim(content.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;

    const auto fail = [&](const std::string& why) {
      return Error(Errc::MalformedLine,
                   std::string(source) + ": line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(e.what());
    }
    if (!record.is_object()) throw fail("expected an object");
    const auto article = record.find("article");
    const auto concepts = record.find("concepts");
    if (article == record.end() || !article->is_string()) {
      throw fail("missing string field 'article'");
    }
    if (concepts == record.end() || !concepts->is_array()) {
      throw fail("missing array field 'concepts'");
    }
    std::vector<std::string> ids;
    for (const auto& c : *concepts) {
      if (!c.is_string()) throw fail("concept entries must be strings");
      auto id = std::string(text::trim(c.get_ref<const std::string&>()));
      if (!id.empty()) ids.push_back(std::move(id));
    }
    index.add(text::trim(article->get_ref<const std::string&>()), ids);
  }
  return index;
}

ConceptIndex load_concept_annotations(const std::filesystem::path& path) {
  return parse_concept_annotations(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Spreading examples

std::string_view ingest_drop_name(IngestDrop reason) {
  switch (reason) {
    case IngestDrop::MissingPublisher: return "MissingPublisher";
    case IngestDrop::MissingConcepts: return "MissingConcepts";
  }
  return "Unknown";
}

std::size_t IngestReport::total_drops() const {
  return std::accumulate(drops.begin(), drops.end(), std::size_t{0},
                         [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

std::string render_ingest_report(const IngestReport& report, std::size_t parsed_pairs,
                                 std::size_t parsed_inconsistencies) {
  std::ostringstream out;
  out << "pairs parsed: " << parsed_pairs << '\n'
      << "class/weight inconsistencies (all pairs): " << parsed_inconsistencies << '\n'
      << "propagated pairs: " << report.pairs_in << '\n'
      << "class/weight inconsistencies (propagated): " << report.class_weight_inconsistencies
      << '\n'
      << "examples: " << report.examples << '\n'
      << "unique source articles: " << report.unique_articles << '\n'
      << "dropped: " << report.total_drops() << '\n';
  for (auto reason : {IngestDrop::MissingPublisher, IngestDrop::MissingConcepts}) {
    auto it = report.drops.find(reason);
    out << "  " << ingest_drop_name(reason) << ": " << (it == report.drops.end() ? 0 : it->second)
        << '\n';
  }
  return out.str();
}

IngestResult to_spreading_examples(const std::vector<ArticlePair>& pairs,
                                   const ConceptIndex& concepts,
                                   const PublisherStore& publishers,
                                   std::string_view event_label) {
  IngestResult result;
  result.report.pairs_in = pairs.size();
  std::unordered_set<std::string> articles;
  for (const auto& pair : pairs) {
    if (!class_consistent(pair)) ++result.report.class_weight_inconsistencies;

    const auto* source = publishers.find(pair.from_publisher_uri);
    const auto* target = publishers.find(pair.to_publisher_uri);
    if (!source || !target) {
      ++result.report.drops[IngestDrop::MissingPublisher];
      continue;
    }
    const auto* annotated = concepts.find(pair.from_id);
    if (!annotated || annotated->empty()) {
      ++result.report.drops[IngestDrop::MissingConcepts];
      continue;
    }
    SpreadingExample example;
    example.article_id = pair.from_id;
    example.source_publisher_uri = source->publisher_uri;
    example.target_publisher_uri = target->publisher_uri;
    example.event_label = std::string(event_label);
    example.concepts = *annotated;
    articles.insert(example.article_id);
    result.examples.push_back(std::move(example));
  }
  result.report.examples = result.examples.size();
  result.report.unique_articles = articles.size();
  return result;
}

}  // namespace barrier

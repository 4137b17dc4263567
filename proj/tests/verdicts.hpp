#pragma once

// Pipeline labels in the oracle's Verdict shape, for side-by-side checks.

#include "barrier/pipeline.hpp"

#include "reannotate.hpp"

#include <map>

namespace testing {

inline barrier::PipelineConfig corpus_config(const std::filesystem::path& dir,
                                             const std::string& event = "synthetic") {
  auto config = barrier::PipelineConfig::with_defaults();
  config.pairs = dir / "pairs.csv";
  config.concepts = dir / "concepts.jsonl";
  config.countries = dir / "countries.csv";
  config.publishers = dir / "publishers.csv";
  config.event_label = event;
  return config;
}

/// Runs ingest and annotation on a corpus directory; articles missing from
/// a barrier's dataset come back as 'D'.
inline std::map<std::string, std::array<char, 5>> pipeline_verdicts(
    const barrier::PipelineConfig& config) {
  const auto kb = barrier::load_knowledge(config);
  const auto ingest = barrier::run_ingest(config, kb);
  std::map<std::string, std::array<char, 5>> out;
  for (const auto& pair : barrier::filter_propagated(ingest.parsed)) out[pair.from_id].fill('D');
  if (ingest.result.examples.empty()) return out;
  const auto annotated = barrier::run_annotate(config, kb, ingest);
  for (const auto& ds : annotated.datasets) {
    const auto b = static_cast<std::size_t>(ds.barrier);
    for (const auto& inst : ds.instances) out[inst.article_id][b] = inst.label ? 'T' : 'F';
  }
  return out;
}

}  // namespace testing

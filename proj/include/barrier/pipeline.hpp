#pragma once

#include "barrier/annotate.hpp"
#include "barrier/classifiers.hpp"
#include "barrier/corpus.hpp"
#include "barrier/eval.hpp"
#include "barrier/features.hpp"
#include "barrier/knowledge.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace barrier {

enum class VocabularyScope { Event, Global };

struct PipelineConfig {
  std::filesystem::path pairs;
  std::filesystem::path concepts;
  std::filesystem::path countries;
  std::filesystem::path publishers;
  std::filesystem::path output_dir;
  std::string event_label = "event";
  std::vector<BarrierKind> barriers{kAllBarriers.begin(), kAllBarriers.end()};
  std::vector<ModelFamily> models{kAllFamilies.begin(), kAllFamilies.end()};
  std::size_t vocab_size = kDefaultVocabularySize;
  double threshold = kDefaultSimilarityThreshold;
  std::size_t folds = kDefaultFolds;
  std::uint64_t seed = 42;
  std::map<ModelFamily, HyperparameterGrid> grids;
  VocabularyScope vocab_scope = VocabularyScope::Event;
  ProfileSide profile_side = ProfileSide::Source;
  /// Empty selects all 13 indicators.
  std::vector<std::string> economic_indicators;
  bool minmax_scaling = false;
  bool nested = false;
  bool fold_mean = false;

  /// Config populated with the default sweep grids.
  static PipelineConfig with_defaults();
};

/// Plain `key = value` lines, '#' comments. Unknown keys throw
/// Error(InvalidArgument).
PipelineConfig parse_config(std::string_view text);
PipelineConfig read_config(const std::filesystem::path& path);
std::string write_config(const PipelineConfig& config);

/// Throws Error(NotFound) naming the first unreadable input, e.g.
/// "pairs: not found (path)".
void check_inputs(const PipelineConfig& config);

/// Loaded knowledge base with the configured indicator subset and scaling.
KnowledgeBase load_knowledge(const PipelineConfig& config);

struct IngestStage {
  std::vector<ArticlePair> parsed;
  ConceptIndex concepts;
  IngestResult result;
};

IngestStage run_ingest(const PipelineConfig& config, const KnowledgeBase& knowledge);

ConceptVocabulary build_run_vocabulary(const PipelineConfig& config, const IngestStage& ingest);

struct AnnotateStage {
  ConceptVocabulary vocabulary;
  std::vector<BarrierDataset> datasets;
};

AnnotateStage run_annotate(const PipelineConfig& config, const KnowledgeBase& knowledge,
                           const IngestStage& ingest);

/// Model specs for the configured families, seeded from the run seed.
std::vector<ModelSpec> run_specs(const PipelineConfig& config);
ExperimentOptions run_experiment_options(const PipelineConfig& config);

/// dataset file name: <event>_<barrier-slug>.csv
std::string dataset_file_name(std::string_view event, BarrierKind kind);

struct RunArtifacts {
  std::vector<ReportRow> rows;
  std::vector<DatasetSummary> summaries;
};

/// ingest -> annotate -> features -> experiment -> report. Writes
/// datasets/<event>_<barrier>.csv, vocabulary.csv, ingest_report.txt,
/// report.md, report.csv and config.txt under output_dir.
RunArtifacts run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

}  // namespace barrier

namespace barrier::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2, kInternalError = 3 };

/// Environment variable supplying the default output directory.
inline constexpr const char* kOutputDirEnv = "BARRIER_OUT_DIR";

/// Entry point shared by the binary and tests; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace barrier::cli

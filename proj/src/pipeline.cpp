#include "barrier/pipeline.hpp"

#include "barrier/error.hpp"
#include "barrier/rng.hpp"
#include "barrier/text.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace barrier {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  for (const auto& part : text::split(value, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::size_t line) {
  throw Error(Errc::InvalidArgument, "config line " + std::to_string(line) + ": bad value for " +
                                         std::string(key) + ": '" + std::string(value) + "'");
}

std::size_t parse_count(std::string_view key, std::string_view value, std::size_t line) {
  const auto v = text::parse_int(value);
  if (!v || *v < 0) bad_value(key, value, line);
  return static_cast<std::size_t>(*v);
}

bool parse_flag(std::string_view key, std::string_view value, std::size_t line) {
  const auto v = text::parse_bool(value);
  if (!v) bad_value(key, value, line);
  return *v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, path.string() + ": cannot write");
  out << content;
  if (!out) throw Error(Errc::Io, path.string() + ": write failed");
}

std::string_view scope_name(VocabularyScope scope) {
  return scope == VocabularyScope::Global ? "global" : "event";
}

std::string_view side_name(ProfileSide side) {
  switch (side) {
    case ProfileSide::Target:
      return "target";
    case ProfileSide::Difference:
      return "difference";
    case ProfileSide::Source:
      break;
  }
  return "source";
}

}  // namespace

PipelineConfig PipelineConfig::with_defaults() {
  PipelineConfig config;
  for (auto family : kAllFamilies) {
    if (auto grid = default_grid(family); !grid.empty()) config.grids[family] = std::move(grid);
  }
  return config;
}

PipelineConfig parse_config(std::string_view text) {
  auto config = PipelineConfig::with_defaults();
  std::size_t line_no = 0;
  for (const auto& raw : text::split(text, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));

    if (key == "pairs") {
      config.pairs = std::string(value);
    } else if (key == "concepts") {
      config.concepts = std::string(value);
    } else if (key == "countries") {
      config.countries = std::string(value);
    } else if (key == "publishers") {
      config.publishers = std::string(value);
    } else if (key == "output_dir") {
      config.output_dir = std::string(value);
    } else if (key == "event") {
      if (value.empty()) bad_value(key, value, line_no);
      config.event_label = std::string(value);
    } else if (key == "barriers") {
      config.barriers.clear();
      for (const auto& name : split_list(value)) {
        const auto kind = parse_barrier(name);
        if (!kind) bad_value(key, name, line_no);
        config.barriers.push_back(*kind);
      }
      if (config.barriers.empty()) bad_value(key, value, line_no);
    } else if (key == "models") {
      config.models.clear();
      for (const auto& name : split_list(value)) {
        const auto family = parse_family(name);
        if (!family) bad_value(key, name, line_no);
        config.models.push_back(*family);
      }
      if (config.models.empty()) bad_value(key, value, line_no);
    } else if (key == "vocab_size") {
      config.vocab_size = parse_count(key, value, line_no);
      if (config.vocab_size == 0) bad_value(key, value, line_no);
    } else if (key == "threshold") {
      const auto v = text::parse_double(value);
      if (!v || *v < -1 || *v > 1) bad_value(key, value, line_no);
      config.threshold = *v;
    } else if (key == "folds") {
      config.folds = parse_count(key, value, line_no);
      if (config.folds < 2) bad_value(key, value, line_no);
    } else if (key == "seed") {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) bad_value(key, value, line_no);
      config.seed = static_cast<std::uint64_t>(*v);
    } else if (key.starts_with("grid.")) {
      const auto family = parse_family(key.substr(5));
      if (!family) bad_value(key, key.substr(5), line_no);
      if (value.empty()) {
        config.grids.erase(*family);
      } else {
        config.grids[*family] = parse_grid(value);
      }
    } else if (key == "vocab_scope") {
      if (value == "event") {
        config.vocab_scope = VocabularyScope::Event;
      } else if (value == "global") {
        config.vocab_scope = VocabularyScope::Global;
      } else {
        bad_value(key, value, line_no);
      }
    } else if (key == "profile_side") {
      if (value == "source") {
        config.profile_side = ProfileSide::Source;
      } else if (value == "target") {
        config.profile_side = ProfileSide::Target;
      } else if (value == "difference") {
        config.profile_side = ProfileSide::Difference;
      } else {
        bad_value(key, value, line_no);
      }
    } else if (key == "economic_indicators") {
      config.economic_indicators = split_list(value);
      economic_indicator_indices(config.economic_indicators);
    } else if (key == "minmax_scaling") {
      config.minmax_scaling = parse_flag(key, value, line_no);
    } else if (key == "nested") {
      config.nested = parse_flag(key, value, line_no);
    } else if (key == "fold_mean") {
      config.fold_mean = parse_flag(key, value, line_no);
    } else {
      throw Error(Errc::InvalidArgument, "config line " + std::to_string(line_no) +
                                             ": unknown key '" + std::string(key) + "'");
    }
  }
  return config;
}

PipelineConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "config: not found (" + path.string() + ")");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string write_config(const PipelineConfig& config) {
  std::ostringstream out;
  out << "pairs = " << config.pairs.string() << '\n'
      << "concepts = " << config.concepts.string() << '\n'
      << "countries = " << config.countries.string() << '\n'
      << "publishers = " << config.publishers.string() << '\n'
      << "output_dir = " << config.output_dir.string() << '\n'
      << "event = " << config.event_label << '\n';
  std::vector<std::string> names;
  for (auto k : config.barriers) names.emplace_back(barrier_slug(k));
  out << "barriers = " << join(names, ",") << '\n';
  names.clear();
  for (auto f : config.models) names.emplace_back(family_tag(f));
  out << "models = " << join(names, ",") << '\n'
      << "vocab_size = " << config.vocab_size << '\n'
      << "threshold = " << text::format_double(config.threshold) << '\n'
      << "folds = " << config.folds << '\n'
      << "seed = " << config.seed << '\n';
  for (auto family : kAllFamilies) {
    const auto it = config.grids.find(family);
    out << "grid." << family_tag(family) << " = "
        << (it == config.grids.end() ? "" : format_grid(it->second)) << '\n';
  }
  out << "vocab_scope = " << scope_name(config.vocab_scope) << '\n'
      << "profile_side = " << side_name(config.profile_side) << '\n'
      << "economic_indicators = " << join(config.economic_indicators, ",") << '\n'
      << "minmax_scaling = " << (config.minmax_scaling ? "true" : "false") << '\n'
      << "nested = " << (config.nested ? "true" : "false") << '\n'
      << "fold_mean = " << (config.fold_mean ? "true" : "false") << '\n';
  return out.str();
}

void check_inputs(const PipelineConfig& config) {
  const std::pair<const char*, const std::filesystem::path*> inputs[] = {
      {"pairs", &config.pairs},
      {"concepts", &config.concepts},
      {"countries", &config.countries},
      {"publishers", &config.publishers}};
  for (const auto& [name, path] : inputs) {
    std::error_code ec;
    if (path->empty() || !std::filesystem::is_regular_file(*path, ec)) {
      throw Error(Errc::NotFound, std::string(name) + ": not found (" + path->string() + ")");
    }
  }
}

KnowledgeBase load_knowledge(const PipelineConfig& config) {
  KnowledgeBase kb;
  kb.countries = load_country_profiles(config.countries);
  if (config.minmax_scaling) kb.countries = kb.countries.min_max_scaled();
  kb.publishers = load_publishers(config.publishers, kb.countries);
  kb.options.economic_indicators = economic_indicator_indices(config.economic_indicators);
  return kb;
}

IngestStage run_ingest(const PipelineConfig& config, const KnowledgeBase& knowledge) {
  IngestStage stage;
  stage.parsed = parse_pairs(config.pairs);
  stage.concepts = load_concept_annotations(config.concepts);
  stage.result = to_spreading_examples(filter_propagated(stage.parsed), stage.concepts,
                                       knowledge.publishers, config.event_label);
  return stage;
}

ConceptVocabulary build_run_vocabulary(const PipelineConfig& config, const IngestStage& ingest) {
  if (config.vocab_scope == VocabularyScope::Global) {
    return build_vocabulary(ingest.concepts, config.vocab_size);
  }
  return build_vocabulary(ingest.result.examples, config.vocab_size);
}

AnnotateStage run_annotate(const PipelineConfig& config, const KnowledgeBase& knowledge,
                           const IngestStage& ingest) {
  if (ingest.result.examples.empty()) {
    throw Error(Errc::EmptyCorpus, "no spreading examples survived ingest");
  }
  AnnotateStage stage;
  stage.vocabulary = build_run_vocabulary(config, ingest);
  AnnotationOptions options;
  options.threshold = config.threshold;
  options.profile_side = config.profile_side;
  for (auto kind : config.barriers) {
    stage.datasets.push_back(build_barrier_dataset(ingest.result.examples, kind, knowledge,
                                                   stage.vocabulary, options));
  }
  return stage;
}

std::vector<ModelSpec> run_specs(const PipelineConfig& config) {
  std::vector<ModelSpec> specs;
  for (auto family : config.models) {
    specs.push_back(make_spec(family, derive_seed(config.seed, static_cast<std::uint64_t>(family))));
  }
  return specs;
}

ExperimentOptions run_experiment_options(const PipelineConfig& config) {
  ExperimentOptions options;
  options.folds = config.folds;
  options.seed = config.seed;
  options.grids = config.grids;
  options.nested = config.nested;
  options.fold_mean = config.fold_mean;
  return options;
}

std::string dataset_file_name(std::string_view event, BarrierKind kind) {
  return std::string(event) + "_" + std::string(barrier_slug(kind)) + ".csv";
}

RunArtifacts run_pipeline(const PipelineConfig& config, std::ostream* log) {
  auto say = [&](const std::string& msg) {
    if (log) *log << msg << '\n';
  };
  check_inputs(config);
  const auto knowledge = load_knowledge(config);
  say("knowledge: " + std::to_string(knowledge.countries.size()) + " countries, " +
      std::to_string(knowledge.publishers.size()) + " publishers");

  const auto ingest = run_ingest(config, knowledge);
  say("ingest: " + std::to_string(ingest.result.examples.size()) + " examples from " +
      std::to_string(ingest.parsed.size()) + " pairs");

  const auto annotated = run_annotate(config, knowledge, ingest);

  std::filesystem::create_directories(config.output_dir / "datasets");
  for (const auto& ds : annotated.datasets) {
    write_file(config.output_dir / "datasets" / dataset_file_name(config.event_label, ds.barrier),
               write_dataset(ds, annotated.vocabulary.size()));
  }
  write_file(config.output_dir / "vocabulary.csv", write_vocabulary(annotated.vocabulary));

  std::size_t parsed_inconsistent = 0;
  for (const auto& p : ingest.parsed) parsed_inconsistent += class_consistent(p) ? 0 : 1;
  std::string ingest_text =
      render_ingest_report(ingest.result.report, ingest.parsed.size(), parsed_inconsistent);
  std::ostringstream datasets_text;
  datasets_text << "\ndatasets\n";
  for (const auto& ds : annotated.datasets) {
    datasets_text << "  " << barrier_slug(ds.barrier) << ": " << ds.instances.size()
                  << " instances (" << ds.n_true << " TRUE, " << ds.n_false << " FALSE)";
    for (const auto& [reason, count] : ds.drops) {
      datasets_text << ", " << dataset_drop_name(reason) << " " << count;
    }
    datasets_text << '\n';
  }
  write_file(config.output_dir / "ingest_report.txt", ingest_text + datasets_text.str());

  RunArtifacts artifacts;
  std::vector<std::string> skipped;
  const auto specs = run_specs(config);
  const auto options = run_experiment_options(config);
  for (const auto& ds : annotated.datasets) {
    artifacts.summaries.push_back(summarize(ds));
    try {
      auto result = run_experiment(ds, specs, options);
      say("evaluated " + std::string(barrier_slug(ds.barrier)) + " (" +
          std::to_string(ds.instances.size()) + " instances)");
      artifacts.rows.insert(artifacts.rows.end(), result.rows.begin(), result.rows.end());
    } catch (const Error& e) {
      if (e.code() != Errc::TooFewPerClass && e.code() != Errc::DegenerateTrainingSet) throw;
      skipped.push_back(std::string(barrier_display_name(ds.barrier)) + ": " + e.what());
      say("skipped " + skipped.back());
    }
  }
  if (artifacts.rows.empty()) {
    throw Error(Errc::TooFewPerClass, "no barrier could be evaluated; " + join(skipped, "; "));
  }

  std::string markdown = render_report(artifacts.rows, ReportFormat::Markdown, artifacts.summaries);
  for (const auto& s : skipped) markdown += "\nNot evaluated: " + s + "\n";
  write_file(config.output_dir / "report.md", markdown);
  write_file(config.output_dir / "report.csv", render_report(artifacts.rows, ReportFormat::Csv));
  write_file(config.output_dir / "config.txt", write_config(config));
  return artifacts;
}

}  // namespace barrier

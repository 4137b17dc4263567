#include "barrier/error.hpp"
#include "barrier/pipeline.hpp"
#include "barrier/synth.hpp"
#include "barrier/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace barrier::cli {

namespace {

constexpr const char* kProgram = "barrierdetect";

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "barrier-out";
}

std::string slurp(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, std::string(what) + ": not found (" + path.string() + ")");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, path.string() + ": cannot write");
  out << content;
}

/// Pipeline options shared by run, annotate and concept-freq. Values are
/// applied on top of --config only when given on the command line.
struct ConfigOptions {
  std::string config_file;
  std::string pairs, concepts, countries, publishers, output_dir, event;
  std::string barriers, models, vocab_scope, profile_side, economic_indicators;
  std::vector<std::string> grids;
  std::size_t vocab_size = 0, folds = 0;
  double threshold = 0;
  std::uint64_t seed = 0;
  bool minmax = false, nested = false, fold_mean = false;

  std::vector<std::pair<std::string, CLI::Option*>> given;

  void attach(CLI::App* app, bool experiment) {
    auto add = [&](const char* name, auto& target, const char* help) {
      given.emplace_back(name, app->add_option(name, target, help));
    };
    auto flag = [&](const char* name, bool& target, const char* help) {
      given.emplace_back(name, app->add_flag(name, target, help));
    };
    app->add_option("--config", config_file, "key = value config file (see config.txt)");
    add("--pairs", pairs, "article pair CSV");
    add("--concepts", concepts, "concept annotations (JSON lines)");
    add("--countries", countries, "country profiles CSV");
    add("--publishers", publishers, "publisher metadata CSV");
    add("--out", output_dir, "output directory (default $BARRIER_OUT_DIR or ./barrier-out)");
    add("--event", event, "event label");
    add("--barriers", barriers, "comma list of barriers");
    add("--vocab-size", vocab_size, "concept vocabulary size");
    add("--threshold", threshold, "similarity threshold");
    add("--vocab-scope", vocab_scope, "event or global");
    add("--profile-side", profile_side, "source, target or difference");
    add("--economic-indicators", economic_indicators, "comma list of indicator columns");
    flag("--minmax", minmax, "min-max scale economic and cultural columns");
    if (experiment) {
      add("--models", models, "comma list of model families");
      add("--folds", folds, "cross-validation folds");
      add("--seed", seed, "run seed");
      add("--grid", grids, "family=name:v1,v2[;name:v...] (repeatable)");
      flag("--nested", nested, "select hyperparameters by inner cross-validation");
      flag("--fold-mean", fold_mean, "average per-fold metrics instead of pooling");
    }
  }

  bool has(std::string_view name) const {
    for (const auto& [n, opt] : given) {
      if (n == name) return opt->count() > 0;
    }
    return false;
  }

  PipelineConfig resolve() const {
    auto config = config_file.empty()
                      ? PipelineConfig::with_defaults()
                      : read_config(config_file);
    if (config_file.empty()) config.output_dir = default_output_dir();
    std::ostringstream overlay;
    auto line = [&](const char* name, const char* key, const std::string& value) {
      if (has(name)) overlay << key << " = " << value << '\n';
    };
    line("--pairs", "pairs", pairs);
    line("--concepts", "concepts", concepts);
    line("--countries", "countries", countries);
    line("--publishers", "publishers", publishers);
    line("--out", "output_dir", output_dir);
    line("--event", "event", event);
    line("--barriers", "barriers", barriers);
    line("--models", "models", models);
    line("--vocab-size", "vocab_size", std::to_string(vocab_size));
    line("--threshold", "threshold", text::format_double(threshold));
    line("--folds", "folds", std::to_string(folds));
    line("--seed", "seed", std::to_string(seed));
    line("--vocab-scope", "vocab_scope", vocab_scope);
    line("--profile-side", "profile_side", profile_side);
    line("--economic-indicators", "economic_indicators", economic_indicators);
    line("--minmax", "minmax_scaling", minmax ? "true" : "false");
    line("--nested", "nested", nested ? "true" : "false");
    line("--fold-mean", "fold_mean", fold_mean ? "true" : "false");
    for (const auto& g : grids) {
      const auto eq = g.find('=');
      if (eq == std::string::npos) {
        throw Error(Errc::InvalidArgument, "--grid expects family=spec, got '" + g + "'");
      }
      overlay << "grid." << g.substr(0, eq) << " = " << g.substr(eq + 1) << '\n';
    }
    // reuse the config parser for validation, then copy the touched fields
    const auto patch = parse_config(overlay.str());
    if (has("--pairs")) config.pairs = patch.pairs;
    if (has("--concepts")) config.concepts = patch.concepts;
    if (has("--countries")) config.countries = patch.countries;
    if (has("--publishers")) config.publishers = patch.publishers;
    if (has("--out")) config.output_dir = patch.output_dir;
    if (has("--event")) config.event_label = patch.event_label;
    if (has("--barriers")) config.barriers = patch.barriers;
    if (has("--models")) config.models = patch.models;
    if (has("--vocab-size")) config.vocab_size = patch.vocab_size;
    if (has("--threshold")) config.threshold = patch.threshold;
    if (has("--folds")) config.folds = patch.folds;
    if (has("--seed")) config.seed = patch.seed;
    if (has("--vocab-scope")) config.vocab_scope = patch.vocab_scope;
    if (has("--profile-side")) config.profile_side = patch.profile_side;
    if (has("--economic-indicators")) config.economic_indicators = patch.economic_indicators;
    if (has("--minmax")) config.minmax_scaling = patch.minmax_scaling;
    if (has("--nested")) config.nested = patch.nested;
    if (has("--fold-mean")) config.fold_mean = patch.fold_mean;
    for (const auto& g : grids) {
      const auto family = parse_family(g.substr(0, g.find('=')));
      if (const auto it = patch.grids.find(*family); it != patch.grids.end()) {
        config.grids[*family] = it->second;
      } else {
        config.grids.erase(*family);
      }
    }
    return config;
  }
};

std::optional<BarrierKind> barrier_from_file(const std::filesystem::path& path) {
  const auto stem = path.stem().string();
  for (auto kind : kAllBarriers) {
    const auto suffix = "_" + std::string(barrier_slug(kind));
    if (stem.size() >= suffix.size() && stem.ends_with(suffix)) return kind;
  }
  return std::nullopt;
}

BarrierKind resolve_barrier(const std::string& name, const std::filesystem::path& dataset) {
  if (!name.empty()) {
    if (auto kind = parse_barrier(name)) return *kind;
    throw Error(Errc::InvalidArgument, "unknown barrier '" + name + "'");
  }
  if (auto kind = barrier_from_file(dataset)) return *kind;
  throw Error(Errc::InvalidArgument,
              "cannot infer the barrier from '" + dataset.filename().string() + "'; pass --barrier");
}

int cmd_run(const ConfigOptions& opts, std::ostream& out, std::ostream& err) {
  auto config = opts.resolve();
  for (auto* p : {&config.pairs, &config.concepts, &config.countries, &config.publishers}) {
    if (!p->empty()) *p = std::filesystem::absolute(*p);
  }
  const auto artifacts = run_pipeline(config, &err);
  out << render_report(artifacts.rows, ReportFormat::Markdown, artifacts.summaries);
  out << "\nwrote " << (config.output_dir / "report.md").string() << '\n';
  return kOk;
}

int cmd_annotate(const ConfigOptions& opts, std::ostream& out) {
  const auto config = opts.resolve();
  check_inputs(config);
  const auto knowledge = load_knowledge(config);
  const auto ingest = run_ingest(config, knowledge);
  const auto stage = run_annotate(config, knowledge, ingest);
  std::filesystem::create_directories(config.output_dir / "datasets");
  for (const auto& ds : stage.datasets) {
    const auto path = config.output_dir / "datasets" / dataset_file_name(config.event_label, ds.barrier);
    spill(path, write_dataset(ds, stage.vocabulary.size()));
    out << barrier_slug(ds.barrier) << ": " << ds.instances.size() << " instances (" << ds.n_true
        << " TRUE, " << ds.n_false << " FALSE, " << ds.total_drops() << " dropped) -> "
        << path.string() << '\n';
  }
  spill(config.output_dir / "vocabulary.csv", write_vocabulary(stage.vocabulary));
  return kOk;
}

int cmd_concept_freq(const ConfigOptions& opts, std::size_t top, std::ostream& out) {
  auto config = opts.resolve();
  config.vocab_size = top;
  ConceptVocabulary vocab;
  if (config.vocab_scope == VocabularyScope::Global) {
    if (config.concepts.empty() || !std::filesystem::is_regular_file(config.concepts)) {
      throw Error(Errc::NotFound, "concepts: not found (" + config.concepts.string() + ")");
    }
    vocab = build_vocabulary(load_concept_annotations(config.concepts), top);
  } else {
    check_inputs(config);
    const auto knowledge = load_knowledge(config);
    vocab = build_run_vocabulary(config, run_ingest(config, knowledge));
  }
  out << "| Rank | Concept | Articles |\n|---:|:---|---:|\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << "| " << i + 1 << " | " << vocab[i].concept_id << " | " << vocab[i].frequency << " |\n";
  }
  return kOk;
}

int cmd_train(const std::string& dataset, const std::string& barrier_name,
              const std::string& family_name, std::uint64_t seed,
              const std::vector<std::string>& params, const std::string& output, std::ostream& out) {
  const auto family = parse_family(family_name);
  if (!family) throw Error(Errc::InvalidArgument, "unknown model family '" + family_name + "'");
  Hyperparameters hp;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    const auto value = eq == std::string::npos ? std::nullopt : text::parse_double(p.substr(eq + 1));
    if (!value) throw Error(Errc::InvalidArgument, "--param expects name=value, got '" + p + "'");
    hp[p.substr(0, eq)] = *value;
  }
  const auto kind = resolve_barrier(barrier_name, dataset);
  const auto data = read_dataset(dataset, kind);
  const auto model = train(make_spec(*family, seed, hp), data.features(), data.labels());
  save_model(model, output);
  out << "trained " << family_tag(*family) << " on " << data.instances.size() << " instances -> "
      << output << '\n';
  return kOk;
}

int cmd_evaluate_model(const std::string& model_path, const std::string& dataset,
                       const std::string& barrier_name, std::ostream& out) {
  const auto model = load_model(model_path);
  const auto kind = resolve_barrier(barrier_name, dataset);
  const auto data = read_dataset(dataset, kind);
  const auto m = micro_metrics(predict(model, data.features()), data.labels());
  ReportRow row{kind, model.spec.family, m};
  out << render_report({row}, ReportFormat::Markdown, {summarize(data)});
  return kOk;
}

int cmd_evaluate_cv(const ConfigOptions& opts, const std::vector<std::string>& datasets,
                    const std::string& barrier_name, std::ostream& out, std::ostream& err) {
  const auto config = opts.resolve();
  std::vector<ReportRow> rows;
  std::vector<DatasetSummary> summaries;
  const auto specs = run_specs(config);
  const auto options = run_experiment_options(config);
  for (const auto& path : datasets) {
    const auto data = read_dataset(path, resolve_barrier(barrier_name, path));
    summaries.push_back(summarize(data));
    const auto result = run_experiment(data, specs, options);
    err << "evaluated " << path << '\n';
    rows.insert(rows.end(), result.rows.begin(), result.rows.end());
  }
  if (opts.has("--out")) {
    spill(config.output_dir / "report.csv", render_report(rows, ReportFormat::Csv));
    spill(config.output_dir / "report.md", render_report(rows, ReportFormat::Markdown, summaries));
  }
  out << render_report(rows, ReportFormat::Markdown, summaries);
  return kOk;
}

int cmd_report(const std::string& input, const std::string& format, std::ostream& out) {
  const auto rows = parse_report_csv(slurp(input, "report"));
  if (format == "markdown" || format == "md") {
    out << render_report(rows, ReportFormat::Markdown);
  } else if (format == "csv") {
    out << render_report(rows, ReportFormat::Csv);
  } else {
    throw Error(Errc::InvalidArgument, "unknown report format '" + format + "'");
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects barriers to news propagation between publishers", kProgram};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "full pipeline: ingest, annotate, evaluate, report");
  run_opts.attach(run_cmd, true);

  ConfigOptions annotate_opts;
  auto* annotate_cmd = app.add_subcommand("annotate", "write labelled barrier datasets");
  annotate_opts.attach(annotate_cmd, false);

  ConfigOptions freq_opts;
  std::size_t top = kDefaultVocabularySize;
  auto* freq_cmd = app.add_subcommand("concept-freq", "print the most frequent concepts");
  freq_opts.attach(freq_cmd, false);
  freq_cmd->add_option("--top", top, "number of concepts")->check(CLI::PositiveNumber);

  SyntheticSpec synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted labels");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--articles", synth.n_articles, "propagated pairs");
  synth_cmd->add_option("--noise-pairs", synth.n_noise_pairs, "unsure / not-propagated pairs");
  synth_cmd->add_option("--countries", synth.n_countries, "countries");
  synth_cmd->add_option("--publishers", synth.n_publishers, "publishers");
  synth_cmd->add_option("--concept-pool", synth.concept_pool, "distinct concepts");
  synth_cmd->add_option("--time-zones", synth.n_time_zones, "time-zone groups");
  synth_cmd->add_option("--economic-clusters", synth.n_economic_clusters, "economic clusters");
  synth_cmd->add_option("--cultural-clusters", synth.n_cultural_clusters, "cultural clusters");
  synth_cmd->add_option("--alignments", synth.n_alignments, "political alignments");
  synth_cmd->add_option("--unknown-alignment-rate", synth.unknown_alignment_rate);
  synth_cmd->add_option("--missing-country-rate", synth.missing_country_rate);
  synth_cmd->add_option("--missing-culture-rate", synth.missing_culture_rate);
  synth_cmd->add_option("--missing-concepts-rate", synth.missing_concepts_rate);
  synth_cmd->add_option("--unknown-publisher-rate", synth.unknown_publisher_rate);
  synth_cmd->add_flag("--orthogonal-economic", synth.orthogonal_economic);
  synth_cmd->add_flag("--cross-country-only", synth.cross_country_only);
  synth_cmd->add_option("--event", synth.event_label);
  synth_cmd->add_option("--seed", synth.seed);

  std::string dataset, barrier_name, family_name, model_out;
  std::uint64_t train_seed = 42;
  std::vector<std::string> params;
  auto* train_cmd = app.add_subcommand("train", "train one model on a dataset CSV");
  train_cmd->add_option("--dataset", dataset, "dataset CSV")->required();
  train_cmd->add_option("--barrier", barrier_name, "barrier (inferred from the file name)");
  train_cmd->add_option("--model", family_name, "model family")->required();
  train_cmd->add_option("--seed", train_seed, "model seed");
  train_cmd->add_option("--param", params, "name=value (repeatable)");
  train_cmd->add_option("--out", model_out, "model file")->required();

  ConfigOptions eval_opts;
  std::vector<std::string> eval_datasets;
  std::string eval_model, eval_barrier;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "score a saved model, or cross-validate models on dataset CSVs");
  eval_cmd->add_option("--dataset", eval_datasets, "dataset CSV (repeatable)")->required();
  eval_cmd->add_option("--model-file", eval_model, "saved model; skips cross-validation");
  eval_cmd->add_option("--barrier", eval_barrier, "barrier (inferred from the file name)");
  {
    auto* sink = eval_cmd;
    auto add = [&](const char* name, auto& target, const char* help) {
      eval_opts.given.emplace_back(name, sink->add_option(name, target, help));
    };
    auto flag = [&](const char* name, bool& target, const char* help) {
      eval_opts.given.emplace_back(name, sink->add_flag(name, target, help));
    };
    sink->add_option("--config", eval_opts.config_file, "key = value config file");
    add("--out", eval_opts.output_dir, "write report.csv and report.md here");
    add("--models", eval_opts.models, "comma list of model families");
    add("--folds", eval_opts.folds, "cross-validation folds");
    add("--seed", eval_opts.seed, "run seed");
    add("--grid", eval_opts.grids, "family=name:v1,v2 (repeatable)");
    flag("--nested", eval_opts.nested, "select hyperparameters by inner cross-validation");
    flag("--fold-mean", eval_opts.fold_mean, "average per-fold metrics instead of pooling");
  }

  std::string report_in, report_format = "markdown";
  auto* report_cmd = app.add_subcommand("report", "re-render a report.csv");
  report_cmd->add_option("--input", report_in, "report.csv")->required();
  report_cmd->add_option("--format", report_format, "markdown or csv");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, out, err);
    if (*annotate_cmd) return cmd_annotate(annotate_opts, out);
    if (*freq_cmd) return cmd_concept_freq(freq_opts, top, out);
    if (*synth_cmd) {
      const auto corpus = generate_synthetic(synth);
      write_synthetic(corpus, synth_out);
      out << "wrote " << corpus.truth.size() << " propagated pairs to " << synth_out << '\n';
      return kOk;
    }
    if (*train_cmd) {
      return cmd_train(dataset, barrier_name, family_name, train_seed, params, model_out, out);
    }
    if (*eval_cmd) {
      if (!eval_model.empty()) {
        if (eval_datasets.size() != 1) {
          throw Error(Errc::InvalidArgument, "--model-file takes exactly one --dataset");
        }
        return cmd_evaluate_model(eval_model, eval_datasets.front(), eval_barrier, out);
      }
      return cmd_evaluate_cv(eval_opts, eval_datasets, eval_barrier, out, err);
    }
    if (*report_cmd) return cmd_report(report_in, report_format, out);
  } catch (const Error& e) {
    err << kProgram << ": " << e.what() << '\n';
    return is_data_error(e.code()) ? kDataError : kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << kProgram << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << kProgram << ": internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace barrier::cli

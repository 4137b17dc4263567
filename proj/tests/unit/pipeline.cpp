#include "barrier/error.hpp"
#include "barrier/pipeline.hpp"

#include "../support.hpp"
#include "../verdicts.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace barrier;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = barrier::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> corpus_args(const std::filesystem::path& dir) {
  return {"--pairs",      (dir / "pairs.csv").string(),     "--concepts",
          (dir / "concepts.jsonl").string(), "--countries", (dir / "countries.csv").string(),
          "--publishers", (dir / "publishers.csv").string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<std::string> kFast = {"--event", "synthetic", "--models",
                                        "most-frequent,naive-bayes,decision-tree", "--folds", "5"};

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config round trip") {
    auto config = PipelineConfig::with_defaults();
    config.pairs = "/data/p.csv";
    config.event_label = "quake";
    config.barriers = {BarrierKind::Political, BarrierKind::Economic};
    config.models = {ModelFamily::SVM};
    config.threshold = 0.85;
    config.seed = 7;
    config.grids[ModelFamily::KNN] = parse_grid("k:1,2");
    config.grids.erase(ModelFamily::SVM);
    config.vocab_scope = VocabularyScope::Global;
    config.profile_side = ProfileSide::Difference;
    config.economic_indicators = {"Rank", "Governance"};
    config.nested = true;
    const auto text = write_config(config);
    const auto back = parse_config(text);
    CHECK(write_config(back) == text);
    CHECK(back.barriers == config.barriers);
    CHECK(back.grids == config.grids);
    CHECK(back.threshold == 0.85);
  }

  TEST_CASE("config errors name the line") {
    try {
      parse_config("seed = 1\nfolds = 1\n");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidArgument);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("colour = red"), Error);
    CHECK_THROWS_AS(parse_config("barriers = economic,weather"), Error);
    CHECK_THROWS_AS(parse_config("threshold = 2"), Error);
    CHECK_THROWS_AS(parse_config("economic_indicators = GDP"), Error);
    CHECK(parse_config("# comment\n\ngrid.svm =\n").grids.count(ModelFamily::SVM) == 0);
  }

  TEST_CASE("missing inputs") {
    auto config = testing::corpus_config(testing::fixture("synthetic"));
    config.pairs = "/nonexistent/pairs.csv";
    try {
      check_inputs(config);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotFound);
      CHECK(std::string(e.what()).starts_with("pairs: not found"));
    }
  }

  TEST_CASE("full run writes every artifact and replays from config.txt") {
    testing::TempDir out("run");
    const auto r = invoke(with(with({"run", "--out", (out / "a").string()},
                                 corpus_args(testing::fixture("synthetic"))),
                            kFast));
    REQUIRE(r.code == 0);
    for (auto kind : kAllBarriers) {
      CHECK(std::filesystem::exists(out / "a" / "datasets" / dataset_file_name("synthetic", kind)));
    }
    for (const char* f : {"report.md", "report.csv", "config.txt", "vocabulary.csv", "ingest_report.txt"}) {
      CHECK(std::filesystem::exists(out / "a" / f));
    }
    const auto md = testing::read_file(out / "a" / "report.md");
    CHECK(md.find("| Economic | Most Frequent |") != std::string::npos);
    CHECK(md.find("| Barrier | Instances |") != std::string::npos);

    auto config = testing::read_file(out / "a" / "config.txt");
    const auto pos = config.find("output_dir = ");
    config.replace(pos, config.find('\n', pos) - pos, "output_dir = " + (out / "b").string());
    testing::write_file(out / "replay.txt", config);
    REQUIRE(invoke({"run", "--config", (out / "replay.txt").string()}).code == 0);
    CHECK(testing::read_file(out / "a" / "report.csv") == testing::read_file(out / "b" / "report.csv"));
    CHECK(testing::read_file(out / "a" / "report.md") == testing::read_file(out / "b" / "report.md"));

    // flags override the config file
    REQUIRE(invoke({"run", "--config", (out / "replay.txt").string(), "--models", "most-frequent",
                 "--out", (out / "c").string()})
                .code == 0);
    const auto rows = parse_report_csv(testing::read_file(out / "c" / "report.csv"));
    for (const auto& row : rows) CHECK(row.model == ModelFamily::MostFrequent);
  }

  TEST_CASE("run exit codes") {
    testing::TempDir out("codes");
    auto missing = invoke(with({"run", "--out", out.path().string(), "--pairs", "/nope.csv"},
                            {"--concepts", "x", "--countries", "y", "--publishers", "z"}));
    CHECK(missing.code == barrier::cli::kConfigError);
    CHECK(missing.err.find("pairs: not found") != std::string::npos);

    testing::write_file(out / "bad.csv", "from,to\n1,2\n");
    auto args = with({"run", "--out", (out / "o").string()}, corpus_args(testing::fixture("synthetic")));
    args[4] = (out / "bad.csv").string();
    const auto bad = invoke(args);
    CHECK(bad.code == barrier::cli::kDataError);
    CHECK(bad.err.find("barrierdetect: ") != std::string::npos);
    CHECK(bad.err.find("internal error") == std::string::npos);

    CHECK(invoke({"run", "--folds", "x"}).code == barrier::cli::kConfigError);
    CHECK(invoke({"frobnicate"}).code == barrier::cli::kConfigError);
    CHECK(invoke({}).code == barrier::cli::kConfigError);
    CHECK(invoke({"--help"}).code == barrier::cli::kOk);
    CHECK(invoke({"run", "--config", "/nonexistent.txt"}).code == barrier::cli::kConfigError);
  }

  TEST_CASE("annotate writes datasets only") {
    testing::TempDir out("annotate");
    const auto r = invoke(with(with({"annotate", "--out", out.path().string()},
                                 corpus_args(testing::fixture("synthetic"))),
                            {"--event", "synthetic", "--barriers", "geographical,political"}));
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(out / "datasets" / "synthetic_geographical.csv"));
    CHECK(std::filesystem::exists(out / "datasets" / "synthetic_political.csv"));
    CHECK_FALSE(std::filesystem::exists(out / "datasets" / "synthetic_economic.csv"));
    CHECK_FALSE(std::filesystem::exists(out / "report.csv"));
  }

  TEST_CASE("concept-freq prints a ranked table") {
    const auto dir = testing::fixture("synthetic");
    const auto r = invoke(with(with({"concept-freq", "--top", "3"}, corpus_args(dir)), {"--event", "synthetic"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.starts_with("| Rank | Concept | Articles |\n"));
    CHECK(r.out.find("| 3 | ") != std::string::npos);
    CHECK(r.out.find("| 4 | ") == std::string::npos);
    const auto global = invoke({"concept-freq", "--vocab-scope", "global", "--concepts",
                             (dir / "concepts.jsonl").string(), "--top", "2"});
    CHECK(global.code == 0);
    CHECK(global.out.find("| 2 | ") != std::string::npos);
  }

  TEST_CASE("synth subcommand") {
    testing::TempDir out("synthcli");
    REQUIRE(invoke({"synth", "--out", out.path().string(), "--articles", "40", "--seed", "3"}).code == 0);
    CHECK(oracle::read_ground_truth(out / "ground_truth.csv").size() == 40);
    CHECK(invoke({"synth", "--out", out.path().string(), "--time-zones", "99"}).code == barrier::cli::kConfigError);
  }

  TEST_CASE("train, evaluate and report subcommands") {
    testing::TempDir out("models");
    REQUIRE(invoke(with(with({"annotate", "--out", out.path().string()},
                          corpus_args(testing::fixture("synthetic"))),
                     {"--event", "synthetic"}))
                .code == 0);
    const auto dataset = (out / "datasets" / "synthetic_geographical.csv").string();
    const auto model = (out / "tree.json").string();
    REQUIRE(invoke({"train", "--dataset", dataset, "--model", "decision-tree", "--param",
                 "max_leaf_nodes=8", "--out", model})
                .code == 0);
    const auto saved = load_model(model);
    CHECK(saved.spec.param("max_leaf_nodes") == 8);
    CHECK(std::get<TreeParams>(saved.params).leaf_count() <= 8);

    const auto scored = invoke({"evaluate", "--dataset", dataset, "--model-file", model});
    REQUIRE(scored.code == 0);
    CHECK(scored.out.find("| Geographical | Decision Tree |") != std::string::npos);

    CHECK(invoke({"train", "--dataset", dataset, "--model", "knn", "--param", "depth=2", "--out", model})
              .code == barrier::cli::kConfigError);
    CHECK(invoke({"train", "--dataset", dataset, "--model", "perceptron", "--out", model}).code ==
          barrier::cli::kConfigError);

    const auto cv = invoke({"evaluate", "--dataset", dataset, "--models", "most-frequent,knn", "--folds",
                         "5", "--grid", "knn=k:1,3", "--out", (out / "cv").string()});
    REQUIRE(cv.code == 0);
    const auto csv = testing::read_file(out / "cv" / "report.csv");
    CHECK(parse_report_csv(csv).size() == 2);

    const auto md = invoke({"report", "--input", (out / "cv" / "report.csv").string()});
    CHECK(md.code == 0);
    CHECK(md.out.starts_with("| Barrier | Model |"));
    const auto again = invoke({"report", "--input", (out / "cv" / "report.csv").string(), "--format", "csv"});
    CHECK(again.out == csv);
    CHECK(invoke({"report", "--input", (out / "cv" / "report.csv").string(), "--format", "html"}).code ==
          barrier::cli::kConfigError);
  }
}

#include "barrier/error.hpp"
#include "barrier/features.hpp"
#include "barrier/knowledge.hpp"

#include "../support.hpp"

#include <doctest.h>

using namespace barrier;

namespace {

SpreadingExample example(std::string id, ConceptSet concepts, std::string src = "news.sky.com",
                         std::string dst = "247wallst.com") {
  SpreadingExample e;
  e.article_id = std::move(id);
  e.source_publisher_uri = std::move(src);
  e.target_publisher_uri = std::move(dst);
  e.event_label = "e";
  e.concepts = std::move(concepts);
  return e;
}

KnowledgeBase fixture_kb() {
  KnowledgeBase kb;
  kb.countries = load_country_profiles(testing::fixture("countries.csv"));
  kb.publishers = load_publishers(testing::fixture("publishers.csv"), kb.countries);
  return kb;
}

ConceptVocabulary xyz() {
  return ConceptVocabulary({{"X", 3}, {"Y", 2}, {"Z", 1}});
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("document-frequency ranking with lexicographic ties") {
    const std::vector<SpreadingExample> corpus = {example("a", {"X", "Y"}), example("b", {"X"}),
                                                  example("c", {"X", "Z"})};
    const auto vocab = build_vocabulary(corpus, 2);
    REQUIRE(vocab.size() == 2);
    CHECK(vocab[0] == VocabularyEntry{"X", 3});
    CHECK(vocab[1] == VocabularyEntry{"Y", 1});
  }

  TEST_CASE("saturation and errors") {
    const std::vector<SpreadingExample> corpus = {example("a", {"X", "Y"}), example("b", {"X"})};
    CHECK(build_vocabulary(corpus, 300).size() == 2);
    CHECK_THROWS_AS(build_vocabulary(corpus, 0), Error);
    try {
      build_vocabulary(std::vector<SpreadingExample>{example("a", {})}, 5);
      FAIL("expected EmptyCorpus");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptyCorpus);
    }
  }

  TEST_CASE("repeated articles count once each") {
    // frequency counts examples, and an example holds a set
    const std::vector<SpreadingExample> corpus = {example("a", {"X"}), example("a", {"X"}),
                                                  example("b", {"Y"})};
    CHECK(build_vocabulary(corpus, 2)[0] == VocabularyEntry{"X", 2});
  }

  TEST_CASE("global vocabulary over a concept index") {
    ConceptIndex index;
    index.add("a", {"B", "A"});
    index.add("b", {"B"});
    const auto vocab = build_vocabulary(index, 5);
    REQUIRE(vocab.size() == 2);
    CHECK(vocab[0] == VocabularyEntry{"B", 2});
  }

  TEST_CASE("vocabulary file round trip") {
    testing::TempDir dir("vocab");
    const auto vocab = ConceptVocabulary({{"Earthquake", 4}, {"Richter,scale", 2}});
    testing::write_file(dir / "v.csv", write_vocabulary(vocab));
    CHECK(read_vocabulary(dir / "v.csv") == vocab);
  }

  TEST_CASE("binary concept block") {
    const auto vocab = xyz();
    vector_t expected(3);
    expected << 1, 0, 1;
    CHECK(vectorize_concepts({"Z", "X"}, vocab) == expected);
    CHECK(vectorize_concepts({"X", "Y", "Z"}, vocab) == vector_t::Ones(3));
    CHECK(vectorize_concepts({"Q"}, vocab) == vector_t::Zero(3));
    CHECK(vectorize_concepts({"Z", "X", "Q", "R"}, vocab) == expected);
  }

  TEST_CASE("time-zone instance for a GB source") {
    const auto kb = fixture_kb();
    const auto inst = assemble_instance(example("a", {"X", "Z"}), BarrierKind::TimeZone, xyz(), kb, true);
    vector_t expected(4);
    expected << 1, 0, 1, 0;
    CHECK(inst.features == expected);
    CHECK(inst.label);
    CHECK(inst.article_id == "a");
    CHECK(inst.barrier == BarrierKind::TimeZone);
  }

  TEST_CASE("economic instance width is K + 13") {
    const auto kb = fixture_kb();
    const auto inst = assemble_instance(example("a", {"X"}), BarrierKind::Economic, xyz(), kb, false);
    CHECK(inst.features.size() == 3 + 13);
  }

  TEST_CASE("political instance for an unknown alignment") {
    const auto kb = fixture_kb();
    try {
      assemble_instance(example("a", {"X"}), BarrierKind::Political, xyz(), kb, false);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK((e.code() == Errc::IncompleteMetadata || e.code() == Errc::UnknownAlignment));
    }
  }

  TEST_CASE("profile side options") {
    const auto kb = fixture_kb();
    // IN (+330) -> PT (0)
    const auto e = example("a", {"X"}, "sify.com", "24.sapo.pt");
    const auto src = assemble_instance(e, BarrierKind::TimeZone, xyz(), kb, true, ProfileSide::Source);
    const auto dst = assemble_instance(e, BarrierKind::TimeZone, xyz(), kb, true, ProfileSide::Target);
    const auto diff =
        assemble_instance(e, BarrierKind::TimeZone, xyz(), kb, true, ProfileSide::Difference);
    CHECK(src.features[3] == 330);
    CHECK(dst.features[3] == 0);
    CHECK(diff.features[3] == -330);
  }
}

#pragma once

#include "barrier/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace barrier {

/// Knobs for the synthetic corpus generator. Labels are planted through
/// structure: countries belong to economic clusters, cultural clusters and
/// time-zone groups whose members share a profile direction or offset, and
/// clusters are kept apart (pairwise cosine <= 0.85), so a label is TRUE
/// exactly when the two publishers sit in different groups.
struct SyntheticSpec {
  std::size_t n_countries = 12;
  std::size_t n_publishers = 40;
  /// Propagated pair rows.
  std::size_t n_articles = 500;
  /// Unsure and not-propagated rows mixed into the pair file.
  std::size_t n_noise_pairs = 100;
  std::size_t concept_pool = 400;
  std::size_t concepts_min = 3;
  std::size_t concepts_max = 12;
  std::size_t n_time_zones = 4;
  std::size_t n_economic_clusters = 3;
  std::size_t n_cultural_clusters = 4;
  std::size_t n_alignments = 4;
  double unknown_alignment_rate = 0.4;
  /// Publishers whose country has no row in countries.csv.
  double missing_country_rate = 0.05;
  /// Countries whose cultural block is left blank.
  double missing_culture_rate = 0.1;
  /// Propagated articles with no concept annotation line.
  double missing_concepts_rate = 0.02;
  /// Pairs that name a publisher absent from publishers.csv.
  double unknown_publisher_rate = 0.02;
  /// Every country gets its own axis-aligned economic direction (needs
  /// n_countries <= 13), so any two countries are orthogonal.
  bool orthogonal_economic = false;
  /// Source and target publishers always come from different countries.
  bool cross_country_only = false;
  std::string event_label = "synthetic";
  std::uint64_t seed = 1;
};

/// Planted outcome of one propagated pair for one barrier.
enum class PlantedLabel { False, True, Dropped };

struct PlantedExample {
  std::string article_id;
  /// Indexed like kAllBarriers.
  std::array<PlantedLabel, 5> labels{};
};

struct SyntheticCorpus {
  std::string pairs_csv;
  std::string concepts_jsonl;
  std::string countries_csv;
  std::string publishers_csv;
  /// One row per propagated pair, in file order.
  std::vector<PlantedExample> truth;

  std::string ground_truth_csv() const;
};

/// Throws Error(InvalidArgument) for inconsistent specs.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// Writes pairs.csv, concepts.jsonl, countries.csv, publishers.csv and
/// ground_truth.csv into `dir`, creating it if needed.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace barrier

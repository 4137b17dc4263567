#include "barrier/synth.hpp"

#include "barrier/annotate.hpp"
#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/knowledge.hpp"
#include "barrier/rng.hpp"
#include "barrier/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace barrier {

namespace {

constexpr double kClusterSeparation = 0.85;
constexpr int kMaxRejections = 20000;

constexpr std::array<int, 24> kOffsets = {0,    60,  120, 180,  -300, 330,  540,  600,
                                          -180, -480, 480, 240, -240, 300,  -360, 420,
                                          660,  720, -600, 345, -420, -120, 780,  -60};

constexpr std::array<std::string_view, 8> kAlignments = {
    "left-wing",  "right-wing",   "centre",      "social-liberalism",
    "liberalism", "conservatism", "centre-left", "centre-right"};

std::string country_code(std::size_t i) {
  return {static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)};
}

std::string padded(std::string_view prefix, std::size_t i) {
  auto digits = std::to_string(i);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return std::string(prefix) + digits;
}

/// Positive random directions with pairwise cosine <= kClusterSeparation.
template <int N>
std::vector<Eigen::Matrix<double, N, 1>> separated_directions(Rng& rng, std::size_t count) {
  using V = Eigen::Matrix<double, N, 1>;
  std::vector<V> out;
  int attempts = 0;
  while (out.size() < count) {
    if (++attempts > kMaxRejections) {
      throw Error(Errc::InvalidArgument, "synth: cannot separate " + std::to_string(count) +
                                             " clusters in " + std::to_string(N) + " dimensions");
    }
    V v;
    for (int k = 0; k < N; ++k) {
      const double u = rng.uniform01();
      v[k] = std::round(100.0 * u * u * u * 100.0) / 100.0 + 0.5;
    }
    bool ok = true;
    for (const auto& w : out) {
      if (v.dot(w) / (v.norm() * w.norm()) > kClusterSeparation) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(v);
  }
  return out;
}

struct Country {
  std::string code;
  std::size_t economic_cluster = 0;
  std::size_t cultural_cluster = 0;
  std::size_t zone = 0;
  bool has_culture = true;
};

struct Publisher {
  std::string uri;
  std::string name;
  std::optional<std::size_t> country;  ///< nullopt: code not in countries.csv
  std::string country_code;
  std::optional<std::string> alignment;
};

PlantedLabel planted(bool dropped, bool differs) {
  if (dropped) return PlantedLabel::Dropped;
  return differs ? PlantedLabel::True : PlantedLabel::False;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_countries == 0 || spec.n_countries > 25 * 26) {
    throw Error(Errc::InvalidArgument, "synth: n_countries must be in [1, 650]");
  }
  if (spec.n_publishers == 0) throw Error(Errc::InvalidArgument, "synth: n_publishers must be >= 1");
  if (spec.n_time_zones == 0 || spec.n_time_zones > kOffsets.size()) {
    throw Error(Errc::InvalidArgument, "synth: n_time_zones must be in [1, 24]");
  }
  if (spec.n_alignments == 0 || spec.n_alignments > kAlignments.size()) {
    throw Error(Errc::InvalidArgument, "synth: n_alignments must be in [1, 8]");
  }
  if (spec.n_economic_clusters == 0 || spec.n_cultural_clusters == 0) {
    throw Error(Errc::InvalidArgument, "synth: cluster counts must be >= 1");
  }
  if (spec.orthogonal_economic && spec.n_countries > kEconomicWidth) {
    throw Error(Errc::InvalidArgument, "synth: orthogonal economic profiles need <= 13 countries");
  }
  if (spec.concept_pool == 0 || spec.concepts_min == 0 || spec.concepts_min > spec.concepts_max) {
    throw Error(Errc::InvalidArgument, "synth: bad concept pool settings");
  }

  Rng rng(spec.seed);

  // -- countries
  const auto economic_bases = separated_directions<kEconomicWidth>(rng, spec.n_economic_clusters);
  const auto cultural_bases = separated_directions<kCulturalWidth>(rng, spec.n_cultural_clusters);
  std::vector<Country> countries(spec.n_countries);
  std::vector<CountryProfile> profiles;
  std::vector<std::pair<double, double>> coordinates;
  for (std::size_t i = 0; i < spec.n_countries; ++i) {
    auto& c = countries[i];
    c.code = country_code(i);
    c.economic_cluster = i % spec.n_economic_clusters;
    c.cultural_cluster = static_cast<std::size_t>(rng.uniform_index(spec.n_cultural_clusters));
    c.zone = static_cast<std::size_t>(rng.uniform_index(spec.n_time_zones));
    c.has_culture = !rng.bernoulli(spec.missing_culture_rate);

    CountryProfile p;
    p.country_code = c.code;
    double lat = 0, lon = 0;
    for (bool unique = false; !unique;) {
      lat = std::round(rng.uniform(-60, 70) * 1e4) / 1e4;
      lon = std::round(rng.uniform(-170, 170) * 1e4) / 1e4;
      unique = std::none_of(coordinates.begin(), coordinates.end(), [&](const auto& xy) {
        return std::abs(xy.first - lat) < 0.01 && std::abs(xy.second - lon) < 0.01;
      });
    }
    coordinates.emplace_back(lat, lon);
    p.latitude = lat;
    p.longitude = lon;
    p.utc_offset = kOffsets[c.zone];

    const double scale = std::round(rng.uniform(0.5, 2.0) * 100) / 100;
    if (spec.orthogonal_economic) {
      EconomicVector e = EconomicVector::Zero();
      e[static_cast<Eigen::Index>(i)] = std::round(rng.uniform(1, 100));
      p.economic = e;
    } else {
      p.economic = economic_bases[c.economic_cluster] * scale;
    }
    if (c.has_culture) p.cultural = cultural_bases[c.cultural_cluster] * scale;
    profiles.push_back(std::move(p));
  }

  // -- publishers
  std::vector<Publisher> publishers(spec.n_publishers);
  for (std::size_t j = 0; j < spec.n_publishers; ++j) {
    auto& p = publishers[j];
    p.uri = "pub" + std::to_string(j) + ".example";
    p.name = "Publisher " + std::to_string(j);
    if (rng.bernoulli(spec.missing_country_rate)) {
      p.country_code = "Z" + std::string(1, static_cast<char>('A' + rng.uniform_index(26)));
    } else {
      p.country = static_cast<std::size_t>(rng.uniform_index(spec.n_countries));
      p.country_code = countries[*p.country].code;
    }
    if (!rng.bernoulli(spec.unknown_alignment_rate)) {
      p.alignment = std::string(kAlignments[rng.uniform_index(spec.n_alignments)]);
    }
  }

  // favourite concepts per country drive a weak signal through the corpus
  auto favourites = [&](std::size_t country) {
    return std::array<std::size_t, 5>{(country * 7 + 11) % spec.concept_pool,
                                      (country * 13 + 3) % spec.concept_pool,
                                      (country * 17 + 5) % spec.concept_pool,
                                      (country * 19 + 29) % spec.concept_pool,
                                      (country * 23 + 31) % spec.concept_pool};
  };
  auto draw_concepts = [&](const Publisher& src, const Publisher& dst) {
    std::set<std::string> picked;
    const auto count = spec.concepts_min + static_cast<std::size_t>(rng.uniform_index(
                                               spec.concepts_max - spec.concepts_min + 1));
    while (picked.size() < count) {
      const double u = rng.uniform01();
      std::size_t idx;
      if (u < 0.3 && src.country) {
        idx = favourites(*src.country)[rng.uniform_index(5)];
      } else if (u < 0.6 && dst.country) {
        idx = favourites(*dst.country)[rng.uniform_index(5)];
      } else {
        const double z = rng.uniform01();
        idx = static_cast<std::size_t>(z * z * static_cast<double>(spec.concept_pool));
      }
      picked.insert("Concept_" + std::to_string(idx));
    }
    return std::vector<std::string>(picked.begin(), picked.end());
  };

  // -- pairs
  struct PairRow {
    std::vector<std::string> fields;
    bool propagated = false;
    PlantedExample truth;
  };
  std::vector<PairRow> rows;
  std::ostringstream concepts_out;

  auto pick_target = [&](std::size_t src) {
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      const auto dst = static_cast<std::size_t>(rng.uniform_index(spec.n_publishers));
      if (!spec.cross_country_only ||
          publishers[dst].country_code != publishers[src].country_code) {
        return dst;
      }
    }
    throw Error(Errc::InvalidArgument, "synth: no cross-country target publisher available");
  };

  for (std::size_t i = 0; i < spec.n_articles; ++i) {
    const auto s = static_cast<std::size_t>(rng.uniform_index(spec.n_publishers));
    const auto t = pick_target(s);
    const auto& src = publishers[s];
    const auto& dst = publishers[t];
    std::string from_uri = src.uri;
    std::string to_uri = dst.uri;
    const bool ghost = rng.bernoulli(spec.unknown_publisher_rate);
    if (ghost) (rng.bernoulli(0.5) ? from_uri : to_uri) = "ghost" + std::to_string(i) + ".example";

    PairRow row;
    row.propagated = true;
    const auto from_id = padded("A", i);
    const double weight = std::round(rng.uniform(0.7, 1.0) * 1000) / 1000;
    row.fields = {from_id, padded("B", i), text::format_double(weight),
                  std::string(propagation_class_name(PropagationClass::InformationPropagated)),
                  src.name, dst.name, from_uri, to_uri};

    const bool no_concepts = rng.bernoulli(spec.missing_concepts_rate);
    if (!no_concepts) {
      concepts_out << nlohmann::json{{"article", from_id}, {"concepts", draw_concepts(src, dst)}}.dump()
                   << '\n';
    }

    auto& truth = row.truth;
    truth.article_id = from_id;
    const bool dropped_all = ghost || no_concepts;
    const bool both_countries = src.country && dst.country;
    const auto* cs = src.country ? &countries[*src.country] : nullptr;
    const auto* cd = dst.country ? &countries[*dst.country] : nullptr;
    const bool geo_drop = dropped_all || !both_countries;
    truth.labels[0] = planted(geo_drop, both_countries &&
                                            (spec.orthogonal_economic
                                                 ? *src.country != *dst.country
                                                 : cs->economic_cluster != cd->economic_cluster));
    truth.labels[1] = planted(geo_drop || !cs->has_culture || !cd->has_culture,
                              both_countries && cs->cultural_cluster != cd->cultural_cluster);
    truth.labels[2] = planted(geo_drop, both_countries && *src.country != *dst.country);
    truth.labels[3] = planted(geo_drop, both_countries && cs->zone != cd->zone);
    truth.labels[4] = planted(dropped_all || !src.alignment || !dst.alignment,
                              src.alignment && dst.alignment && *src.alignment != *dst.alignment);
    rows.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < spec.n_noise_pairs; ++i) {
    const auto s = static_cast<std::size_t>(rng.uniform_index(spec.n_publishers));
    const auto t = static_cast<std::size_t>(rng.uniform_index(spec.n_publishers));
    const bool unsure = rng.bernoulli(0.5);
    const double weight = std::round((unsure ? rng.uniform(0.4, 0.699) : rng.uniform(0.0, 0.399)) *
                                     1000) / 1000;
    PairRow row;
    const auto from_id = padded("N", i);
    row.fields = {from_id, padded("M", i), text::format_double(weight),
                  std::string(propagation_class_name(
                      unsure ? PropagationClass::Unsure : PropagationClass::InformationNotPropagated)),
                  publishers[s].name, publishers[t].name, publishers[s].uri, publishers[t].uri};
    concepts_out << nlohmann::json{{"article", from_id},
                                   {"concepts", draw_concepts(publishers[s], publishers[t])}}
                        .dump()
                 << '\n';
    rows.push_back(std::move(row));
  }
  rng.shuffle(std::span(rows));

  SyntheticCorpus corpus;
  std::ostringstream pairs_out;
  csv::write_row(pairs_out, {kPairColumns.begin(), kPairColumns.end()});
  for (auto& row : rows) {
    csv::write_row(pairs_out, row.fields);
    if (row.propagated) corpus.truth.push_back(std::move(row.truth));
  }
  corpus.pairs_csv = pairs_out.str();
  corpus.concepts_jsonl = concepts_out.str();
  corpus.countries_csv = write_country_profiles(ProfileStore(std::move(profiles)));

  std::ostringstream pubs_out;
  csv::write_row(pubs_out, {"publisher_uri", "publisher_name", "country_code", "political_alignment"});
  for (const auto& p : publishers) {
    csv::write_row(pubs_out, {p.uri, p.name, p.country_code, p.alignment.value_or("")});
  }
  corpus.publishers_csv = pubs_out.str();
  return corpus;
}

std::string SyntheticCorpus::ground_truth_csv() const {
  std::ostringstream out;
  std::vector<std::string> header = {"article_id"};
  for (auto k : kAllBarriers) header.emplace_back(barrier_slug(k));
  csv::write_row(out, header);
  for (const auto& t : truth) {
    std::vector<std::string> row = {t.article_id};
    for (auto label : t.labels) {
      row.emplace_back(label == PlantedLabel::Dropped ? "DROP"
                       : label == PlantedLabel::True  ? "TRUE"
                                                      : "FALSE");
    }
    csv::write_row(out, row);
  }
  return out.str();
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(Errc::Io, (dir / name).string() + ": cannot write");
    out << content;
  };
  write("pairs.csv", corpus.pairs_csv);
  write("concepts.jsonl", corpus.concepts_jsonl);
  write("countries.csv", corpus.countries_csv);
  write("publishers.csv", corpus.publishers_csv);
  write("ground_truth.csv", corpus.ground_truth_csv());
}

}  // namespace barrier

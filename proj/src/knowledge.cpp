#include "barrier/knowledge.hpp"

#include "barrier/csv.hpp"
#include "barrier/error.hpp"
#include "barrier/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace barrier {

namespace {

std::string row_ref(std::string_view source, const csv::Record& row, std::string_view column) {
  return std::string(source) + ": line " + std::to_string(row.line) + ", column " +
         std::string(column);
}

double parse_finite(std::string_view source, const csv::Record& row, std::size_t idx,
                    std::string_view column) {
  const auto value = text::parse_double(row.fields[idx]);
  if (!value || !std::isfinite(*value)) {
    throw Error(Errc::NonFiniteValue, row_ref(source, row, column) + ": '" + row.fields[idx] +
                                          "' is not a finite number");
  }
  return *value;
}

/// Reads a block of columns; nullopt when every cell is blank.
template <std::size_t N>
std::optional<Eigen::Matrix<scalar_t, static_cast<int>(N), 1>> parse_block(
    std::string_view source, const csv::Record& row, const std::array<std::size_t, N>& idx,
    const std::array<std::string_view, N>& names) {
  const bool all_blank = std::all_of(idx.begin(), idx.end(), [&](std::size_t i) {
    return text::trim(row.fields[i]).empty();
  });
  if (all_blank) return std::nullopt;
  Eigen::Matrix<scalar_t, static_cast<int>(N), 1> out;
  for (std::size_t k = 0; k < N; ++k) {
    out[static_cast<Eigen::Index>(k)] = parse_finite(source, row, idx[k], names[k]);
  }
  if (out.isZero(0.0)) {
    throw Error(Errc::ZeroVector, std::string(source) + ": line " + std::to_string(row.line) +
                                      ": all-zero " + std::string(names[0]) + ".. block");
  }
  return out;
}

template <std::size_t N>
std::array<std::size_t, N> require_columns(const csv::Table& table,
                                           const std::array<std::string_view, N>& names) {
  std::array<std::size_t, N> idx{};
  for (std::size_t k = 0; k < N; ++k) idx[k] = table.require_column(names[k]);
  return idx;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, path.string() + ": not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ProfileStore

ProfileStore::ProfileStore(std::vector<CountryProfile> profiles) : profiles_(std::move(profiles)) {
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    auto [it, inserted] = index_.emplace(profiles_[i].country_code, i);
    if (!inserted) {
      throw Error(Errc::DuplicateCountry, "duplicate country_code " + profiles_[i].country_code);
    }
  }
}

const CountryProfile* ProfileStore::find(std::string_view code) const {
  auto it = index_.find(code);
  return it == index_.end() ? nullptr : &profiles_[it->second];
}

const CountryProfile& ProfileStore::at(std::string_view code) const {
  if (const auto* p = find(code)) return *p;
  throw Error(Errc::IncompleteMetadata, "no profile for country " + std::string(code));
}

namespace {

template <typename VectorT, typename Getter>
void rescale_columns(std::vector<CountryProfile>& profiles, Getter get) {
  constexpr int width = VectorT::RowsAtCompileTime;
  VectorT lo = VectorT::Constant(std::numeric_limits<scalar_t>::infinity());
  VectorT hi = VectorT::Constant(-std::numeric_limits<scalar_t>::infinity());
  for (auto& p : profiles) {
    if (auto& v = get(p)) {
      lo = lo.cwiseMin(*v);
      hi = hi.cwiseMax(*v);
    }
  }
  for (auto& p : profiles) {
    if (auto& v = get(p)) {
      for (int k = 0; k < width; ++k) {
        const scalar_t span = hi[k] - lo[k];
        (*v)[k] = span > 0 ? ((*v)[k] - lo[k]) / span : 0.0;
      }
    }
  }
}

}  // namespace

ProfileStore ProfileStore::min_max_scaled() const {
  auto copy = profiles_;
  rescale_columns<EconomicVector>(copy, [](CountryProfile& p) -> auto& { return p.economic; });
  rescale_columns<CulturalVector>(copy, [](CountryProfile& p) -> auto& { return p.cultural; });
  return ProfileStore(std::move(copy));
}

ProfileStore parse_country_profiles(std::string_view content, std::string_view source) {
  const auto table = csv::parse_table(content, source);
  const auto code_idx = table.require_column("country_code");
  const auto lat_idx = table.require_column("latitude");
  const auto lon_idx = table.require_column("longitude");
  const auto utc_idx = table.require_column("utc_offset");
  const auto cultural_idx = require_columns(table, kCulturalColumns);
  const auto economic_idx = require_columns(table, kEconomicColumns);

  std::vector<CountryProfile> profiles;
  profiles.reserve(table.size());
  for (const auto& row : table.rows()) {
    CountryProfile p;
    p.country_code = std::string(text::trim(row.fields[code_idx]));
    if (p.country_code.empty()) {
      throw Error(Errc::MalformedRow, std::string(source) + ": line " +
                                          std::to_string(row.line) + ": empty country_code");
    }
    p.latitude = parse_finite(source, row, lat_idx, "latitude");
    p.longitude = parse_finite(source, row, lon_idx, "longitude");
    if (p.latitude < -90 || p.latitude > 90) {
      throw Error(Errc::RangeViolation,
                  row_ref(source, row, "latitude") + ": outside [-90, 90]");
    }
    if (p.longitude < -180 || p.longitude > 180) {
      throw Error(Errc::RangeViolation,
                  row_ref(source, row, "longitude") + ": outside [-180, 180]");
    }
    const auto offset = text::parse_int(row.fields[utc_idx]);
    if (!offset) {
      throw Error(Errc::NonFiniteValue,
                  row_ref(source, row, "utc_offset") + ": expected integer minutes");
    }
    if (*offset < kMinUtcOffset || *offset > kMaxUtcOffset) {
      throw Error(Errc::RangeViolation,
                  row_ref(source, row, "utc_offset") + ": outside [-720, 840] minutes");
    }
    p.utc_offset = static_cast<int>(*offset);
    p.cultural = parse_block(source, row, cultural_idx, kCulturalColumns);
    p.economic = parse_block(source, row, economic_idx, kEconomicColumns);
    profiles.push_back(std::move(p));
  }
  return ProfileStore(std::move(profiles));
}

ProfileStore load_country_profiles(const std::filesystem::path& path) {
  return parse_country_profiles(read_file(path), path.string());
}

std::string write_country_profiles(const ProfileStore& store) {
  std::ostringstream out;
  std::vector<std::string> header = {"country_code", "latitude", "longitude", "utc_offset"};
  header.insert(header.end(), kCulturalColumns.begin(), kCulturalColumns.end());
  header.insert(header.end(), kEconomicColumns.begin(), kEconomicColumns.end());
  csv::write_row(out, header);
  for (const auto& p : store.profiles()) {
    std::vector<std::string> row = {p.country_code, text::format_double(p.latitude),
                                    text::format_double(p.longitude),
                                    std::to_string(p.utc_offset)};
    for (std::size_t k = 0; k < kCulturalWidth; ++k) {
      row.push_back(p.cultural ? text::format_double((*p.cultural)[static_cast<int>(k)]) : "");
    }
    for (std::size_t k = 0; k < kEconomicWidth; ++k) {
      row.push_back(p.economic ? text::format_double((*p.economic)[static_cast<int>(k)]) : "");
    }
    csv::write_row(out, row);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// PublisherStore

std::string normalize_uri(std::string_view uri) { return text::to_lower(text::trim(uri)); }

std::optional<std::string> normalize_alignment(std::string_view alignment) {
  const auto lowered = text::to_lower(text::trim(alignment));
  std::string out;
  bool pending_sep = false;
  for (char c : lowered) {
    if (c == ' ' || c == '_' || c == '\t' || c == '-') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('-');
    pending_sep = false;
    out.push_back(c);
  }
  if (out.empty() || out == "unknown") return std::nullopt;
  return out;
}

PublisherStore::PublisherStore(std::vector<PublisherRecord> records)
    : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto [it, inserted] = index_.emplace(records_[i].publisher_uri, i);
    if (!inserted) {
      throw Error(Errc::DuplicatePublisher, "duplicate publisher_uri " + records_[i].publisher_uri);
    }
    const auto& a = records_[i].political_alignment;
    if (a && std::find(alignments_.begin(), alignments_.end(), *a) == alignments_.end()) {
      alignments_.push_back(*a);
    }
  }
}

const PublisherRecord* PublisherStore::find(std::string_view uri) const {
  auto it = index_.find(normalize_uri(uri));
  return it == index_.end() ? nullptr : &records_[it->second];
}

PublisherStore parse_publishers(std::string_view content, std::string_view source,
                                const ProfileStore& store) {
  const auto table = csv::parse_table(content, source);
  const auto uri_idx = table.require_column("publisher_uri");
  const auto name_idx = table.require_column("publisher_name");
  const auto code_idx = table.require_column("country_code");
  const auto align_idx = table.require_column("political_alignment");

  std::vector<PublisherRecord> records;
  records.reserve(table.size());
  for (const auto& row : table.rows()) {
    PublisherRecord r;
    r.publisher_uri = normalize_uri(row.fields[uri_idx]);
    if (r.publisher_uri.empty()) {
      throw Error(Errc::MalformedRow, std::string(source) + ": line " +
                                          std::to_string(row.line) + ": empty publisher_uri");
    }
    r.publisher_name = std::string(text::trim(row.fields[name_idx]));
    r.country_code = std::string(text::trim(row.fields[code_idx]));
    r.political_alignment = normalize_alignment(row.fields[align_idx]);
    r.complete = store.find(r.country_code) != nullptr;
    records.push_back(std::move(r));
  }
  return PublisherStore(std::move(records));
}

PublisherStore load_publishers(const std::filesystem::path& path, const ProfileStore& store) {
  return parse_publishers(read_file(path), path.string(), store);
}

// ---------------------------------------------------------------------------
// Profiles

const CountryProfile* KnowledgeBase::country_of(const PublisherRecord& publisher) const {
  return countries.find(publisher.country_code);
}

std::vector<std::size_t> economic_indicator_indices(const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    const auto t = text::trim(name);
    auto it = std::find_if(kEconomicColumns.begin(), kEconomicColumns.end(),
                           [&](std::string_view c) { return text::iequals(c, t); });
    if (it == kEconomicColumns.end()) {
      throw Error(Errc::InvalidArgument, "unknown economic indicator: " + std::string(t));
    }
    out.push_back(static_cast<std::size_t>(it - kEconomicColumns.begin()));
  }
  return out;
}

vector_t select_economic(const EconomicVector& values, const ProfileOptions& options) {
  if (options.economic_indicators.empty()) return values;
  vector_t out(static_cast<Eigen::Index>(options.economic_indicators.size()));
  for (std::size_t i = 0; i < options.economic_indicators.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        values[static_cast<Eigen::Index>(options.economic_indicators[i])];
  }
  return out;
}

std::size_t profile_width(BarrierKind kind, const KnowledgeBase& knowledge) {
  switch (kind) {
    case BarrierKind::Economic:
      return knowledge.options.economic_indicators.empty()
                 ? kEconomicWidth
                 : knowledge.options.economic_indicators.size();
    case BarrierKind::Cultural: return kCulturalWidth;
    case BarrierKind::Geographical: return 2;
    case BarrierKind::TimeZone: return 1;
    case BarrierKind::Political: return knowledge.publishers.alignment_vocabulary().size();
  }
  return 0;
}

std::vector<std::string> profile_column_names(BarrierKind kind, const KnowledgeBase& knowledge) {
  std::vector<std::string> names;
  switch (kind) {
    case BarrierKind::Economic:
      if (knowledge.options.economic_indicators.empty()) {
        names.assign(kEconomicColumns.begin(), kEconomicColumns.end());
      } else {
        for (auto i : knowledge.options.economic_indicators) {
          names.emplace_back(kEconomicColumns[i]);
        }
      }
      break;
    case BarrierKind::Cultural:
      names.assign(kCulturalColumns.begin(), kCulturalColumns.end());
      break;
    case BarrierKind::Geographical:
      names = {"Latitude", "Longitude"};
      break;
    case BarrierKind::TimeZone:
      names = {"UTC-offset"};
      break;
    case BarrierKind::Political:
      for (const auto& a : knowledge.publishers.alignment_vocabulary()) {
        names.push_back("Political-Alignment=" + a);
      }
      break;
  }
  return names;
}

vector_t barrier_profile(const PublisherRecord& publisher, const KnowledgeBase& knowledge,
                         BarrierKind kind) {
  if (kind == BarrierKind::Political) {
    if (!publisher.political_alignment) {
      throw Error(Errc::UnknownAlignment,
                  "publisher " + publisher.publisher_uri + " has no political alignment");
    }
    const auto& vocab = knowledge.publishers.alignment_vocabulary();
    vector_t out = vector_t::Zero(static_cast<Eigen::Index>(vocab.size()));
    auto it = std::find(vocab.begin(), vocab.end(), *publisher.political_alignment);
    if (it == vocab.end()) {
      throw Error(Errc::UnknownAlignment, "alignment '" + *publisher.political_alignment +
                                              "' is not in the publisher vocabulary");
    }
    out[it - vocab.begin()] = 1.0;
    return out;
  }

  const CountryProfile* country = knowledge.country_of(publisher);
  if (!country) {
    throw Error(Errc::IncompleteMetadata, "publisher " + publisher.publisher_uri +
                                              ": no profile for country '" +
                                              publisher.country_code + "'");
  }
  switch (kind) {
    case BarrierKind::Economic:
      if (!country->economic) {
        throw Error(Errc::IncompleteMetadata,
                    "country " + country->country_code + " has no economic profile");
      }
      return select_economic(*country->economic, knowledge.options);
    case BarrierKind::Cultural:
      if (!country->cultural) {
        throw Error(Errc::IncompleteMetadata,
                    "country " + country->country_code + " has no cultural profile");
      }
      return *country->cultural;
    case BarrierKind::Geographical:
      return (vector_t(2) << country->latitude, country->longitude).finished();
    case BarrierKind::TimeZone:
      return (vector_t(1) << static_cast<scalar_t>(country->utc_offset)).finished();
    case BarrierKind::Political:
      break;
  }
  throw Error(Errc::InvalidArgument, "unhandled barrier kind");
}

}  // namespace barrier

#pragma once

#include "barrier/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace barrier {

inline constexpr std::size_t kEconomicWidth = 13;
inline constexpr std::size_t kCulturalWidth = 6;

/// Prosperity indicators, in stored order.
inline constexpr std::array<std::string_view, kEconomicWidth> kEconomicColumns = {
    "Rank",
    "Safety-Security",
    "Personal-Freedom",
    "Governance",
    "Social-Capital",
    "Investment-Environment",
    "Enterprise-Conditions",
    "Market-Infrastructure",
    "Economic-Quality",
    "Living-Conditions",
    "Health",
    "Education",
    "Natural-Environment"};

/// National culture dimensions, in stored order.
inline constexpr std::array<std::string_view, kCulturalWidth> kCulturalColumns = {
    "Power-Distance",
    "Uncertainty-Avoidance-By-Individuals",
    "Individualistic-Cultures",
    "Masculinity-Femininity",
    "Long-Term-Orientation",
    "Indulgence-Restraint"};

using EconomicVector = Eigen::Matrix<scalar_t, kEconomicWidth, 1>;
using CulturalVector = Eigen::Matrix<scalar_t, kCulturalWidth, 1>;

inline constexpr int kMinUtcOffset = -720;
inline constexpr int kMaxUtcOffset = 840;

struct CountryProfile {
  std::string country_code;
  /// Absent when the source row leaves the whole block blank.
  std::optional<EconomicVector> economic;
  std::optional<CulturalVector> cultural;
  scalar_t latitude = 0;
  scalar_t longitude = 0;
  /// Minutes east of UTC.
  int utc_offset = 0;
};

/// Country metadata keyed by ISO-3166 alpha-2 code. Immutable once loaded.
class ProfileStore {
 public:
  ProfileStore() = default;
  /// Throws Error(DuplicateCountry) on a repeated code.
  explicit ProfileStore(std::vector<CountryProfile> profiles);

  const CountryProfile* find(std::string_view country_code) const;
  /// Throws Error(IncompleteMetadata) when absent.
  const CountryProfile& at(std::string_view country_code) const;

  std::size_t size() const { return profiles_.size(); }
  const std::vector<CountryProfile>& profiles() const { return profiles_; }

  /// Copy with each economic and cultural column rescaled to [0, 1] over the
  /// countries that carry it. Constant columns map to 0.
  ProfileStore min_max_scaled() const;

 private:
  std::vector<CountryProfile> profiles_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Loads countries.csv. Errors: NotFound, MissingColumn, NonFiniteValue,
/// RangeViolation, ZeroVector, DuplicateCountry, MalformedRow.
ProfileStore load_country_profiles(const std::filesystem::path& path);
ProfileStore parse_country_profiles(std::string_view content, std::string_view source_name);
/// Inverse of parse_country_profiles; values are written in shortest
/// round-trip form.
std::string write_country_profiles(const ProfileStore& store);

struct PublisherRecord {
  std::string publisher_uri;  ///< normalized: trimmed, lowercase
  std::string publisher_name;
  std::string country_code;
  /// Normalized alignment; absent means unknown.
  std::optional<std::string> political_alignment;
  /// False when country_code has no entry in the profile store.
  bool complete = false;
};

/// Lowercase, trimmed.
std::string normalize_uri(std::string_view uri);
/// Lowercase, trimmed, runs of space/underscore collapsed to '-'. Blank and
/// "unknown" map to nullopt.
std::optional<std::string> normalize_alignment(std::string_view alignment);

class PublisherStore {
 public:
  PublisherStore() = default;
  /// Throws Error(DuplicatePublisher) on a repeated normalized URI.
  explicit PublisherStore(std::vector<PublisherRecord> records);

  /// Exact match on the normalized URI.
  const PublisherRecord* find(std::string_view uri) const;
  std::size_t size() const { return records_.size(); }
  const std::vector<PublisherRecord>& records() const { return records_; }

  /// Distinct alignments in order of first appearance; defines the
  /// political one-hot layout.
  const std::vector<std::string>& alignment_vocabulary() const { return alignments_; }

 private:
  std::vector<PublisherRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> alignments_;
};

PublisherStore load_publishers(const std::filesystem::path& path, const ProfileStore& store);
PublisherStore parse_publishers(std::string_view content, std::string_view source_name,
                                const ProfileStore& store);

/// Knobs applied when a profile block is extracted.
struct ProfileOptions {
  /// Indices into kEconomicColumns, in output order. Empty selects all 13.
  std::vector<std::size_t> economic_indicators;
};

/// Both stores plus extraction options, passed around as one unit.
struct KnowledgeBase {
  ProfileStore countries;
  PublisherStore publishers;
  ProfileOptions options;

  /// Publisher's country profile, or nullptr when incomplete.
  const CountryProfile* country_of(const PublisherRecord& publisher) const;
};

/// Indices for the named indicators; throws Error(InvalidArgument) on an
/// unknown name.
std::vector<std::size_t> economic_indicator_indices(const std::vector<std::string>& names);

/// Economic values after the indicator subset is applied.
vector_t select_economic(const EconomicVector& values, const ProfileOptions& options);

/// Width of the profile block for `kind` under this knowledge base.
std::size_t profile_width(BarrierKind kind, const KnowledgeBase& knowledge);
/// Column names of the profile block.
std::vector<std::string> profile_column_names(BarrierKind kind, const KnowledgeBase& knowledge);

/// Numeric feature block describing `publisher` for one barrier.
/// Errors: IncompleteMetadata (country or needed vector missing),
/// UnknownAlignment (political, alignment absent).
vector_t barrier_profile(const PublisherRecord& publisher, const KnowledgeBase& knowledge,
                         BarrierKind kind);

}  // namespace barrier

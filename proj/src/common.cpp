#include "barrier/error.hpp"
#include "barrier/rng.hpp"
#include "barrier/text.hpp"
#include "barrier/types.hpp"

#include <cmath>
#include <numbers>

namespace barrier {

std::string_view barrier_slug(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::Economic: return "economic";
    case BarrierKind::Cultural: return "cultural";
    case BarrierKind::Geographical: return "geographical";
    case BarrierKind::TimeZone: return "time-zone";
    case BarrierKind::Political: return "political";
  }
  return "unknown";
}

std::string_view barrier_display_name(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::Economic: return "Economic";
    case BarrierKind::Cultural: return "Cultural";
    case BarrierKind::Geographical: return "Geographical";
    case BarrierKind::TimeZone: return "Time Zone";
    case BarrierKind::Political: return "Political";
  }
  return "Unknown";
}

std::optional<BarrierKind> parse_barrier(std::string_view s) {
  const auto t = text::trim(s);
  for (auto kind : kAllBarriers) {
    if (text::iequals(t, barrier_slug(kind)) || text::iequals(t, barrier_display_name(kind))) {
      return kind;
    }
  }
  if (text::iequals(t, "timezone") || text::iequals(t, "time_zone")) return BarrierKind::TimeZone;
  if (text::iequals(t, "geographic")) return BarrierKind::Geographical;
  return std::nullopt;
}

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NotFound: return "NotFound";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::DuplicateCountry: return "DuplicateCountry";
    case Errc::DuplicatePublisher: return "DuplicatePublisher";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::UnknownClassLabel: return "UnknownClassLabel";
    case Errc::IncompleteMetadata: return "IncompleteMetadata";
    case Errc::UnknownAlignment: return "UnknownAlignment";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case Errc::TooFewPerClass: return "TooFewPerClass";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::BadModelFile: return "BadModelFile";
  }
  return "Unknown";
}

bool is_data_error(Errc code) {
  switch (code) {
    case Errc::NotFound:
    case Errc::InvalidArgument:
    case Errc::Io:
      return false;
    default:
      return true;
  }
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace barrier

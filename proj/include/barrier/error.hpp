#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace barrier {

enum class Errc {
  // configuration / environment
  NotFound,
  InvalidArgument,
  Io,
  // data
  MissingColumn,
  NonFiniteValue,
  RangeViolation,
  DuplicateCountry,
  DuplicatePublisher,
  MalformedRow,
  MalformedLine,
  UnknownClassLabel,
  IncompleteMetadata,
  UnknownAlignment,
  EmptyCorpus,
  ZeroVector,
  LengthMismatch,
  DegenerateTrainingSet,
  TooFewPerClass,
  EmptyInput,
  BadModelFile,
};

std::string_view errc_name(Errc code);

/// Single exception type for the library; `code()` carries the category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True for codes caused by bad input data rather than bad configuration.
bool is_data_error(Errc code);

}  // namespace barrier

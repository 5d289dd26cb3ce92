#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsn5g {

enum class ErrorCode {
  NoWindowForPcp,
  NoModelForPcp,
  MissingLink,
  EmptyInput,
  RateExceedsLink,
  BadPercentile,
  InsufficientData,
  EmptySeries,
  ConfigInvalid,
  UnknownPreset,
  BadInput,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace tsn5g

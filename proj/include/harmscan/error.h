#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harmscan {

enum class ErrorKind {
  UnknownCategory,
  MalformedBitstring,
  InvalidLabel,
  QuotaOutOfRange,
  VideoTooShort,
  FetchFailed,
  ImageDecodeError,
  AuthError,
  RateLimited,
  Timeout,
  TransportError,
  LengthMismatch,
  SchemaError,
  DegenerateClass,
  DegenerateMarginals,
  TooFewPairs,
  EmptyOverlap,
  InvalidArgument,
  ConfigError,
  IOError,
};

std::string_view to_string(ErrorKind kind);

// Transport-layer kinds map to CLI exit code 3, everything else to 2.
bool is_transport(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace harmscan

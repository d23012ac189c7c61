#include "harmscan/error.h"

namespace harmscan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::MalformedBitstring: return "MalformedBitstring";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::QuotaOutOfRange: return "QuotaOutOfRange";
    case ErrorKind::VideoTooShort: return "VideoTooShort";
    case ErrorKind::FetchFailed: return "FetchFailed";
    case ErrorKind::ImageDecodeError: return "ImageDecodeError";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DegenerateClass: return "DegenerateClass";
    case ErrorKind::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::EmptyOverlap: return "EmptyOverlap";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

bool is_transport(ErrorKind kind) {
  return kind == ErrorKind::FetchFailed || kind == ErrorKind::RateLimited ||
         kind == ErrorKind::Timeout || kind == ErrorKind::TransportError;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace harmscan

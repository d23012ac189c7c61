#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>

#include "harmscan/io.h"

namespace harmscan {

struct UrlParts {
  std::string scheme_host_port;  // "https://api.example.com:443"
  std::string path;              // "/v1/chat/completions"
};
UrlParts split_url(std::string_view url);

/// Line-delimited structured log. Thread-safe; debug events are dropped
/// unless enabled.
class EventLog {
 public:
  explicit EventLog(std::ostream* out = nullptr, bool debug = false) : out_(out), debug_(debug) {}

  void info(std::string_view event, Json fields = Json::object());
  void debug(std::string_view event, Json fields = Json::object());
  bool debug_enabled() const { return debug_; }

 private:
  void write(std::string_view level, std::string_view event, Json fields);

  std::ostream* out_;
  bool debug_;
  std::mutex mu_;
};

struct ChatResponse {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

/// One chat-completion round trip. Implementations throw Error with kind
/// AuthError, RateLimited, Timeout or TransportError.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse complete(const Json& body, const std::string& credential) = 0;
};

// Replaces base64 image data with a placeholder, for logs.
Json elide_images(Json body);

// Extracts the first choice's message text and token usage.
ChatResponse parse_chat_response(const Json& body);

class HttpChatTransport : public ChatTransport {
 public:
  HttpChatTransport(std::string endpoint, std::chrono::seconds timeout, EventLog* log = nullptr);

  ChatResponse complete(const Json& body, const std::string& credential) override;

 private:
  UrlParts url_;
  std::chrono::seconds timeout_;
  EventLog* log_;
};

}  // namespace harmscan

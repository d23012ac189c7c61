#include "harmscan/transport.h"

#include <ostream>

#include "harmscan/error.h"
#include "httplib.h"

namespace harmscan {

UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::ConfigError, "URL needs a scheme: " + std::string(url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

void EventLog::info(std::string_view event, Json fields) { write("info", event, std::move(fields)); }

void EventLog::debug(std::string_view event, Json fields) {
  if (debug_) write("debug", event, std::move(fields));
}

void EventLog::write(std::string_view level, std::string_view event, Json fields) {
  if (!out_) return;
  fields["level"] = level;
  fields["event"] = event;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  fields["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  std::lock_guard lock(mu_);
  *out_ << fields.dump() << '\n';
}

Json elide_images(Json body) {
  if (!body.contains("messages")) return body;
  for (auto& msg : body["messages"]) {
    if (!msg.contains("content") || !msg["content"].is_array()) continue;
    for (auto& part : msg["content"]) {
      if (part.value("type", "") == "image_url") part["image_url"]["url"] = "<image elided>";
    }
  }
  return body;
}

ChatResponse parse_chat_response(const Json& body) {
  ChatResponse r;
  try {
    const auto& content = body.at("choices").at(0).at("message").at("content");
    if (content.is_string()) {
      r.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", "") == "text") r.text += part.value("text", "");
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::TransportError, std::string("malformed response: ") + e.what());
  }
  if (auto it = body.find("usage"); it != body.end() && it->is_object()) {
    r.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
    r.completion_tokens = it->value("completion_tokens", std::int64_t{0});
  }
  return r;
}

HttpChatTransport::HttpChatTransport(std::string endpoint, std::chrono::seconds timeout,
                                     EventLog* log)
    : url_(split_url(endpoint)), timeout_(timeout), log_(log) {}

ChatResponse HttpChatTransport::complete(const Json& body, const std::string& credential) {
  httplib::Client client(url_.scheme_host_port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers = {{"Authorization", "Bearer " + credential}};
  if (log_ && log_->debug_enabled()) log_->debug("chat_request", {{"body", elide_images(body)}});
  auto res = client.Post(url_.path, headers, body.dump(), "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorKind::Timeout, httplib::to_string(err));
    }
    throw Error(ErrorKind::TransportError, httplib::to_string(err));
  }
  if (log_ && log_->debug_enabled()) {
    log_->debug("chat_response", {{"status", res->status}, {"body", res->body}});
  }
  const int status = res->status;
  if (status == 401 || status == 403) throw Error(ErrorKind::AuthError, "HTTP " + std::to_string(status));
  if (status == 429) throw Error(ErrorKind::RateLimited, "HTTP 429");
  if (status == 408 || status == 504) throw Error(ErrorKind::Timeout, "HTTP " + std::to_string(status));
  if (status < 200 || status >= 300) {
    throw Error(ErrorKind::TransportError, "HTTP " + std::to_string(status));
  }
  Json parsed;
  try {
    parsed = Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::TransportError, std::string("response is not JSON: ") + e.what());
  }
  return parse_chat_response(parsed);
}

}  // namespace harmscan

#include "harmscan/annotators.h"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "harmscan/error.h"

namespace harmscan {

std::string_view to_string(Round r) { return r == Round::Initial ? "initial" : "rerun"; }

Round parse_round(std::string_view s) {
  auto k = text::normalize(s);
  if (k == "initial" || k.empty()) return Round::Initial;
  if (k == "rerun") return Round::Rerun;
  throw Error(ErrorKind::SchemaError, "round '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorKind::ConfigError, "temperature must be in [0, 2]");
  }
  for (std::size_t i = 0; i < credentials.size(); ++i) {
    if (credentials[i].empty()) {
      throw Error(ErrorKind::ConfigError, "credential " + std::to_string(i + 1) + " is missing");
    }
  }
  if (max_output_tokens <= 0) throw Error(ErrorKind::ConfigError, "max_output_tokens must be positive");
  if (retry_budget < 0) throw Error(ErrorKind::ConfigError, "retry_budget must be >= 0");
  if (max_in_flight_per_credential <= 0) {
    throw Error(ErrorKind::ConfigError, "max_in_flight_per_credential must be positive");
  }
  if (model_id.empty()) throw Error(ErrorKind::ConfigError, "model_id is empty");
  split_url(endpoint);
}

ModelConfig model_config_from_json(const Json& j, ModelConfig c) {
  if (!j.is_object()) return c;
  c.model_id = j.value("model_id", c.model_id);
  c.temperature = j.value("temperature", c.temperature);
  c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.request_timeout = std::chrono::seconds(j.value("request_timeout_s", c.request_timeout.count()));
  c.retry_budget = j.value("retry_budget", c.retry_budget);
  c.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", c.backoff_base.count()));
  c.backoff_factor = j.value("backoff_factor", c.backoff_factor);
  c.backoff_jitter = j.value("backoff_jitter", c.backoff_jitter);
  c.max_in_flight_per_credential =
      j.value("max_in_flight_per_credential", c.max_in_flight_per_credential);
  c.min_request_interval =
      std::chrono::milliseconds(j.value("min_request_interval_ms", c.min_request_interval.count()));
  return c;
}

std::array<std::string, kCredentialCount> credentials_from_env() {
  std::array<std::string, kCredentialCount> out;
  const char* shared = std::getenv("HARMSCAN_API_KEY");
  for (int i = 0; i < kCredentialCount; ++i) {
    std::string name = "HARMSCAN_API_KEY_" + std::to_string(i + 1);
    if (const char* v = std::getenv(name.c_str()); v && *v) {
      out[i] = v;
    } else if (shared && *shared) {
      out[i] = shared;
    }
  }
  return out;
}

std::array<std::string, kCredentialCount> credentials_from_file(const std::filesystem::path& path) {
  auto lines = read_list_file(path);
  if (lines.size() != kCredentialCount) {
    throw Error(ErrorKind::ConfigError, "secrets file must hold exactly three credentials");
  }
  return {lines[0], lines[1], lines[2]};
}

Json to_json(const Ballot& b) {
  Json binary = b.verdict.binary ? Json(std::string(to_string(*b.verdict.binary))) : Json(nullptr);
  return Json{{"video_id", b.video_id},
              {"annotator_id", b.annotator_id},
              {"kind", std::string(to_string(b.verdict.kind))},
              {"binary", binary},
              {"categories", format_categories(b.verdict.categories)},
              {"coerced", b.verdict.coerced},
              {"raw_text", b.verdict.raw_text},
              {"tokens", {{"input", b.input_tokens}, {"output", b.output_tokens}}},
              {"latency_ms", b.latency_ms},
              {"round", std::string(to_string(b.round))}};
}

Ballot ballot_from_json(const Json& j) {
  Ballot b;
  try {
    b.video_id = j.at("video_id").get<std::string>();
    b.annotator_id = j.at("annotator_id").get<std::string>();
    b.verdict.kind = parse_verdict_kind(j.at("kind").get<std::string>());
    if (auto it = j.find("binary"); it != j.end() && it->is_string()) {
      auto s = text::normalize(it->get<std::string>());
      if (s == "harmful") {
        b.verdict.binary = BinaryStatus::Harmful;
      } else if (s == "harmless") {
        b.verdict.binary = BinaryStatus::Harmless;
      } else {
        throw Error(ErrorKind::SchemaError, "binary '" + s + "'");
      }
    }
    for (const auto& name : text::split(j.value("categories", std::string()), '+')) {
      if (!text::trim(name).empty()) b.verdict.categories.insert(parse_category(name));
    }
    b.verdict.coerced = j.value("coerced", false);
    b.verdict.raw_text = j.value("raw_text", std::string());
    if (auto it = j.find("tokens"); it != j.end() && it->is_object()) {
      b.input_tokens = it->value("input", std::int64_t{0});
      b.output_tokens = it->value("output", std::int64_t{0});
    }
    b.latency_ms = j.value("latency_ms", std::int64_t{0});
    b.round = parse_round(j.value("round", std::string("initial")));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("ballot: ") + e.what());
  }
  if (b.annotator_id.empty()) throw Error(ErrorKind::SchemaError, "empty annotator_id");
  if (b.verdict.kind == RawVerdict::Kind::Classified && !b.verdict.binary) {
    throw Error(ErrorKind::SchemaError, "classified ballot without binary");
  }
  return b;
}

void write_ballot_log(const std::filesystem::path& path, std::span<const Ballot> ballots) {
  std::vector<Json> lines;
  lines.reserve(ballots.size());
  for (const auto& b : ballots) lines.push_back(to_json(b));
  write_jsonl_file(path, lines);
}

std::vector<Ballot> read_ballot_log(const std::filesystem::path& path) {
  std::vector<Ballot> out;
  for (const auto& j : read_jsonl_file(path)) out.push_back(ballot_from_json(j));
  return out;
}

Json build_chat_request(const PromptEnvelope& env, const ModelConfig& config) {
  Json content = Json::array();
  for (const auto& section : env.sections) {
    content.push_back({{"type", "text"}, {"text", section.body}});
    if (section.name == SectionName::ImageFrames) {
      for (const auto& img : env.image_payloads) {
        content.push_back(
            {{"type", "image_url"},
             {"image_url", {{"url", "data:" + img.media_type + ";base64," + img.base64}}}});
      }
    }
  }
  return Json{{"model", config.model_id},
              {"temperature", config.temperature},
              {"max_tokens", config.max_output_tokens},
              {"messages", Json::array({{{"role", "user"}, {"content", content}}})}};
}

CredentialLimiter::CredentialLimiter(int credentials, int max_in_flight,
                                     std::chrono::milliseconds min_interval)
    : slots_(static_cast<std::size_t>(credentials)),
      max_in_flight_(max_in_flight),
      min_interval_(min_interval) {
  if (credentials <= 0 || max_in_flight <= 0) {
    throw Error(ErrorKind::ConfigError, "limiter needs positive sizes");
  }
}

CredentialLimiter::Permit::~Permit() {
  if (owner_) owner_->release(index_);
}

CredentialLimiter::Permit CredentialLimiter::acquire(int index) {
  if (index < 0 || index >= static_cast<int>(slots_.size())) {
    throw Error(ErrorKind::InvalidArgument, "credential index out of range");
  }
  std::unique_lock lock(mu_);
  auto& slot = slots_[static_cast<std::size_t>(index)];
  cv_.wait(lock, [&] { return slot.in_flight < max_in_flight_; });
  ++slot.in_flight;
  if (min_interval_.count() > 0) {
    auto now = std::chrono::steady_clock::now();
    auto start = std::max(now, slot.next_start);
    slot.next_start = start + min_interval_;
    lock.unlock();
    std::this_thread::sleep_until(start);
  }
  return Permit(this, index);
}

int CredentialLimiter::in_flight(int index) const {
  std::lock_guard lock(mu_);
  return slots_.at(static_cast<std::size_t>(index)).in_flight;
}

void CredentialLimiter::release(int index) {
  {
    std::lock_guard lock(mu_);
    --slots_[static_cast<std::size_t>(index)].in_flight;
  }
  cv_.notify_all();
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

std::chrono::milliseconds backoff_delay(int attempt, const ModelConfig& config, std::mt19937_64& rng) {
  double nominal = static_cast<double>(config.backoff_base.count()) *
                   std::pow(config.backoff_factor, attempt);
  double jitter = std::clamp(config.backoff_jitter, 0.0, 1.0);
  std::uniform_real_distribution<double> dist(1.0 - jitter, 1.0);
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(nominal * dist(rng))));
}

namespace {
bool retryable(ErrorKind k) {
  return k == ErrorKind::RateLimited || k == ErrorKind::Timeout || k == ErrorKind::TransportError;
}
}  // namespace

Ballot annotate(const VideoRecord& video, const PromptEnvelope& envelope, int credential_index,
                const ModelConfig& config, AnnotateContext& ctx, Round round) {
  if (credential_index < 1 || credential_index > kCredentialCount) {
    throw Error(ErrorKind::InvalidArgument, "credential index must be 1..3");
  }
  if (!ctx.transport) throw Error(ErrorKind::ConfigError, "no transport");
  const auto& credential = config.credentials[static_cast<std::size_t>(credential_index - 1)];
  const Json body = build_chat_request(envelope, config);
  std::mt19937_64 rng(ctx.jitter_seed ^ fnv1a64(video.video_id) ^
                      static_cast<std::uint64_t>(credential_index));

  Ballot ballot;
  ballot.video_id = video.video_id;
  ballot.annotator_id = "model:key" + std::to_string(credential_index);
  ballot.round = round;

  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    try {
      ChatResponse resp;
      if (ctx.limiter) {
        auto permit = ctx.limiter->acquire(credential_index - 1);
        resp = ctx.transport->complete(body, credential);
      } else {
        resp = ctx.transport->complete(body, credential);
      }
      ballot.verdict = parse_answer(resp.text, *ctx.refusals);
      ballot.input_tokens = resp.prompt_tokens;
      ballot.output_tokens = resp.completion_tokens;
      break;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::AuthError) throw;
      if (!retryable(e.kind())) throw;
      if (attempt >= config.retry_budget) {
        if (ctx.log) {
          ctx.log->info("retries_exhausted", {{"video_id", video.video_id},
                                              {"annotator_id", ballot.annotator_id},
                                              {"error", e.what()}});
        }
        ballot.verdict = RawVerdict::unavailable(e.what());
        break;
      }
      auto delay = backoff_delay(attempt, config, rng);
      if (ctx.log) {
        ctx.log->debug("retry", {{"video_id", video.video_id},
                                 {"annotator_id", ballot.annotator_id},
                                 {"attempt", attempt + 1},
                                 {"delay_ms", delay.count()},
                                 {"error", e.what()}});
      }
      if (ctx.sleep) ctx.sleep(delay);
    }
  }
  ballot.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  return ballot;
}

FilterResult validate_filter_task(std::span<const bool> answers, std::span<const bool> key) {
  if (answers.size() != kFilterTaskSize || key.size() != kFilterTaskSize) {
    throw Error(ErrorKind::LengthMismatch, "filter task needs 5 answers and 5 keys");
  }
  FilterResult r;
  for (std::size_t i = 0; i < kFilterTaskSize; ++i) r.incorrect += answers[i] != key[i];
  r.passed = r.incorrect <= 1;
  return r;
}

}  // namespace harmscan

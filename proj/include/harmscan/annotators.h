#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "harmscan/corpus.h"
#include "harmscan/promptkit.h"
#include "harmscan/transport.h"

namespace harmscan {

enum class Round : std::uint8_t { Initial, Rerun };
std::string_view to_string(Round r);
Round parse_round(std::string_view s);

inline constexpr int kCredentialCount = 3;

struct ModelConfig {
  std::string model_id = "gpt-4-turbo";
  double temperature = 0.7;
  // 25 per the processing description; the cost notes mention 50, so it is
  // left configurable.
  int max_output_tokens = 25;
  std::array<std::string, kCredentialCount> credentials;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::chrono::seconds request_timeout{60};
  int retry_budget = 5;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  // Fraction of each delay that is randomized: delay * [1 - jitter, 1].
  double backoff_jitter = 0.5;
  int max_in_flight_per_credential = 4;
  std::chrono::milliseconds min_request_interval{0};

  // Throws ConfigError on temperature outside [0, 2], missing credentials,
  // or non-positive limits.
  void validate() const;
};

// Overlays the non-secret fields present in a JSON object.
ModelConfig model_config_from_json(const Json& j, ModelConfig base = {});

// HARMSCAN_API_KEY_1..3, falling back to HARMSCAN_API_KEY for all three.
std::array<std::string, kCredentialCount> credentials_from_env();
// Three non-empty lines.
std::array<std::string, kCredentialCount> credentials_from_file(const std::filesystem::path& path);

struct Ballot {
  std::string video_id;
  std::string annotator_id;  // "model:key1".."model:key3" or "human:<hash>"
  RawVerdict verdict;
  std::int64_t latency_ms = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  Round round = Round::Initial;
};

Json to_json(const Ballot& b);
Ballot ballot_from_json(const Json& j);
void write_ballot_log(const std::filesystem::path& path, std::span<const Ballot> ballots);
std::vector<Ballot> read_ballot_log(const std::filesystem::path& path);

// Role-tagged message list: image parts as data URLs, then the text sections
// in envelope order.
Json build_chat_request(const PromptEnvelope& envelope, const ModelConfig& config);

/// Per-credential in-flight cap plus an optional minimum spacing between
/// request starts on the same credential.
class CredentialLimiter {
 public:
  CredentialLimiter(int credentials, int max_in_flight,
                    std::chrono::milliseconds min_interval = std::chrono::milliseconds(0));

  class Permit {
   public:
    Permit(Permit&& other) noexcept : owner_(other.owner_), index_(other.index_) {
      other.owner_ = nullptr;
    }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    friend class CredentialLimiter;
    Permit(CredentialLimiter* owner, int index) : owner_(owner), index_(index) {}
    CredentialLimiter* owner_;
    int index_;
  };

  // index is 0-based; blocks until a slot is free.
  Permit acquire(int index);
  int in_flight(int index) const;

 private:
  void release(int index);

  struct Slot {
    int in_flight = 0;
    std::chrono::steady_clock::time_point next_start{};
  };
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Slot> slots_;
  int max_in_flight_;
  std::chrono::milliseconds min_interval_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
void real_sleep(std::chrono::milliseconds d);

// Delay before retry number `attempt` (0-based): base * factor^attempt,
// scaled by a uniform jitter factor in [1 - jitter, 1].
std::chrono::milliseconds backoff_delay(int attempt, const ModelConfig& config, std::mt19937_64& rng);

struct AnnotateContext {
  ChatTransport* transport = nullptr;
  CredentialLimiter* limiter = nullptr;
  Sleeper sleep = real_sleep;
  const RefusalPatterns* refusals = &RefusalPatterns::defaults();
  EventLog* log = nullptr;
  std::uint64_t jitter_seed = 0;
};

// One chat-completion request on credential 1..3. Retryable failures are
// retried up to retry_budget times; exhaustion yields an Unavailable verdict.
// AuthError is not retried and propagates.
Ballot annotate(const VideoRecord& video, const PromptEnvelope& envelope, int credential_index,
                const ModelConfig& config, AnnotateContext& ctx, Round round = Round::Initial);

inline constexpr std::size_t kFilterTaskSize = 5;

struct FilterResult {
  bool passed = false;
  int incorrect = 0;
};

// Fails when more than one of the five answers is wrong. Throws
// LengthMismatch unless both spans hold five answers.
FilterResult validate_filter_task(std::span<const bool> answers, std::span<const bool> key);

}  // namespace harmscan

#include <doctest.h>

#include <atomic>
#include <deque>
#include <mutex>
#include <sstream>
#include <thread>

#include "harmscan/annotators.h"
#include "harmscan/error.h"
#include "harmscan/transport.h"

using namespace harmscan;
using namespace std::chrono_literals;

namespace {

// Pops scripted outcomes: a text answer or an error kind to throw.
class ScriptedTransport : public ChatTransport {
 public:
  struct Step {
    std::optional<ErrorKind> error;
    std::string text;
  };
  void push(std::string text) { steps_.push_back({std::nullopt, std::move(text)}); }
  void fail(ErrorKind k) { steps_.push_back({k, {}}); }

  ChatResponse complete(const Json& body, const std::string& credential) override {
    std::lock_guard lock(mu_);
    ++calls;
    last_body = body;
    last_credential = credential;
    if (steps_.empty()) throw Error(ErrorKind::TransportError, "script exhausted");
    auto s = steps_.front();
    steps_.pop_front();
    if (s.error) throw Error(*s.error, "scripted");
    return {s.text, 100, 5};
  }

  int calls = 0;
  Json last_body;
  std::string last_credential;

 private:
  std::mutex mu_;
  std::deque<Step> steps_;
};

ModelConfig config() {
  ModelConfig c;
  c.credentials = {"sk-one", "sk-two", "sk-three"};
  c.retry_budget = 3;
  return c;
}

VideoRecord video() {
  VideoRecord v;
  v.video_id = "vid";
  v.title = "t";
  return v;
}

PromptEnvelope envelope_with_images(int n) {
  PreparedImages imgs;
  for (int i = 0; i < n; ++i) imgs.payloads.push_back({"image/jpeg", "QUJD", 2, 2});
  return assemble_prompt(video(), imgs);
}

}  // namespace

TEST_SUITE("annotators") {

TEST_CASE("request body shape") {
  auto cfg = config();
  auto body = build_chat_request(envelope_with_images(2), cfg);
  CHECK(body["model"] == "gpt-4-turbo");
  CHECK(body["temperature"] == doctest::Approx(0.7));
  CHECK(body["max_tokens"] == 25);
  REQUIRE(body["messages"].size() == 1);
  const auto& content = body["messages"][0]["content"];
  REQUIRE(content.size() == 7);
  CHECK(content[0]["text"] == "[Image frames]");
  CHECK(content[1]["type"] == "image_url");
  CHECK(content[1]["image_url"]["url"] == "data:image/jpeg;base64,QUJD");
  CHECK(content[2]["type"] == "image_url");
  CHECK(content[3]["text"].get<std::string>().rfind("[Task assignment]", 0) == 0);
  CHECK(content[6]["text"].get<std::string>().rfind("[Question]", 0) == 0);
  CHECK(body.dump().find("sk-") == std::string::npos);
}

TEST_CASE("config validation") {
  auto c = config();
  CHECK_NOTHROW(c.validate());
  c.credentials[2].clear();
  CHECK_THROWS_AS(c.validate(), Error);
  c = config();
  c.temperature = 2.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = config();
  c.max_in_flight_per_credential = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  auto j = Json{{"model_id", "m"}, {"temperature", 0.0}, {"retry_budget", 1}};
  auto parsed = model_config_from_json(j);
  CHECK(parsed.model_id == "m");
  CHECK(parsed.retry_budget == 1);
  CHECK(parsed.max_output_tokens == 25);
}

TEST_CASE("backoff grows geometrically within the jitter band") {
  auto c = config();
  std::mt19937_64 rng(1);
  for (int a = 0; a < 5; ++a) {
    auto d = backoff_delay(a, c, rng).count();
    const double nominal = 1000.0 * std::pow(2.0, a);
    CHECK(d <= nominal);
    CHECK(d >= nominal * 0.5 - 1);
  }
}

TEST_CASE("transient failures retry then succeed") {
  ScriptedTransport t;
  t.fail(ErrorKind::RateLimited);
  t.fail(ErrorKind::Timeout);
  t.push("1) Harmful\n2) Sexual Harms");
  std::vector<std::chrono::milliseconds> sleeps;
  AnnotateContext ctx;
  ctx.transport = &t;
  ctx.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  auto b = annotate(video(), envelope_with_images(0), 2, config(), ctx);
  CHECK(t.calls == 3);
  CHECK(sleeps.size() == 2);
  CHECK(t.last_credential == "sk-two");
  CHECK(b.annotator_id == "model:key2");
  CHECK(b.verdict.kind == RawVerdict::Kind::Classified);
  CHECK(b.verdict.categories == CategorySet{HarmCategory::Sexual});
  CHECK(b.input_tokens == 100);
  CHECK(b.output_tokens == 5);
}

TEST_CASE("exhausted retry budget yields an Unavailable ballot") {
  ScriptedTransport t;
  for (int i = 0; i < 10; ++i) t.fail(ErrorKind::TransportError);
  std::ostringstream log_out;
  EventLog log(&log_out);
  AnnotateContext ctx;
  ctx.transport = &t;
  ctx.sleep = [](auto) {};
  ctx.log = &log;
  auto b = annotate(video(), envelope_with_images(0), 1, config(), ctx);
  CHECK(t.calls == 4);  // first try plus three retries
  CHECK(b.verdict.kind == RawVerdict::Kind::Unavailable);
  CHECK(log_out.str().find("retries_exhausted") != std::string::npos);
  CHECK(log_out.str().find("sk-") == std::string::npos);
}

TEST_CASE("auth errors propagate") {
  ScriptedTransport t;
  t.fail(ErrorKind::AuthError);
  AnnotateContext ctx;
  ctx.transport = &t;
  ctx.sleep = [](auto) {};
  try {
    annotate(video(), envelope_with_images(0), 1, config(), ctx);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AuthError);
  }
  CHECK(t.calls == 1);
}

TEST_CASE("refusals are classified, not retried") {
  ScriptedTransport t;
  t.push("I'm sorry, but I can't assist with that.");
  AnnotateContext ctx;
  ctx.transport = &t;
  auto b = annotate(video(), envelope_with_images(0), 3, config(), ctx, Round::Rerun);
  CHECK(t.calls == 1);
  CHECK(b.verdict.kind == RawVerdict::Kind::Refusal);
  CHECK(b.round == Round::Rerun);
}

TEST_CASE("ballot JSON round trip carries no credentials") {
  Ballot b;
  b.video_id = "v";
  b.annotator_id = "model:key1";
  b.verdict = RawVerdict::classified(BinaryStatus::Harmful, {HarmCategory::Information, HarmCategory::Clickbait});
  b.verdict.raw_text = "1) Harmful\n2) Information Harms, Clickbait Harms";
  b.latency_ms = 812;
  b.input_tokens = 3000;
  b.output_tokens = 12;
  b.round = Round::Rerun;
  auto j = to_json(b);
  CHECK(j["categories"] == "info+click");
  auto back = ballot_from_json(j);
  CHECK(back.video_id == b.video_id);
  CHECK(back.annotator_id == b.annotator_id);
  CHECK(back.verdict.same_decision(b.verdict));
  CHECK(back.verdict.raw_text == b.verdict.raw_text);
  CHECK(back.latency_ms == 812);
  CHECK(back.input_tokens == 3000);
  CHECK(back.round == Round::Rerun);
}

TEST_CASE("limiter caps in-flight calls per credential") {
  CredentialLimiter lim(1, 2);
  std::atomic<int> peak{0}, live{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i) {
    ts.emplace_back([&] {
      auto p = lim.acquire(0);
      int now = ++live;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(5ms);
      --live;
    });
  }
  for (auto& t : ts) t.join();
  CHECK(peak.load() <= 2);
  CHECK(lim.in_flight(0) == 0);
}

TEST_CASE("filter task gate") {
  const std::array<bool, 5> key{true, false, true, true, false};
  for (unsigned m = 0; m < 32; ++m) {
    std::array<bool, 5> ans{};
    int wrong = 0;
    for (int i = 0; i < 5; ++i) {
      ans[i] = (m >> i) & 1u;
      wrong += ans[i] != key[i];
    }
    auto r = validate_filter_task(ans, key);
    CHECK(r.incorrect == wrong);
    CHECK(r.passed == (wrong <= 1));
  }
  std::array<bool, 4> short_ans{};
  CHECK_THROWS_AS(validate_filter_task(short_ans, key), Error);
}

TEST_CASE("chat response parsing") {
  auto r = parse_chat_response(Json::parse(
      R"({"choices":[{"message":{"content":"1) Harmless\n2) None"}}],"usage":{"prompt_tokens":7,"completion_tokens":3}})"));
  CHECK(r.text == "1) Harmless\n2) None");
  CHECK(r.prompt_tokens == 7);
  CHECK(r.completion_tokens == 3);
  CHECK_THROWS_AS(parse_chat_response(Json::parse("{}")), Error);
}

TEST_CASE("elided bodies keep structure but drop image data") {
  auto body = build_chat_request(envelope_with_images(1), config());
  auto e = elide_images(body);
  CHECK(e.dump().find("QUJD") == std::string::npos);
  CHECK(e["messages"][0]["content"].size() == body["messages"][0]["content"].size());
}

}

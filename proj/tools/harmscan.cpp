// harmscan command line.
//
// Exit codes: 0 success, 2 validation or configuration errors, 3 when a
// transport retry budget ran out somewhere in the run.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "harmscan/annotators.h"
#include "harmscan/consensus.h"
#include "harmscan/corpus.h"
#include "harmscan/error.h"
#include "harmscan/frames.h"
#include "harmscan/human_export.h"
#include "harmscan/io.h"
#include "harmscan/metrics.h"
#include "harmscan/promptkit.h"
#include "harmscan/rank_tests.h"
#include "harmscan/reliability.h"
#include "harmscan/report.h"
#include "harmscan/transport.h"

namespace fs = std::filesystem;
using namespace harmscan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitTransport = 3;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  Json config = Json::object();

  fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }

  // Config values that name files resolve against the config's directory.
  std::optional<fs::path> config_file(const char* key) const {
    if (!config.contains(key)) return std::nullopt;
    fs::path p = config.at(key).get<std::string>();
    if (p.is_relative() && !config_path.empty()) p = fs::path(config_path).parent_path() / p;
    return p;
  }
};

void load_config(Globals& g) {
  if (g.config_path.empty()) return;
  try {
    g.config = Json::parse(read_text_file(g.config_path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, g.config_path + ": " + e.what());
  }
  if (!g.config.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
}

void write_csv_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  body(out);
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

Ratio parse_ratio(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    auto r = parse_decimal(s);
    return {r.numerator(), r.denominator()};
  }
  try {
    return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad ratio " + s);
  }
}

std::array<bool, kFilterTaskSize> parse_filter_key(const std::string& s) {
  std::array<bool, kFilterTaskSize> key{};
  std::size_t n = 0;
  for (char c : s) {
    if (c != '0' && c != '1') continue;
    if (n == kFilterTaskSize) throw Error(ErrorKind::ConfigError, "filter key has more than 5 answers");
    key[n++] = c == '1';
  }
  if (n != kFilterTaskSize) throw Error(ErrorKind::ConfigError, "filter key needs 5 answers");
  return key;
}

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::string keywords, channels, records, external, corpus;
  int quota = 100;
  std::string ratio = "7/10";
  bool check_availability = false;
};

int run_ingest(const Globals& g, const IngestArgs& a) {
  fs::create_directories(g.out_dir);
  Json summary = Json::object();
  if (!a.keywords.empty()) {
    auto keywords = load_keywords(a.keywords);
    auto plan = build_search_plan(keywords, a.quota, parse_ratio(a.ratio));
    write_csv_file(g.out("search_plan.csv"), [&](std::ostream& o) { write_search_plan_csv(o, plan); });
    summary["search_queries"] = plan.size();
  }
  if (!a.channels.empty()) {
    auto channels = load_channels(a.channels);
    write_csv_file(g.out("channel_plan.csv"), [&](std::ostream& o) {
      CsvWriter w(o);
      w.row({"channel", "harm_hint"});
      for (const auto& [handle, cat] : channels) w.row({handle, std::string(short_name(cat))});
    });
    summary["channels"] = channels.size();
  }

  const fs::path corpus_path = a.corpus.empty() ? g.out("corpus.jsonl") : fs::path(a.corpus);
  Corpus corpus = fs::exists(corpus_path) ? Corpus::load(corpus_path) : Corpus{};
  const std::size_t before = corpus.size();
  if (!a.records.empty()) {
    CorpusStore store(std::move(corpus));
    for (const auto& j : read_jsonl_file(a.records)) store.append(ingest_record(video_record_from_json(j)));
    store.flush();
    corpus = store.snapshot();
  }
  if (!a.external.empty()) {
    auto ext = load_external_list(a.external);
    for (auto& r : ext) r = ingest_record(std::move(r));
    corpus = merge_external(ext, std::move(corpus));
  }
  int fetch_failures = 0;
  if (a.check_availability) {
    auto sigs = g.config_file("removal_signatures") ? RemovalSignatures::load(*g.config_file("removal_signatures"))
                                                    : RemovalSignatures::defaults();
    for (const auto& r : corpus.records()) {
      auto* rec = corpus.find_mutable(r.video_id);
      try {
        rec->availability = fetch_availability(rec->url, sigs);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::FetchFailed) throw;
        ++fetch_failures;
        std::cerr << "availability: " << rec->video_id << ": " << e.what() << "\n";
      }
    }
    summary["fetch_failures"] = fetch_failures;
  }
  if (!a.records.empty() || !a.external.empty() || a.check_availability) {
    corpus.store(corpus_path);
    summary["corpus"] = corpus_path.string();
    summary["videos"] = corpus.size();
    summary["added"] = corpus.size() - before;
  }
  print_json(summary);
  return fetch_failures ? kExitTransport : kExitOk;
}

// ---- frames ----------------------------------------------------------------

struct FramesArgs {
  std::string corpus, tool, videos_dir, frames_root;
  bool distinct = false;
};

int run_frames(const Globals& g, const FramesArgs& a) {
  fs::create_directories(g.out_dir);
  auto corpus = Corpus::load(a.corpus);
  std::string tool = a.tool;
  if (tool.empty()) tool = g.config.value("frame_tool", std::string("harmscan-frame-tool"));
  FrameExtractor extractor(tool);
  const fs::path root = a.frames_root.empty() ? g.out("frames") : fs::path(a.frames_root);

  std::vector<Json> plans;
  int failed = 0, too_short = 0;
  for (const auto& v : corpus.records()) {
    std::string input = v.url;
    if (!a.videos_dir.empty()) {
      auto local = fs::path(a.videos_dir) / (v.video_id + ".mp4");
      if (fs::exists(local)) input = local.string();
    }
    try {
      const auto total = extractor.probe(input);
      auto plan = make_frame_plan(v.video_id, total, g.seed, root, a.distinct);
      extractor.extract(input, plan);
      extractor.thumbnail(input, plan.thumbnail_ref);
      plans.push_back(to_json(plan));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::VideoTooShort) ++too_short;
      else if (e.kind() == ErrorKind::FetchFailed) ++failed;
      else throw;
      std::cerr << "frames: " << v.video_id << ": " << e.what() << "\n";
    }
  }
  write_jsonl_file(g.out("frame_plans.jsonl"), plans);
  print_json({{"planned", plans.size()}, {"fetch_failed", failed}, {"too_short", too_short}});
  return failed ? kExitTransport : kExitOk;
}

// ---- annotate --------------------------------------------------------------

struct AnnotateArgs {
  std::string source = "model";
  std::string corpus, frames_root, credentials, endpoint, ballots_out;
  int jobs = 1;
  int limit = 0;
  bool debug = false;
  // human
  std::string export_file, mapping = "default", salt, filter_key;
};

int run_annotate_model(const Globals& g, const AnnotateArgs& a) {
  ModelConfig cfg = g.config.contains("model") ? model_config_from_json(g.config.at("model")) : ModelConfig{};
  if (!a.endpoint.empty()) cfg.endpoint = a.endpoint;
  if (!a.credentials.empty()) cfg.credentials = credentials_from_file(a.credentials);
  else if (auto f = g.config_file("credentials_file")) cfg.credentials = credentials_from_file(*f);
  else cfg.credentials = credentials_from_env();
  cfg.validate();

  const PromptTemplate tmpl = g.config_file("prompt_template")
                                  ? PromptTemplate::load(*g.config_file("prompt_template"))
                                  : PromptTemplate::defaults();
  const RefusalPatterns refusals = g.config_file("refusal_patterns")
                                       ? RefusalPatterns::load(*g.config_file("refusal_patterns"))
                                       : RefusalPatterns::defaults();

  auto corpus = Corpus::load(a.corpus);
  const fs::path root = a.frames_root.empty() ? g.out("frames") : fs::path(a.frames_root);
  fs::create_directories(g.out_dir);
  std::ofstream events(g.out("events.jsonl"), std::ios::app);
  EventLog log(&events, a.debug);
  HttpChatTransport transport(cfg.endpoint, cfg.request_timeout, &log);
  CredentialLimiter limiter(kCredentialCount, cfg.max_in_flight_per_credential, cfg.min_request_interval);

  std::vector<const VideoRecord*> todo;
  for (const auto& v : corpus.records()) {
    if (a.limit > 0 && static_cast<int>(todo.size()) >= a.limit) break;
    todo.push_back(&v);
  }
  std::vector<std::vector<Ballot>> per_video(todo.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&](std::uint64_t worker_seed) {
    AnnotateContext ctx;
    ctx.transport = &transport;
    ctx.limiter = &limiter;
    ctx.refusals = &refusals;
    ctx.log = &log;
    ctx.jitter_seed = worker_seed;
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const auto& video = *todo[i];
      try {
        auto refs = find_frame_refs(root, video.video_id);
        PreparedImages images;
        try {
          images = prepare_images(refs.frames, refs.thumbnail);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ImageDecodeError) throw;
          log.info("image_decode_failed", {{"video_id", video.video_id}, {"error", e.what()}});
          images = PreparedImages{};
          images.degraded = true;
        }
        for (const auto& w : images.warnings) log.info("image_warning", {{"video_id", video.video_id}, {"warning", w}});
        const auto envelope = assemble_prompt(video, std::move(images), tmpl);
        auto fn = [&](int cred, Round round) { return annotate(video, envelope, cred, cfg, ctx, round); };
        auto res = resolve(video.video_id, fn, SourceKind::Model);
        log.info("resolved", {{"video_id", video.video_id},
                              {"label", format_label(res.label)},
                              {"round", std::string(to_string(res.round))},
                              {"calls", res.calls}});
        per_video[i] = std::move(res.ballots);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next = todo.size();
      }
    }
  };
  const int jobs = std::max(1, a.jobs);
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker, g.seed + static_cast<std::uint64_t>(t));
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<Ballot> all;
  std::size_t exhausted = 0;
  for (auto& v : per_video) {
    for (auto& b : v) {
      exhausted += b.verdict.kind == RawVerdict::Kind::Unavailable;
      all.push_back(std::move(b));
    }
  }
  const fs::path out = a.ballots_out.empty() ? g.out("ballots_model.jsonl") : fs::path(a.ballots_out);
  write_ballot_log(out, all);
  print_json({{"videos", todo.size()}, {"ballots", all.size()}, {"exhausted", exhausted}, {"ballot_log", out.string()}});
  return exhausted ? kExitTransport : kExitOk;
}

int run_annotate_human(const Globals& g, const AnnotateArgs& a) {
  if (a.export_file.empty()) throw Error(ErrorKind::InvalidArgument, "--export is required for human source");
  HumanExportMapping mapping;
  if (a.mapping == "mturk") mapping = HumanExportMapping::mturk();
  else if (a.mapping != "default") mapping = HumanExportMapping::from_json(Json::parse(read_text_file(a.mapping)));
  else if (g.config.contains("human_mapping")) mapping = HumanExportMapping::from_json(g.config.at("human_mapping"));

  HumanIngestOptions opts;
  opts.salt = !a.salt.empty() ? a.salt : g.config.value("worker_salt", std::string());
  const std::string key = !a.filter_key.empty() ? a.filter_key : g.config.value("filter_key", std::string());
  if (!key.empty()) opts.filter_key = parse_filter_key(key);

  auto result = ingest_human_export(CsvTable::read_file(a.export_file), mapping, opts);
  std::vector<Ballot> all;
  for (auto& [vid, ballots] : result.ballots) {
    for (auto& b : ballots) all.push_back(std::move(b));
  }
  fs::create_directories(g.out_dir);
  const fs::path out = a.ballots_out.empty() ? g.out("ballots_human.jsonl") : fs::path(a.ballots_out);
  write_ballot_log(out, all);
  auto summary = result.summary.to_json();
  write_text_file(g.out("human_ingest_summary.json"), summary.dump(2) + "\n");
  summary["ballot_log"] = out.string();
  print_json(summary);
  return kExitOk;
}

// ---- consense --------------------------------------------------------------

struct ConsenseArgs {
  std::string ballots, source = "model", name, corpus;
};

int run_consense(const Globals& g, const ConsenseArgs& a) {
  const auto source = parse_source_kind(a.source);
  const std::string name = a.name.empty() ? a.source : a.name;
  auto ballots = read_ballot_log(a.ballots);
  ConsenseSummary summary;
  auto records = consense_ballots(ballots, source, name, &summary);
  std::size_t removed = 0;
  if (!a.corpus.empty()) removed = apply_removals(records, Corpus::load(a.corpus));

  fs::create_directories(g.out_dir);
  write_consensus_log(g.out("consensus_" + name + ".jsonl"), records);
  auto labels = to_label_map(records);
  write_csv_file(g.out("labels_" + name + ".csv"), [&](std::ostream& o) { write_label_csv(o, labels); });

  Json skipped = Json::array(), over = Json::array();
  for (const auto& [vid, n] : summary.skipped) skipped.push_back({{"video_id", vid}, {"ballots", n}});
  for (const auto& [vid, n] : summary.over_covered) over.push_back({{"video_id", vid}, {"ballots", n}});
  std::map<std::string, std::size_t> by_status;
  for (const auto& [vid, l] : labels) ++by_status[std::string(to_string(l.status()))];
  print_json({{"labels", labels.size()},
              {"reruns", summary.reruns_used},
              {"removed", removed},
              {"by_status", by_status},
              {"skipped", skipped},
              {"over_covered", over}});
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string gold, pred, mode, compare;
  std::string gold_name = "expert", pred_name = "pred", compare_name = "compare";
};

std::vector<double> agreement_vector(const LabelMap& gold, const LabelMap& pred, EvalMode mode) {
  auto set = filter_comparable(gold, pred, mode);
  std::vector<double> out;
  if (mode == EvalMode::MultiLabel) {
    for (auto x : concurrence_vector(set.pairs)) out.push_back(x);
  } else {
    for (const auto& p : set.pairs) out.push_back(p.gold.status() == p.pred.status());
  }
  return out;
}

MetricsReport restricted(MetricsReport r, const std::string& mode) {
  if (mode.empty()) return r;
  if (parse_eval_mode(mode) == EvalMode::Binary) r.multilabel.reset();
  else r.binary.reset();
  return r;
}

int run_evaluate(const Globals& g, const EvaluateArgs& a) {
  auto gold = read_label_file(a.gold);
  auto pred = read_label_file(a.pred);
  std::vector<MetricsReport> reports{restricted(evaluate(gold, pred, a.gold_name, a.pred_name), a.mode)};
  std::optional<LabelMap> cmp;
  if (!a.compare.empty()) {
    cmp = read_label_file(a.compare);
    reports.push_back(restricted(evaluate(gold, *cmp, a.gold_name, a.compare_name), a.mode));
  }
  fs::create_directories(g.out_dir);
  for (const auto& r : reports) write_metrics_report(g.out("metrics_" + r.pred_source + ".json"), r);
  write_csv_file(g.out("performance.csv"), [&](std::ostream& o) { write_performance_csv(o, reports); });
  write_csv_file(g.out("categories.csv"), [&](std::ostream& o) { write_category_csv(o, reports); });

  Json out = Json::object();
  for (const auto& r : reports) out[r.pred_source] = to_json(r);
  if (cmp) {
    Json tests = Json::object();
    for (auto mode : {EvalMode::Binary, EvalMode::MultiLabel}) {
      if (!a.mode.empty() && parse_eval_mode(a.mode) != mode) continue;
      auto x = agreement_vector(gold, pred, mode);
      auto y = agreement_vector(gold, *cmp, mode);
      if (x.empty() || y.empty()) continue;
      auto mw = mann_whitney_u(x, y);
      tests[std::string(to_string(mode))] = {{"u", mw.u}, {"p", mw.p}, {"z", mw.z}, {"exact", mw.exact},
                                              {"n_x", x.size()}, {"n_y", y.size()}};
    }
    write_text_file(g.out("mann_whitney.json"), tests.dump(2) + "\n");
    out["mann_whitney"] = tests;
  }
  print_json(out);
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> labels;
  std::string gold, pred;
};

std::pair<std::string, fs::path> named_file(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

int run_report(const Globals& g, const ReportArgs& a) {
  fs::create_directories(g.out_dir);
  Json out = Json::object();
  if (!a.labels.empty()) {
    std::vector<NamedDistribution> tables;
    for (const auto& spec : a.labels) {
      auto [name, path] = named_file(spec);
      tables.push_back({name, distribution_table(read_label_file(path))});
    }
    write_csv_file(g.out("distribution.csv"), [&](std::ostream& o) { write_distribution_csv(o, tables); });
    for (const auto& t : tables) {
      Json rows = Json::object();
      for (const auto& r : t.table.rows) rows[std::string(to_string(r.status))] = {{"count", r.count}, {"percent", r.percent_text()}};
      out[t.source] = {{"total", t.table.grand_total}, {"rows", rows}};
    }
  }
  if (!a.gold.empty() || !a.pred.empty()) {
    if (a.gold.empty() || a.pred.empty()) throw Error(ErrorKind::InvalidArgument, "flow export needs --gold and --pred");
    auto flow = flow_export(read_label_file(a.gold), read_label_file(a.pred));
    write_csv_file(g.out("flow.csv"), [&](std::ostream& o) { write_flow_csv(o, flow); });
    out["flow_edges"] = flow.edges.size();
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "report needs --labels or --gold/--pred");
  print_json(out);
  return kExitOk;
}

// ---- cost / icr ------------------------------------------------------------

int run_cost(const Globals& g, std::int64_t videos) {
  CostModel model = g.config.contains("cost") ? cost_model_from_json(g.config.at("cost")) : CostModel{};
  auto est = estimate_cost(videos, model);
  fs::create_directories(g.out_dir);
  write_csv_file(g.out("cost.csv"), [&](std::ostream& o) { write_cost_csv(o, est); });
  print_json(to_json(est));
  return kExitOk;
}

Json rational_json(const Rational& r) { return {{"value", to_double(r)}, {"exact", std::to_string(r.numerator()) + "/" + std::to_string(r.denominator())}}; }

int run_icr(const Globals& g, const std::vector<std::string>& specs) {
  if (specs.size() < 2) throw Error(ErrorKind::InvalidArgument, "icr needs at least two --labels");
  std::vector<std::pair<std::string, LabelMap>> sources;
  for (const auto& s : specs) {
    auto [name, path] = named_file(s);
    sources.emplace_back(name, read_label_file(path));
  }
  const auto& [na, a] = sources[0];
  const auto& [nb, b] = sources[1];
  Json out = {{"a", na}, {"b", nb}};
  out["percentage_agreement"] = rational_json(percentage_agreement(a, b));
  Json cats = Json::object();
  auto per = per_category_agreement(a, b);
  auto kap = cohen_kappa_per_category(a, b);
  for (auto c : kAllCategories) {
    const auto& s = per[index_of(c)];
    cats[std::string(short_name(c))] = {
        {"agreement", s.ratio ? Json(to_double(*s.ratio)) : Json(nullptr)},
        {"n", s.either},
        {"kappa", kap[index_of(c)] ? Json(to_double(*kap[index_of(c)])) : Json(nullptr)}};
  }
  out["per_category"] = cats;
  try {
    out["kappa"] = rational_json(cohen_kappa(a, b));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateMarginals) throw;
    out["kappa"] = nullptr;
  }
  std::vector<const LabelMap*> ptrs;
  for (const auto& s : sources) ptrs.push_back(&s.second);
  auto m = binary_code_matrix(ptrs);
  try {
    out["alpha_binary"] = rational_json(krippendorff_alpha(m.codes, m.coders, m.values));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateMarginals && e.kind() != ErrorKind::TooFewPairs) throw;
    out["alpha_binary"] = nullptr;
  }
  fs::create_directories(g.out_dir);
  write_text_file(g.out("icr.json"), out.dump(2) + "\n");
  print_json(out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmscan: harmful-video annotation and evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--out", g.out_dir, "Output directory");

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "Build the corpus and search plans");
  ingest->add_option("--keywords", ing.keywords, "category,keyword CSV")->check(CLI::ExistingFile);
  ingest->add_option("--quota", ing.quota, "Results per keyword");
  ingest->add_option("--ratio", ing.ratio, "Relevance share, e.g. 7/10");
  ingest->add_option("--channels", ing.channels, "category,channel CSV")->check(CLI::ExistingFile);
  ingest->add_option("--records", ing.records, "Scraped metadata records (JSONL)")->check(CLI::ExistingFile);
  ingest->add_option("--external", ing.external, "External id list CSV")->check(CLI::ExistingFile);
  ingest->add_option("--corpus", ing.corpus, "Corpus file to extend");
  ingest->add_flag("--check-availability", ing.check_availability, "Fetch watch pages and mark removals");

  FramesArgs fr;
  auto* frames = app.add_subcommand("frames", "Sample and extract frames");
  frames->add_option("--corpus", fr.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  frames->add_option("--tool", fr.tool, "Frame extraction tool");
  frames->add_option("--videos", fr.videos_dir, "Directory of <video_id>.mp4 files");
  frames->add_option("--frames-root", fr.frames_root, "Frame output root");
  frames->add_flag("--distinct", fr.distinct, "Draw distinct frame indices");

  AnnotateArgs an;
  auto* annotate_cmd = app.add_subcommand("annotate", "Produce ballots");
  annotate_cmd->add_option("--source", an.source, "model or human")->check(CLI::IsMember({"model", "human"}));
  annotate_cmd->add_option("--corpus", an.corpus, "Corpus JSONL (model)");
  annotate_cmd->add_option("--frames-root", an.frames_root, "Frame root (model)");
  annotate_cmd->add_option("--credentials", an.credentials, "File with three API keys (model)");
  annotate_cmd->add_option("--endpoint", an.endpoint, "Chat completion endpoint (model)");
  annotate_cmd->add_option("--jobs", an.jobs, "Videos in flight (model)");
  annotate_cmd->add_option("--limit", an.limit, "Annotate at most N videos (model)");
  annotate_cmd->add_flag("--debug", an.debug, "Log request bodies with images elided");
  annotate_cmd->add_option("--export", an.export_file, "Survey export CSV (human)");
  annotate_cmd->add_option("--mapping", an.mapping, "default, mturk or a JSON mapping file (human)");
  annotate_cmd->add_option("--salt", an.salt, "Worker id hashing salt (human)");
  annotate_cmd->add_option("--filter-key", an.filter_key, "Filter task answer key, e.g. 10110 (human)");
  annotate_cmd->add_option("--ballots-out", an.ballots_out, "Ballot log path");

  ConsenseArgs co;
  auto* consense = app.add_subcommand("consense", "Reduce ballots to final labels");
  consense->add_option("--ballots", co.ballots, "Ballot log")->required()->check(CLI::ExistingFile);
  consense->add_option("--source", co.source, "model or human")->check(CLI::IsMember({"model", "human"}));
  consense->add_option("--name", co.name, "Source name used in outputs");
  consense->add_option("--corpus", co.corpus, "Corpus used to mark removals")->check(CLI::ExistingFile);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score labels against a gold standard");
  evaluate_cmd->add_option("--gold", ev.gold, "Gold labels")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--pred", ev.pred, "Predicted labels")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--mode", ev.mode, "binary or multilabel")->check(CLI::IsMember({"binary", "multilabel"}));
  evaluate_cmd->add_option("--compare", ev.compare, "Second predicted labels")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--gold-name", ev.gold_name, "Gold source name");
  evaluate_cmd->add_option("--pred-name", ev.pred_name, "Predicted source name");
  evaluate_cmd->add_option("--compare-name", ev.compare_name, "Comparison source name");

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "Distribution tables and label flow");
  report->add_option("--labels", rp.labels, "NAME=FILE label sources");
  report->add_option("--gold", rp.gold, "Flow source labels")->check(CLI::ExistingFile);
  report->add_option("--pred", rp.pred, "Flow target labels")->check(CLI::ExistingFile);

  std::int64_t cost_videos = 0;
  auto* cost = app.add_subcommand("cost", "Annotation cost estimate");
  cost->add_option("--videos", cost_videos, "Number of videos")->required()->check(CLI::NonNegativeNumber);

  std::vector<std::string> icr_labels;
  auto* icr = app.add_subcommand("icr", "Inter-coder reliability");
  icr->add_option("--labels", icr_labels, "NAME=FILE label sources")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    load_config(g);
    if (*ingest) return run_ingest(g, ing);
    if (*frames) return run_frames(g, fr);
    if (*annotate_cmd) return an.source == "human" ? run_annotate_human(g, an) : run_annotate_model(g, an);
    if (*consense) return run_consense(g, co);
    if (*evaluate_cmd) return run_evaluate(g, ev);
    if (*report) return run_report(g, rp);
    if (*cost) return run_cost(g, cost_videos);
    if (*icr) return run_icr(g, icr_labels);
  } catch (const Error& e) {
    std::cerr << "harmscan: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return is_transport(e.kind()) ? kExitTransport : kExitInvalid;
  } catch (const Json::exception& e) {
    std::cerr << "harmscan: SchemaError: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "harmscan: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

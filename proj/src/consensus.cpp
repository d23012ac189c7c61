#include "harmscan/consensus.h"

#include <algorithm>
#include <future>

#include "harmscan/error.h"

namespace harmscan {

std::string_view to_string(SourceKind s) { return s == SourceKind::Model ? "model" : "human"; }

SourceKind parse_source_kind(std::string_view s) {
  auto k = text::normalize(s);
  if (k == "model") return SourceKind::Model;
  if (k == "human") return SourceKind::Human;
  throw Error(ErrorKind::InvalidArgument, "source must be model or human");
}

std::string_view to_string(Vote v) {
  switch (v) {
    case Vote::Harmful: return "harmful";
    case Vote::Harmless: return "harmless";
    case Vote::Unavailable: return "unavailable";
    case Vote::Refuse: return "refuse";
  }
  return "refuse";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Decided: return "decided";
    case Decision::NeedsRerun: return "needs_rerun";
    case Decision::NoAgreement: return "no_agreement";
  }
  return "no_agreement";
}

Vote to_vote(const RawVerdict& v, SourceKind source) {
  switch (v.kind) {
    case RawVerdict::Kind::Classified:
      if (v.binary) return *v.binary == BinaryStatus::Harmful ? Vote::Harmful : Vote::Harmless;
      return Vote::Refuse;
    case RawVerdict::Kind::Unavailable:
      return source == SourceKind::Human ? Vote::Unavailable : Vote::Refuse;
    case RawVerdict::Kind::Refusal:
    case RawVerdict::Kind::Unparseable:
      return Vote::Refuse;
  }
  return Vote::Refuse;
}

BallotTriple BallotTriple::make(std::array<Ballot, 3> ballots, Round round, SourceKind source) {
  for (const auto& b : ballots) {
    if (b.video_id != ballots[0].video_id) {
      throw Error(ErrorKind::InvalidArgument, "triple mixes videos " + ballots[0].video_id +
                                                  " and " + b.video_id);
    }
  }
  BallotTriple t;
  t.video_id = ballots[0].video_id;
  t.ballots = std::move(ballots);
  t.round = round;
  t.source = source;
  return t;
}

std::string ConsensusOutcome::vote_detail() const {
  std::string out;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (i) out.push_back(',');
    out += to_string(votes[i]);
  }
  return out;
}

ConsensusOutcome decide_votes(const std::array<Vote, 3>& votes, Round round) {
  ConsensusOutcome out;
  out.votes = votes;
  int counts[4] = {0, 0, 0, 0};
  for (auto v : votes) ++counts[static_cast<int>(v)];
  constexpr std::array<std::pair<Vote, LabelStatus>, 3> substantive = {{
      {Vote::Harmful, LabelStatus::Harmful},
      {Vote::Harmless, LabelStatus::Harmless},
      {Vote::Unavailable, LabelStatus::Unavailable},
  }};
  for (auto [vote, status] : substantive) {
    if (counts[static_cast<int>(vote)] >= 2) {
      out.decision = Decision::Decided;
      out.status = status;
      return out;
    }
  }
  out.decision = round == Round::Initial ? Decision::NeedsRerun : Decision::NoAgreement;
  return out;
}

ConsensusOutcome binary_consensus(const BallotTriple& triple) {
  std::array<Vote, 3> votes{};
  for (std::size_t i = 0; i < 3; ++i) votes[i] = to_vote(triple.ballots[i].verdict, triple.source);
  return decide_votes(votes, triple.round);
}

CategoryConsensus category_consensus(const BallotTriple& triple) {
  std::array<int, kCategoryCount> tally{};
  for (const auto& b : triple.ballots) {
    if (to_vote(b.verdict, triple.source) != Vote::Harmful) continue;
    for (auto c : b.verdict.categories.members()) ++tally[index_of(c)];
  }
  CategoryConsensus out;
  for (auto c : kAllCategories) {
    if (tally[index_of(c)] >= 2) out.categories.insert(c);
  }
  out.no_majority = out.categories.empty();
  return out;
}

FinalLabel label_for(const BallotTriple& triple, const ConsensusOutcome& outcome) {
  if (outcome.decision != Decision::Decided) return FinalLabel::no_agreement();
  if (*outcome.status == LabelStatus::Harmful) {
    auto cats = category_consensus(triple);
    return cats.no_majority ? FinalLabel::harmful_no_majority() : FinalLabel::harmful(cats.categories);
  }
  return FinalLabel::make(*outcome.status);
}

namespace {

std::array<Ballot, 3> run_round(const AnnotateFn& fn, Round round, bool concurrent) {
  std::array<Ballot, 3> out;
  if (!concurrent) {
    for (int i = 0; i < 3; ++i) out[i] = fn(i + 1, round);
    return out;
  }
  std::array<std::future<Ballot>, 3> futures;
  for (int i = 0; i < 3; ++i) futures[i] = std::async(std::launch::async, fn, i + 1, round);
  // get() rethrows configuration errors from any credential
  for (int i = 0; i < 3; ++i) out[i] = futures[i].get();
  return out;
}

}  // namespace

Resolution resolve(std::string_view video_id, const AnnotateFn& fn, SourceKind source,
                   bool concurrent) {
  Resolution res;
  for (Round round : {Round::Initial, Round::Rerun}) {
    auto ballots = run_round(fn, round, concurrent);
    res.calls += 3;
    for (auto& b : ballots) {
      b.video_id = std::string(video_id);
      b.round = round;
      res.ballots.push_back(b);
    }
    auto triple = BallotTriple::make(std::move(ballots), round, source);
    auto outcome = binary_consensus(triple);
    if (!res.vote_detail.empty()) res.vote_detail += ";";
    res.vote_detail += outcome.vote_detail();
    if (outcome.decision != Decision::NeedsRerun) {
      res.label = label_for(triple, outcome);
      res.round = round;
      return res;
    }
  }
  // unreachable: the rerun round never yields NeedsRerun
  res.label = FinalLabel::no_agreement();
  res.round = Round::Rerun;
  return res;
}

Json to_json(const ConsensusRecord& r) {
  return Json{{"video_id", r.video_id},
              {"source", r.source},
              {"round", std::string(to_string(r.round))},
              {"status", std::string(to_string(r.label.status()))},
              {"categories", format_categories(r.label.categories())},
              {"no_majority", r.label.no_majority_categories()},
              {"vote_detail", r.vote_detail}};
}

ConsensusRecord consensus_record_from_json(const Json& j) {
  ConsensusRecord r;
  try {
    r.video_id = j.at("video_id").get<std::string>();
    r.source = j.value("source", std::string());
    r.round = parse_round(j.value("round", std::string("initial")));
    auto status = parse_status(j.at("status").get<std::string>());
    CategorySet cats;
    for (const auto& name : text::split(j.value("categories", std::string()), '+')) {
      if (!text::trim(name).empty()) cats.insert(parse_category(name));
    }
    r.label = FinalLabel::make(status, cats, j.value("no_majority", false));
    r.vote_detail = j.value("vote_detail", std::string());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("consensus record: ") + e.what());
  }
  return r;
}

void write_consensus_log(const std::filesystem::path& path, std::span<const ConsensusRecord> records) {
  std::vector<Json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  write_jsonl_file(path, lines);
}

std::vector<ConsensusRecord> read_consensus_log(const std::filesystem::path& path) {
  std::vector<ConsensusRecord> out;
  for (const auto& j : read_jsonl_file(path)) out.push_back(consensus_record_from_json(j));
  return out;
}

std::vector<ConsensusRecord> consense_ballots(std::span<const Ballot> ballots, SourceKind source,
                                              const std::string& source_name,
                                              ConsenseSummary* summary) {
  struct Rounds {
    std::vector<const Ballot*> initial;
    std::vector<const Ballot*> rerun;
  };
  std::vector<std::string> order;
  std::map<std::string, Rounds> by_video;
  for (const auto& b : ballots) {
    auto [it, inserted] = by_video.try_emplace(b.video_id);
    if (inserted) order.push_back(b.video_id);
    (b.round == Round::Initial ? it->second.initial : it->second.rerun).push_back(&b);
  }
  auto take3 = [](const std::vector<const Ballot*>& v) {
    return std::array<Ballot, 3>{*v[0], *v[1], *v[2]};
  };

  std::vector<ConsensusRecord> out;
  ConsenseSummary local;
  for (const auto& vid : order) {
    const auto& rounds = by_video[vid];
    if (rounds.initial.size() < 3) {
      local.skipped.emplace_back(vid, rounds.initial.size());
      continue;
    }
    if (rounds.initial.size() > 3) local.over_covered.emplace_back(vid, rounds.initial.size());
    ConsensusRecord rec;
    rec.video_id = vid;
    rec.source = source_name;
    auto triple = BallotTriple::make(take3(rounds.initial), Round::Initial, source);
    auto outcome = binary_consensus(triple);
    rec.vote_detail = outcome.vote_detail();
    rec.round = Round::Initial;
    if (outcome.decision == Decision::NeedsRerun) {
      if (rounds.rerun.size() >= 3) {
        ++local.reruns_used;
        if (rounds.rerun.size() > 3) local.over_covered.emplace_back(vid, rounds.rerun.size());
        triple = BallotTriple::make(take3(rounds.rerun), Round::Rerun, source);
        outcome = binary_consensus(triple);
        rec.vote_detail += ";" + outcome.vote_detail();
        rec.round = Round::Rerun;
      } else {
        outcome.decision = Decision::NoAgreement;
      }
    }
    rec.label = label_for(triple, outcome);
    out.push_back(std::move(rec));
  }
  if (summary) *summary = std::move(local);
  return out;
}

LabelMap to_label_map(std::span<const ConsensusRecord> records) {
  LabelMap out;
  for (const auto& r : records) out.insert_or_assign(r.video_id, r.label);
  return out;
}

std::size_t apply_removals(std::span<ConsensusRecord> records, const Corpus& corpus) {
  std::size_t changed = 0;
  for (auto& r : records) {
    if (r.label.status() != LabelStatus::Unavailable) continue;
    const auto* v = corpus.find(r.video_id);
    if (v && v->availability == Availability::Removed) {
      r.label = FinalLabel::removed();
      ++changed;
    }
  }
  return changed;
}

LabelMap read_label_file(const std::filesystem::path& path) {
  if (path.extension() == ".jsonl") {
    auto records = read_consensus_log(path);
    return to_label_map(records);
  }
  auto table = CsvTable::read_file(path);
  const auto vid = table.require_column("video_id");
  const auto lab = table.require_column("label");
  LabelMap out;
  for (const auto& row : table.rows()) {
    if (row.size() <= std::max(vid, lab)) throw Error(ErrorKind::SchemaError, "short row in " + path.string());
    out.insert_or_assign(text::trim(row[vid]), parse_label(row[lab]));
  }
  return out;
}

void write_label_csv(std::ostream& out, const LabelMap& labels) {
  CsvWriter w(out);
  w.row({"video_id", "label"});
  for (const auto& [vid, l] : labels) w.row({vid, format_label(l)});
}

}  // namespace harmscan

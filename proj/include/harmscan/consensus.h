#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harmscan/annotators.h"
#include "harmscan/corpus.h"
#include "harmscan/taxonomy.h"

namespace harmscan {

enum class SourceKind : std::uint8_t { Model, Human };
std::string_view to_string(SourceKind s);
SourceKind parse_source_kind(std::string_view s);

enum class Vote : std::uint8_t { Harmful, Harmless, Unavailable, Refuse };
inline constexpr std::array<Vote, 4> kAllVotes = {Vote::Harmful, Vote::Harmless, Vote::Unavailable,
                                                  Vote::Refuse};
std::string_view to_string(Vote v);

// Model sources: refusals, unparseable answers and exhausted transport all
// vote Refuse. Human sources: Unavailable stays Unavailable.
Vote to_vote(const RawVerdict& verdict, SourceKind source);

struct BallotTriple {
  std::string video_id;
  std::array<Ballot, 3> ballots;
  Round round = Round::Initial;
  SourceKind source = SourceKind::Model;

  // Throws InvalidArgument when the ballots name different videos.
  static BallotTriple make(std::array<Ballot, 3> ballots, Round round, SourceKind source);
};

enum class Decision : std::uint8_t { Decided, NeedsRerun, NoAgreement };
std::string_view to_string(Decision d);

struct ConsensusOutcome {
  Decision decision = Decision::NoAgreement;
  // Set only when Decided; Harmful labels carry no categories at this stage.
  std::optional<LabelStatus> status;
  std::array<Vote, 3> votes{};

  std::string vote_detail() const;
};

// Two matching votes among Harmful/Harmless/Unavailable decide. Anything
// else needs a rerun on the initial round and ends in NoAgreement on rerun.
ConsensusOutcome decide_votes(const std::array<Vote, 3>& votes, Round round);
ConsensusOutcome binary_consensus(const BallotTriple& triple);

struct CategoryConsensus {
  CategorySet categories;
  bool no_majority = false;
};

// A category survives when at least two Harmful ballots list it; ballots
// voting anything else contribute nothing.
CategoryConsensus category_consensus(const BallotTriple& triple);

// Final label for a triple whose binary outcome is known.
FinalLabel label_for(const BallotTriple& triple, const ConsensusOutcome& outcome);

struct Resolution {
  FinalLabel label;
  Round round = Round::Initial;  // round that produced the label
  std::vector<Ballot> ballots;
  std::string vote_detail;
  int calls = 0;
};

// credential_index is 1..3.
using AnnotateFn = std::function<Ballot(int credential_index, Round round)>;

// Initial triple, then at most one rerun triple. The three calls of a round
// run concurrently when `concurrent` is set.
Resolution resolve(std::string_view video_id, const AnnotateFn& annotate_fn,
                   SourceKind source = SourceKind::Model, bool concurrent = true);

struct ConsensusRecord {
  std::string video_id;
  std::string source;
  Round round = Round::Initial;
  FinalLabel label;
  std::string vote_detail;
};

Json to_json(const ConsensusRecord& r);
ConsensusRecord consensus_record_from_json(const Json& j);
void write_consensus_log(const std::filesystem::path& path, std::span<const ConsensusRecord> records);
std::vector<ConsensusRecord> read_consensus_log(const std::filesystem::path& path);

struct ConsenseSummary {
  std::vector<std::pair<std::string, std::size_t>> skipped;       // fewer than 3 ballots
  std::vector<std::pair<std::string, std::size_t>> over_covered;  // more than 3, first 3 used
  std::size_t reruns_used = 0;
};

// Rebuilds triples from a ballot log. A video needing a rerun without rerun
// ballots in the log ends in NoAgreement.
std::vector<ConsensusRecord> consense_ballots(std::span<const Ballot> ballots, SourceKind source,
                                              const std::string& source_name,
                                              ConsenseSummary* summary = nullptr);

using LabelMap = std::map<std::string, FinalLabel, std::less<>>;
LabelMap to_label_map(std::span<const ConsensusRecord> records);

// Unavailable becomes Removed for videos the corpus marks Removed.
std::size_t apply_removals(std::span<ConsensusRecord> records, const Corpus& corpus);

// A consensus log (.jsonl) or a CSV with video_id and label columns, the
// label written as status[:cat+cat].
LabelMap read_label_file(const std::filesystem::path& path);
void write_label_csv(std::ostream& out, const LabelMap& labels);

}  // namespace harmscan

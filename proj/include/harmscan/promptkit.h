#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harmscan/corpus.h"
#include "harmscan/taxonomy.h"

namespace harmscan {

inline constexpr int kMaxImageEdge = 768;
inline constexpr std::size_t kPromptFrames = 14;

struct ImagePayload {
  std::string media_type;  // image/jpeg or image/png
  std::string base64;
  int width = 0;
  int height = 0;
};

struct PreparedImages {
  std::vector<ImagePayload> payloads;
  bool degraded = false;
  std::vector<std::string> warnings;
};

// Longest edge scaled down to max_edge, aspect preserved, never upscaled;
// the shorter edge never drops below 1.
std::pair<int, int> fit_within(int width, int height, int max_edge = kMaxImageEdge);

// First 14 frames then the thumbnail. No frames at all yields zero payloads
// and the degraded flag; a missing thumbnail yields 14 with a warning.
// Throws ImageDecodeError naming the first unreadable file.
PreparedImages prepare_images(std::span<const std::filesystem::path> frame_refs,
                              const std::filesystem::path& thumbnail_ref,
                              int max_edge = kMaxImageEdge);

enum class SectionName : std::uint8_t { ImageFrames, TaskAssignment, CodingInstruction, Metadata, Question };
std::string_view to_string(SectionName s);

struct PromptSection {
  SectionName name;
  std::string body;
};

struct PromptEnvelope {
  std::vector<ImagePayload> image_payloads;
  std::vector<PromptSection> sections;
  bool image_less = false;

  const PromptSection* section(SectionName name) const;
};

/// The three fixed text sections. Bodies keep their bracketed header line.
class PromptTemplate {
 public:
  static const PromptTemplate& defaults();
  // Sections start at lines beginning "[Task assignment]",
  // "[Coding Instruction]" and "[Question]"; trailing blank lines are dropped.
  static PromptTemplate parse(std::string_view text);
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& task_assignment() const { return task_; }
  const std::string& coding_instruction() const { return coding_; }
  const std::string& question() const { return question_; }

 private:
  std::string task_;
  std::string coding_;
  std::string question_;
};

std::string render_metadata(const VideoRecord& video);

// Sections in the fixed order ImageFrames, TaskAssignment, CodingInstruction,
// Metadata, Question.
PromptEnvelope assemble_prompt(const VideoRecord& video, PreparedImages images,
                               const PromptTemplate& tmpl = PromptTemplate::defaults());

enum class BinaryStatus : std::uint8_t { Harmful, Harmless };
std::string_view to_string(BinaryStatus b);

struct RawVerdict {
  enum class Kind : std::uint8_t { Classified, Refusal, Unparseable, Unavailable };

  Kind kind = Kind::Unparseable;
  std::optional<BinaryStatus> binary;
  CategorySet categories;
  std::string raw_text;
  // Set when the answer needed coercion: Harmful with no categories, or
  // categories listed alongside Harmless (dropped).
  bool coerced = false;

  static RawVerdict classified(BinaryStatus b, CategorySet cats = {});
  static RawVerdict unavailable(std::string reason = {});

  // Kind, binary and categories only.
  bool same_decision(const RawVerdict& other) const;
};
std::string_view to_string(RawVerdict::Kind k);
RawVerdict::Kind parse_verdict_kind(std::string_view s);

class RefusalPatterns {
 public:
  RefusalPatterns() = default;
  explicit RefusalPatterns(std::vector<std::string> patterns);
  static const RefusalPatterns& defaults();
  static RefusalPatterns load(const std::filesystem::path& path);

  bool matches(std::string_view text) const;

 private:
  std::vector<std::string> patterns_;
};

// Never throws. Grammar: a "1)" line with exactly one of Harmful/Harmless and
// a "2)" line with None or a list of category names or ordinals 1-6.
RawVerdict parse_answer(std::string_view text,
                        const RefusalPatterns& refusals = RefusalPatterns::defaults());

// Emits the two-line answer format for a classified verdict.
std::string render_answer(const RawVerdict& verdict);

}  // namespace harmscan

#include "harmscan/promptkit.h"

#include <cctype>

#include "harmscan/error.h"
#include "harmscan/io.h"

namespace harmscan {

namespace {

constexpr std::string_view kDefaultTemplate =
    R"TMPL([Task assignment]
Your task is to classify YouTube videos as Harmful or Harmless, incorporating the image frames and metadata of a YouTube video. Please classify this video, making sure to reference the [Coding Instruction].

[Coding Instruction]
1. Information Harms (e.g., Fake news, Conspiracy theories, Unverified medical treatments, Unproven scientific myths)
2. Hate and Harassment Harms (e.g., Insult, obscenities, Identity attacks or misrepresentation, Hate speech based on gender, race, religion, disability, sexual orientation)
3. Addictive Harms (e.g., Gameplay, Drug/smoking/alcohol promotion, Gambling videos or promotion)
4. Clickbait Harms (e.g., Clickbait titles - using exaggerated words, "You won't believe," "10 reasons you don't know," "Best/easiest hacks," Get-rich-quick schemes and Fishing financial hacks, Gossip about celebrities)
5. Sexual Harms (e.g., Erotic scenes or images, Depictions of sexual acts and nudity, sexual abuse)
6. Physical Harms (e.g. Self-injury, Eating disorder promotion, Potentially dangerous challenges and pranks, Violent graphic content)

[Question] Your answer should follow this format:
1) Harmful / Harmless
2) Corresponding one or multiple categories IF HARMFUL else None
)TMPL";

constexpr std::string_view kTaskHeader = "[Task assignment]";
constexpr std::string_view kCodingHeader = "[Coding Instruction]";
constexpr std::string_view kQuestionHeader = "[Question]";

std::string strip_trailing_blank_lines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' ||
                        s.back() == '\t')) {
    s.pop_back();
  }
  return s;
}

// Replaces typographic apostrophes and quotes with ASCII ones.
std::string ascii_quotes(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i + 2 < in.size() && static_cast<unsigned char>(in[i]) == 0xE2 &&
        static_cast<unsigned char>(in[i + 1]) == 0x80) {
      auto c = static_cast<unsigned char>(in[i + 2]);
      if (c == 0x98 || c == 0x99) {
        out.push_back('\'');
        i += 2;
        continue;
      }
      if (c == 0x9C || c == 0x9D) {
        out.push_back('"');
        i += 2;
        continue;
      }
    }
    out.push_back(in[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(SectionName s) {
  switch (s) {
    case SectionName::ImageFrames: return "ImageFrames";
    case SectionName::TaskAssignment: return "TaskAssignment";
    case SectionName::CodingInstruction: return "CodingInstruction";
    case SectionName::Metadata: return "Metadata";
    case SectionName::Question: return "Question";
  }
  return "";
}

const PromptSection* PromptEnvelope::section(SectionName name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const PromptTemplate& PromptTemplate::defaults() {
  static const PromptTemplate tmpl = parse(kDefaultTemplate);
  return tmpl;
}

PromptTemplate PromptTemplate::parse(std::string_view body) {
  std::string* current = nullptr;
  PromptTemplate t;
  bool seen[3] = {false, false, false};
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto nl = body.find('\n', pos);
    auto line = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (line.starts_with(kTaskHeader)) {
      current = &t.task_;
      seen[0] = true;
    } else if (line.starts_with(kCodingHeader)) {
      current = &t.coding_;
      seen[1] = true;
    } else if (line.starts_with(kQuestionHeader)) {
      current = &t.question_;
      seen[2] = true;
    }
    if (current) {
      current->append(line);
      current->push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (!seen[0] || !seen[1] || !seen[2]) {
    throw Error(ErrorKind::ConfigError,
                "prompt template needs [Task assignment], [Coding Instruction] and [Question]");
  }
  t.task_ = strip_trailing_blank_lines(std::move(t.task_));
  t.coding_ = strip_trailing_blank_lines(std::move(t.coding_));
  t.question_ = strip_trailing_blank_lines(std::move(t.question_));
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

std::string render_metadata(const VideoRecord& video) {
  std::string out = "[Metadata]\n";
  out += "Title: " + video.title + "\n";
  out += "Channel name: " + video.channel_name + "\n";
  out += "Description: " + video.description + "\n";
  out += "Transcript: " + video.transcript;
  return out;
}

PromptEnvelope assemble_prompt(const VideoRecord& video, PreparedImages images,
                               const PromptTemplate& tmpl) {
  PromptEnvelope env;
  env.image_payloads = std::move(images.payloads);
  env.image_less = env.image_payloads.empty();
  env.sections = {
      {SectionName::ImageFrames, "[Image frames]"},
      {SectionName::TaskAssignment, tmpl.task_assignment()},
      {SectionName::CodingInstruction, tmpl.coding_instruction()},
      {SectionName::Metadata, render_metadata(video)},
      {SectionName::Question, tmpl.question()},
  };
  return env;
}

std::string_view to_string(BinaryStatus b) {
  return b == BinaryStatus::Harmful ? "harmful" : "harmless";
}

RawVerdict RawVerdict::classified(BinaryStatus b, CategorySet cats) {
  RawVerdict v;
  v.kind = Kind::Classified;
  v.binary = b;
  v.categories = b == BinaryStatus::Harmful ? cats : CategorySet{};
  return v;
}

RawVerdict RawVerdict::unavailable(std::string reason) {
  RawVerdict v;
  v.kind = Kind::Unavailable;
  v.raw_text = std::move(reason);
  return v;
}

bool RawVerdict::same_decision(const RawVerdict& o) const {
  return kind == o.kind && binary == o.binary && categories == o.categories;
}

std::string_view to_string(RawVerdict::Kind k) {
  switch (k) {
    case RawVerdict::Kind::Classified: return "classified";
    case RawVerdict::Kind::Refusal: return "refusal";
    case RawVerdict::Kind::Unparseable: return "unparseable";
    case RawVerdict::Kind::Unavailable: return "unavailable";
  }
  return "unparseable";
}

RawVerdict::Kind parse_verdict_kind(std::string_view s) {
  auto k = text::normalize(s);
  if (k == "classified") return RawVerdict::Kind::Classified;
  if (k == "refusal") return RawVerdict::Kind::Refusal;
  if (k == "unparseable") return RawVerdict::Kind::Unparseable;
  if (k == "unavailable") return RawVerdict::Kind::Unavailable;
  throw Error(ErrorKind::SchemaError, "verdict kind '" + std::string(s) + "'");
}

RefusalPatterns::RefusalPatterns(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
  for (auto& p : patterns_) p = text::to_lower(ascii_quotes(p));
}

const RefusalPatterns& RefusalPatterns::defaults() {
  static const RefusalPatterns p({
      "i can't assist",
      "i cannot assist",
      "i can't help",
      "i cannot help",
      "i can't provide",
      "i cannot provide",
      "i can't comply",
      "i cannot comply",
      "i can't classify",
      "i cannot classify",
      "i'm sorry",
      "i am sorry",
      "i'm unable to",
      "i am unable to",
      "i won't be able",
      "unable to assist",
      "unable to process",
  });
  return p;
}

RefusalPatterns RefusalPatterns::load(const std::filesystem::path& path) {
  return RefusalPatterns(read_list_file(path));
}

bool RefusalPatterns::matches(std::string_view body) const {
  auto lowered = text::to_lower(ascii_quotes(body));
  for (const auto& p : patterns_) {
    if (!p.empty() && lowered.find(p) != std::string::npos) return true;
  }
  return false;
}

namespace {

std::string clean_line(std::string_view line) {
  std::string s = text::trim(line);
  // Markdown emphasis and bullets that chat models sometimes add.
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != '*' && c != '`') out.push_back(c);
  }
  out = text::trim(out);
  if (out.starts_with("- ")) out = text::trim(std::string_view(out).substr(2));
  return out;
}

std::string strip_piece(std::string s) {
  // drop parentheticals such as "(e.g., ...)"
  for (;;) {
    auto open = s.find('(');
    if (open == std::string::npos) break;
    auto close = s.find(')', open);
    if (close == std::string::npos) {
      s.erase(open);
      break;
    }
    s.erase(open, close - open + 1);
  }
  s = text::trim(s);
  while (!s.empty() && (s.back() == '.' || s.back() == ':' || s.back() == '!')) s.pop_back();
  s = text::trim(s);
  if (text::starts_with_ci(s, "and ")) s = text::trim(std::string_view(s).substr(4));
  return s;
}

std::optional<HarmCategory> parse_single(std::string_view raw) {
  std::string s = strip_piece(std::string(raw));
  if (s.empty()) return std::nullopt;
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '6') return category_from_ordinal(s[0] - '0');
  // "4. Clickbait Harms" or "4) Clickbait Harms"
  if (s.size() > 2 && s[0] >= '1' && s[0] <= '6' && (s[1] == '.' || s[1] == ')')) {
    auto named = try_parse_category(text::trim(std::string_view(s).substr(2)));
    if (named && ordinal(*named) == s[0] - '0') return named;
    if (text::trim(std::string_view(s).substr(2)).empty()) return category_from_ordinal(s[0] - '0');
    return named;
  }
  return try_parse_category(s);
}

// Resolves a piece that may join several names with "and"/"&".
bool parse_piece(std::string_view piece, CategorySet& out) {
  if (auto c = parse_single(piece)) {
    out.insert(*c);
    return true;
  }
  std::string lowered = text::to_lower(piece);
  for (std::string_view sep : {" and ", " & "}) {
    std::size_t pos = 0;
    while ((pos = lowered.find(sep, pos)) != std::string::npos) {
      CategorySet trial;
      if (parse_piece(piece.substr(0, pos), trial) &&
          parse_piece(piece.substr(pos + sep.size()), trial)) {
        out = out | trial;
        return true;
      }
      pos += 1;
    }
  }
  return false;
}

bool parse_category_line(std::string_view rest, CategorySet& out) {
  std::string s = text::trim(rest);
  while (!s.empty() && s.back() == '.') s.pop_back();
  auto norm = text::normalize(s);
  if (norm.empty() || norm == "none") return true;
  std::string unified = s;
  for (char& c : unified) {
    if (c == ';') c = ',';
  }
  for (const auto& piece : text::split(unified, ',')) {
    // every list item must name a category
    if (!parse_piece(text::trim(piece), out)) return false;
  }
  return true;
}

}  // namespace

RawVerdict parse_answer(std::string_view input, const RefusalPatterns& refusals) {
  RawVerdict v;
  v.raw_text = std::string(input);
  try {
    std::string body = ascii_quotes(input);
    std::vector<std::string> lines;
    for (auto& l : text::split(body, '\n')) lines.push_back(clean_line(l));

    std::size_t first = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].starts_with("1)")) {
        first = i;
        break;
      }
    }
    bool grammar_ok = false;
    if (first < lines.size()) {
      auto rest = text::to_lower(std::string_view(lines[first]).substr(2));
      bool harmful = rest.find("harmful") != std::string::npos;
      bool harmless = rest.find("harmless") != std::string::npos;
      if (harmful != harmless) {
        std::optional<std::string> second;
        for (std::size_t i = first + 1; i < lines.size(); ++i) {
          if (lines[i].starts_with("2)")) {
            second = lines[i].substr(2);
            break;
          }
        }
        CategorySet cats;
        bool cats_ok = !second || parse_category_line(*second, cats);
        if (cats_ok) {
          grammar_ok = true;
          v.kind = RawVerdict::Kind::Classified;
          if (harmful) {
            v.binary = BinaryStatus::Harmful;
            v.categories = cats;
            v.coerced = cats.empty();
          } else {
            v.binary = BinaryStatus::Harmless;
            v.coerced = !cats.empty();
          }
        }
      }
    }
    if (!grammar_ok) {
      v.kind = refusals.matches(body) ? RawVerdict::Kind::Refusal : RawVerdict::Kind::Unparseable;
      v.binary.reset();
      v.categories = {};
      v.coerced = false;
    }
  } catch (...) {
    v.kind = RawVerdict::Kind::Unparseable;
    v.binary.reset();
    v.categories = {};
  }
  return v;
}

std::string render_answer(const RawVerdict& verdict) {
  if (verdict.kind != RawVerdict::Kind::Classified || !verdict.binary) return verdict.raw_text;
  if (*verdict.binary == BinaryStatus::Harmless) return "1) Harmless\n2) None";
  std::string out = "1) Harmful\n2) ";
  if (verdict.categories.empty()) return out + "None";
  bool firstc = true;
  for (auto c : verdict.categories.members()) {
    if (!firstc) out += ", ";
    out += display_name(c);
    firstc = false;
  }
  return out;
}

}  // namespace harmscan

#include "harmscan/taxonomy.h"

#include <bit>
#include <map>

#include "harmscan/error.h"
#include "harmscan/io.h"

namespace harmscan {

namespace {

struct CategoryInfo {
  std::string_view display;
  std::string_view short_name;
  std::array<std::string_view, 4> subcategories;
  std::size_t subcategory_count;
};

constexpr std::array<CategoryInfo, kCategoryCount> kInfo = {{
    {"Information Harms", "info",
     {"Fake news", "Conspiracy theories", "Unverified medical treatments",
      "Unproven scientific myths"},
     4},
    {"Hate and Harassment Harms", "hate",
     {"Insults and obscenities", "Identity attacks or misrepresentation",
      "Hate speech based on gender, race, ethnicity, age, religion, political ideology, "
      "disability, or sexual orientation",
      ""},
     3},
    {"Addictive Harms", "addict",
     {"Online gameplay", "Drug/smoking/alcohol promotion", "Gambling-play videos", ""}, 3},
    {"Clickbait Harms", "click",
     {"Clickbaitive titles", "Get-rich-quick schemes or fishing financial hacks",
      "Gossip promotion", ""},
     3},
    {"Sexual Harms", "sex",
     {"Erotic scenes or images", "Depictions of sexual acts and nudity", "Sexual abuse", ""},
     3},
    {"Physical Harms", "phys",
     {"Self-injury and suicide", "Eating disorder promotion", "Dangerous challenges and pranks",
      ""},
     3},
}};

// Keys are normalized (lowercase, single spaces, '&' -> "and") with the
// trailing "harm"/"harms" already removed.
const std::map<std::string, HarmCategory, std::less<>>& alias_table() {
  static const std::map<std::string, HarmCategory, std::less<>> table = {
      {"information", HarmCategory::Information},
      {"informational", HarmCategory::Information},
      {"info", HarmCategory::Information},
      {"misinformation", HarmCategory::Information},
      {"hate and harassment", HarmCategory::HateHarassment},
      {"hate and harrassment", HarmCategory::HateHarassment},
      {"hate", HarmCategory::HateHarassment},
      {"harassment", HarmCategory::HateHarassment},
      {"hateharassment", HarmCategory::HateHarassment},
      {"hate/harassment", HarmCategory::HateHarassment},
      {"addictive", HarmCategory::Addictive},
      {"addiction", HarmCategory::Addictive},
      {"addict", HarmCategory::Addictive},
      {"clickbait", HarmCategory::Clickbait},
      {"click", HarmCategory::Clickbait},
      {"click bait", HarmCategory::Clickbait},
      {"click-bait", HarmCategory::Clickbait},
      {"sexual", HarmCategory::Sexual},
      {"sex", HarmCategory::Sexual},
      {"physical", HarmCategory::Physical},
      {"phys", HarmCategory::Physical},
  };
  return table;
}

std::string alias_key(std::string_view name) {
  std::string spaced;
  spaced.reserve(name.size() + 8);
  for (char c : name) {
    if (c == '&') {
      spaced += " and ";
    } else {
      spaced.push_back(c);
    }
  }
  std::string s = text::normalize(spaced);
  for (std::string_view suffix : {" harms", " harm"}) {
    if (s.size() > suffix.size() && s.ends_with(suffix)) {
      s.erase(s.size() - suffix.size());
      break;
    }
  }
  return s;
}

}  // namespace

HarmCategory category_from_ordinal(int ord) {
  if (ord < 1 || ord > static_cast<int>(kCategoryCount)) {
    throw Error(ErrorKind::UnknownCategory, "ordinal " + std::to_string(ord));
  }
  return static_cast<HarmCategory>(ord);
}

std::string_view display_name(HarmCategory c) { return kInfo[index_of(c)].display; }

std::string_view short_name(HarmCategory c) { return kInfo[index_of(c)].short_name; }

std::span<const std::string_view> subcategory_examples(HarmCategory c) {
  const auto& info = kInfo[index_of(c)];
  return {info.subcategories.data(), info.subcategory_count};
}

std::optional<HarmCategory> try_parse_category(std::string_view name) {
  std::string key = alias_key(name);
  if (key.empty()) return std::nullopt;
  const auto& table = alias_table();
  if (auto it = table.find(key); it != table.end()) return it->second;
  return std::nullopt;
}

HarmCategory parse_category(std::string_view name) {
  if (auto c = try_parse_category(name)) return *c;
  throw Error(ErrorKind::UnknownCategory, std::string(name));
}

CategorySet::CategorySet(std::initializer_list<HarmCategory> members) {
  for (auto c : members) insert(c);
}

CategorySet CategorySet::from_mask(std::uint8_t mask) {
  CategorySet s;
  s.mask_ = static_cast<std::uint8_t>(mask & 0x3F);
  return s;
}

CategorySet CategorySet::all() { return from_mask(0x3F); }

std::size_t CategorySet::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(mask_));
}

bool CategorySet::contains(HarmCategory c) const noexcept {
  return (mask_ >> index_of(c)) & 1U;
}

void CategorySet::insert(HarmCategory c) noexcept {
  mask_ = static_cast<std::uint8_t>(mask_ | (1U << index_of(c)));
}

void CategorySet::erase(HarmCategory c) noexcept {
  mask_ = static_cast<std::uint8_t>(mask_ & ~(1U << index_of(c)));
}

std::vector<HarmCategory> CategorySet::members() const {
  std::vector<HarmCategory> out;
  for (auto c : kAllCategories) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

std::string encode_bitstring(const CategorySet& categories) {
  std::string bits(kCategoryCount, '0');
  for (auto c : kAllCategories) {
    if (categories.contains(c)) bits[index_of(c)] = '1';
  }
  return bits;
}

CategorySet decode_bitstring(std::string_view bits) {
  if (bits.size() != kCategoryCount) {
    throw Error(ErrorKind::MalformedBitstring, "expected 6 characters, got '" +
                                                   std::string(bits) + "'");
  }
  CategorySet out;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (bits[i] == '1') {
      out.insert(kAllCategories[i]);
    } else if (bits[i] != '0') {
      throw Error(ErrorKind::MalformedBitstring, "bad character in '" + std::string(bits) + "'");
    }
  }
  return out;
}

std::string_view to_string(LabelStatus s) {
  switch (s) {
    case LabelStatus::Harmful: return "harmful";
    case LabelStatus::Harmless: return "harmless";
    case LabelStatus::Unavailable: return "unavailable";
    case LabelStatus::NoAgreement: return "no_agreement";
    case LabelStatus::Removed: return "removed";
  }
  return "harmless";
}

std::string_view display_name(LabelStatus s) {
  switch (s) {
    case LabelStatus::Harmful: return "Harmful";
    case LabelStatus::Harmless: return "Harmless";
    case LabelStatus::Unavailable: return "Unavailable";
    case LabelStatus::NoAgreement: return "No agreement";
    case LabelStatus::Removed: return "Removed";
  }
  return "Harmless";
}

LabelStatus parse_status(std::string_view s) {
  std::string key = text::normalize(s);
  for (char& c : key) {
    if (c == ' ' || c == '-') c = '_';
  }
  if (key == "harmful") return LabelStatus::Harmful;
  if (key == "harmless") return LabelStatus::Harmless;
  if (key == "unavailable") return LabelStatus::Unavailable;
  if (key == "no_agreement" || key == "noagreement") return LabelStatus::NoAgreement;
  if (key == "removed") return LabelStatus::Removed;
  throw Error(ErrorKind::InvalidLabel, "unknown status '" + std::string(s) + "'");
}

FinalLabel FinalLabel::make(LabelStatus status, CategorySet categories, bool no_majority) {
  if (status != LabelStatus::Harmful && (!categories.empty() || no_majority)) {
    throw Error(ErrorKind::InvalidLabel,
                std::string(to_string(status)) + " label cannot carry categories");
  }
  if (no_majority && !categories.empty()) {
    throw Error(ErrorKind::InvalidLabel, "no-majority flag with non-empty categories");
  }
  return FinalLabel(status, categories, no_majority);
}

FinalLabel FinalLabel::harmful(CategorySet categories) {
  return make(LabelStatus::Harmful, categories, false);
}

FinalLabel FinalLabel::harmful_no_majority() { return make(LabelStatus::Harmful, {}, true); }

std::string format_categories(const CategorySet& categories, char sep) {
  std::string out;
  for (auto c : categories.members()) {
    if (!out.empty()) out.push_back(sep);
    out += short_name(c);
  }
  return out;
}

std::string format_label(const FinalLabel& label) {
  std::string out(to_string(label.status()));
  if (label.no_majority_categories()) {
    out += ":no_majority";
  } else if (!label.categories().empty()) {
    out += ':';
    out += format_categories(label.categories());
  }
  return out;
}

FinalLabel parse_label(std::string_view text_in) {
  std::string body = text::trim(text_in);
  auto colon = body.find(':');
  LabelStatus status = parse_status(body.substr(0, colon));
  if (colon == std::string::npos) return FinalLabel::make(status);
  std::string rest = text::trim(std::string_view(body).substr(colon + 1));
  if (text::to_lower(rest) == "no_majority") return FinalLabel::make(status, {}, true);
  CategorySet cats;
  for (const auto& part : text::split(rest, '+')) {
    auto name = text::trim(part);
    if (name.empty()) continue;
    auto c = try_parse_category(name);
    if (!c) throw Error(ErrorKind::InvalidLabel, "unknown category '" + name + "'");
    cats.insert(*c);
  }
  return FinalLabel::make(status, cats);
}

}  // namespace harmscan

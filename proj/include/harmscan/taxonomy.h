#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace harmscan {

// Ordinals follow the numbered list shown to annotators in the coding
// instruction; the six-bit encoding uses the same order.
enum class HarmCategory : std::uint8_t {
  Information = 1,
  HateHarassment = 2,
  Addictive = 3,
  Clickbait = 4,
  Sexual = 5,
  Physical = 6,
};

inline constexpr std::size_t kCategoryCount = 6;

inline constexpr std::array<HarmCategory, kCategoryCount> kAllCategories = {
    HarmCategory::Information, HarmCategory::HateHarassment, HarmCategory::Addictive,
    HarmCategory::Clickbait,   HarmCategory::Sexual,         HarmCategory::Physical,
};

constexpr int ordinal(HarmCategory c) noexcept { return static_cast<int>(c); }
constexpr std::size_t index_of(HarmCategory c) noexcept {
  return static_cast<std::size_t>(c) - 1;
}

// Throws UnknownCategory outside 1..6.
HarmCategory category_from_ordinal(int ordinal);

std::string_view display_name(HarmCategory c);
// info, hate, addict, click, sex, phys
std::string_view short_name(HarmCategory c);
std::span<const std::string_view> subcategory_examples(HarmCategory c);

// Case-insensitive match against canonical names, short names and aliases;
// whitespace is collapsed, '&' reads as "and", a trailing "harm(s)" is optional.
HarmCategory parse_category(std::string_view name);
std::optional<HarmCategory> try_parse_category(std::string_view name);

/// Set of harm categories stored as a six-bit mask (bit i-1 <-> ordinal i).
/// Iteration is always in ordinal order.
class CategorySet {
 public:
  constexpr CategorySet() = default;
  CategorySet(std::initializer_list<HarmCategory> members);

  static CategorySet from_mask(std::uint8_t mask);
  static CategorySet all();

  std::uint8_t mask() const noexcept { return mask_; }
  bool empty() const noexcept { return mask_ == 0; }
  std::size_t size() const noexcept;
  bool contains(HarmCategory c) const noexcept;
  void insert(HarmCategory c) noexcept;
  void erase(HarmCategory c) noexcept;
  std::vector<HarmCategory> members() const;

  bool intersects(const CategorySet& other) const noexcept { return (mask_ & other.mask_) != 0; }
  bool is_subset_of(const CategorySet& other) const noexcept {
    return (mask_ & ~other.mask_) == 0;
  }
  CategorySet operator|(const CategorySet& o) const noexcept { return from_mask(mask_ | o.mask_); }
  CategorySet operator&(const CategorySet& o) const noexcept { return from_mask(mask_ & o.mask_); }

  friend bool operator==(const CategorySet&, const CategorySet&) = default;

 private:
  std::uint8_t mask_ = 0;
};

std::string encode_bitstring(const CategorySet& categories);
// Throws MalformedBitstring unless the input is exactly six '0'/'1' characters.
CategorySet decode_bitstring(std::string_view bits);

enum class LabelStatus : std::uint8_t { Harmful, Harmless, Unavailable, NoAgreement, Removed };

inline constexpr std::array<LabelStatus, 5> kAllStatuses = {
    LabelStatus::Harmful, LabelStatus::Harmless, LabelStatus::Unavailable,
    LabelStatus::NoAgreement, LabelStatus::Removed};

// harmful, harmless, unavailable, no_agreement, removed
std::string_view to_string(LabelStatus s);
std::string_view display_name(LabelStatus s);
LabelStatus parse_status(std::string_view s);

// Merges Removed into Unavailable for statistics that do not separate them.
constexpr LabelStatus merge_removed(LabelStatus s) noexcept {
  return s == LabelStatus::Removed ? LabelStatus::Unavailable : s;
}

/// Consensus outcome for one video from one source.
class FinalLabel {
 public:
  FinalLabel() = default;

  // Validates: categories or the no-majority flag only with Harmful, and the
  // flag only with an empty category set. Throws InvalidLabel otherwise.
  static FinalLabel make(LabelStatus status, CategorySet categories = {},
                         bool no_majority_categories = false);

  static FinalLabel harmful(CategorySet categories);
  static FinalLabel harmful_no_majority();
  static FinalLabel harmless() { return make(LabelStatus::Harmless); }
  static FinalLabel unavailable() { return make(LabelStatus::Unavailable); }
  static FinalLabel no_agreement() { return make(LabelStatus::NoAgreement); }
  static FinalLabel removed() { return make(LabelStatus::Removed); }

  LabelStatus status() const noexcept { return status_; }
  const CategorySet& categories() const noexcept { return categories_; }
  bool no_majority_categories() const noexcept { return no_majority_; }

  friend bool operator==(const FinalLabel&, const FinalLabel&) = default;

 private:
  FinalLabel(LabelStatus s, CategorySet c, bool flag)
      : status_(s), categories_(c), no_majority_(flag) {}

  LabelStatus status_ = LabelStatus::Harmless;
  CategorySet categories_;
  bool no_majority_ = false;
};

// "harmful:info+click", "harmful:no_majority", "harmful", "harmless", ...
std::string format_label(const FinalLabel& label);
FinalLabel parse_label(std::string_view text);
std::string format_categories(const CategorySet& categories, char sep = '+');

}  // namespace harmscan

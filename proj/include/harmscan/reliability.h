#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "harmscan/consensus.h"
#include "harmscan/kernels.h"

namespace harmscan {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

// Holsti: share of shared videos with equal status. Throws EmptyOverlap.
Rational percentage_agreement(const LabelMap& a, const LabelMap& b);

struct CategoryAgreement {
  HarmCategory category = HarmCategory::Information;
  std::optional<Rational> ratio;  // both / either; nullopt when either == 0
  std::int64_t both = 0;
  std::int64_t either = 0;
};

// Over shared videos; a category counts as assigned only on Harmful labels.
std::array<CategoryAgreement, kCategoryCount> per_category_agreement(const LabelMap& a, const LabelMap& b);

// Nominal codes, one per item per coder. Throws LengthMismatch,
// InvalidArgument on no items, DegenerateMarginals when p_e = 1.
Rational cohen_kappa(std::span<const int> a, std::span<const int> b);

// Nominal class per video: status plus, for Harmful, the exact category set.
Rational cohen_kappa(const LabelMap& a, const LabelMap& b);
// One binary kappa per category (assigned or not); nullopt when degenerate.
std::array<std::optional<Rational>, kCategoryCount> cohen_kappa_per_category(const LabelMap& a,
                                                                              const LabelMap& b);

// codes is coders x items row-major with -1 for missing. Throws TooFewPairs
// when no item has two codings and DegenerateMarginals when only one value
// occurs among pairable codings.
Rational krippendorff_alpha(std::span<const int> codes, int coders, int values,
                            kernels::Exec exec = kernels::Exec::Auto);

// One row per source, one column per video in the union; binary status
// codes with anything but Harmful/Harmless left missing.
struct CodeMatrix {
  std::vector<int> codes;
  int coders = 0;
  int values = 2;
  std::vector<std::string> items;
};
CodeMatrix binary_code_matrix(std::span<const LabelMap* const> sources);

}  // namespace harmscan

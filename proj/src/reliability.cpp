#include "harmscan/reliability.h"

#include <map>
#include <set>

#include "harmscan/error.h"

namespace harmscan {

namespace {

template <typename F>
void for_shared(const LabelMap& a, const LabelMap& b, F&& f) {
  for (const auto& [vid, la] : a) {
    auto it = b.find(vid);
    if (it != b.end()) f(la, it->second);
  }
}

bool assigns(const FinalLabel& l, HarmCategory c) {
  return l.status() == LabelStatus::Harmful && l.categories().contains(c);
}

int set_class(const FinalLabel& l) {
  const int mask = l.status() == LabelStatus::Harmful ? l.categories().mask() : 0;
  return static_cast<int>(l.status()) * 64 + mask;
}

}  // namespace

Rational percentage_agreement(const LabelMap& a, const LabelMap& b) {
  std::int64_t n = 0, same = 0;
  for_shared(a, b, [&](const FinalLabel& x, const FinalLabel& y) {
    ++n;
    same += x.status() == y.status();
  });
  if (n == 0) throw Error(ErrorKind::EmptyOverlap, "no shared videos");
  return {same, n};
}

std::array<CategoryAgreement, kCategoryCount> per_category_agreement(const LabelMap& a, const LabelMap& b) {
  std::array<CategoryAgreement, kCategoryCount> out{};
  for (auto c : kAllCategories) out[index_of(c)].category = c;
  for_shared(a, b, [&](const FinalLabel& x, const FinalLabel& y) {
    for (auto c : kAllCategories) {
      const bool ax = assigns(x, c), ay = assigns(y, c);
      auto& slot = out[index_of(c)];
      slot.either += ax || ay;
      slot.both += ax && ay;
    }
  });
  for (auto& slot : out) {
    if (slot.either > 0) slot.ratio = Rational(slot.both, slot.either);
  }
  return out;
}

Rational cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "kappa inputs differ in length");
  if (a.empty()) throw Error(ErrorKind::InvalidArgument, "kappa needs at least one item");
  std::map<int, std::pair<std::int64_t, std::int64_t>> marg;
  std::int64_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++marg[a[i]].first;
    ++marg[b[i]].second;
    agree += a[i] == b[i];
  }
  const auto n = static_cast<std::int64_t>(a.size());
  std::int64_t chance = 0;
  for (const auto& [code, m] : marg) chance += m.first * m.second;
  // kappa = (n*agree - chance) / (n^2 - chance)
  if (chance == n * n) throw Error(ErrorKind::DegenerateMarginals, "chance agreement is 1");
  return {n * agree - chance, n * n - chance};
}

Rational cohen_kappa(const LabelMap& a, const LabelMap& b) {
  std::vector<int> x, y;
  for_shared(a, b, [&](const FinalLabel& la, const FinalLabel& lb) {
    x.push_back(set_class(la));
    y.push_back(set_class(lb));
  });
  if (x.empty()) throw Error(ErrorKind::EmptyOverlap, "no shared videos");
  return cohen_kappa(x, y);
}

std::array<std::optional<Rational>, kCategoryCount> cohen_kappa_per_category(const LabelMap& a,
                                                                              const LabelMap& b) {
  std::array<std::optional<Rational>, kCategoryCount> out{};
  for (auto c : kAllCategories) {
    std::vector<int> x, y;
    for_shared(a, b, [&](const FinalLabel& la, const FinalLabel& lb) {
      x.push_back(assigns(la, c));
      y.push_back(assigns(lb, c));
    });
    if (x.empty()) throw Error(ErrorKind::EmptyOverlap, "no shared videos");
    try {
      out[index_of(c)] = cohen_kappa(x, y);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateMarginals) throw;
    }
  }
  return out;
}

Rational krippendorff_alpha(std::span<const int> codes, int coders, int values, kernels::Exec exec) {
  if (coders < 2) throw Error(ErrorKind::InvalidArgument, "alpha needs at least two coders");
  auto t = kernels::tally_coincidences(codes, coders, values, exec);
  if (t.pairable_units == 0) throw Error(ErrorKind::TooFewPairs, "no item has two codings");

  std::vector<Rational> o(static_cast<std::size_t>(values) * values, Rational(0));
  for (int m = 2; m <= coders; ++m) {
    for (int c = 0; c < values; ++c) {
      for (int k = 0; k < values; ++k) {
        const auto w = t.at(m, c, k);
        if (w) o[c * values + k] += Rational(w, m - 1);
      }
    }
  }
  std::vector<Rational> nc(values, Rational(0));
  Rational n(0), observed(0);
  for (int c = 0; c < values; ++c) {
    for (int k = 0; k < values; ++k) {
      nc[c] += o[c * values + k];
      if (c != k) observed += o[c * values + k];
    }
    n += nc[c];
  }
  Rational expected(0);
  for (int c = 0; c < values; ++c) {
    for (int k = 0; k < values; ++k) {
      if (c != k) expected += nc[c] * nc[k];
    }
  }
  if (expected == Rational(0)) throw Error(ErrorKind::DegenerateMarginals, "only one value among pairable codings");
  return Rational(1) - (n - 1) * observed / expected;
}

CodeMatrix binary_code_matrix(std::span<const LabelMap* const> sources) {
  CodeMatrix m;
  std::set<std::string> ids;
  for (const auto* s : sources) {
    for (const auto& [vid, l] : *s) ids.insert(vid);
  }
  m.items.assign(ids.begin(), ids.end());
  m.coders = static_cast<int>(sources.size());
  m.codes.assign(static_cast<std::size_t>(m.coders) * m.items.size(), -1);
  for (int a = 0; a < m.coders; ++a) {
    for (std::size_t u = 0; u < m.items.size(); ++u) {
      auto it = sources[a]->find(m.items[u]);
      if (it == sources[a]->end()) continue;
      const auto s = it->second.status();
      if (s == LabelStatus::Harmful) m.codes[a * m.items.size() + u] = 1;
      else if (s == LabelStatus::Harmless) m.codes[a * m.items.size() + u] = 0;
    }
  }
  return m;
}

}  // namespace harmscan

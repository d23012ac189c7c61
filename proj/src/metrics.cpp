#include "harmscan/metrics.h"

#include <cmath>

#include "harmscan/error.h"

namespace harmscan {

std::string_view to_string(EvalMode m) { return m == EvalMode::Binary ? "binary" : "multilabel"; }

EvalMode parse_eval_mode(std::string_view s) {
  auto k = text::normalize(s);
  if (k == "binary") return EvalMode::Binary;
  if (k == "multilabel" || k == "multi-label") return EvalMode::MultiLabel;
  throw Error(ErrorKind::InvalidArgument, "mode must be binary or multilabel");
}

namespace {

bool binary_ok(LabelStatus s) { return s == LabelStatus::Harmful || s == LabelStatus::Harmless; }

bool pred_ok_multilabel(LabelStatus s) {
  return s != LabelStatus::Unavailable && s != LabelStatus::NoAgreement && s != LabelStatus::Removed;
}

// Harmful predictions contribute their categories; anything else is empty.
std::uint8_t effective_mask(const FinalLabel& l) {
  return l.status() == LabelStatus::Harmful ? l.categories().mask() : 0;
}

std::optional<double> mean_of(std::initializer_list<std::optional<double>> xs, int& excluded) {
  double sum = 0;
  int n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    } else {
      ++excluded;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

template <std::size_t N>
std::optional<double> mean_of(const std::array<std::optional<double>, N>& xs, int& excluded) {
  double sum = 0;
  int n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    } else {
      ++excluded;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

ComparableSet filter_comparable(const LabelMap& gold, const LabelMap& pred, EvalMode mode) {
  ComparableSet out;
  for (const auto& [vid, g] : gold) {
    auto it = pred.find(vid);
    if (it == pred.end()) {
      ++out.missing_pred;
      continue;
    }
    const auto& p = it->second;
    bool keep = mode == EvalMode::Binary
                    ? binary_ok(g.status()) && binary_ok(p.status())
                    : g.status() == LabelStatus::Harmful && !g.categories().empty() &&
                          pred_ok_multilabel(p.status());
    if (keep) out.pairs.push_back({vid, g, p});
    else ++out.excluded;
  }
  for (const auto& [vid, p] : pred) {
    if (!gold.contains(vid)) ++out.missing_gold;
  }
  return out;
}

AgreementStat AgreementStat::from_mean(double mean, std::int64_t n) {
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "agreement needs n > 0");
  if (mean < 0 || mean > 1) throw Error(ErrorKind::InvalidArgument, "agreement mean outside [0,1]");
  return {mean, std::sqrt(mean * (1 - mean) / static_cast<double>(n)), n};
}

AgreementStat AgreementStat::from_counts(std::int64_t successes, std::int64_t n) {
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "agreement needs n > 0");
  return from_mean(static_cast<double>(successes) / static_cast<double>(n), n);
}

std::optional<double> safe_ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

ClassScores class_scores(const ConfusionCounts& c) {
  ClassScores s;
  s.precision = safe_ratio(c.tp, c.tp + c.fp);
  s.recall = safe_ratio(c.tp, c.tp + c.fn);
  s.f1 = safe_ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  s.support = c.tp + c.fn;
  return s;
}

BinaryBlock binary_metrics_from_counts(const ConfusionCounts& c) {
  BinaryBlock b;
  b.counts = c;
  const std::int64_t n = c.total();
  b.accuracy = safe_ratio(c.tp + c.tn, n);
  b.sensitivity = safe_ratio(c.tp, c.tp + c.fn);
  b.specificity = safe_ratio(c.tn, c.tn + c.fp);
  b.harmful = class_scores(c);
  // Harmless as the positive class swaps the roles of the cells.
  b.harmless = class_scores({c.tn, c.tp, c.fn, c.fp});
  b.macro_precision = mean_of({b.harmful.precision, b.harmless.precision}, b.undefined_excluded);
  b.macro_recall = mean_of({b.harmful.recall, b.harmless.recall}, b.undefined_excluded);
  b.macro_f1 = mean_of({b.harmful.f1, b.harmless.f1}, b.undefined_excluded);
  if (n > 0) b.agreement = AgreementStat::from_counts(c.tp + c.tn, n);
  return b;
}

BinaryBlock binary_metrics(std::span<const ComparablePair> pairs, kernels::Exec exec) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "binary metrics need at least one pair");
  std::vector<std::uint8_t> g(pairs.size()), p(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    g[i] = pairs[i].gold.status() == LabelStatus::Harmful;
    p[i] = pairs[i].pred.status() == LabelStatus::Harmful;
  }
  return binary_metrics_from_counts(kernels::tally_binary(g, p, exec));
}

MultilabelBlock multilabel_metrics_from_tally(const kernels::CategoryTally& t) {
  MultilabelBlock m;
  m.n = t.n;
  std::array<std::optional<double>, kCategoryCount> ps, rs, fs;
  ConfusionCounts sum;
  for (auto c : kAllCategories) {
    const auto i = index_of(c);
    auto& slot = m.per_category[i];
    slot.category = c;
    slot.counts = t.per_category[i];
    slot.scores = class_scores(slot.counts);
    ps[i] = slot.scores.precision;
    rs[i] = slot.scores.recall;
    fs[i] = slot.scores.f1;
    sum.tp += slot.counts.tp;
    sum.tn += slot.counts.tn;
    sum.fp += slot.counts.fp;
    sum.fn += slot.counts.fn;
  }
  m.macro_precision = mean_of(ps, m.undefined_excluded);
  m.macro_recall = mean_of(rs, m.undefined_excluded);
  m.macro_f1 = mean_of(fs, m.undefined_excluded);
  m.subset_accuracy = safe_ratio(t.exact_matches, t.n);
  m.micro_sensitivity = safe_ratio(sum.tp, sum.tp + sum.fn);
  m.micro_specificity = safe_ratio(sum.tn, sum.tn + sum.fp);
  m.micro_accuracy = safe_ratio(sum.tp + sum.tn, sum.total());
  if (t.n > 0) m.agreement = AgreementStat::from_counts(t.concurrent, t.n);
  return m;
}

MultilabelBlock multilabel_metrics(std::span<const ComparablePair> pairs, kernels::Exec exec) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "multi-label metrics need at least one pair");
  std::vector<std::uint8_t> g(pairs.size()), p(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    g[i] = effective_mask(pairs[i].gold);
    p[i] = effective_mask(pairs[i].pred);
  }
  return multilabel_metrics_from_tally(kernels::tally_categories(g, p, exec));
}

std::vector<std::uint8_t> concurrence_vector(std::span<const ComparablePair> pairs) {
  std::vector<std::uint8_t> out;
  out.reserve(pairs.size());
  for (const auto& pr : pairs) out.push_back((effective_mask(pr.gold) & effective_mask(pr.pred)) != 0);
  return out;
}

AgreementStat concurrence_agreement(std::span<const ComparablePair> pairs) {
  auto v = concurrence_vector(pairs);
  std::int64_t hits = 0;
  for (auto x : v) hits += x;
  return AgreementStat::from_counts(hits, static_cast<std::int64_t>(v.size()));
}

MetricsReport evaluate(const LabelMap& gold, const LabelMap& pred, std::string gold_source,
                       std::string pred_source) {
  MetricsReport r;
  r.gold_source = std::move(gold_source);
  r.pred_source = std::move(pred_source);
  auto bin = filter_comparable(gold, pred, EvalMode::Binary);
  auto ml = filter_comparable(gold, pred, EvalMode::MultiLabel);
  r.n_binary = bin.pairs.size();
  r.n_multilabel = ml.pairs.size();
  r.dropped_binary = bin.excluded + bin.missing_pred;
  r.dropped_multilabel = ml.excluded + ml.missing_pred;
  if (!bin.pairs.empty()) r.binary = binary_metrics(bin.pairs);
  if (!ml.pairs.empty()) r.multilabel = multilabel_metrics(ml.pairs);
  return r;
}

}  // namespace harmscan

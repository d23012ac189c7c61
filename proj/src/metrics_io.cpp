#include <fstream>

#include "harmscan/error.h"
#include "harmscan/metrics.h"

namespace harmscan {

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json counts_json(const ConfusionCounts& c) {
  return Json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

ConfusionCounts counts_from(const Json& j) {
  return {j.at("tp").get<std::int64_t>(), j.at("tn").get<std::int64_t>(), j.at("fp").get<std::int64_t>(),
          j.at("fn").get<std::int64_t>()};
}

Json scores_json(const ClassScores& s) {
  return Json{{"precision", opt(s.precision)}, {"recall", opt(s.recall)}, {"f1", opt(s.f1)},
              {"support", s.support}};
}

ClassScores scores_from(const Json& j) {
  return {get_opt(j, "precision"), get_opt(j, "recall"), get_opt(j, "f1"),
          j.at("support").get<std::int64_t>()};
}

Json agreement_json(const AgreementStat& a) { return Json{{"mean", a.mean}, {"se", a.se}, {"n", a.n}}; }

AgreementStat agreement_from(const Json& j) {
  return {j.at("mean").get<double>(), j.at("se").get<double>(), j.at("n").get<std::int64_t>()};
}

Json binary_json(const BinaryBlock& b) {
  return Json{{"counts", counts_json(b.counts)},
              {"accuracy", opt(b.accuracy)},
              {"sensitivity", opt(b.sensitivity)},
              {"specificity", opt(b.specificity)},
              {"harmful", scores_json(b.harmful)},
              {"harmless", scores_json(b.harmless)},
              {"macro_precision", opt(b.macro_precision)},
              {"macro_recall", opt(b.macro_recall)},
              {"macro_f1", opt(b.macro_f1)},
              {"agreement", agreement_json(b.agreement)},
              {"undefined_excluded", b.undefined_excluded}};
}

BinaryBlock binary_from(const Json& j) {
  BinaryBlock b;
  b.counts = counts_from(j.at("counts"));
  b.accuracy = get_opt(j, "accuracy");
  b.sensitivity = get_opt(j, "sensitivity");
  b.specificity = get_opt(j, "specificity");
  b.harmful = scores_from(j.at("harmful"));
  b.harmless = scores_from(j.at("harmless"));
  b.macro_precision = get_opt(j, "macro_precision");
  b.macro_recall = get_opt(j, "macro_recall");
  b.macro_f1 = get_opt(j, "macro_f1");
  b.agreement = agreement_from(j.at("agreement"));
  b.undefined_excluded = j.value("undefined_excluded", 0);
  return b;
}

Json multilabel_json(const MultilabelBlock& m) {
  Json cats = Json::array();
  for (const auto& c : m.per_category) {
    cats.push_back(Json{{"category", std::string(short_name(c.category))},
                        {"counts", counts_json(c.counts)},
                        {"scores", scores_json(c.scores)}});
  }
  return Json{{"per_category", cats},
              {"macro_precision", opt(m.macro_precision)},
              {"macro_recall", opt(m.macro_recall)},
              {"macro_f1", opt(m.macro_f1)},
              {"subset_accuracy", opt(m.subset_accuracy)},
              {"micro_sensitivity", opt(m.micro_sensitivity)},
              {"micro_specificity", opt(m.micro_specificity)},
              {"micro_accuracy", opt(m.micro_accuracy)},
              {"agreement", agreement_json(m.agreement)},
              {"n", m.n},
              {"undefined_excluded", m.undefined_excluded}};
}

MultilabelBlock multilabel_from(const Json& j) {
  MultilabelBlock m;
  const auto& cats = j.at("per_category");
  if (!cats.is_array() || cats.size() != kCategoryCount) {
    throw Error(ErrorKind::SchemaError, "per_category must list six categories");
  }
  for (const auto& c : cats) {
    auto cat = parse_category(c.at("category").get<std::string>());
    auto& slot = m.per_category[index_of(cat)];
    slot.category = cat;
    slot.counts = counts_from(c.at("counts"));
    slot.scores = scores_from(c.at("scores"));
  }
  m.macro_precision = get_opt(j, "macro_precision");
  m.macro_recall = get_opt(j, "macro_recall");
  m.macro_f1 = get_opt(j, "macro_f1");
  m.subset_accuracy = get_opt(j, "subset_accuracy");
  m.micro_sensitivity = get_opt(j, "micro_sensitivity");
  m.micro_specificity = get_opt(j, "micro_specificity");
  m.micro_accuracy = get_opt(j, "micro_accuracy");
  m.agreement = agreement_from(j.at("agreement"));
  m.n = j.at("n").get<std::int64_t>();
  m.undefined_excluded = j.value("undefined_excluded", 0);
  return m;
}

std::string cell(const std::optional<double>& v) { return v ? format_fixed(*v, 3) : ""; }

}  // namespace

Json to_json(const MetricsReport& r) {
  return Json{{"gold_source", r.gold_source},
              {"pred_source", r.pred_source},
              {"n_binary", r.n_binary},
              {"n_multilabel", r.n_multilabel},
              {"dropped_binary", r.dropped_binary},
              {"dropped_multilabel", r.dropped_multilabel},
              {"binary", r.binary ? binary_json(*r.binary) : Json(nullptr)},
              {"multilabel", r.multilabel ? multilabel_json(*r.multilabel) : Json(nullptr)}};
}

MetricsReport metrics_report_from_json(const Json& j) {
  MetricsReport r;
  try {
    r.gold_source = j.value("gold_source", std::string());
    r.pred_source = j.value("pred_source", std::string());
    r.n_binary = j.at("n_binary").get<std::size_t>();
    r.n_multilabel = j.at("n_multilabel").get<std::size_t>();
    r.dropped_binary = j.value("dropped_binary", std::size_t{0});
    r.dropped_multilabel = j.value("dropped_multilabel", std::size_t{0});
    if (j.contains("binary") && !j.at("binary").is_null()) r.binary = binary_from(j.at("binary"));
    if (j.contains("multilabel") && !j.at("multilabel").is_null()) {
      r.multilabel = multilabel_from(j.at("multilabel"));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("metrics report: ") + e.what());
  }
  return r;
}

void write_metrics_report(const std::filesystem::path& path, const MetricsReport& r) {
  write_text_file(path, to_json(r).dump(2) + "\n");
}

MetricsReport read_metrics_report(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
  return metrics_report_from_json(j);
}

void write_performance_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  CsvWriter w(out);
  std::vector<std::string> header{"metric"};
  for (const auto& r : reports) {
    header.push_back(r.pred_source + " binary");
    header.push_back(r.pred_source + " multilabel");
  }
  w.row(header);

  using BinGet = std::optional<double> (*)(const BinaryBlock&);
  using MlGet = std::optional<double> (*)(const MultilabelBlock&);
  struct Row {
    const char* name;
    BinGet bin;
    MlGet ml;
  };
  static const Row rows[] = {
      {"accuracy", [](const BinaryBlock& b) { return b.accuracy; },
       [](const MultilabelBlock& m) { return m.subset_accuracy; }},
      {"micro_cell_accuracy", [](const BinaryBlock&) { return std::optional<double>{}; },
       [](const MultilabelBlock& m) { return m.micro_accuracy; }},
      {"sensitivity", [](const BinaryBlock& b) { return b.sensitivity; },
       [](const MultilabelBlock& m) { return m.micro_sensitivity; }},
      {"specificity", [](const BinaryBlock& b) { return b.specificity; },
       [](const MultilabelBlock& m) { return m.micro_specificity; }},
      {"macro_f1", [](const BinaryBlock& b) { return b.macro_f1; },
       [](const MultilabelBlock& m) { return m.macro_f1; }},
      {"macro_precision", [](const BinaryBlock& b) { return b.macro_precision; },
       [](const MultilabelBlock& m) { return m.macro_precision; }},
      {"macro_recall", [](const BinaryBlock& b) { return b.macro_recall; },
       [](const MultilabelBlock& m) { return m.macro_recall; }},
      {"agreement", [](const BinaryBlock& b) { return std::optional<double>(b.agreement.mean); },
       [](const MultilabelBlock& m) { return std::optional<double>(m.agreement.mean); }},
  };
  for (const auto& row : rows) {
    std::vector<std::string> fields{row.name};
    for (const auto& r : reports) {
      fields.push_back(r.binary ? cell(row.bin(*r.binary)) : "");
      fields.push_back(r.multilabel ? cell(row.ml(*r.multilabel)) : "");
    }
    w.row(fields);
  }
  std::vector<std::string> se{"se"}, n{"n"};
  for (const auto& r : reports) {
    se.push_back(r.binary ? format_fixed(r.binary->agreement.se, 4) : "");
    se.push_back(r.multilabel ? format_fixed(r.multilabel->agreement.se, 4) : "");
    n.push_back(std::to_string(r.n_binary));
    n.push_back(std::to_string(r.n_multilabel));
  }
  w.row(se);
  w.row(n);
}

void write_category_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  CsvWriter w(out);
  std::vector<std::string> header{"category"};
  for (const auto& r : reports) {
    for (const char* m : {" f1", " precision", " recall"}) header.push_back(r.pred_source + m);
  }
  w.row(header);
  for (auto c : kAllCategories) {
    std::vector<std::string> fields{std::string(display_name(c))};
    for (const auto& r : reports) {
      if (!r.multilabel) {
        fields.insert(fields.end(), 3, "");
        continue;
      }
      const auto& s = r.multilabel->per_category[index_of(c)].scores;
      fields.push_back(cell(s.f1));
      fields.push_back(cell(s.precision));
      fields.push_back(cell(s.recall));
    }
    w.row(fields);
  }
}

}  // namespace harmscan

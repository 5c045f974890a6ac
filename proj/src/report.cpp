#include "cebread/report.hpp"

#include <cstdio>
#include <sstream>

#include "cebread/csv.hpp"

namespace cebread {

using nlohmann::json;

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

}  // namespace

json to_json(const Metrics& m) {
  json per_class = json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    per_class[std::to_string(c + 1)] = {{"precision", m.per_class[c].precision},
                                        {"recall", m.per_class[c].recall},
                                        {"f1", m.per_class[c].f1}};
  }
  json confusion = json::array();
  for (const auto& row : m.confusion) confusion.push_back(row);
  return {{"accuracy", m.accuracy},
          {"macro_precision", m.macro_precision},
          {"macro_recall", m.macro_recall},
          {"macro_f1", m.macro_f1},
          {"per_class", per_class},
          {"confusion", confusion}};
}

json to_json(const CvResult& r) {
  json folds = json::array();
  for (const auto& m : r.folds) folds.push_back(to_json(m));
  return {{"feature_set", r.feature_set},
          {"hyperparameters", to_json(r.hp)},
          {"accuracy", summary_json(r.accuracy)},
          {"macro_precision", summary_json(r.macro_precision)},
          {"macro_recall", summary_json(r.macro_recall)},
          {"macro_f1", summary_json(r.macro_f1)},
          {"folds", folds}};
}

json to_json(const GridResult& g) {
  json all = json::array();
  for (const auto& r : g.results) all.push_back(to_json(r));
  return {{"best_index", g.best},
          {"best", to_json(g.best_result())},
          {"grid", all}};
}

json to_json(const AblationTable& t) {
  json cells = json::array();
  for (const auto& c : t.cells) {
    json cell = {{"feature_set", c.sets.name()}, {"model", to_string(c.kind)}};
    if (c.result) {
      cell["result"] = to_json(*c.result);
    } else {
      cell["skipped"] = c.skipped;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

json to_json(const FoldAssignment& f) {
  json assignments = json::object();
  for (std::size_t i = 0; i < f.ids().size(); ++i) assignments[f.ids()[i]] = f.folds()[i];
  return {{"k", f.k()}, {"assignments", assignments}, {"warnings", f.warnings}};
}

json to_json(const PermutationResult& p) {
  json features = json::array();
  for (const auto& s : p.features) {
    features.push_back({{"feature", s.feature}, {"mean_drop", s.mean_drop}, {"stddev", s.stddev}});
  }
  return {{"baseline_accuracy", p.baseline_accuracy}, {"features", features}};
}

json to_json(const std::vector<Correlation>& c) {
  json out = json::array();
  for (const auto& r : c) {
    out.push_back({{"feature", r.feature}, {"rho", r.rho}, {"degenerate", r.degenerate}});
  }
  return out;
}

std::string format_ablation_table(const AblationTable& table) {
  std::ostringstream os;
  for (ModelKind kind : kAllModelKinds) {
    bool any = false;
    for (const auto& c : table.cells) any |= c.kind == kind;
    if (!any) continue;
    os << "Model: " << to_string(kind) << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "  %-14s %7s %7s %7s %7s  %s\n", "Feature", "Acc", "Prec",
                  "Rec", "F1", "best hyperparameters");
    os << line;
    for (const auto& c : table.cells) {
      if (c.kind != kind) continue;
      if (!c.result) {
        std::snprintf(line, sizeof line, "  %-14s %7s %7s %7s %7s  skipped: %s\n",
                      c.sets.name().c_str(), "-", "-", "-", "-", c.skipped.c_str());
        os << line;
        continue;
      }
      const auto& b = c.result->best_result();
      std::snprintf(line, sizeof line, "  %-14s %7s %7s %7s %7s  ", c.sets.name().c_str(),
                    fixed3(b.accuracy.mean).c_str(), fixed3(b.macro_precision.mean).c_str(),
                    fixed3(b.macro_recall.mean).c_str(), fixed3(b.macro_f1.mean).c_str());
      os << line << b.hp.describe() << '\n';
    }
    os << '\n';
  }
  return os.str();
}

std::string format_correlation_table(const std::vector<Correlation>& ranking, std::size_t top_n) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %-24s %8s\n", "Feature Set", "Predictor", "rho");
  os << line;
  for (std::size_t i = 0; i < ranking.size() && i < top_n; ++i) {
    const auto& r = ranking[i];
    std::snprintf(line, sizeof line, "%-12s %-24s %8s%s\n", feature_group(r.feature).c_str(),
                  r.feature.c_str(), fixed3(r.rho).c_str(), r.degenerate ? "  (degenerate)" : "");
    os << line;
  }
  return os.str();
}

std::string importance_csv(const FeatureVector& mdi) {
  std::ostringstream os;
  csv::write_row(os, {"feature", "importance"});
  for (std::size_t i = 0; i < mdi.size(); ++i) {
    csv::write_row(os, {mdi.names[i], csv::format_number(mdi.values[i])});
  }
  return os.str();
}

std::string permutation_csv(const PermutationResult& p) {
  std::ostringstream os;
  csv::write_row(os, {"feature", "mean_drop", "stddev"});
  for (const auto& s : p.features) {
    csv::write_row(os, {s.feature, csv::format_number(s.mean_drop), csv::format_number(s.stddev)});
  }
  return os.str();
}

std::string correlation_csv(const std::vector<Correlation>& c) {
  std::ostringstream os;
  csv::write_row(os, {"rank", "feature_set", "feature", "rho", "degenerate"});
  for (std::size_t i = 0; i < c.size(); ++i) {
    csv::write_row(os, {std::to_string(i + 1), feature_group(c[i].feature), c[i].feature,
                        csv::format_number(c[i].rho), c[i].degenerate ? "1" : "0"});
  }
  return os.str();
}

}  // namespace cebread

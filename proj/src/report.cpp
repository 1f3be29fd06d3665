#include "launchpulse/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace launchpulse::report {

namespace {

std::string opt_stars(const std::optional<double>& v) { return v ? fmt_stars(*v) : std::string("-"); }

double reference_mean(Horizon h) {
  switch (h) {
    case Horizon::H24: return 121.1;
    case Horizon::H48: return 188.7;
    case Horizon::D7: return 288.5;
  }
  return 0.0;
}

}  // namespace

CsvTable event_curves_table(const std::optional<EventCurve>& mean_curve, const std::optional<EventCurve>& median_curve) {
  CsvTable t;
  t.header = {"day", "mean_stars", "median_stars", "n"};
  if (!mean_curve || !median_curve) return t;
  for (std::size_t i = 0; i < mean_curve->days.size(); ++i) {
    t.rows.push_back({std::to_string(mean_curve->days[i]), fmt_stars(mean_curve->values[i]),
                      fmt_stars(median_curve->values[i]), std::to_string(mean_curve->n)});
  }
  return t;
}

CsvTable launch_effects_table(const std::optional<LaunchEffects>& effects) {
  CsvTable t;
  t.header = {"horizon", "n", "mean_stars", "median_stars", "reference_mean_stars"};
  if (!effects) return t;
  for (const auto& h : effects->horizons) {
    t.rows.push_back({horizon_name(h.horizon), std::to_string(effects->n), fmt_stars(h.mean), fmt_stars(h.median),
                      fmt_stars(reference_mean(h.horizon))});
  }
  return t;
}

CsvTable group_comparisons_table(const std::vector<GroupComparison>& comparisons) {
  CsvTable t;
  t.header = {"grouping", "target", "group", "n", "mean_stars", "difference", "note"};
  for (const auto& c : comparisons) {
    std::string note;
    if (c.grouping == Grouping::HourBin) {
      note = c.difference ? fmt::format("best {} minus worst {}", c.best_group, c.worst_group) : "fewer than two bins populated";
    } else if (c.groups.size() == 2) {
      note = c.difference ? fmt::format("{} minus {}", c.groups[1].label, c.groups[0].label) : "group empty";
    }
    for (const auto& g : c.groups) {
      t.rows.push_back({grouping_name(c.grouping), horizon_name(c.target), g.label, std::to_string(g.n), opt_stars(g.mean),
                        opt_stars(c.difference), g.mean ? note : "empty group"});
    }
  }
  return t;
}

CsvTable regression_table(const std::vector<CoefRow>& rows) {
  CsvTable t;
  t.header = {"effect", "coefficient", "std_error", "p_value", "note"};
  for (const auto& r : rows) {
    std::string note = r.is_control ? "control" : "";
    if (r.perfect_fit) note += note.empty() ? "perfect fit" : "; perfect fit";
    t.rows.push_back({r.name, fmt_stars(r.coefficient), fmt_stars(r.se), fmt_pvalue(r.p), note});
  }
  return t;
}

CsvTable timing_effects_table(const std::vector<TimingEffect>& effects) {
  CsvTable t;
  t.header = {"effect", "coefficient", "std_error", "p_value", "note"};
  for (const auto& e : effects) {
    t.rows.push_back({e.effect, opt_stars(e.coefficient), opt_stars(e.std_error),
                      e.p_value ? fmt_pvalue(*e.p_value) : std::string("-"), e.note});
  }
  return t;
}

CsvTable model_performance_table(const std::vector<learn::ModelReport>& reports) {
  CsvTable t;
  t.header = {"model", "horizon", "feature_set", "mae", "rmse", "r2", "test_n", "note"};
  for (const auto& r : reports) {
    t.rows.push_back({r.model_id, r.horizon, r.feature_set, fmt_metric(r.metrics.mae), fmt_metric(r.metrics.rmse),
                      r.metrics.r2 ? fmt_metric(*r.metrics.r2) : std::string("-"), std::to_string(r.test_n),
                      r.leaky ? "leaky" : ""});
  }
  return t;
}

CsvTable model_report_table(const learn::ModelReport& r) {
  CsvTable t;
  t.header = {"section", "name", "value"};
  t.rows.push_back({"setting", "model", r.model_id});
  t.rows.push_back({"setting", "horizon", r.horizon});
  t.rows.push_back({"setting", "feature_set", r.feature_set});
  t.rows.push_back({"setting", "leaky", r.leaky ? "true" : "false"});
  t.rows.push_back({"setting", "train_n", std::to_string(r.train_n)});
  t.rows.push_back({"setting", "test_n", std::to_string(r.test_n)});
  t.rows.push_back({"metric", "mae", fmt_metric(r.metrics.mae)});
  t.rows.push_back({"metric", "rmse", fmt_metric(r.metrics.rmse)});
  t.rows.push_back({"metric", "r2", r.metrics.r2 ? fmt_metric(*r.metrics.r2) : std::string("-")});
  for (const auto& [k, v] : r.hyperparameters) t.rows.push_back({"hyperparameter", k, v});
  for (const auto& [k, v] : r.coefficients) t.rows.push_back({"coefficient", k, fmt_metric(v)});
  for (const auto& [k, v] : r.importance) t.rows.push_back({"importance", k, fmt_metric(v)});
  return t;
}

CsvTable cv_table(const learn::CvResult& cv) {
  CsvTable t;
  t.header = {"l1_ratio", "lambda", "mean_mse", "selected"};
  for (const auto& c : cv.table) {
    const bool sel = c.lambda == cv.best_lambda && c.l1_ratio == cv.best_l1_ratio;
    t.rows.push_back({fmt_exact(c.l1_ratio), fmt_exact(c.lambda), fmt_metric(c.mean_mse), sel ? "true" : "false"});
  }
  return t;
}

CsvTable dataset_table(const DatasetCounts& c) {
  CsvTable t;
  t.header = {"statistic", "value"};
  t.rows.push_back({"Total HN-GitHub pairs", std::to_string(c.total_pairs)});
  t.rows.push_back({"Valid GitHub time series", std::to_string(c.valid_series)});
  t.rows.push_back({"Metadata-only repositories", std::to_string(c.metadata_only)});
  t.rows.push_back({"Modeling rows", std::to_string(c.modeling_rows)});
  t.rows.push_back({"Show HN posts", std::to_string(c.show_hn)});
  t.rows.push_back({"Non-Show HN posts", std::to_string(c.non_show_hn)});
  t.rows.push_back({"Mean baseline stars", opt_stars(c.mean_baseline_stars)});
  t.rows.push_back({"Mean HN score", opt_stars(c.mean_hn_score)});
  t.rows.push_back({"Mean HN comments", opt_stars(c.mean_hn_comments)});
  t.rows.push_back({"Excluded repositories", std::to_string(c.exclusions.size())});
  t.rows.push_back({"Time period", c.period});
  return t;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return fmt_fixed(v, 2); }

// Upper axis bound: 1, 2 or 5 times a power of ten at or above `v`.
double nice_ceiling(double v) {
  if (v <= 0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10 * p;
}

void check_finite(const FigureSeries& s) {
  for (double v : s.y)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in series '" + s.label + "'");
  for (double v : s.x)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite x value in series '" + s.label + "'");
}

void frame(std::ostringstream& o, const FigureSpec& f, double y_max) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#ffffff\"/>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(f.title)
    << "</text>\n";
  o << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 14)
    << "\" text-anchor=\"middle\">" << xml_escape(f.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + (kHeight - kTop - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(kTop + (kHeight - kTop - kBottom) / 2) << ")\">" << xml_escape(f.y_label) << "</text>\n";
  const double plot_h = kHeight - kTop - kBottom;
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = kTop + plot_h - plot_h * i / 5.0;
    o << "<line class=\"grid\" x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
      << num(y) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << fmt_fixed(v, 1)
      << "</text>\n";
  }
  o << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"#000000\"/>\n";
  o << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
    << num(kTop + plot_h) << "\" stroke=\"#000000\"/>\n";
}

std::string render_curve(const FigureSpec& f) {
  double x_min = 0, x_max = 0, y_max = 0;
  bool first = true;
  for (const auto& s : f.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.label + "' has mismatched x/y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) x_min = x_max = s.x[i], first = false;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max == x_min) x_max = x_min + 1;
  y_max = nice_ceiling(y_max);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * (x - x_min) / (x_max - x_min); };
  auto py = [&](double y) { return kTop + plot_h - plot_h * std::max(0.0, y) / y_max; };

  std::ostringstream o;
  frame(o, f, y_max);
  for (double x = std::ceil(x_min); x <= x_max; x += 1) {
    o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">" << fmt_fixed(x, 0)
      << "</text>\n";
  }
  if (x_min <= 0 && x_max >= 0) {
    o << "<line class=\"launch\" x1=\"" << num(px(0)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(0)) << "\" y2=\""
      << num(kTop + plot_h) << "\" stroke=\"#555555\" stroke-dasharray=\"4 4\"/>\n";
  }
  for (std::size_t k = 0; k < f.series.size(); ++k) {
    const auto& s = f.series[k];
    const char* color = kColors[k % 4];
    o << "<polyline class=\"series\" data-label=\"" << xml_escape(s.label) << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    o << "\"/>\n";
    const double ly = kTop + 14 + 16.0 * static_cast<double>(k);
    o << "<line x1=\"" << num(kLeft + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(kLeft + 32) << "\" y2=\""
      << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + 38) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_bars(const FigureSpec& f) {
  const auto& s = f.series.front();
  if (!f.bar_labels.empty() && f.bar_labels.size() != s.y.size())
    throw std::invalid_argument("series '" + s.label + "' length does not match bar labels");
  double y_max = 0;
  for (double v : s.y) y_max = std::max(y_max, v);
  y_max = nice_ceiling(y_max);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double slot = plot_w / static_cast<double>(s.y.size());
  const double bar_w = slot * 0.6;

  std::ostringstream o;
  frame(o, f, y_max);
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double h = plot_h * std::max(0.0, s.y[i]) / y_max;
    const double x = kLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2;
    const std::string label = f.bar_labels.empty() ? std::to_string(i) : f.bar_labels[i];
    o << "<rect class=\"bar\" data-label=\"" << xml_escape(label) << "\" x=\"" << num(x) << "\" y=\""
      << num(kTop + plot_h - h) << "\" width=\"" << num(bar_w) << "\" height=\"" << num(h) << "\" fill=\"" << kColors[0]
      << "\"/>\n";
    o << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(kTop + plot_h - h - 4) << "\" text-anchor=\"middle\">"
      << fmt_stars(s.y[i]) << "</text>\n";
    o << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
      << xml_escape(label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::string render_svg(const FigureSpec& figure) {
  if (figure.series.empty()) throw std::invalid_argument("figure '" + figure.title + "' has no series");
  for (const auto& s : figure.series) {
    if (s.y.empty()) throw std::invalid_argument("series '" + s.label + "' is empty");
    check_finite(s);
  }
  return figure.kind == FigureKind::EventCurve ? render_curve(figure) : render_bars(figure);
}

// ---------------------------------------------------------------------------
// Summary

std::string write_summary(const SummaryInputs& in) {
  std::ostringstream o;
  const auto& c = in.counts;
  o << "launchpulse summary\n\n";
  o << "Corpus\n";
  o << fmt::format("  Total pairs: {}\n", c.total_pairs);
  o << fmt::format("  Valid series: {}\n", c.valid_series);
  o << fmt::format("  Metadata-only: {}\n", c.metadata_only);
  o << fmt::format("  Modeling rows: {}\n", c.modeling_rows);
  o << fmt::format("  Show HN: {}\n", c.show_hn);
  o << fmt::format("  Non-Show HN: {}\n", c.non_show_hn);
  o << fmt::format("  Mean baseline stars: {}\n", opt_stars(c.mean_baseline_stars));
  o << fmt::format("  Mean HN score: {}\n", opt_stars(c.mean_hn_score));
  o << fmt::format("  Mean HN comments: {}\n", opt_stars(c.mean_hn_comments));
  o << fmt::format("  Time period: {}\n", c.period);
  o << fmt::format("  Excluded: {}\n", c.exclusions.size());
  for (const auto& [slug, reason] : c.exclusions) o << fmt::format("    excluded {}: {}\n", slug, reason);

  o << "\nLaunch effects (stars gained after launch)\n";
  if (!in.effects) {
    o << "  no rows\n";
  } else {
    for (const auto& h : in.effects->horizons) {
      o << fmt::format("  {:>3}: mean {}  median {}  (n={})\n", horizon_name(h.horizon), fmt_stars(h.mean),
                       fmt_stars(h.median), in.effects->n);
    }
  }

  o << "\nGroup comparisons\n";
  if (in.comparisons.empty()) o << "  none\n";
  for (const auto& g : in.comparisons) {
    o << fmt::format("  {} / {}: difference {}", grouping_name(g.grouping), horizon_name(g.target), opt_stars(g.difference));
    if (g.grouping == Grouping::HourBin && g.difference) o << fmt::format(" (best {}, worst {})", g.best_group, g.worst_group);
    o << '\n';
  }

  o << "\nTiming and posting effects (OLS, HC1 standard errors)\n";
  if (in.timing.empty()) o << "  none\n";
  for (const auto& t : in.timing) {
    o << fmt::format("  {}: coef {}  se {}  p {}", t.effect, opt_stars(t.coefficient), opt_stars(t.std_error),
                     t.p_value ? fmt_pvalue(*t.p_value) : std::string("-"));
    if (!t.note.empty()) o << "  [" << t.note << ']';
    o << '\n';
  }

  o << "\nModels (held-out test set)\n";
  if (in.models.empty()) o << "  none\n";
  for (const auto& m : in.models) {
    o << fmt::format("  {} {} {}: MAE {}  RMSE {}  R2 {}  test n={}{}\n", m.model_id, m.horizon, m.feature_set,
                     fmt_metric(m.metrics.mae), fmt_metric(m.metrics.rmse),
                     m.metrics.r2 ? fmt_metric(*m.metrics.r2) : std::string("-"), m.test_n, m.leaky ? " (leaky)" : "");
  }
  return o.str();
}

std::vector<ManifestEntry> collect_manifest(const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::vector<ManifestEntry> entries;
  if (!fs::exists(out_dir)) return entries;
  for (const auto& e : fs::recursive_directory_iterator(out_dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out_dir).generic_string();
    if (rel == "manifest.csv") continue;
    entries.push_back({rel, e.file_size()});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return entries;
}

CsvTable manifest_table(const std::vector<ManifestEntry>& entries) {
  CsvTable t;
  t.header = {"path", "bytes"};
  for (const auto& e : entries) t.rows.push_back({e.path, std::to_string(e.bytes)});
  return t;
}

}  // namespace launchpulse::report

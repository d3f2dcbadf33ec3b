#include "amr/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "amr/common/error.hpp"
#include "amr/zoo/zoo.hpp"

namespace amr::report {

namespace fs = std::filesystem;
using train::format_double;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::size_t zoo_rank(const std::string& base) {
  for (std::size_t i = 0; i < zoo::kModelIds.size(); ++i)
    if (zoo::kModelIds[i] == base) return i;
  return zoo::kModelIds.size();
}

bool table_order(const RunRecord* a, const RunRecord* b) {
  const auto ka = std::make_tuple(zoo_rank(a->base_model), a->augmented, a->model_id, a->dir.string());
  const auto kb = std::make_tuple(zoo_rank(b->base_model), b->augmented, b->model_id, b->dir.string());
  return ka < kb;
}

double axis_x(double params, TrendAxis axis) {
  return axis == TrendAxis::log10_params ? std::log10(params) : params;
}

const char* axis_name(TrendAxis axis) { return axis == TrendAxis::log10_params ? "log10" : "linear"; }

std::string xml_escape(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

// Plot frame with linear x/y mappings, axes, ticks and labels.
struct Canvas {
  double width = 760, height = 480;
  double left = 70, right = 190, top = 40, bottom = 60;
  double x0, x1, y0, y1;
  std::string body;

  Canvas(double xmin, double xmax, double ymin, double ymax) : x0(xmin), x1(xmax), y0(ymin), y1(ymax) {}

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }

  static std::string n(double v) { return fixed(v, 2); }

  void line(double ax, double ay, double bx, double by, const std::string& style) {
    body += "<line x1=\"" + n(ax) + "\" y1=\"" + n(ay) + "\" x2=\"" + n(bx) + "\" y2=\"" + n(by) + "\" " + style +
            "/>\n";
  }
  void text(double x, double y, const std::string& s, const std::string& extra = "") {
    body += "<text x=\"" + n(x) + "\" y=\"" + n(y) + "\" font-family=\"sans-serif\" font-size=\"12\"" +
            (extra.empty() ? "" : " " + extra) + ">" + xml_escape(s) + "</text>\n";
  }
  void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel,
            const std::vector<std::pair<double, std::string>>& xticks,
            const std::vector<std::pair<double, std::string>>& yticks) {
    const double bx = px(x0), ex = px(x1), by = py(y0), ey = py(y1);
    line(bx, by, ex, by, "stroke=\"black\"");
    line(bx, by, bx, ey, "stroke=\"black\"");
    for (const auto& [v, label] : xticks) {
      line(px(v), by, px(v), by + 5, "stroke=\"black\"");
      text(px(v), by + 18, label, "text-anchor=\"middle\"");
    }
    for (const auto& [v, label] : yticks) {
      line(bx - 5, py(v), bx, py(v), "stroke=\"black\"");
      line(bx, py(v), ex, py(v), "stroke=\"#dddddd\"");
      text(bx - 8, py(v) + 4, label, "text-anchor=\"end\"");
    }
    text((bx + ex) / 2, height - 15, xlabel, "text-anchor=\"middle\"");
    text(18, (by + ey) / 2, ylabel,
         "text-anchor=\"middle\" transform=\"rotate(-90 18 " + n((by + ey) / 2) + ")\"");
    text(width / 2, 22, title, "text-anchor=\"middle\" font-weight=\"bold\"");
  }
  void legend(std::size_t row, const std::string& color, const std::string& label) {
    const double x = width - right + 20, y = top + 10 + 18 * static_cast<double>(row);
    body += "<rect x=\"" + n(x) + "\" y=\"" + n(y - 9) + "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    text(x + 18, y + 1, label);
  }
  std::string finish() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "width=\"" + n(width) + "\" height=\"" + n(height) + "\" viewBox=\"0 0 " + n(width) + " " + n(height) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
  }
};

std::vector<std::pair<double, std::string>> accuracy_ticks() {
  std::vector<std::pair<double, std::string>> t;
  for (int i = 0; i <= 10; i += 2) t.emplace_back(i / 10.0, fixed(i / 10.0, 1));
  return t;
}

const train::EvalReport& report_of(const RunRecord& r) { return *r.report; }

}  // namespace

double TrendFit::predict(double param_count) const { return slope * axis_x(param_count, axis) + intercept; }

TrendFit fit_trend(std::span<const std::pair<double, double>> points, TrendAxis axis) {
  std::set<double> distinct;
  for (const auto& [p, acc] : points) {
    if (!(p > 0.0) || !std::isfinite(acc)) throw FitError("trend points need positive counts and finite accuracies");
    distinct.insert(axis_x(p, axis));
  }
  if (distinct.size() < 2) throw FitError("trend fit needs at least two distinct parameter counts");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [p, acc] : points) {
    mx += axis_x(p, axis);
    my += acc;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [p, acc] : points) {
    const double dx = axis_x(p, axis) - mx;
    sxx += dx * dx;
    sxy += dx * (acc - my);
  }
  if (!(sxx > 0.0)) throw FitError("trend fit x values are degenerate");
  TrendFit fit;
  fit.axis = axis;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [p, acc] : points) fit.residuals.push_back(acc - fit.predict(p));
  return fit;
}

void check_runs(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw IncompleteData("report needs at least one run directory");
  for (const auto& r : runs) {
    if (r.corpus_hash != runs.front().corpus_hash)
      throw ConsistencyError("runs use different corpora: " + runs.front().dir.string() + " has " +
                             runs.front().corpus_hash + ", " + r.dir.string() + " has " + r.corpus_hash);
    if (!r.report && r.curriculum.empty())
      throw IncompleteData("run " + r.dir.string() + " has neither an evaluation nor curriculum results");
    if (r.report && r.report->per_snr.empty())
      throw IncompleteData("run " + r.dir.string() + " has no per-SNR breakdown");
  }
  std::set<std::string> eval_ids, curr_ids;
  for (const auto& r : runs) {
    if (r.report && !eval_ids.insert(r.model_id).second)
      throw ConsistencyError("model '" + r.model_id + "' is evaluated by more than one run");
    if (!r.curriculum.empty() && !curr_ids.insert(r.model_id).second)
      throw ConsistencyError("model '" + r.model_id + "' has more than one curriculum run");
  }
}

std::vector<const RunRecord*> evaluated_runs(const std::vector<RunRecord>& runs) {
  std::vector<const RunRecord*> out;
  for (const auto& r : runs)
    if (r.report) out.push_back(&r);
  std::sort(out.begin(), out.end(), table_order);
  return out;
}

std::vector<const RunRecord*> curriculum_runs(const std::vector<RunRecord>& runs) {
  std::vector<const RunRecord*> out;
  for (const auto& r : runs)
    if (!r.curriculum.empty()) out.push_back(&r);
  std::sort(out.begin(), out.end(), table_order);
  return out;
}

std::vector<ModelSummary> summaries(const std::vector<RunRecord>& runs) {
  std::vector<ModelSummary> out;
  for (const RunRecord* r : evaluated_runs(runs))
    out.push_back({r->model_id, r->param_count, report_of(*r).overall_accuracy, r->stop_epoch});
  return out;
}

std::string table1_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model,parameter_count,batch_size,learning_rate,epochs,test_accuracy\n";
  for (const RunRecord* r : evaluated_runs(runs)) {
    const auto& values = r->manifest.contains("values") ? r->manifest["values"] : nlohmann::json::object();
    const std::string batch = values.contains("batch_size") ? values["batch_size"].dump() : "";
    const std::string lr = values.contains("learning_rate") ? format_double(values["learning_rate"].get<double>()) : "";
    out += r->model_id + "," + std::to_string(r->param_count) + "," + batch + "," + lr + "," +
           std::to_string(r->stop_epoch) + "," + fixed(report_of(*r).overall_accuracy, 4) + "\n";
  }
  return out;
}

std::string table2_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model";
  for (auto m : sigsynth::kTableOrder) out += "," + std::string(sigsynth::name(m));
  out += "\n";
  for (const RunRecord* r : evaluated_runs(runs)) {
    out += r->model_id;
    for (auto m : sigsynth::kTableOrder) {
      const auto& pm = report_of(*r).per_modulation;
      const auto it = pm.find(m);
      out += "," + (it == pm.end() ? std::string() : fixed(it->second, 2));
    }
    out += "\n";
  }
  return out;
}

std::string table3_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model,base_accuracy,augmented_accuracy,delta\n";
  std::map<std::size_t, std::pair<const RunRecord*, const RunRecord*>> pairs;
  for (const RunRecord* r : evaluated_runs(runs)) {
    auto& slot = pairs[zoo_rank(r->base_model)];
    (r->augmented ? slot.second : slot.first) = r;
  }
  for (const auto& [rank, pr] : pairs) {
    if (!pr.first || !pr.second) continue;
    const double a = report_of(*pr.first).overall_accuracy, b = report_of(*pr.second).overall_accuracy;
    out += pr.first->model_id + "," + fixed(a, 4) + "," + fixed(b, 4) + "," + fixed(b - a, 4) + "\n";
  }
  return out;
}

namespace {

std::optional<TrendFit> try_fit(const std::vector<const RunRecord*>& rs, TrendAxis axis) {
  std::vector<std::pair<double, double>> pts;
  for (const RunRecord* r : rs) pts.emplace_back(static_cast<double>(r->param_count), report_of(*r).overall_accuracy);
  try {
    return fit_trend(pts, axis);
  } catch (const FitError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string fig1_csv(const std::vector<RunRecord>& runs, TrendAxis axis) {
  const auto rs = evaluated_runs(runs);
  const auto fit = try_fit(rs, axis);
  std::string out = "model,param_count,x_";
  out += axis_name(axis);
  out += ",test_accuracy,trend_accuracy,residual\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double p = static_cast<double>(rs[i]->param_count);
    out += rs[i]->model_id + "," + std::to_string(rs[i]->param_count) + "," + format_double(axis_x(p, axis)) + "," +
           format_double(report_of(*rs[i]).overall_accuracy) + "," + (fit ? format_double(fit->predict(p)) : "") +
           "," + (fit ? format_double(fit->residuals[i]) : "") + "\n";
  }
  return out;
}

std::string fig1_svg(const std::vector<RunRecord>& runs, TrendAxis axis) {
  const auto rs = evaluated_runs(runs);
  const auto fit = try_fit(rs, axis);
  double lo = INFINITY, hi = -INFINITY;
  for (const RunRecord* r : rs) {
    const double x = axis_x(static_cast<double>(r->param_count), axis);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (rs.empty()) lo = 0, hi = 1;
  const double pad = hi > lo ? 0.1 * (hi - lo) : 0.5;
  Canvas c(lo - pad, hi + pad, 0.0, 1.0);
  std::vector<std::pair<double, std::string>> xt;
  for (int i = 0; i <= 4; ++i) {
    const double v = c.x0 + (c.x1 - c.x0) * i / 4.0;
    xt.emplace_back(v, axis == TrendAxis::log10_params ? fixed(v, 2) : fixed(v, 0));
  }
  c.axes("Test accuracy vs parameter count",
         axis == TrendAxis::log10_params ? "log10(parameter count)" : "parameter count", "test accuracy", xt,
         accuracy_ticks());
  if (fit) {
    const auto inv = [&](double x) { return axis == TrendAxis::log10_params ? std::pow(10.0, x) : x; };
    const double ya = std::clamp(fit->predict(inv(c.x0)), 0.0, 1.0), yb = std::clamp(fit->predict(inv(c.x1)), 0.0, 1.0);
    c.line(c.px(c.x0), c.py(ya), c.px(c.x1), c.py(yb), "stroke=\"red\" stroke-width=\"2\"");
    c.legend(0, "red", "OLS trend");
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double x = c.px(axis_x(static_cast<double>(rs[i]->param_count), axis));
    const double y = c.py(report_of(*rs[i]).overall_accuracy);
    c.body += "<circle cx=\"" + Canvas::n(x) + "\" cy=\"" + Canvas::n(y) + "\" r=\"5\" fill=\"" +
              kPalette[i % kPaletteSize] + "\"/>\n";
    c.text(x + 7, y - 7, rs[i]->model_id);
  }
  return c.finish();
}

std::string fig2_csv(const std::vector<RunRecord>& runs) {
  const auto rs = evaluated_runs(runs);
  std::set<int> snrs;
  for (const RunRecord* r : rs)
    for (const auto& [s, acc] : report_of(*r).per_snr) snrs.insert(s);
  std::string out = "snr_db";
  for (const RunRecord* r : rs) out += "," + r->model_id;
  out += "\n";
  for (int s : snrs) {
    out += std::to_string(s);
    for (const RunRecord* r : rs) {
      const auto& ps = report_of(*r).per_snr;
      const auto it = ps.find(s);
      out += "," + (it == ps.end() ? std::string() : format_double(it->second));
    }
    out += "\n";
  }
  return out;
}

std::string fig2_long_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model,snr_db,accuracy\n";
  for (const RunRecord* r : evaluated_runs(runs))
    for (const auto& [s, acc] : report_of(*r).per_snr)
      out += r->model_id + "," + std::to_string(s) + "," + format_double(acc) + "\n";
  return out;
}

std::string fig2_svg(const std::vector<RunRecord>& runs) {
  const auto rs = evaluated_runs(runs);
  Canvas c(-20.0, 18.0, 0.0, 1.0);
  std::vector<std::pair<double, std::string>> xt;
  for (int s = -20; s <= 18; s += 4) xt.emplace_back(s, std::to_string(s));
  c.axes("Test accuracy vs SNR", "SNR (dB)", "test accuracy", xt, accuracy_ticks());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string color = kPalette[i % kPaletteSize];
    std::string pts;
    for (const auto& [s, acc] : report_of(*rs[i]).per_snr) {
      if (!pts.empty()) pts += " ";
      pts += Canvas::n(c.px(s)) + "," + Canvas::n(c.py(acc));
    }
    c.body += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    c.legend(i, color, rs[i]->model_id);
  }
  return c.finish();
}

std::string fig3_csv(const std::vector<RunRecord>& runs) {
  std::string out = "model,scenario,lo,hi,acc_low,acc_high,acc_overall\n";
  for (const RunRecord* r : curriculum_runs(runs))
    for (const auto& row : r->curriculum)
      out += r->model_id + ",\"" + row.label + "\"," + std::to_string(row.lo) + "," + std::to_string(row.hi) + "," +
             format_double(row.acc_low) + "," + format_double(row.acc_high) + "," + format_double(row.acc_overall) +
             "\n";
  return out;
}

std::string fig3_svg(const std::vector<RunRecord>& runs) {
  const auto rs = curriculum_runs(runs);
  std::size_t groups = 0;
  for (const RunRecord* r : rs) groups += r->curriculum.size();
  Canvas c(0.0, static_cast<double>(std::max<std::size_t>(groups, 1)), 0.0, 1.0);
  c.axes("Accuracy by training SNR range", "training SNR range (dB)", "test accuracy", {}, accuracy_ticks());
  constexpr const char* kBarColors[] = {"#4c72b0", "#dd8452", "#55a868"};
  constexpr const char* kBarNames[] = {"low SNR (< 0 dB)", "high SNR (>= 0 dB)", "overall"};
  for (std::size_t b = 0; b < 3; ++b) c.legend(b, kBarColors[b], kBarNames[b]);
  std::size_t g = 0;
  const double slot = c.px(1.0) - c.px(0.0);
  const double bar = slot * 0.8 / 3.0;
  for (const RunRecord* r : rs) {
    for (const auto& row : r->curriculum) {
      const double vals[3] = {row.acc_low, row.acc_high, row.acc_overall};
      const double gx = c.px(static_cast<double>(g)) + slot * 0.1;
      for (std::size_t b = 0; b < 3; ++b) {
        const double top = c.py(vals[b]);
        c.body += "<rect class=\"bar\" x=\"" + Canvas::n(gx + bar * static_cast<double>(b)) + "\" y=\"" + Canvas::n(top) +
                  "\" width=\"" + Canvas::n(bar) + "\" height=\"" + Canvas::n(c.py(0.0) - top) + "\" fill=\"" +
                  kBarColors[b] + "\"/>\n";
      }
      const double cx = c.px(static_cast<double>(g) + 0.5);
      const std::string label = rs.size() > 1 ? r->model_id + " " + row.label : row.label;
      c.text(cx, c.py(0.0) + 16, label,
             "text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-45 " + Canvas::n(cx) + " " +
                 Canvas::n(c.py(0.0) + 16) + ")\"");
      ++g;
    }
  }
  return c.finish();
}

std::vector<fs::path> emit_report(const std::vector<RunRecord>& runs, const fs::path& out_dir,
                                  const ReportOptions& options) {
  check_runs(runs);
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  const auto put = [&](const char* name, const std::string& text) {
    train::write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  if (!evaluated_runs(runs).empty()) {
    put("table1.csv", table1_csv(runs));
    put("table2.csv", table2_csv(runs));
    put("table3.csv", table3_csv(runs));
    put("fig1.csv", fig1_csv(runs, options.trend_axis));
    put("fig1.svg", fig1_svg(runs, options.trend_axis));
    if (const auto fit = try_fit(evaluated_runs(runs), options.trend_axis))
      put("fig1_trend.csv", std::string("axis,slope,intercept\n") + axis_name(options.trend_axis) + "," +
                                format_double(fit->slope) + "," + format_double(fit->intercept) + "\n");
    put("fig2.csv", fig2_csv(runs));
    put("fig2_long.csv", fig2_long_csv(runs));
    put("fig2.svg", fig2_svg(runs));
  }
  if (!curriculum_runs(runs).empty()) {
    put("fig3.csv", fig3_csv(runs));
    put("fig3.svg", fig3_svg(runs));
  }
  return written;
}

}  // namespace amr::report

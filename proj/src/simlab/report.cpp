#include "gencp/simlab/report.hpp"

#include "gencp/simlab/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gencp {

namespace {

std::string group_key(const ResultRow& r) {
  return r.setting + "\x1f" + r.split + "\x1f" + r.model + "\x1f" + r.estimator + "\x1f" + r.correction + "\x1f" +
         r.refit + "\x1f" + format_double(r.alpha);
}

std::string model_key(const std::string& setting, const std::string& split, const std::string& model) {
  return setting + "\x1f" + split + "\x1f" + model;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    const std::string k = group_key(r);
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }

  // truth means per model, keyed by truth key
  std::map<std::string, std::map<std::string, MeanSe>> truth;
  std::vector<SummaryRow> out;
  for (const std::string& k : order) {
    const auto& members = groups[k];
    const ResultRow& first = *members.front();
    SummaryRow s;
    s.setting = first.setting;
    s.split = first.split;
    s.model = first.model;
    s.estimator = first.estimator;
    s.correction = first.correction;
    s.refit = first.refit;
    s.alpha = first.alpha;
    s.draws = first.draws;
    s.target = first.target;
    std::vector<double> values, ses;
    for (const ResultRow* r : members) {
      if (!r->ok() || !std::isfinite(r->value)) {
        ++s.failed;
        continue;
      }
      values.push_back(r->value);
      ses.push_back(r->std_error);
    }
    const MeanSe ms = mean_se(values);
    s.count = static_cast<int>(values.size());
    s.mean = ms.mean;
    s.se = ms.se;
    s.mean_reported_se = mean_se(ses).mean;
    if (first.estimator == "err" || first.estimator == "err_alpha")
      truth[model_key(s.setting, s.split, s.model)][first.truth_key()] = ms;
    out.push_back(std::move(s));
  }

  for (SummaryRow& s : out) {
    const auto& t = truth[model_key(s.setting, s.split, s.model)];
    auto err = t.find("err");
    if (err != t.end() && err->second.mean != 0.0) {
      s.relative = s.estimator == "err" ? 1.0 : s.mean / err->second.mean;
      s.relative_se = s.estimator == "err" ? 0.0 : s.se / std::abs(err->second.mean);
    } else {
      s.relative = s.relative_se = std::nan("");
    }
    auto target = s.target.empty() ? t.end() : t.find(s.target);
    if (target != t.end()) {
      s.target_mean = target->second.mean;
      s.diff = s.mean - target->second.mean;
      s.combined_se = std::sqrt(s.se * s.se + target->second.se * target->second.se);
    } else {
      s.target_mean = s.diff = s.combined_se = std::nan("");
    }
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "setting,split,model,estimator,correction,refit,alpha,B,reps,failed,mean,se,mean_reported_se,relative,"
        "relative_se,target,target_mean,diff,combined_se\n";
  for (const SummaryRow& s : rows)
    os << s.setting << "," << csv_field(s.split) << "," << csv_field(s.model) << "," << csv_field(s.estimator) << ","
       << s.correction << "," << s.refit << "," << format_double(s.alpha) << "," << s.draws << "," << s.count << ","
       << s.failed << "," << format_double(s.mean) << "," << format_double(s.se) << ","
       << format_double(s.mean_reported_se) << "," << format_double(s.relative) << "," << format_double(s.relative_se)
       << "," << csv_field(s.target) << "," << format_double(s.target_mean) << "," << format_double(s.diff) << ","
       << format_double(s.combined_se) << "\n";
  return os.str();
}

std::string box_plot_svg(const std::vector<ResultRow>& rows, const std::string& setting, const std::string& split) {
  std::map<std::string, double> err_mean;
  {
    std::map<std::string, std::pair<double, int>> acc;
    for (const ResultRow& r : rows)
      if (r.setting == setting && r.split == split && r.estimator == "err" && r.ok()) {
        acc[r.model].first += r.value;
        ++acc[r.model].second;
      }
    for (const auto& [m, a] : acc) err_mean[m] = a.first / a.second;
  }
  std::vector<std::string> labels;
  std::map<std::string, std::vector<double>> boxes;
  for (const ResultRow& r : rows) {
    if (r.setting != setting || r.split != split || !r.ok() || !std::isfinite(r.value)) continue;
    auto em = err_mean.find(r.model);
    if (em == err_mean.end() || em->second == 0.0) continue;
    std::string label = r.model + " " + r.estimator + (r.correction.empty() ? "" : " " + r.correction);
    if (r.estimator == "err_alpha") label += " a=" + format_double(r.alpha);
    auto [it, inserted] = boxes.try_emplace(label);
    if (inserted) labels.push_back(label);
    it->second.push_back(r.value / em->second);
  }

  const double box_w = 36.0, gap = 18.0, left = 60.0, top = 30.0, height = 300.0;
  const double width = left + static_cast<double>(labels.size()) * (box_w + gap) + gap;
  double lo = 1.0, hi = 1.0;
  for (const auto& [l, v] : boxes) {
    lo = std::min(lo, quantile(v, 0.05));
    hi = std::max(hi, quantile(v, 0.95));
  }
  const double pad = 0.05 * (hi - lo + 1e-9);
  lo -= pad;
  hi += pad;
  auto ypos = [&](double v) { return top + height * (hi - std::clamp(v, lo, hi)) / (hi - lo); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << top + height + 160
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<text x=\"" << left << "\" y=\"18\" font-size=\"12\">relative MSE, " << xml_escape(setting) << " / "
     << xml_escape(split) << "</text>\n";
  os << "<line x1=\"" << left << "\" x2=\"" << width << "\" y1=\"" << ypos(1.0) << "\" y2=\"" << ypos(1.0)
     << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    os << "<text x=\"4\" y=\"" << ypos(v) + 3 << "\">" << format_double(std::round(v * 1000.0) / 1000.0)
       << "</text>\n";
  }
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const std::vector<double>& v = boxes[labels[b]];
    const double x = left + gap + static_cast<double>(b) * (box_w + gap);
    const double q1 = quantile(v, 0.25), q2 = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const MeanSe ms = mean_se(v);
    os << "<rect x=\"" << x << "\" y=\"" << ypos(q3) << "\" width=\"" << box_w << "\" height=\""
       << std::max(ypos(q1) - ypos(q3), 0.5) << "\" fill=\"#cfe0f3\" stroke=\"#335\"/>\n";
    os << "<line x1=\"" << x << "\" x2=\"" << x + box_w << "\" y1=\"" << ypos(q2) << "\" y2=\"" << ypos(q2)
       << "\" stroke=\"#335\"/>\n";
    const double cx = x + box_w / 2;
    os << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << ypos(ms.mean - 2 * ms.se) << "\" y2=\""
       << ypos(ms.mean + 2 * ms.se) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<circle cx=\"" << cx << "\" cy=\"" << ypos(ms.mean) << "\" r=\"2.5\"/>\n";
    os << "<text transform=\"translate(" << cx << "," << top + height + 8 << ") rotate(60)\">"
       << xml_escape(labels[b]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_report(const ExperimentResults& results, const std::string& dir) {
  write_text_file(dir + "/results.csv", results_to_csv(results));
  const std::vector<SummaryRow> summary = summarize(results.rows);
  write_text_file(dir + "/summary.csv", summary_to_csv(summary));
  std::vector<SummaryRow> truth;
  for (const SummaryRow& s : summary)
    if (s.estimator == "err" || s.estimator == "err_alpha") truth.push_back(s);
  write_text_file(dir + "/truth.csv", summary_to_csv(truth));
  std::vector<std::pair<std::string, std::string>> settings;
  for (const ResultRow& r : results.rows)
    if (std::find(settings.begin(), settings.end(), std::make_pair(r.setting, r.split)) == settings.end())
      settings.emplace_back(r.setting, r.split);
  for (const auto& [setting, split] : settings) {
    std::string name = "plot_" + setting + "_" + split + ".svg";
    for (char& c : name)
      if (c == '(' || c == ')' || c == ',' || c == ' ') c = '_';
    write_text_file(dir + "/" + name, box_plot_svg(results.rows, setting, split));
  }
}

const SummaryRow* find_summary(const std::vector<SummaryRow>& rows, const std::string& setting, const std::string& split,
                               const std::string& model, const std::string& estimator, const std::string& correction,
                               const std::string& refit, double alpha) {
  for (const SummaryRow& s : rows)
    if (s.setting == setting && s.split == split && s.model == model && s.estimator == estimator &&
        (correction.empty() || s.correction == correction) && (refit.empty() || s.refit == refit) &&
        (alpha < 0.0 || s.alpha == alpha))
      return &s;
  return nullptr;
}

}  // namespace gencp

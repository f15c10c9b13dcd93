#include "graphmask/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "graphmask/error.hpp"
#include "graphmask/io.hpp"

namespace graphmask {

using nlohmann::json;

namespace {

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json edge_json(const EdgeClassificationReport& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f_score", r.f_score},
          {"tp", r.tp},               {"fp", r.fp},         {"fn", r.fn}};
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2E", v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw DimensionError("table row has the wrong number of cells");
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) s += "  ";
      s += cells[c];
      if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
    }
    os << s << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string sweep_table_text(const SweepTable& t) {
  std::vector<std::string> header = {t.axis, "method"};
  header.insert(header.end(), t.metrics.begin(), t.metrics.end());
  header.emplace_back("trials");
  header.emplace_back("failures");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.rows) {
    std::vector<std::string> cells = {format_number(r.value), r.method};
    for (double m : r.metrics) cells.push_back(format_number(m));
    cells.push_back(std::to_string(r.trials));
    cells.push_back(std::to_string(r.failures));
    rows.push_back(std::move(cells));
  }
  return aligned_table(header, rows);
}

std::string sweep_table_tsv(const SweepTable& t) {
  std::ostringstream os;
  os << t.axis << "\tmethod";
  for (const auto& m : t.metrics) os << '\t' << m;
  os << "\ttrials\tfailures\n";
  for (const auto& r : t.rows) {
    os << format_number(r.value) << '\t' << r.method;
    for (double m : r.metrics) os << '\t' << format_number(m);
    os << '\t' << r.trials << '\t' << r.failures << '\n';
  }
  return os.str();
}

std::string sweep_table_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json m = json::object();
    for (std::size_t k = 0; k < t.metrics.size(); ++k) m[t.metrics[k]] = number_json(r.metrics.at(k));
    rows.push_back({{"value", r.value}, {"method", r.method}, {"metrics", m}, {"trials", r.trials},
                    {"failures", r.failures}});
  }
  json doc = {{"format", kFormatVersion}, {"axis", t.axis}, {"metrics", t.metrics}, {"rows", rows}};
  return doc.dump(2) + "\n";
}

SweepTable sweep_table_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    SweepTable t;
    t.axis = doc.at("axis").get<std::string>();
    t.metrics = doc.at("metrics").get<std::vector<std::string>>();
    for (const auto& r : doc.at("rows")) {
      SweepRow row;
      row.value = r.at("value").get<double>();
      row.method = r.at("method").get<std::string>();
      for (const auto& m : t.metrics) row.metrics.push_back(number_from(r.at("metrics").at(m)));
      row.trials = r.value("trials", 0);
      row.failures = r.value("failures", 0);
      t.rows.push_back(std::move(row));
    }
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep table: ") + e.what());
  }
}

std::string sweep_svg(const SweepTable& t, const std::string& metric, bool log_x) {
  const int col = t.metric_index(metric);
  if (col < 0) throw ValidationError("table has no metric '" + metric + "'");
  if (log_x)
    for (const auto& r : t.rows)
      if (!(r.value > 0.0)) throw ValidationError("log axis needs positive values");

  std::vector<std::string> methods;
  for (const auto& r : t.rows)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);

  auto xv = [&](double v) { return log_x ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& r : t.rows) {
    const double y = r.metrics.at(static_cast<std::size_t>(col));
    if (std::isnan(y)) continue;
    x0 = std::min(x0, xv(r.value));
    x1 = std::max(x1, xv(r.value));
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  constexpr double width = 640, height = 400, left = 70, right = 150, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double v) { return left + (xv(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
     << "\" height=\"" << ph << "\"/></g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.2f", py(yv));
    os << "<text x=\"" << left - 6 << "\" y=\"" << buf << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_number(yv) << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& r : t.rows)
    if (std::find(xs.begin(), xs.end(), r.value) == xs.end()) xs.push_back(r.value);
  for (double v : xs) {
    std::snprintf(buf, sizeof buf, "%.2f", px(v));
    os << "<text x=\"" << buf << "\" y=\"" << top + ph + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << format_number(v) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\" text-anchor=\"middle\">"
     << t.axis << "</text>\n";
  os << "<text x=\"14\" y=\"" << top + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << top + ph / 2
     << ")\" text-anchor=\"middle\">" << metric << "</text>\n";

  for (std::size_t m = 0; m < methods.size(); ++m) {
    const char* color = colors[m % 6];
    std::string points;
    for (const auto& r : t.rows) {
      if (r.method != methods[m]) continue;
      const double y = r.metrics.at(static_cast<std::size_t>(col));
      if (std::isnan(y)) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", points.empty() ? "" : " ", px(r.value), py(y));
      points += buf;
    }
    os << "<polyline data-method=\"" << methods[m] << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(m);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << methods[m] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string trial_text(const std::vector<TrialMetrics>& trial) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : trial) {
    if (!t.ok) {
      rows.push_back({to_string(t.method), "-", "-", "-", "-", "-", "-", t.error});
      continue;
    }
    rows.push_back({to_string(t.method), percent(t.edges.precision), percent(t.edges.recall),
                    percent(t.edges.f_score), scientific(t.weights.mse),
                    t.masks ? percent(t.masks->precision) : "-", t.masks ? percent(t.masks->recall) : "-",
                    t.masks ? percent(t.masks->f_score) : "-"});
  }
  return aligned_table({"method", "precision%", "recall%", "f_score%", "mse", "mask_p%", "mask_r%", "mask_f%"}, rows);
}

std::string trial_json(const std::vector<TrialMetrics>& trial) {
  json arr = json::array();
  for (const auto& t : trial) {
    json j = {{"method", to_string(t.method)}, {"ok", t.ok}};
    if (t.ok) {
      j["edges"] = edge_json(t.edges);
      j["weights"] = {{"mse", t.weights.mse}, {"rse", t.weights.rse}};
      j["masks"] = t.masks ? edge_json(*t.masks) : json(nullptr);
    } else {
      j["error"] = t.error;
    }
    arr.push_back(j);
  }
  return json({{"format", kFormatVersion}, {"methods", arr}}).dump(2) + "\n";
}

std::string weather_result_text(const WeatherExperimentResult& r) {
  std::ostringstream os;
  os << "stations " << r.stations << ", rounds " << r.columns;
  if (!r.dropped.empty()) {
    os << ", dropped";
    for (const auto& id : r.dropped) os << ' ' << id;
  }
  os << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.inpaint.mean) {
    char mape[32];
    std::snprintf(mape, sizeof mape, "%.2f", s.mape);
    rows.push_back({s.method, format_number(s.mse), mape, std::to_string(s.filled)});
  }
  os << aligned_table({"method", "mse", "mape%", "filled"}, rows);
  return os.str();
}

std::string weather_result_json(const WeatherExperimentResult& r) {
  json methods = json::array();
  for (std::size_t m = 0; m < r.inpaint.mean.size(); ++m) {
    const auto& s = r.inpaint.mean[m];
    std::vector<double> mse(r.inpaint.mse.col(static_cast<Eigen::Index>(m)).begin(),
                            r.inpaint.mse.col(static_cast<Eigen::Index>(m)).end());
    std::vector<double> mape(r.inpaint.mape.col(static_cast<Eigen::Index>(m)).begin(),
                             r.inpaint.mape.col(static_cast<Eigen::Index>(m)).end());
    methods.push_back({{"method", s.method},
                       {"mse", s.mse},
                       {"mape", s.mape},
                       {"filled", s.filled},
                       {"round_mse", mse},
                       {"round_mape", mape}});
  }
  return json({{"format", kFormatVersion},
               {"stations", r.stations},
               {"rounds", r.columns},
               {"dropped", r.dropped},
               {"methods", methods}})
             .dump(2) +
         "\n";
}

std::string office_result_text(const OfficeExperimentResult& r) {
  std::ostringstream os;
  char cov[32];
  std::snprintf(cov, sizeof cov, "%.3f", r.coverability);
  os << "|A| " << r.group_a << ", |B| " << r.group_b << ", coverability " << cov << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.scores)
    rows.push_back({s.method, percent(s.jaccard), percent(s.edges.recall), percent(s.edges.precision),
                    percent(s.edges.f_score), std::to_string(s.edge_count)});
  os << aligned_table({"method", "jaccard%", "recall%", "precision%", "f_score%", "edges"}, rows);
  if (!r.ml_contributions.empty()) {
    os << "ml layer contributions %:";
    for (double c : r.ml_contributions) os << ' ' << percent(c / 100.0);
    os << '\n';
  }
  return os.str();
}

std::string office_result_json(const OfficeExperimentResult& r) {
  json scores = json::array();
  for (const auto& s : r.scores)
    scores.push_back({{"method", s.method}, {"jaccard", s.jaccard}, {"edges", edge_json(s.edges)},
                      {"edge_count", s.edge_count}});
  return json({{"format", kFormatVersion},
               {"group_a", r.group_a},
               {"group_b", r.group_b},
               {"coverability", r.coverability},
               {"scores", scores},
               {"ml_contributions", r.ml_contributions}})
             .dump(2) +
         "\n";
}

}  // namespace graphmask

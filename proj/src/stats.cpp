#include "cellmetrics/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "cellmetrics/csv.hpp"

namespace cellmetrics {
namespace {

std::vector<double> sorted_finite(std::span<const double> samples, const char* who) {
  if (samples.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty sample set");
  }
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(who) + ": non-finite sample");
    }
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double wasserstein1(std::span<const double> f, std::span<const double> g) {
  const auto a = sorted_finite(f, "wasserstein1");
  const auto b = sorted_finite(g, "wasserstein1");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // L1 distance between the two step CDFs, integrated exactly over the
  // union of sample values (equals the quantile-function L1 distance).
  std::size_t i = 0, j = 0;
  double total = 0.0;
  double prev = 0.0;
  bool have_prev = false;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    if (have_prev && v > prev) {
      const double cdf_a = static_cast<double>(i) / na;
      const double cdf_b = static_cast<double>(j) / nb;
      total += std::abs(cdf_a - cdf_b) * (v - prev);
    }
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    prev = v;
    have_prev = true;
  }
  return total;
}

Summary summarize(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("summarize: empty sample set");
  }
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double v : samples) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(samples.size())),
          samples.size()};
}

ComparisonReport build_report(const MetricTable& real, const MetricTable& generated,
                              const std::string& pooling) {
  ComparisonReport report;
  report.pooling = pooling;
  std::set<std::string> metrics;
  for (const auto& [m, _] : real) metrics.insert(m);
  for (const auto& [m, _] : generated) metrics.insert(m);
  for (const auto& metric : metrics) {
    const auto real_it = real.find(metric);
    const auto gen_it = generated.find(metric);
    std::set<std::string> conditions;
    if (real_it != real.end()) {
      for (const auto& [c, _] : real_it->second) conditions.insert(c);
    }
    if (gen_it != generated.end()) {
      for (const auto& [c, _] : gen_it->second) conditions.insert(c);
    }
    for (const auto& condition : conditions) {
      ReportRow row;
      row.metric = metric;
      row.condition = condition;
      const std::vector<double>* rs = nullptr;
      const std::vector<double>* gs = nullptr;
      if (real_it != real.end()) {
        if (auto it = real_it->second.find(condition); it != real_it->second.end())
          rs = &it->second;
      }
      if (gen_it != generated.end()) {
        if (auto it = gen_it->second.find(condition); it != gen_it->second.end())
          gs = &it->second;
      }
      if (rs && !rs->empty()) row.real = summarize(*rs);
      if (gs && !gs->empty()) row.generated = summarize(*gs);
      if (row.real && row.generated) {
        row.w1 = wasserstein1(*rs, *gs);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report_csv(const ComparisonReport& report, std::ostream& out) {
  out << "metric,condition,w1,real_n,real_mean,real_sd,gen_n,gen_mean,gen_sd\n";
  for (const auto& row : report.rows) {
    out << csv_escape(row.metric) << ',' << csv_escape(row.condition) << ',';
    if (row.w1) out << format_double(*row.w1);
    out << ',';
    if (row.real) {
      out << row.real->n << ',' << format_double(row.real->mean) << ','
          << format_double(row.real->sd);
    } else {
      out << ",,";
    }
    out << ',';
    if (row.generated) {
      out << row.generated->n << ',' << format_double(row.generated->mean)
          << ',' << format_double(row.generated->sd);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_report_json(const ComparisonReport& report, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json j;
    j["metric"] = row.metric;
    j["condition"] = row.condition;
    j["w1"] = row.w1 ? nlohmann::json(*row.w1) : nlohmann::json(nullptr);
    auto side = [](const std::optional<Summary>& s) -> nlohmann::json {
      if (!s) return nullptr;
      return {{"n", s->n}, {"mean", s->mean}, {"sd", s->sd}};
    };
    j["real"] = side(row.real);
    j["generated"] = side(row.generated);
    rows.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["rows"] = std::move(rows);
  doc["pooling"] = report.pooling;
  out << doc.dump(2) << '\n';
}

void write_report_markdown(const ComparisonReport& report, std::ostream& out) {
  auto pm = [](const std::optional<Summary>& s) -> std::string {
    if (!s) return "-";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.4g \xC2\xB1 %.3g", s->mean, s->sd);
    return buf;
  };
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"Metric", "Condition", "W1", "Real (mean \xC2\xB1 SD, n)",
                   "Generated (mean \xC2\xB1 SD, n)"});
  for (const auto& row : report.rows) {
    char w1buf[48];
    if (row.w1) {
      std::snprintf(w1buf, sizeof(w1buf), "%.6g", *row.w1);
    }
    auto with_n = [&pm](const std::optional<Summary>& s) {
      if (!s) return std::string("-");
      return pm(s) + " (n=" + std::to_string(s->n) + ")";
    };
    cells.push_back({row.metric, row.condition,
                     row.w1 ? std::string(w1buf) : std::string("-"),
                     with_n(row.real), with_n(row.generated)});
  }
  std::array<std::size_t, 5> widths{};
  for (const auto& r : cells) {
    for (std::size_t c = 0; c < 5; ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out << '|';
    for (std::size_t c = 0; c < 5; ++c) {
      out << ' ' << cells[i][c] << std::string(widths[c] - cells[i][c].size(), ' ')
          << " |";
    }
    out << '\n';
    if (i == 0) {
      out << '|';
      for (std::size_t c = 0; c < 5; ++c) {
        out << std::string(widths[c] + 2, '-') << '|';
      }
      out << '\n';
    }
  }
}

}  // namespace cellmetrics

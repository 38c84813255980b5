#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace cellmetrics {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation (divisor n)
  std::size_t n = 0;
};

/// Exact Wasserstein-1 distance between two empirical distributions,
/// computed by integrating |F - G| over the merged sample breakpoints.
/// Symmetric; throws std::invalid_argument on empty or non-finite input.
double wasserstein1(std::span<const double> f, std::span<const double> g);

Summary summarize(std::span<const double> samples);

/// metric name -> condition label -> pooled samples.
using MetricTable = std::map<std::string, std::map<std::string, std::vector<double>>>;

struct ReportRow {
  std::string metric;
  std::string condition;
  std::optional<double> w1;  // absent when the condition exists on one side only
  std::optional<Summary> real;
  std::optional<Summary> generated;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;  // metric-major, condition-minor
  std::string pooling;          // how samples were pooled, for provenance
};

ComparisonReport build_report(const MetricTable& real, const MetricTable& generated,
                              const std::string& pooling = "per-sample");

void write_report_csv(const ComparisonReport& report, std::ostream& out);
void write_report_json(const ComparisonReport& report, std::ostream& out);
void write_report_markdown(const ComparisonReport& report, std::ostream& out);

}  // namespace cellmetrics

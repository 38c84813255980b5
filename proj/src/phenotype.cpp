#include "cellmetrics/phenotype.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cellmetrics {
namespace {

AxisThresholds axis_thresholds(std::vector<double> values, double low_pct,
                               double high_pct) {
  std::sort(values.begin(), values.end());
  return {percentile(values, low_pct), percentile(values, high_pct)};
}

Level classify(double value, const AxisThresholds& t) {
  if (value < t.p10) return Level::Low;
  if (value > t.p90) return Level::High;
  return Level::Med;
}

const char* count_phrase(Level l) {
  switch (l) {
    case Level::Low: return "a few cells";
    case Level::High: return "many cells";
    case Level::Med: return "cells";
  }
  return "cells";
}

const char* division_phrase(Level l) {
  switch (l) {
    case Level::Low: return "rarely divide";
    case Level::High: return "undergo frequent divisions";
    case Level::Med: return "divide occasionally";
  }
  return "divide occasionally";
}

const char* movement_phrase(Level l) {
  switch (l) {
    case Level::Low: return "barely move";
    case Level::High: return "move rapidly";
    case Level::Med: return "move at a moderate pace";
  }
  return "move at a moderate pace";
}

const char* death_phrase(Level l) {
  switch (l) {
    case Level::Low: return "rarely disappear";
    case Level::High: return "frequently disappear due to cell death";
    case Level::Med: return "occasionally disappear due to cell death";
  }
  return "occasionally disappear due to cell death";
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double normalize_axis(double value, const AxisRange& range) {
  if (!(range.min < range.max)) {
    return 0.5;
  }
  return clamp01((value - range.min) / (range.max - range.min));
}

AxisRange axis_range(std::span<const PhenotypeScores> dataset,
                     double PhenotypeScores::*axis) {
  AxisRange r{dataset.front().*axis, dataset.front().*axis};
  for (const auto& s : dataset) {
    r.min = std::min(r.min, s.*axis);
    r.max = std::max(r.max, s.*axis);
  }
  return r;
}

}  // namespace

const char* to_string(Level level) {
  switch (level) {
    case Level::Low: return "LOW";
    case Level::Med: return "MED";
    case Level::High: return "HIGH";
  }
  return "MED";
}

double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) {
    throw std::invalid_argument("percentile: empty sample set");
  }
  if (p < 0.0 || p > 100.0) {
    throw std::invalid_argument("percentile: p outside [0,100]");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double idx = static_cast<double>(sorted.size() - 1) * p / 100.0;
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  if (lo == hi) return sorted[lo];
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ThresholdSet compute_thresholds(std::span<const PhenotypeScores> dataset,
                                double low_pct, double high_pct) {
  if (dataset.size() < 2) {
    throw std::invalid_argument("compute_thresholds: need at least 2 samples");
  }
  if (low_pct > high_pct) {
    throw std::invalid_argument("compute_thresholds: low percentile above high");
  }
  auto collect = [&dataset](double PhenotypeScores::*axis) {
    std::vector<double> v;
    v.reserve(dataset.size());
    for (const auto& s : dataset) v.push_back(s.*axis);
    return v;
  };
  ThresholdSet t;
  t.cell_count = axis_thresholds(collect(&PhenotypeScores::cell_count), low_pct, high_pct);
  t.proliferation = axis_thresholds(collect(&PhenotypeScores::proliferation), low_pct, high_pct);
  t.migration = axis_thresholds(collect(&PhenotypeScores::migration), low_pct, high_pct);
  t.death = axis_thresholds(collect(&PhenotypeScores::death), low_pct, high_pct);
  return t;
}

PhenotypeLabels label_scores(const PhenotypeScores& scores,
                             const ThresholdSet& thresholds) {
  PhenotypeLabels labels;
  labels.cell_count = classify(scores.cell_count, thresholds.cell_count);
  labels.proliferation = classify(scores.proliferation, thresholds.proliferation);
  labels.migration = classify(scores.migration, thresholds.migration);
  labels.death = classify(scores.death, thresholds.death);
  return labels;
}

bool is_extreme(const PhenotypeLabels& labels) {
  int extremes = 0;
  for (Level l : {labels.death, labels.migration, labels.proliferation}) {
    if (l != Level::Med) ++extremes;
  }
  return extremes >= 2;
}

std::string build_prompt(const PhenotypeLabels& labels) {
  std::string prompt = "Time-lapse microscopy video of ";
  prompt += count_phrase(labels.cell_count);
  prompt += ". The cells ";
  prompt += division_phrase(labels.proliferation);
  prompt += ", ";
  prompt += movement_phrase(labels.migration);
  prompt += ", and ";
  prompt += death_phrase(labels.death);
  prompt += ".";
  return prompt;
}

NormalizationRanges compute_ranges(std::span<const PhenotypeScores> dataset) {
  if (dataset.empty()) {
    throw std::invalid_argument("compute_ranges: empty dataset");
  }
  NormalizationRanges r;
  r.cell_count = axis_range(dataset, &PhenotypeScores::cell_count);
  r.proliferation = axis_range(dataset, &PhenotypeScores::proliferation);
  r.migration = axis_range(dataset, &PhenotypeScores::migration);
  r.death = axis_range(dataset, &PhenotypeScores::death);
  return r;
}

std::array<double, 4> normalize_phenotypes(const PhenotypeScores& scores,
                                           const NormalizationRanges& ranges) {
  return {normalize_axis(scores.cell_count, ranges.cell_count),
          normalize_axis(scores.proliferation, ranges.proliferation),
          normalize_axis(scores.migration, ranges.migration),
          normalize_axis(scores.death, ranges.death)};
}

}  // namespace cellmetrics

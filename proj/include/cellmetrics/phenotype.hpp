#pragma once

#include <array>
#include <span>
#include <string>

namespace cellmetrics {

/// Raw screen scores, arbitrary units. Axis order everywhere in this
/// project: cell_count, proliferation, migration, death.
struct PhenotypeScores {
  double cell_count = 0.0;
  double proliferation = 0.0;
  double migration = 0.0;
  double death = 0.0;

  std::array<double, 4> as_array() const {
    return {cell_count, proliferation, migration, death};
  }
};

enum class Level { Low, Med, High };

const char* to_string(Level level);

struct PhenotypeLabels {
  Level cell_count = Level::Med;
  Level proliferation = Level::Med;
  Level migration = Level::Med;
  Level death = Level::Med;

  bool operator==(const PhenotypeLabels&) const = default;
};

struct AxisThresholds {
  double p10 = 0.0;
  double p90 = 0.0;
};

struct ThresholdSet {
  AxisThresholds cell_count, proliferation, migration, death;
};

struct AxisRange {
  double min = 0.0;
  double max = 0.0;
};

struct NormalizationRanges {
  AxisRange cell_count, proliferation, migration, death;
};

/// Percentile by linear interpolation between order statistics,
/// index = (n-1) * p / 100. `p` in [0,100].
double percentile(std::span<const double> samples, double p);

/// 10th/90th percentile per axis over the dataset (other cut points are
/// accepted for tooling). Requires >= 2 samples.
ThresholdSet compute_thresholds(std::span<const PhenotypeScores> dataset,
                                double low_pct = 10.0, double high_pct = 90.0);

/// Strictly below p10 -> LOW, strictly above p90 -> HIGH, otherwise MED
/// (boundary values are MED).
PhenotypeLabels label_scores(const PhenotypeScores& scores,
                             const ThresholdSet& thresholds);

/// True iff at least two of {death, migration, proliferation} are HIGH or
/// LOW. Cell count does not participate.
bool is_extreme(const PhenotypeLabels& labels);

/// Deterministic sentence from the label set; clause order is count,
/// division, movement, death.
std::string build_prompt(const PhenotypeLabels& labels);

NormalizationRanges compute_ranges(std::span<const PhenotypeScores> dataset);

/// (value - min) / (max - min) per axis, clamped to [0,1]; a degenerate
/// axis (min >= max) maps to 0.5.
std::array<double, 4> normalize_phenotypes(const PhenotypeScores& scores,
                                           const NormalizationRanges& ranges);

}  // namespace cellmetrics

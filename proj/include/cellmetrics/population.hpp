#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cellmetrics/mask_video.hpp"

namespace cellmetrics {

struct CountSeries {
  std::vector<std::size_t> counts;  // one entry per frame
};

struct PopulationStats {
  std::size_t initial_count = 0;
  std::size_t final_count = 0;
  double growth_ratio = 0.0;   // final / max(initial, 1)
  long growth_absolute = 0;    // final - initial
  std::size_t division_count = 0;
  std::vector<std::size_t> division_frames;  // sorted
  // Mean gap between consecutive division frames; defined iff
  // division_count >= 2.
  std::optional<double> avg_division_interval;
};

/// Nuclei per frame: connected components (8-connectivity) for binary
/// videos, distinct nonzero labels for labeled ones.
CountSeries counts_per_frame(const MaskVideo& video);

/// Derivative-threshold division detection: frames t with
/// counts[t+1] - counts[t] > tau are division frames.
PopulationStats population_stats(const CountSeries& counts, double tau);

}  // namespace cellmetrics

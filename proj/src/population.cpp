#include "cellmetrics/population.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "cellmetrics/morphology.hpp"

namespace cellmetrics {

CountSeries counts_per_frame(const MaskVideo& video) {
  CountSeries series;
  series.counts.reserve(video.frame_count());
  const std::size_t h = video.height();
  const std::size_t w = video.width();
  for (std::size_t t = 0; t < video.frame_count(); ++t) {
    const auto frame = video.frame(t);
    if (video.kind() == PixelKind::Binary) {
      series.counts.push_back(
          static_cast<std::size_t>(label_components(frame, h, w).second));
    } else {
      std::uint16_t max_label = 0;
      for (std::uint16_t v : frame) max_label = std::max(max_label, v);
      std::vector<char> seen(static_cast<std::size_t>(max_label) + 1, 0);
      std::size_t distinct = 0;
      for (std::uint16_t v : frame) {
        if (v != 0 && !seen[v]) {
          seen[v] = 1;
          ++distinct;
        }
      }
      series.counts.push_back(distinct);
    }
  }
  return series;
}

PopulationStats population_stats(const CountSeries& counts, double tau) {
  if (counts.counts.empty()) {
    throw std::invalid_argument("population_stats: count series is empty");
  }
  if (tau <= 0.0) {
    throw std::invalid_argument("population_stats: tau must be positive");
  }
  PopulationStats stats;
  stats.initial_count = counts.counts.front();
  stats.final_count = counts.counts.back();
  stats.growth_ratio =
      static_cast<double>(stats.final_count) /
      static_cast<double>(std::max<std::size_t>(stats.initial_count, 1));
  stats.growth_absolute = static_cast<long>(stats.final_count) -
                          static_cast<long>(stats.initial_count);
  for (std::size_t t = 0; t + 1 < counts.counts.size(); ++t) {
    const double derivative = static_cast<double>(counts.counts[t + 1]) -
                              static_cast<double>(counts.counts[t]);
    if (derivative > tau) {
      stats.division_frames.push_back(t);
    }
  }
  stats.division_count = stats.division_frames.size();
  if (stats.division_count >= 2) {
    double gap_sum = 0.0;
    for (std::size_t i = 0; i + 1 < stats.division_frames.size(); ++i) {
      gap_sum += static_cast<double>(stats.division_frames[i + 1] -
                                     stats.division_frames[i]);
    }
    stats.avg_division_interval =
        gap_sum / static_cast<double>(stats.division_count - 1);
  }
  return stats;
}

}  // namespace cellmetrics

#pragma once

#include <vector>

#include "cellmetrics/mask_video.hpp"
#include "cellmetrics/morphology.hpp"
#include "cellmetrics/movement.hpp"
#include "cellmetrics/population.hpp"

namespace cellmetrics {

struct AnalyzeParams {
  double tau = 0.5;                // division-detection threshold
  double max_link_distance = 40.0; // pixels
};

struct VideoAnalysis {
  MorphologySet morphology;
  std::vector<Track> tracks;
  std::vector<MovementMetrics> movement;  // tracks with >= 2 observations
  CountSeries counts;
  PopulationStats population;
};

/// Runs the full per-video measurement pipeline, labeling each frame once
/// and sharing the result between morphology, tracking and counting.
VideoAnalysis analyze_video(const MaskVideo& video, const AnalyzeParams& params);

}  // namespace cellmetrics

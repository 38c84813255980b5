#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cellmetrics/mask_video.hpp"

namespace cellmetrics {

struct TrackObservation {
  std::size_t frame_index = 0;
  Centroid centroid;
};

/// One nucleus's centroid trajectory. Frame indices are strictly
/// increasing and there is at least one observation.
struct Track {
  std::uint32_t track_id = 0;
  std::vector<TrackObservation> observations;
};

struct MovementMetrics {
  std::uint32_t track_id = 0;
  std::size_t n_obs = 0;
  double total_distance = 0.0;   // sum of step lengths
  double net_displacement = 0.0; // first-to-last straight-line distance
  double avg_speed = 0.0;        // pixels per frame
  double directness = 0.0;       // net / total, 0 when total = 0
};

struct Detection {
  std::int32_t label = 0;
  Centroid centroid;
};

/// Centroid (mean pixel coordinate) of every nonzero label, ordered by label.
std::vector<Detection> extract_centroids(std::span<const std::int32_t> labeled_frame,
                                         std::size_t height, std::size_t width);

/// Greedy globally-nearest one-to-one linking between consecutive frames.
/// Candidate pairs are taken in ascending Euclidean distance (ties broken
/// by smaller previous-track id, then smaller detection label); pairs
/// beyond max_link_distance are rejected. Unmatched detections open new
/// tracks, unmatched tracks terminate.
std::vector<Track> link_tracks(const std::vector<std::vector<Detection>>& per_frame,
                               double max_link_distance);

/// Per-track movement metrics; absent for tracks with < 2 observations.
std::optional<MovementMetrics> movement_metrics(const Track& track);

}  // namespace cellmetrics

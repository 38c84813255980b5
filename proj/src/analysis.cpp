#include "cellmetrics/analysis.hpp"

#include <stdexcept>

namespace cellmetrics {

VideoAnalysis analyze_video(const MaskVideo& video, const AnalyzeParams& params) {
  if (params.tau <= 0.0) {
    throw std::invalid_argument("analyze_video: tau must be positive");
  }
  if (params.max_link_distance <= 0.0) {
    throw std::invalid_argument("analyze_video: max_link_distance must be positive");
  }
  VideoAnalysis result;
  const std::size_t h = video.height();
  const std::size_t w = video.width();

  std::vector<std::vector<Detection>> per_frame_detections;
  per_frame_detections.reserve(video.frame_count());
  result.counts.counts.reserve(video.frame_count());

  for (std::size_t t = 0; t < video.frame_count(); ++t) {
    const auto frame = video.frame(t);
    std::vector<std::int32_t> labeled;
    if (video.kind() == PixelKind::Binary) {
      labeled = label_components(frame, h, w).first;
    } else {
      labeled.assign(frame.begin(), frame.end());
    }
    auto descriptors = region_descriptors(labeled, h, w, t);
    result.counts.counts.push_back(descriptors.size());

    std::vector<Detection> detections;
    detections.reserve(descriptors.size());
    for (const auto& d : descriptors) {
      detections.push_back({static_cast<std::int32_t>(d.label), d.centroid});
    }
    per_frame_detections.push_back(std::move(detections));
    result.morphology.descriptors.insert(result.morphology.descriptors.end(),
                                         descriptors.begin(), descriptors.end());
  }

  result.tracks = link_tracks(per_frame_detections, params.max_link_distance);
  for (const Track& track : result.tracks) {
    if (auto m = movement_metrics(track)) {
      result.movement.push_back(*m);
    }
  }
  result.population = population_stats(result.counts, params.tau);
  return result;
}

}  // namespace cellmetrics

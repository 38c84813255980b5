#include "cellmetrics/movement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellmetrics {
namespace {

double euclid(const Centroid& a, const Centroid& b) {
  return std::hypot(a.y - b.y, a.x - b.x);
}

}  // namespace

std::vector<Detection> extract_centroids(std::span<const std::int32_t> labeled_frame,
                                         std::size_t height, std::size_t width) {
  if (labeled_frame.size() != height * width) {
    throw std::invalid_argument("extract_centroids: frame size mismatch");
  }
  std::int32_t max_label = 0;
  for (std::int32_t v : labeled_frame) max_label = std::max(max_label, v);
  if (max_label == 0) return {};

  struct Accum {
    std::int64_t n = 0, sum_y = 0, sum_x = 0;
  };
  std::vector<Accum> accum(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t i = 0; i < labeled_frame.size(); ++i) {
    const std::int32_t lab = labeled_frame[i];
    if (lab <= 0) continue;
    Accum& a = accum[static_cast<std::size_t>(lab)];
    a.n += 1;
    a.sum_y += static_cast<std::int64_t>(i / width);
    a.sum_x += static_cast<std::int64_t>(i % width);
  }
  std::vector<Detection> out;
  for (std::int32_t lab = 1; lab <= max_label; ++lab) {
    const Accum& a = accum[static_cast<std::size_t>(lab)];
    if (a.n == 0) continue;
    out.push_back({lab,
                   {static_cast<double>(a.sum_y) / static_cast<double>(a.n),
                    static_cast<double>(a.sum_x) / static_cast<double>(a.n)}});
  }
  return out;
}

std::vector<Track> link_tracks(const std::vector<std::vector<Detection>>& per_frame,
                               double max_link_distance) {
  if (max_link_distance <= 0.0) {
    throw std::invalid_argument("link_tracks: max_link_distance must be positive");
  }
  std::vector<Track> tracks;
  // Tracks still matchable in the next frame, as indices into `tracks`.
  std::vector<std::size_t> active;

  for (std::size_t t = 0; t < per_frame.size(); ++t) {
    const auto& detections = per_frame[t];
    std::vector<std::size_t> next_active;

    if (!active.empty() && !detections.empty()) {
      struct Candidate {
        double dist;
        std::uint32_t track_id;
        std::int32_t det_label;
        std::size_t track_pos;  // index into `active`
        std::size_t det_pos;
      };
      std::vector<Candidate> candidates;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const Track& tr = tracks[active[a]];
        const Centroid& last = tr.observations.back().centroid;
        for (std::size_t d = 0; d < detections.size(); ++d) {
          const double dist = euclid(last, detections[d].centroid);
          if (dist <= max_link_distance) {
            candidates.push_back({dist, tr.track_id, detections[d].label, a, d});
          }
        }
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const Candidate& a, const Candidate& b) {
                  if (a.dist != b.dist) return a.dist < b.dist;
                  if (a.track_id != b.track_id) return a.track_id < b.track_id;
                  return a.det_label < b.det_label;
                });
      std::vector<char> track_used(active.size(), 0);
      std::vector<char> det_used(detections.size(), 0);
      for (const Candidate& c : candidates) {
        if (track_used[c.track_pos] || det_used[c.det_pos]) continue;
        track_used[c.track_pos] = 1;
        det_used[c.det_pos] = 1;
        Track& tr = tracks[active[c.track_pos]];
        tr.observations.push_back({t, detections[c.det_pos].centroid});
        next_active.push_back(active[c.track_pos]);
      }
      for (std::size_t d = 0; d < detections.size(); ++d) {
        if (det_used[d]) continue;
        tracks.push_back({static_cast<std::uint32_t>(tracks.size()),
                          {{t, detections[d].centroid}}});
        next_active.push_back(tracks.size() - 1);
      }
    } else {
      for (const Detection& det : detections) {
        tracks.push_back(
            {static_cast<std::uint32_t>(tracks.size()), {{t, det.centroid}}});
        next_active.push_back(tracks.size() - 1);
      }
    }
    // Deterministic matching order in the next frame.
    std::sort(next_active.begin(), next_active.end());
    active = std::move(next_active);
  }
  return tracks;
}

std::optional<MovementMetrics> movement_metrics(const Track& track) {
  if (track.observations.empty()) {
    throw std::invalid_argument("movement_metrics: track has no observations");
  }
  const std::size_t n = track.observations.size();
  if (n < 2) {
    return std::nullopt;  // no movement data
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    total += euclid(track.observations[i].centroid,
                    track.observations[i + 1].centroid);
  }
  const double net = euclid(track.observations.front().centroid,
                            track.observations.back().centroid);
  MovementMetrics m;
  m.track_id = track.track_id;
  m.n_obs = n;
  m.total_distance = total;
  m.net_displacement = net;
  m.avg_speed = total / static_cast<double>(n - 1);
  m.directness = total > 0.0 ? net / total : 0.0;
  return m;
}

}  // namespace cellmetrics

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "cellmetrics/mask_video.hpp"

namespace cellmetrics {

struct SimParams {
  std::size_t height = 512;
  std::size_t width = 512;
  std::size_t frames = 81;
  std::size_t initial_count = 10;
  double division_prob = 0.0;  // per cell per frame
  double death_prob = 0.0;     // per cell per frame
  double motion_std = 0.0;     // isotropic Gaussian step, pixels/frame
  double nucleus_radius = 6.0; // pixels, >= 1
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct CellTrajectory {
  std::uint32_t cell_id = 0;
  std::size_t start_frame = 0;
  std::vector<Centroid> positions;  // one per frame while alive

  bool operator==(const CellTrajectory&) const = default;
};

/// Authoritative per-frame event ledger. births[t]/deaths[t] record label
/// transitions between frames t and t+1; a division retires the parent
/// label (1 death) and creates two daughters (2 births), so
/// counts[t+1] = counts[t] + births[t] - deaths[t] always holds.
struct GroundTruth {
  std::vector<std::size_t> counts;  // length T
  std::vector<std::size_t> births;  // length T-1
  std::vector<std::size_t> deaths;  // length T-1
  std::vector<CellTrajectory> cells;

  bool operator==(const GroundTruth&) const = default;
};

/// Seeded stochastic mask-video generator: disk nuclei, Gaussian motion
/// with border reflection, per-frame death/division draws. A minimum
/// center separation of 2*radius + 2 is enforced by rejection so the
/// rasterized disks never merge, keeping mask-derived counts equal to the
/// ledger. Deterministic for a fixed parameter set.
std::pair<MaskVideo, GroundTruth> simulate(const SimParams& params);

void export_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace cellmetrics

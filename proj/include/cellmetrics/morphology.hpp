#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cellmetrics/mask_video.hpp"

namespace cellmetrics {

/// Per-nucleus shape record for one frame.
struct RegionDescriptor {
  std::size_t frame_index = 0;
  std::uint32_t label = 0;
  double area = 0.0;          // pixel count
  double eccentricity = 0.0;  // in [0,1], 0 for degenerate regions
  double solidity = 0.0;      // area / pixel-corner convex hull area, in (0,1]
  double perimeter = 0.0;     // weighted contour length
  Centroid centroid;
};

struct MorphologySet {
  std::vector<RegionDescriptor> descriptors;  // frame-major, label-minor
};

/// Labels 8-connected foreground components of a binary frame. Background
/// stays 0; components are numbered 1..k in row-major first-encounter
/// order. Returns the labeled frame and k.
std::pair<std::vector<std::int32_t>, int> label_components(
    std::span<const std::uint16_t> frame, std::size_t height, std::size_t width);

/// One descriptor per nonzero label, ordered by label.
///
/// Conventions: eccentricity from second central moments,
/// sqrt(1 - lmin/lmax), 0 when lmax = 0; solidity over the convex hull of
/// the 4 corner points of every region pixel (shoelace area), so an
/// isolated pixel has solidity 1; perimeter by contour following with step
/// weights 1 (axis) and sqrt(2) (diagonal), isolated pixels get 1.
std::vector<RegionDescriptor> region_descriptors(
    std::span<const std::int32_t> labeled_frame, std::size_t height,
    std::size_t width, std::size_t frame_index);

/// Descriptors over all frames, in frame order. Binary videos are labeled
/// per frame; labeled videos keep their given label ids.
MorphologySet morphology_metrics(const MaskVideo& video);

}  // namespace cellmetrics

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cellmetrics {

// Pixel interpretation of a mask video.
//   Binary: 0 = background, 1 = foreground.
//   Labels: 0 = background, k > 0 = nucleus id k.
enum class PixelKind : std::uint8_t { Binary = 0, Labels = 1 };

struct Centroid {
  double y = 0.0;  // row
  double x = 0.0;  // column

  bool operator==(const Centroid&) const = default;
};

/// A T x H x W stack of per-frame nucleus masks. Immutable after
/// construction; pixels are stored row-major, frame-major.
class MaskVideo {
 public:
  static constexpr double kDefaultFrameIntervalMinutes = 30.0;

  /// Validates shape and pixel ranges; throws std::invalid_argument on
  /// violation (T/H/W zero, or binary pixels outside {0,1}).
  MaskVideo(PixelKind kind, std::size_t frames, std::size_t height,
            std::size_t width, std::vector<std::uint16_t> pixels,
            double frame_interval_minutes = kDefaultFrameIntervalMinutes);

  PixelKind kind() const { return kind_; }
  std::size_t frame_count() const { return frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double frame_interval_minutes() const { return frame_interval_minutes_; }

  std::span<const std::uint16_t> frame(std::size_t t) const;
  const std::vector<std::uint16_t>& pixels() const { return pixels_; }

  bool operator==(const MaskVideo&) const = default;

 private:
  PixelKind kind_;
  std::size_t frames_;
  std::size_t height_;
  std::size_t width_;
  double frame_interval_minutes_;
  std::vector<std::uint16_t> pixels_;
};

struct VideoMetadata {
  std::string source_id;  // nonempty
  // Axis order: cell_count, proliferation, migration, death.
  std::optional<std::array<double, 4>> phenotype_scores;
  std::size_t frame_count_original = 0;
};

/// Keeps the first min(T, max_frames) frames. Idempotent.
MaskVideo truncate_video(const MaskVideo& video, std::size_t max_frames);

}  // namespace cellmetrics

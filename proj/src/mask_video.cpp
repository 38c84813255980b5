#include "cellmetrics/mask_video.hpp"

#include <stdexcept>

namespace cellmetrics {

MaskVideo::MaskVideo(PixelKind kind, std::size_t frames, std::size_t height,
                     std::size_t width, std::vector<std::uint16_t> pixels,
                     double frame_interval_minutes)
    : kind_(kind),
      frames_(frames),
      height_(height),
      width_(width),
      frame_interval_minutes_(frame_interval_minutes),
      pixels_(std::move(pixels)) {
  if (frames_ == 0 || height_ == 0 || width_ == 0) {
    throw std::invalid_argument("MaskVideo: T, H and W must all be >= 1");
  }
  if (pixels_.size() != frames_ * height_ * width_) {
    throw std::invalid_argument("MaskVideo: pixel buffer size does not match T*H*W");
  }
  if (frame_interval_minutes_ <= 0.0) {
    throw std::invalid_argument("MaskVideo: frame interval must be positive");
  }
  if (kind_ == PixelKind::Binary) {
    for (std::uint16_t v : pixels_) {
      if (v > 1) {
        throw std::invalid_argument("MaskVideo: binary masks must contain only 0 and 1");
      }
    }
  }
}

std::span<const std::uint16_t> MaskVideo::frame(std::size_t t) const {
  if (t >= frames_) {
    throw std::out_of_range("MaskVideo::frame: index out of range");
  }
  return {pixels_.data() + t * height_ * width_, height_ * width_};
}

MaskVideo truncate_video(const MaskVideo& video, std::size_t max_frames) {
  if (max_frames == 0) {
    throw std::invalid_argument("truncate_video: max_frames must be >= 1");
  }
  const std::size_t keep = std::min(video.frame_count(), max_frames);
  if (keep == video.frame_count()) {
    return video;
  }
  std::vector<std::uint16_t> pixels(
      video.pixels().begin(),
      video.pixels().begin() + keep * video.height() * video.width());
  return MaskVideo(video.kind(), keep, video.height(), video.width(),
                   std::move(pixels), video.frame_interval_minutes());
}

}  // namespace cellmetrics

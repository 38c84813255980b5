#pragma once

#include <filesystem>

#include "cellmetrics/mask_video.hpp"

namespace cellmetrics {

// MSKV container (little-endian):
//   magic "MSKV" | version u8 (=1) | pixel-kind u8 (0 = binary u8, 1 = labels u16)
//   | 2 reserved zero bytes | T, H, W as u32 | T*H*W pixels, row-major,
//   frame-major. Binary videos store one byte per pixel, labeled videos two.

/// Reads an MSKV file, or a directory of P5 PGM frames (lexicographic file
/// order defines frame order; nonzero pixels become foreground = 1).
/// Throws InputError on missing paths or malformed content.
MaskVideo read_mask_video(const std::filesystem::path& path);

/// Writes an MSKV file such that read_mask_video inverts it bit-exactly.
void write_mask_video(const MaskVideo& video, const std::filesystem::path& path);

}  // namespace cellmetrics

#include "cellmetrics/mask_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "cellmetrics/errors.hpp"

namespace cellmetrics {
namespace {

constexpr char kMagic[4] = {'M', 'S', 'K', 'V'};
constexpr std::uint8_t kVersion = 1;

std::uint32_t read_u32le(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  return static_cast<std::uint32_t>(buf[0]) |
         (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) |
         (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

MaskVideo read_mskv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open mask video: " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw InputError("not an MSKV file (bad magic): " + path.string());
  }
  std::uint8_t version = 0, kind_code = 0;
  std::uint8_t reserved[2] = {0, 0};
  in.read(reinterpret_cast<char*>(&version), 1);
  in.read(reinterpret_cast<char*>(&kind_code), 1);
  in.read(reinterpret_cast<char*>(reserved), 2);
  if (!in || version != kVersion) {
    throw InputError("unsupported MSKV version in " + path.string());
  }
  if (kind_code > 1) {
    throw InputError("unknown MSKV pixel-kind code in " + path.string());
  }
  const std::uint32_t t = read_u32le(in);
  const std::uint32_t h = read_u32le(in);
  const std::uint32_t w = read_u32le(in);
  if (!in) {
    throw InputError("truncated MSKV header in " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(t) * h * w;
  std::vector<std::uint16_t> pixels(n);
  if (kind_code == 0) {
    std::vector<std::uint8_t> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (!in) {
      throw InputError("truncated MSKV pixel data in " + path.string());
    }
    std::copy(raw.begin(), raw.end(), pixels.begin());
  } else {
    std::vector<unsigned char> raw(2 * n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(2 * n));
    if (!in) {
      throw InputError("truncated MSKV pixel data in " + path.string());
    }
    for (std::size_t i = 0; i < n; ++i) {
      pixels[i] = static_cast<std::uint16_t>(raw[2 * i]) |
                  static_cast<std::uint16_t>(raw[2 * i + 1] << 8);
    }
  }
  try {
    return MaskVideo(kind_code == 0 ? PixelKind::Binary : PixelKind::Labels,
                     t, h, w, std::move(pixels));
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// Minimal P5 reader; maxval must be <= 255.
std::vector<std::uint16_t> read_pgm_frame(const std::filesystem::path& path,
                                          std::size_t& height, std::size_t& width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open PGM frame: " + path.string());
  }
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) {
      throw InputError("truncated PGM header in " + path.string());
    }
    return tok;
  };
  if (next_token() != "P5") {
    throw InputError("not a binary PGM (P5): " + path.string());
  }
  const long w = std::stol(next_token());
  const long h = std::stol(next_token());
  const long maxval = std::stol(next_token());
  if (w <= 0 || h <= 0) {
    throw InputError("bad PGM dimensions in " + path.string());
  }
  if (maxval <= 0 || maxval > 255) {
    throw InputError("unsupported PGM pixel depth (maxval must be <= 255): " +
                     path.string());
  }
  width = static_cast<std::size_t>(w);
  height = static_cast<std::size_t>(h);
  std::vector<std::uint8_t> raw(width * height);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!in) {
    throw InputError("truncated PGM pixel data in " + path.string());
  }
  std::vector<std::uint16_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] != 0 ? 1 : 0;
  }
  return out;
}

MaskVideo read_pgm_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw InputError("no frame files in directory: " + dir.string());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::uint16_t> pixels;
  std::size_t height = 0, width = 0;
  for (std::size_t t = 0; t < files.size(); ++t) {
    std::size_t h = 0, w = 0;
    auto frame = read_pgm_frame(files[t], h, w);
    if (t == 0) {
      height = h;
      width = w;
      pixels.reserve(files.size() * h * w);
    } else if (h != height || w != width) {
      throw InputError("frame dimensions differ from frame 0: " + files[t].string());
    }
    pixels.insert(pixels.end(), frame.begin(), frame.end());
  }
  return MaskVideo(PixelKind::Binary, files.size(), height, width, std::move(pixels));
}

}  // namespace

MaskVideo read_mask_video(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InputError("path does not exist: " + path.string());
  }
  if (std::filesystem::is_directory(path)) {
    return read_pgm_directory(path);
  }
  return read_mskv(path);
}

void write_mask_video(const MaskVideo& video, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot open output file: " + path.string());
  }
  out.write(kMagic, 4);
  const std::uint8_t version = kVersion;
  const std::uint8_t kind_code = video.kind() == PixelKind::Binary ? 0 : 1;
  const std::uint8_t reserved[2] = {0, 0};
  out.write(reinterpret_cast<const char*>(&version), 1);
  out.write(reinterpret_cast<const char*>(&kind_code), 1);
  out.write(reinterpret_cast<const char*>(reserved), 2);
  write_u32le(out, static_cast<std::uint32_t>(video.frame_count()));
  write_u32le(out, static_cast<std::uint32_t>(video.height()));
  write_u32le(out, static_cast<std::uint32_t>(video.width()));
  const auto& pixels = video.pixels();
  if (kind_code == 0) {
    std::vector<std::uint8_t> raw(pixels.size());
    std::copy(pixels.begin(), pixels.end(), raw.begin());
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
  } else {
    std::vector<unsigned char> raw(2 * pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      raw[2 * i] = static_cast<unsigned char>(pixels[i] & 0xff);
      raw[2 * i + 1] = static_cast<unsigned char>(pixels[i] >> 8);
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
  }
  if (!out) {
    throw InputError("write failed: " + path.string());
  }
}

}  // namespace cellmetrics

#include "cellmetrics/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cellmetrics {
namespace {

// Clockwise Moore neighborhood (y grows downward): E, SE, S, SW, W, NW, N, NE.
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};

int direction_index(int dy, int dx) {
  for (int d = 0; d < 8; ++d) {
    if (kDy[d] == dy && kDx[d] == dx) return d;
  }
  throw std::logic_error("direction_index: offset is not a Moore neighbor");
}

struct Point {
  std::int64_t y;
  std::int64_t x;
  bool operator==(const Point&) const = default;
};

/// Moore-neighbor boundary trace with Jacob's stopping criterion. Returns
/// the closed contour (first point repeated at the end) for multi-pixel
/// regions, or a single point for isolated pixels.
std::vector<Point> trace_contour(std::span<const std::int32_t> labels,
                                 std::size_t height, std::size_t width,
                                 std::int64_t start_y, std::int64_t start_x,
                                 std::int32_t label) {
  auto is_region = [&](std::int64_t y, std::int64_t x) {
    return y >= 0 && x >= 0 && y < static_cast<std::int64_t>(height) &&
           x < static_cast<std::int64_t>(width) &&
           labels[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] == label;
  };

  std::vector<Point> contour{{start_y, start_x}};
  Point cur{start_y, start_x};
  int bdir = 4;  // backtrack points west of the row-major first pixel
  int first_exit = -1;
  // Any closed trace revisits each boundary pixel at most a handful of
  // times; the guard only protects against logic errors.
  const std::size_t max_steps = 8 * (height * width + 8);
  for (std::size_t step = 0; step < max_steps; ++step) {
    int d = -1;
    for (int j = 1; j <= 8; ++j) {
      const int cand = (bdir + j) % 8;
      if (is_region(cur.y + kDy[cand], cur.x + kDx[cand])) {
        d = cand;
        break;
      }
    }
    if (d < 0) {
      return contour;  // isolated pixel
    }
    if (cur.y == start_y && cur.x == start_x) {
      if (first_exit >= 0 && d == first_exit) {
        return contour;  // back at the start, leaving the same way
      }
      if (first_exit < 0) first_exit = d;
    }
    const int prev = (d + 7) % 8;  // last background neighbor scanned
    const Point backtrack{cur.y + kDy[prev], cur.x + kDx[prev]};
    cur = {cur.y + kDy[d], cur.x + kDx[d]};
    contour.push_back(cur);
    bdir = direction_index(static_cast<int>(backtrack.y - cur.y),
                           static_cast<int>(backtrack.x - cur.x));
  }
  throw std::logic_error("trace_contour: did not close");
}

double contour_perimeter(const std::vector<Point>& contour) {
  if (contour.size() < 2) {
    return 1.0;  // isolated-pixel convention, keeps perimeter > 0
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < contour.size(); ++i) {
    const bool diagonal = contour[i].y != contour[i + 1].y &&
                          contour[i].x != contour[i + 1].x;
    total += diagonal ? std::numbers::sqrt2 : 1.0;
  }
  return total;
}

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Andrew monotone chain; input points need not be unique.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Point>& poly) {
  if (poly.size() < 3) return 0.0;
  std::int64_t twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(static_cast<double>(twice)) / 2.0;
}

// Per-label accumulator. Exact integer sums keep the moment computation
// stable for large regions.
struct RegionAccum {
  std::int64_t area = 0;
  std::int64_t sum_y = 0, sum_x = 0;
  std::int64_t sum_yy = 0, sum_xx = 0, sum_yx = 0;
  std::int64_t first_y = -1, first_x = -1;
  std::int64_t min_row = 0;
  // (min_x, max_x) per row, indexed row - min_row; rows with no pixels
  // (possible for labeled inputs) hold the sentinel below.
  std::vector<std::pair<std::int64_t, std::int64_t>> row_extent;
};

constexpr std::int64_t kNoPixel = std::numeric_limits<std::int64_t>::max();

double eccentricity_from_moments(const RegionAccum& r) {
  const double a = static_cast<double>(r.area);
  const double cy = static_cast<double>(r.sum_y) / a;
  const double cx = static_cast<double>(r.sum_x) / a;
  const double m20 = static_cast<double>(r.sum_yy) / a - cy * cy;
  const double m02 = static_cast<double>(r.sum_xx) / a - cx * cx;
  const double m11 = static_cast<double>(r.sum_yx) / a - cy * cx;
  const double half_trace = (m20 + m02) / 2.0;
  const double spread = std::sqrt((m20 - m02) * (m20 - m02) / 4.0 + m11 * m11);
  const double lmax = half_trace + spread;
  const double lmin = std::max(0.0, half_trace - spread);
  if (lmax <= 0.0) {
    return 0.0;  // single pixel (or a degenerate labeled region)
  }
  return std::sqrt(std::max(0.0, 1.0 - lmin / lmax));
}

}  // namespace

std::pair<std::vector<std::int32_t>, int> label_components(
    std::span<const std::uint16_t> frame, std::size_t height, std::size_t width) {
  if (frame.size() != height * width) {
    throw std::invalid_argument("label_components: frame size mismatch");
  }
  std::vector<std::int32_t> labels(height * width, 0);
  std::vector<std::size_t> stack;
  std::int32_t next_label = 0;
  const std::int64_t h = static_cast<std::int64_t>(height);
  const std::int64_t w = static_cast<std::int64_t>(width);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame[i] == 0 || labels[i] != 0) continue;
    ++next_label;
    labels[i] = next_label;
    stack.assign(1, i);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::int64_t py = static_cast<std::int64_t>(p / width);
      const std::int64_t px = static_cast<std::int64_t>(p % width);
      for (int d = 0; d < 8; ++d) {
        const std::int64_t ny = py + kDy[d];
        const std::int64_t nx = px + kDx[d];
        if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
        const std::size_t q = static_cast<std::size_t>(ny) * width +
                              static_cast<std::size_t>(nx);
        if (frame[q] != 0 && labels[q] == 0) {
          labels[q] = next_label;
          stack.push_back(q);
        }
      }
    }
  }
  return {std::move(labels), static_cast<int>(next_label)};
}

std::vector<RegionDescriptor> region_descriptors(
    std::span<const std::int32_t> labeled_frame, std::size_t height,
    std::size_t width, std::size_t frame_index) {
  if (labeled_frame.size() != height * width) {
    throw std::invalid_argument("region_descriptors: frame size mismatch");
  }
  std::int32_t max_label = 0;
  for (std::int32_t v : labeled_frame) max_label = std::max(max_label, v);
  if (max_label == 0) return {};

  std::vector<RegionAccum> accum(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t i = 0; i < labeled_frame.size(); ++i) {
    const std::int32_t lab = labeled_frame[i];
    if (lab <= 0) continue;
    RegionAccum& r = accum[static_cast<std::size_t>(lab)];
    const std::int64_t y = static_cast<std::int64_t>(i / width);
    const std::int64_t x = static_cast<std::int64_t>(i % width);
    if (r.area == 0) {
      r.first_y = y;
      r.first_x = x;
      r.min_row = y;  // row-major scan: first pixel is on the top row
    }
    r.area += 1;
    r.sum_y += y;
    r.sum_x += x;
    r.sum_yy += y * y;
    r.sum_xx += x * x;
    r.sum_yx += y * x;
    const std::size_t row_idx = static_cast<std::size_t>(y - r.min_row);
    if (row_idx >= r.row_extent.size()) {
      r.row_extent.resize(row_idx + 1, {kNoPixel, kNoPixel});
    }
    auto& [mn, mx] = r.row_extent[row_idx];
    if (mn == kNoPixel) {
      mn = mx = x;
    } else {
      mn = std::min(mn, x);
      mx = std::max(mx, x);
    }
  }

  std::vector<RegionDescriptor> out;
  for (std::int32_t lab = 1; lab <= max_label; ++lab) {
    const RegionAccum& r = accum[static_cast<std::size_t>(lab)];
    if (r.area == 0) continue;

    // Convex hull over pixel corners; per-row x extremes suffice since
    // interior corners cannot be hull vertices.
    std::vector<Point> corners;
    corners.reserve(4 * r.row_extent.size());
    for (std::size_t ri = 0; ri < r.row_extent.size(); ++ri) {
      const auto& [mn, mx] = r.row_extent[ri];
      if (mn == kNoPixel) continue;
      const std::int64_t y = r.min_row + static_cast<std::int64_t>(ri);
      corners.push_back({y, mn});
      corners.push_back({y, mx + 1});
      corners.push_back({y + 1, mn});
      corners.push_back({y + 1, mx + 1});
    }
    const double hull_area = polygon_area(convex_hull(std::move(corners)));

    const auto contour =
        trace_contour(labeled_frame, height, width, r.first_y, r.first_x, lab);

    RegionDescriptor d;
    d.frame_index = frame_index;
    d.label = static_cast<std::uint32_t>(lab);
    d.area = static_cast<double>(r.area);
    d.eccentricity = eccentricity_from_moments(r);
    d.solidity = hull_area > 0.0
                     ? std::min(1.0, static_cast<double>(r.area) / hull_area)
                     : 1.0;
    d.perimeter = contour_perimeter(contour);
    d.centroid = {static_cast<double>(r.sum_y) / static_cast<double>(r.area),
                  static_cast<double>(r.sum_x) / static_cast<double>(r.area)};
    out.push_back(d);
  }
  return out;
}

MorphologySet morphology_metrics(const MaskVideo& video) {
  MorphologySet set;
  const std::size_t h = video.height();
  const std::size_t w = video.width();
  for (std::size_t t = 0; t < video.frame_count(); ++t) {
    const auto frame = video.frame(t);
    std::vector<std::int32_t> labeled;
    if (video.kind() == PixelKind::Binary) {
      labeled = label_components(frame, h, w).first;
    } else {
      labeled.assign(frame.begin(), frame.end());
    }
    auto descriptors = region_descriptors(labeled, h, w, t);
    set.descriptors.insert(set.descriptors.end(), descriptors.begin(),
                           descriptors.end());
  }
  return set;
}

}  // namespace cellmetrics

#include "cellmetrics/simulator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "cellmetrics/errors.hpp"

namespace cellmetrics {
namespace {

// Explicit bit-to-double mappings keep simulations reproducible across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double reflect(double v, double lo, double hi) {
  // hi > lo guaranteed by the caller
  while (v < lo || v > hi) {
    if (v < lo) v = lo + (lo - v);
    if (v > hi) v = hi - (v - hi);
  }
  return v;
}

struct Cell {
  std::uint32_t id = 0;
  std::size_t start_frame = 0;
  bool alive = true;
  Centroid pos;
  std::vector<Centroid> positions;
};

double sq_dist(const Centroid& a, const Centroid& b) {
  return (a.y - b.y) * (a.y - b.y) + (a.x - b.x) * (a.x - b.x);
}

}  // namespace

void SimParams::validate() const {
  if (frames == 0) throw std::invalid_argument("SimParams: frames must be >= 1");
  if (height == 0 || width == 0) {
    throw std::invalid_argument("SimParams: field dimensions must be >= 1");
  }
  if (division_prob < 0.0 || division_prob > 1.0 || death_prob < 0.0 ||
      death_prob > 1.0) {
    throw std::invalid_argument("SimParams: probabilities must be in [0,1]");
  }
  if (motion_std < 0.0) {
    throw std::invalid_argument("SimParams: motion_std must be >= 0");
  }
  if (nucleus_radius < 1.0) {
    throw std::invalid_argument("SimParams: nucleus_radius must be >= 1");
  }
}

std::pair<MaskVideo, GroundTruth> simulate(const SimParams& params) {
  params.validate();
  Rng rng(params.seed);

  const double r = params.nucleus_radius;
  const double lo_y = r, hi_y = static_cast<double>(params.height - 1) - r;
  const double lo_x = r, hi_x = static_cast<double>(params.width - 1) - r;
  // Disks at this separation rasterize to pixels more than sqrt(2) apart,
  // so 8-connected components never merge.
  const double min_sep = 2.0 * r + 2.0;
  const double min_sep_sq = min_sep * min_sep;

  if (params.initial_count > 0 && (hi_y <= lo_y || hi_x <= lo_x)) {
    throw InputError("simulate: field too small for the nucleus radius");
  }

  std::vector<Cell> cells;
  auto separated = [&cells](const Centroid& c, double min_sq,
                            const Cell* skip_a, const Cell* skip_b) {
    for (const Cell& other : cells) {
      if (!other.alive || &other == skip_a || &other == skip_b) continue;
      if (sq_dist(c, other.pos) < min_sq) return false;
    }
    return true;
  };

  // Initial placement by rejection sampling.
  for (std::size_t i = 0; i < params.initial_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      Centroid c{lo_y + rng.uniform01() * (hi_y - lo_y),
                 lo_x + rng.uniform01() * (hi_x - lo_x)};
      if (separated(c, min_sep_sq, nullptr, nullptr)) {
        Cell cell;
        cell.id = static_cast<std::uint32_t>(cells.size());
        cell.start_frame = 0;
        cell.pos = c;
        cell.positions.push_back(c);
        cells.push_back(std::move(cell));
        placed = true;
      }
    }
    if (!placed) {
      throw InputError(
          "simulate: field too small to place initial nuclei without overlap");
    }
  }

  GroundTruth gt;
  gt.counts.assign(params.frames, 0);
  gt.births.assign(params.frames > 0 ? params.frames - 1 : 0, 0);
  gt.deaths.assign(params.frames > 0 ? params.frames - 1 : 0, 0);
  gt.counts[0] = params.initial_count;

  for (std::size_t t = 0; t + 1 < params.frames; ++t) {
    const std::size_t alive_at_t = cells.size();  // daughters appended below
    for (std::size_t ci = 0; ci < alive_at_t; ++ci) {
      if (!cells[ci].alive || cells[ci].start_frame > t) continue;

      if (params.death_prob > 0.0 && rng.uniform01() < params.death_prob) {
        cells[ci].alive = false;
        gt.deaths[t] += 1;
        continue;
      }

      bool divided = false;
      if (params.division_prob > 0.0 && rng.uniform01() < params.division_prob) {
        // Parent label ends; two daughters appear at frame t+1 offset
        // radius+1 to either side along a random axis.
        for (int attempt = 0; attempt < 100 && !divided; ++attempt) {
          const double theta = rng.uniform01() * 2.0 * std::numbers::pi;
          const double dy = (r + 1.0) * std::sin(theta);
          const double dx = (r + 1.0) * std::cos(theta);
          Centroid d1{reflect(cells[ci].pos.y + dy, lo_y, hi_y),
                      reflect(cells[ci].pos.x + dx, lo_x, hi_x)};
          Centroid d2{reflect(cells[ci].pos.y - dy, lo_y, hi_y),
                      reflect(cells[ci].pos.x - dx, lo_x, hi_x)};
          if (sq_dist(d1, d2) < min_sep_sq) continue;
          if (!separated(d1, min_sep_sq, &cells[ci], nullptr) ||
              !separated(d2, min_sep_sq, &cells[ci], nullptr)) {
            continue;
          }
          cells[ci].alive = false;
          for (const Centroid& c : {d1, d2}) {
            Cell daughter;
            daughter.id = static_cast<std::uint32_t>(cells.size());
            daughter.start_frame = t + 1;
            daughter.pos = c;
            daughter.positions.push_back(c);
            cells.push_back(daughter);
          }
          gt.births[t] += 2;
          gt.deaths[t] += 1;
          divided = true;
        }
        // A crowded neighborhood cancels the division; the cell persists.
      }
      if (divided) continue;

      Centroid next = cells[ci].pos;
      if (params.motion_std > 0.0) {
        for (int attempt = 0; attempt < 100; ++attempt) {
          Centroid cand{
              reflect(cells[ci].pos.y + rng.gaussian() * params.motion_std, lo_y, hi_y),
              reflect(cells[ci].pos.x + rng.gaussian() * params.motion_std, lo_x, hi_x)};
          if (separated(cand, min_sep_sq, &cells[ci], nullptr)) {
            next = cand;
            break;
          }
        }
      }
      cells[ci].pos = next;
      cells[ci].positions.push_back(next);
    }
    std::size_t alive = 0;
    for (const Cell& c : cells) {
      if (c.alive) ++alive;
    }
    gt.counts[t + 1] = alive;
  }

  // Rasterize: disk of radius r around each live center, per frame.
  std::vector<std::uint16_t> pixels(params.frames * params.height * params.width, 0);
  const double r_sq = r * r;
  for (const Cell& cell : cells) {
    for (std::size_t k = 0; k < cell.positions.size(); ++k) {
      const std::size_t t = cell.start_frame + k;
      const Centroid& c = cell.positions[k];
      const std::size_t base = t * params.height * params.width;
      const std::int64_t y0 = static_cast<std::int64_t>(std::ceil(c.y - r));
      const std::int64_t y1 = static_cast<std::int64_t>(std::floor(c.y + r));
      for (std::int64_t y = std::max<std::int64_t>(y0, 0);
           y <= std::min<std::int64_t>(y1, static_cast<std::int64_t>(params.height) - 1);
           ++y) {
        const double dy = static_cast<double>(y) - c.y;
        const double half = std::sqrt(std::max(0.0, r_sq - dy * dy));
        const std::int64_t x0 = std::max<std::int64_t>(
            static_cast<std::int64_t>(std::ceil(c.x - half)), 0);
        const std::int64_t x1 = std::min<std::int64_t>(
            static_cast<std::int64_t>(std::floor(c.x + half)),
            static_cast<std::int64_t>(params.width) - 1);
        for (std::int64_t x = x0; x <= x1; ++x) {
          pixels[base + static_cast<std::size_t>(y) * params.width +
                 static_cast<std::size_t>(x)] = 1;
        }
      }
    }
  }

  for (const Cell& cell : cells) {
    gt.cells.push_back({cell.id, cell.start_frame, cell.positions});
  }
  return {MaskVideo(PixelKind::Binary, params.frames, params.height, params.width,
                    std::move(pixels)),
          std::move(gt)};
}

void export_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["counts"] = gt.counts;
  doc["births"] = gt.births;
  doc["deaths"] = gt.deaths;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : gt.cells) {
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : cell.positions) {
      positions.push_back({p.y, p.x});
    }
    cells.push_back({{"id", cell.cell_id},
                     {"start_frame", cell.start_frame},
                     {"positions", std::move(positions)}});
  }
  doc["cells"] = std::move(cells);
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw InputError("cannot open output file: " + path.string());
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw InputError("write failed: " + path.string());
  }
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open ground-truth file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  GroundTruth gt;
  gt.counts = doc.at("counts").get<std::vector<std::size_t>>();
  gt.births = doc.at("births").get<std::vector<std::size_t>>();
  gt.deaths = doc.at("deaths").get<std::vector<std::size_t>>();
  for (const auto& jc : doc.at("cells")) {
    CellTrajectory cell;
    cell.cell_id = jc.at("id").get<std::uint32_t>();
    cell.start_frame = jc.at("start_frame").get<std::size_t>();
    for (const auto& jp : jc.at("positions")) {
      cell.positions.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
    }
    gt.cells.push_back(std::move(cell));
  }
  return gt;
}

}  // namespace cellmetrics

// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. argv[1] is the path to the built CLI binary.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "cellmetrics/analysis.hpp"
#include "cellmetrics/conditioning.hpp"
#include "cellmetrics/mask_io.hpp"
#include "cellmetrics/morphology.hpp"
#include "cellmetrics/movement.hpp"
#include "cellmetrics/phenotype.hpp"
#include "cellmetrics/population.hpp"
#include "cellmetrics/simulator.hpp"
#include "cellmetrics/stats.hpp"

namespace fs = std::filesystem;
using namespace cellmetrics;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
int g_failures = 0;

#define EXPECT(cond)                                                     \
  do {                                                                   \
    if (!(cond)) {                                                       \
      std::fprintf(stderr, "  check failed at %s:%d: %s\n", __FILE__,    \
                   __LINE__, #cond);                                     \
      return false;                                                      \
    }                                                                    \
  } while (0)

void report(int number, const char* title, bool ok) {
  std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", number, title);
  if (!ok) ++g_failures;
}

int run_cli(const std::string& args, bool quiet = true) {
  const std::string cmd = g_cli + " " + args + (quiet ? " >/dev/null 2>&1" : "");
  const int status = std::system(cmd.c_str());
  return status < 0 ? -1 : WEXITSTATUS(status);
}

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "cellmetrics_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// --------------------------------------------------------------------------
// 1. Division-detection golden case.

bool criterion1() {
  const auto t0 = Clock::now();
  const auto stats = population_stats(CountSeries{{5, 5, 6, 6, 7}}, 0.5);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0);
  EXPECT(stats.division_frames == std::vector<std::size_t>({1, 3}));
  EXPECT(stats.division_count == 2);
  EXPECT(stats.avg_division_interval.has_value());
  EXPECT(*stats.avg_division_interval == 2.0);
  EXPECT(elapsed.count() < 1000);
  return true;
}

// --------------------------------------------------------------------------
// 2. Wasserstein-1 suite.

// Independent oracle: right-continuous empirical quantile functions
// integrated by the midpoint rule on a grid whose interval count is a
// common multiple of both sample sizes, which makes the rule exact for
// step functions.
double w1_oracle(std::vector<double> f, std::vector<double> g) {
  std::sort(f.begin(), f.end());
  std::sort(g.begin(), g.end());
  const std::size_t steps = f.size() * g.size() * 2;
  auto quantile = [](const std::vector<double>& v, double u) {
    auto idx = static_cast<std::size_t>(u * static_cast<double>(v.size()));
    if (idx >= v.size()) idx = v.size() - 1;
    return v[idx];
  };
  double total = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(steps);
    total += std::abs(quantile(f, u) - quantile(g, u));
  }
  return total / static_cast<double>(steps);
}

bool criterion2() {
  std::vector<double> id{3, 1, 4, 1, 5};
  EXPECT(wasserstein1(id, id) == 0.0);
  std::vector<double> pa{2.5}, pb{-1.0};
  EXPECT(std::abs(wasserstein1(pa, pb) - 3.5) < 1e-15);
  std::vector<double> a01{0, 1}, a02{0, 2};
  EXPECT(std::abs(wasserstein1(a01, a02) - 0.5) < 1e-15);

  std::mt19937_64 eng(424242);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + eng() % 12;
    const std::size_t m = 1 + eng() % 12;
    std::vector<double> a(n), b(m), c(1 + eng() % 12);
    for (auto& x : a) x = 40.0 * (uniform01(eng) - 0.5);
    for (auto& x : b) x = 40.0 * (uniform01(eng) - 0.5);
    for (auto& x : c) x = 40.0 * (uniform01(eng) - 0.5);

    const double ab = wasserstein1(a, b);
    EXPECT(std::abs(ab - w1_oracle(a, b)) <= 1e-9);
    EXPECT(std::abs(ab - wasserstein1(b, a)) <= 1e-9);
    EXPECT(ab <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-9);

    auto a3 = a, b3 = b;
    for (auto& x : a3) x *= 3.0;
    for (auto& x : b3) x *= 3.0;
    EXPECT(std::abs(wasserstein1(a3, b3) - 3.0 * ab) <= 1e-9);
  }
  return true;
}

// --------------------------------------------------------------------------
// 3. Simulator-oracle closed loop.

SimParams regime_params(double division_prob, std::uint64_t seed) {
  SimParams p;
  p.height = 256;
  p.width = 256;
  p.frames = 81;
  p.initial_count = 12;
  p.division_prob = division_prob;
  p.death_prob = 0.0;
  p.motion_std = 1.0;
  p.nucleus_radius = 4.0;
  p.seed = seed;
  return p;
}

bool criterion3() {
  const auto t0 = Clock::now();

  // Closed loop on a fixed seed: every ground-truth birth frame is
  // recovered by the derivative detector, and the endpoint counts match.
  {
    auto [video, truth] = simulate(regime_params(0.02, 20260823));
    const auto series = counts_per_frame(video);
    const auto stats = population_stats(series, 0.5);
    std::vector<std::size_t> birth_frames;
    for (std::size_t t = 0; t < truth.births.size(); ++t) {
      if (truth.births[t] > 0) birth_frames.push_back(t);
    }
    EXPECT(!birth_frames.empty());
    EXPECT(stats.division_frames == birth_frames);
    EXPECT(stats.initial_count == truth.counts.front());
    EXPECT(stats.final_count == truth.counts.back());
  }

  // Regime separation over 20 seeds each.
  auto final_counts = [](double division_prob, std::uint64_t seed0) {
    std::vector<double> out;
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto [video, truth] = simulate(regime_params(division_prob, seed0 + s));
      const auto series = counts_per_frame(video);
      out.push_back(static_cast<double>(population_stats(series, 0.5).final_count));
    }
    return out;
  };
  const auto high = final_counts(0.02, 1000);
  const auto zero = final_counts(0.0, 2000);
  const double between = wasserstein1(high, zero);

  auto split_w1 = [](const std::vector<double>& v) {
    const std::vector<double> first(v.begin(), v.begin() + 10);
    const std::vector<double> second(v.begin() + 10, v.end());
    return wasserstein1(first, second);
  };
  const double within = std::max(split_w1(high), split_w1(zero));

  EXPECT(between > 0.0);
  EXPECT(between >= 5.0 * within);

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::seconds>(Clock::now() - t0);
  EXPECT(elapsed.count() < 60);
  return true;
}

// --------------------------------------------------------------------------
// 4. Morphology properties.

std::vector<int> flood_fill_oracle(const std::vector<std::uint16_t>& frame,
                                   std::size_t h, std::size_t w) {
  std::vector<int> labels(h * w, 0);
  int next = 0;
  for (std::size_t start = 0; start < frame.size(); ++start) {
    if (frame[start] == 0 || labels[start] != 0) continue;
    ++next;
    std::vector<std::size_t> queue{start};
    labels[start] = next;
    while (!queue.empty()) {
      const std::size_t p = queue.back();
      queue.pop_back();
      const long py = static_cast<long>(p / w), px = static_cast<long>(p % w);
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const long y = py + dy, x = px + dx;
          if ((dy == 0 && dx == 0) || y < 0 || x < 0 ||
              y >= static_cast<long>(h) || x >= static_cast<long>(w)) {
            continue;
          }
          const std::size_t q =
              static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x);
          if (frame[q] != 0 && labels[q] == 0) {
            labels[q] = next;
            queue.push_back(q);
          }
        }
      }
    }
  }
  return labels;
}

bool criterion4() {
  for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{5},
                        std::size_t{20}}) {
    const std::size_t n = k + 2;
    std::vector<std::uint16_t> frame(n * n, 0);
    for (std::size_t y = 1; y <= k; ++y) {
      for (std::size_t x = 1; x <= k; ++x) frame[y * n + x] = 1;
    }
    auto [labels, count] = label_components(frame, n, n);
    EXPECT(count == 1);
    const auto d = region_descriptors(labels, n, n, 0);
    EXPECT(d.size() == 1);
    EXPECT(d[0].area == static_cast<double>(k * k));
    EXPECT(d[0].eccentricity <= 1e-9);
    EXPECT(std::abs(d[0].solidity - 1.0) <= 1e-9);
  }

  std::mt19937_64 eng(1717);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint16_t> frame(16 * 16);
    for (auto& p : frame) p = static_cast<std::uint16_t>(eng() % 3 == 0);
    auto [labels, count] = label_components(frame, 16, 16);
    const auto oracle = flood_fill_oracle(frame, 16, 16);
    // Relabel the oracle in first-encounter order to compare directly.
    EXPECT(labels.size() == oracle.size());
    std::vector<int> remap(oracle.size() + 1, 0);
    int next = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      if (oracle[i] != 0 && remap[static_cast<std::size_t>(oracle[i])] == 0) {
        remap[static_cast<std::size_t>(oracle[i])] = ++next;
      }
      const int expected =
          oracle[i] == 0 ? 0 : remap[static_cast<std::size_t>(oracle[i])];
      EXPECT(labels[i] == expected);
    }
    EXPECT(count == next);
  }

  for (std::uint64_t seed : {5ULL, 6ULL, 7ULL}) {
    SimParams params = regime_params(0.03, seed);
    params.frames = 20;
    params.death_prob = 0.01;
    auto [video, truth] = simulate(params);
    const auto set = morphology_metrics(video);
    std::vector<double> area_per_frame(params.frames, 0.0);
    for (const auto& d : set.descriptors) area_per_frame[d.frame_index] += d.area;
    for (std::size_t t = 0; t < params.frames; ++t) {
      std::size_t foreground = 0;
      for (auto v : video.frame(t)) foreground += v != 0;
      EXPECT(area_per_frame[t] == static_cast<double>(foreground));
    }
  }
  return true;
}

// --------------------------------------------------------------------------
// 5. Movement properties.

bool criterion5() {
  Track t345;
  t345.observations = {{0, {0.0, 0.0}}, {1, {3.0, 4.0}}};
  const auto m = movement_metrics(t345);
  EXPECT(m.has_value());
  EXPECT(m->total_distance == 5.0);
  EXPECT(m->net_displacement == 5.0);
  EXPECT(m->avg_speed == 5.0);
  EXPECT(m->directness == 1.0);

  Track single;
  single.observations = {{4, {7.0, 7.0}}};
  EXPECT(!movement_metrics(single).has_value());

  // Rigid translation of a simulated video leaves every per-track metric
  // unchanged.
  SimParams params = regime_params(0.0, 33);
  params.frames = 25;
  params.motion_std = 1.5;
  auto [video, truth] = simulate(params);

  const std::size_t pad_y = 30, pad_x = 17;
  const std::size_t h2 = params.height + 2 * pad_y;
  const std::size_t w2 = params.width + 2 * pad_x;
  std::vector<std::uint16_t> shifted(params.frames * h2 * w2, 0);
  for (std::size_t t = 0; t < params.frames; ++t) {
    const auto frame = video.frame(t);
    for (std::size_t y = 0; y < params.height; ++y) {
      for (std::size_t x = 0; x < params.width; ++x) {
        shifted[(t * h2 + y + pad_y) * w2 + x + pad_x] =
            frame[y * params.width + x];
      }
    }
  }
  const MaskVideo translated(PixelKind::Binary, params.frames, h2, w2,
                             std::move(shifted));

  const auto base = analyze_video(video, {});
  const auto moved = analyze_video(translated, {});
  EXPECT(base.movement.size() == moved.movement.size());
  EXPECT(!base.movement.empty());
  for (std::size_t i = 0; i < base.movement.size(); ++i) {
    EXPECT(base.movement[i].track_id == moved.movement[i].track_id);
    EXPECT(base.movement[i].n_obs == moved.movement[i].n_obs);
    EXPECT(std::abs(base.movement[i].total_distance -
                    moved.movement[i].total_distance) <= 1e-9);
    EXPECT(std::abs(base.movement[i].net_displacement -
                    moved.movement[i].net_displacement) <= 1e-9);
    EXPECT(std::abs(base.movement[i].directness - moved.movement[i].directness) <=
           1e-9);
  }
  return true;
}

// --------------------------------------------------------------------------
// 6. Phenotype golden prompt and percentile behavior.

bool criterion6() {
  PhenotypeLabels golden;
  golden.cell_count = Level::Low;
  golden.proliferation = Level::Low;
  golden.migration = Level::High;
  golden.death = Level::High;
  EXPECT(build_prompt(golden) ==
         "Time-lapse microscopy video of a few cells. The cells rarely divide, "
         "move rapidly, and frequently disappear due to cell death.");

  std::mt19937_64 eng(606060);
  std::vector<PhenotypeScores> dataset(1000);
  for (auto& s : dataset) {
    s = {uniform01(eng), uniform01(eng), uniform01(eng), uniform01(eng)};
  }
  const auto thresholds = compute_thresholds(dataset);
  std::array<int, 4> low{};
  for (const auto& s : dataset) {
    const auto l = label_scores(s, thresholds);
    const Level axes[4] = {l.cell_count, l.proliferation, l.migration, l.death};
    for (std::size_t a = 0; a < 4; ++a) low[a] += axes[a] == Level::Low;
  }
  for (std::size_t a = 0; a < 4; ++a) {
    const double fraction = static_cast<double>(low[a]) / 1000.0;
    EXPECT(std::abs(fraction - 0.10) <= 0.03);
  }

  auto make = [](Level count, Level prolif, Level migr, Level death) {
    PhenotypeLabels l;
    l.cell_count = count;
    l.proliferation = prolif;
    l.migration = migr;
    l.death = death;
    return l;
  };
  EXPECT(!is_extreme(make(Level::High, Level::Med, Level::Med, Level::Med)));
  EXPECT(!is_extreme(make(Level::Low, Level::High, Level::Med, Level::Med)));
  EXPECT(is_extreme(make(Level::Med, Level::High, Level::Low, Level::Med)));
  EXPECT(is_extreme(make(Level::Med, Level::Med, Level::High, Level::High)));
  EXPECT(is_extreme(golden));
  return true;
}

// --------------------------------------------------------------------------
// 7. Embedding MLP.

std::vector<double> forward_oracle(const std::array<double, 4>& p,
                                   const MlpWeights& w) {
  auto layer = [](const std::vector<double>& x, const std::vector<float>& mat,
                  const std::vector<float>& bias, std::size_t rows,
                  bool activate) {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = static_cast<double>(bias[r]);
      for (std::size_t c = 0; c < x.size(); ++c) {
        acc += static_cast<double>(mat[r * x.size() + c]) * x[c];
      }
      out[r] = activate ? acc * 0.5 * (1.0 + std::erf(acc / std::sqrt(2.0))) : acc;
    }
    return out;
  };
  std::vector<double> x(p.begin(), p.end());
  x = layer(x, w.w1, w.b1, MlpWeights::kHidden1, true);
  x = layer(x, w.w2, w.b2, MlpWeights::kHidden2, true);
  return layer(x, w.w3, w.b3, MlpWeights::kOut, false);
}

bool criterion7() {
  const auto zero_out = embed_phenotype({0.3, 0.6, 0.9, 0.2}, MlpWeights::zeros());
  EXPECT(zero_out.size() == 4096);
  for (double v : zero_out) EXPECT(v == 0.0);

  std::mt19937_64 eng(777000);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = MlpWeights::random_init(9000 + static_cast<std::uint64_t>(trial));
    const std::array<double, 4> p{uniform01(eng), uniform01(eng), uniform01(eng),
                                  uniform01(eng)};
    const auto got = embed_phenotype(p, w);
    const auto expected = forward_oracle(p, w);
    EXPECT(got.size() == 4096);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT(std::abs(got[i] - expected[i]) <= 1e-12);
    }
  }

  TokenMatrix tokens;
  tokens.rows = 5;
  tokens.data.resize(5 * TokenMatrix::kCols);
  for (auto& v : tokens.data) v = static_cast<float>(uniform01(eng));
  const auto p_embed =
      embed_phenotype({0.1, 0.2, 0.3, 0.4}, MlpWeights::random_init(4));
  const auto combined = prepend_token(tokens, p_embed);
  EXPECT(combined.rows == 6);
  EXPECT(combined.data.size() == 6 * TokenMatrix::kCols);
  for (std::size_t i = 0; i < tokens.data.size(); ++i) {
    EXPECT(std::bit_cast<std::uint32_t>(combined.data[TokenMatrix::kCols + i]) ==
           std::bit_cast<std::uint32_t>(tokens.data[i]));
  }
  return true;
}

// --------------------------------------------------------------------------
// 8. Performance budget.

bool criterion8() {
  const auto dir = work_dir() / "perf";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // One large video: 81 frames of 768 x 1360 (~85 M pixels).
  SimParams big;
  big.height = 768;
  big.width = 1360;
  big.frames = 81;
  big.initial_count = 120;
  big.division_prob = 0.005;
  big.motion_std = 2.0;
  big.nucleus_radius = 6.0;
  big.seed = 88;
  auto [video, truth] = simulate(big);
  const auto big_path = dir / "big.mskv";
  write_mask_video(video, big_path);

  const auto out_big = dir / "big_out";
  const auto t0 = Clock::now();
  EXPECT(run_cli("analyze --jobs 1 --out " + out_big.string() + " " +
                 big_path.string()) == 0);
  const double seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  std::fprintf(stderr, "  large-video analyze took %.2f s (budget 5 s)\n",
               seconds);
  EXPECT(seconds <= 5.0);

  // 100-video batch: --jobs 8 must reproduce --jobs 1 byte for byte.
  std::string inputs;
  for (int i = 0; i < 100; ++i) {
    SimParams small;
    small.height = 96;
    small.width = 96;
    small.frames = 12;
    small.initial_count = 5;
    small.division_prob = 0.02;
    small.motion_std = 1.0;
    small.nucleus_radius = 3.0;
    small.seed = 5000 + static_cast<std::uint64_t>(i);
    auto [v, t] = simulate(small);
    const auto path = dir / ("batch_" + std::to_string(1000 + i) + ".mskv");
    write_mask_video(v, path);
    inputs += " " + path.string();
  }
  const auto serial = dir / "serial";
  const auto parallel = dir / "parallel";
  EXPECT(run_cli("analyze --jobs 1 --out " + serial.string() + inputs) == 0);
  EXPECT(run_cli("analyze --jobs 8 --out " + parallel.string() + inputs) == 0);
  for (const char* name : {"morphology.csv", "tracks.csv", "movement.csv",
                           "population.csv", "count_series.csv"}) {
    EXPECT(slurp(serial / name) == slurp(parallel / name));
    EXPECT(!slurp(serial / name).empty());
  }
  return true;
}

// --------------------------------------------------------------------------
// 9. Report structure under HIGH and LOW groupings.

bool criterion9() {
  const auto dir = work_dir() / "report";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::string inputs;
  std::ofstream labels(dir / "labels.csv");
  labels << "video_id,condition\n";
  for (int i = 0; i < 4; ++i) {
    SimParams p;
    p.height = 128;
    p.width = 128;
    p.frames = 15;
    p.initial_count = 6;
    p.division_prob = i < 2 ? 0.05 : 0.0;
    p.motion_std = 1.0;
    p.nucleus_radius = 4.0;
    p.seed = 300 + static_cast<std::uint64_t>(i);
    auto [v, t] = simulate(p);
    const std::string id = "vid" + std::to_string(i);
    const auto path = dir / (id + ".mskv");
    write_mask_video(v, path);
    inputs += " " + path.string();
    labels << id << ',' << (i < 2 ? "HIGH" : "LOW") << '\n';
  }
  labels.close();

  const auto analysis = dir / "analysis";
  EXPECT(run_cli("analyze --out " + analysis.string() + inputs) == 0);
  const auto cmp = dir / "cmp";
  EXPECT(run_cli("compare --real " + analysis.string() + " --gen " +
                 analysis.string() + " --real-labels " +
                 (dir / "labels.csv").string() + " --gen-labels " +
                 (dir / "labels.csv").string() + " --out " + cmp.string()) == 0);

  const auto report = nlohmann::json::parse(slurp(cmp / "report.json"));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : report.at("rows")) {
    EXPECT(!row.at("w1").is_null());
    EXPECT(std::abs(row.at("w1").get<double>()) < 1e-12);
    seen.insert({row.at("metric").get<std::string>(),
                 row.at("condition").get<std::string>()});
  }
  for (const char* metric : {"Final Cell Count", "Growth Ratio", "Net Displacement"}) {
    for (const char* condition : {"HIGH", "LOW"}) {
      EXPECT(seen.count({metric, condition}) == 1);
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];

  report(1, "division-detection golden case", criterion1());
  report(2, "Wasserstein-1 oracle and metric properties", criterion2());
  report(3, "simulator-oracle closed loop and regime separation", criterion3());
  report(4, "morphology squares, labeling oracle, area conservation", criterion4());
  report(5, "movement golden track and translation invariance", criterion5());
  report(6, "phenotype golden prompt, percentile fractions, extremes", criterion6());
  report(7, "embedding MLP oracle and token prepend", criterion7());
  report(8, "analyze performance budget and job-count determinism", criterion8());
  report(9, "comparison report structure under HIGH/LOW groupings", criterion9());

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}

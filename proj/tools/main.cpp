// cellmetrics CLI: analyze, compare, label, embed, simulate.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellmetrics/analysis.hpp"
#include "cellmetrics/conditioning.hpp"
#include "cellmetrics/csv.hpp"
#include "cellmetrics/errors.hpp"
#include "cellmetrics/mask_io.hpp"
#include "cellmetrics/phenotype.hpp"
#include "cellmetrics/simulator.hpp"
#include "cellmetrics/stats.hpp"

namespace fs = std::filesystem;
using namespace cellmetrics;

namespace {

std::string video_id_from_path(const fs::path& p) {
  return p.stem().string();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw InputError("cannot open output file: " + path.string());
  }
  return out;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InputError("cannot create output directory: " + dir.string());
  }
}

void write_effective_config(const fs::path& out_dir, const nlohmann::json& config) {
  auto out = open_output(out_dir / "config.json");
  out << config.dump(2) << '\n';
}

// Flags win over config-file keys, which win over defaults.
void apply_config_file(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) {
    throw InputError("cannot open config file: " + config_path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(config_path + ": " + e.what());
  }
  for (const auto& [key, value] : doc.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::vector<std::string> videos;
  std::string out_dir;
  std::string config_file;
  double tau = 0.5;
  double max_link_distance = 40.0;
  unsigned jobs = 1;
};

void write_analysis_csvs(const fs::path& out_dir,
                         const std::vector<std::string>& video_ids,
                         const std::vector<VideoAnalysis>& results) {
  auto morph = open_output(out_dir / "morphology.csv");
  morph << "video_id,frame,label,area,eccentricity,solidity,perimeter,"
           "centroid_y,centroid_x\n";
  auto tracks = open_output(out_dir / "tracks.csv");
  tracks << "video_id,track_id,frame,centroid_y,centroid_x\n";
  auto movement = open_output(out_dir / "movement.csv");
  movement << "video_id,track_id,n_obs,total_distance,net_displacement,"
              "avg_speed,directness\n";
  auto population = open_output(out_dir / "population.csv");
  population << "video_id,initial_count,final_count,growth_ratio,"
                "growth_absolute,division_count,avg_division_interval\n";
  auto counts = open_output(out_dir / "count_series.csv");
  counts << "video_id,frame,count\n";

  for (std::size_t v = 0; v < results.size(); ++v) {
    const std::string id = csv_escape(video_ids[v]);
    const VideoAnalysis& r = results[v];
    for (const auto& d : r.morphology.descriptors) {
      morph << id << ',' << d.frame_index << ',' << d.label << ','
            << format_double(d.area) << ',' << format_double(d.eccentricity)
            << ',' << format_double(d.solidity) << ','
            << format_double(d.perimeter) << ',' << format_double(d.centroid.y)
            << ',' << format_double(d.centroid.x) << '\n';
    }
    for (const auto& tr : r.tracks) {
      for (const auto& obs : tr.observations) {
        tracks << id << ',' << tr.track_id << ',' << obs.frame_index << ','
               << format_double(obs.centroid.y) << ','
               << format_double(obs.centroid.x) << '\n';
      }
    }
    for (const auto& m : r.movement) {
      movement << id << ',' << m.track_id << ',' << m.n_obs << ','
               << format_double(m.total_distance) << ','
               << format_double(m.net_displacement) << ','
               << format_double(m.avg_speed) << ','
               << format_double(m.directness) << '\n';
    }
    const auto& p = r.population;
    population << id << ',' << p.initial_count << ',' << p.final_count << ','
               << format_double(p.growth_ratio) << ',' << p.growth_absolute
               << ',' << p.division_count << ',';
    if (p.avg_division_interval) {
      population << format_double(*p.avg_division_interval);
    }
    population << '\n';
    for (std::size_t t = 0; t < r.counts.counts.size(); ++t) {
      counts << id << ',' << t << ',' << r.counts.counts[t] << '\n';
    }
  }
}

int cmd_analyze(const AnalyzeOptions& opt) {
  if (opt.videos.empty()) {
    throw InputError("analyze: no input videos given");
  }
  ensure_out_dir(opt.out_dir);

  std::vector<std::string> video_ids;
  video_ids.reserve(opt.videos.size());
  for (const auto& v : opt.videos) {
    video_ids.push_back(video_id_from_path(v));
  }

  const AnalyzeParams params{opt.tau, opt.max_link_distance};
  const unsigned jobs = std::max(1u, opt.jobs);

  std::vector<VideoAnalysis> results(opt.videos.size());
  std::vector<std::string> errors(opt.videos.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= opt.videos.size()) return;
      try {
        const MaskVideo video = read_mask_video(opt.videos[i]);
        results[i] = analyze_video(video, params);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  bool failed = false;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << opt.videos[i] << ": " << errors[i] << '\n';
      failed = true;
    }
  }
  if (failed) return 1;

  write_analysis_csvs(opt.out_dir, video_ids, results);
  nlohmann::json config{{"subcommand", "analyze"},
                        {"tau", opt.tau},
                        {"max_link_distance", opt.max_link_distance},
                        {"jobs", jobs},
                        {"inputs", opt.videos}};
  write_effective_config(opt.out_dir, config);
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOptions {
  std::string real_dir;
  std::string gen_dir;
  std::string real_labels;
  std::string gen_labels;
  std::string out_dir;
  std::string config_file;
  std::string pooling = "per-sample";
  std::vector<std::string> formats;
};

std::vector<std::vector<std::string>> read_csv_file(const fs::path& path,
                                                    const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open metrics file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("empty metrics file: " + path.string());
  }
  const auto header = parse_csv_line(line);
  if (header.size() < columns.size()) {
    throw InputError("schema mismatch in " + path.string());
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (header[i] != columns[i]) {
      throw InputError("schema mismatch in " + path.string() + ": expected column '" +
                       columns[i] + "', found '" + header[i] + "'");
    }
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = parse_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError("ragged row in " + path.string());
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_number(const std::string& s, const fs::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad numeric field '" + s + "' in " + path.string());
  }
}

std::map<std::string, std::string> read_condition_labels(const fs::path& path) {
  auto rows = read_csv_file(path, {"video_id", "condition"});
  std::map<std::string, std::string> out;
  for (const auto& row : rows) {
    out[row[0]] = row[1];
  }
  return out;
}

/// Loads the analyze-output CSVs of one directory into per-metric,
/// per-condition sample pools.
MetricTable load_metric_table(const fs::path& dir,
                              const std::optional<std::map<std::string, std::string>>& labels,
                              const std::string& pooling) {
  auto condition_of = [&labels](const std::string& video_id) -> std::optional<std::string> {
    if (!labels) return std::string("ALL");
    auto it = labels->find(video_id);
    if (it == labels->end()) return std::nullopt;
    return it->second;
  };
  std::set<std::string> unlabeled;
  MetricTable table;

  // metric column -> (video -> samples), later pooled per the mode.
  struct PerVideo {
    std::map<std::string, std::vector<double>> samples;  // keyed by video_id
  };
  std::map<std::string, PerVideo> pooled;

  const fs::path population_path = dir / "population.csv";
  auto population = read_csv_file(
      population_path, {"video_id", "initial_count", "final_count", "growth_ratio",
                        "growth_absolute", "division_count", "avg_division_interval"});
  for (const auto& row : population) {
    const auto condition = condition_of(row[0]);
    if (!condition) {
      unlabeled.insert(row[0]);
      continue;
    }
    table["Final Cell Count"][*condition].push_back(parse_number(row[2], population_path));
    table["Growth Ratio"][*condition].push_back(parse_number(row[3], population_path));
    table["Division Count"][*condition].push_back(parse_number(row[5], population_path));
  }

  const fs::path movement_path = dir / "movement.csv";
  auto movement = read_csv_file(
      movement_path, {"video_id", "track_id", "n_obs", "total_distance",
                      "net_displacement", "avg_speed", "directness"});
  const fs::path morphology_path = dir / "morphology.csv";
  auto morphology = read_csv_file(
      morphology_path, {"video_id", "frame", "label", "area", "eccentricity",
                        "solidity", "perimeter", "centroid_y", "centroid_x"});

  // (metric, video_id, condition, value) for the pooled-per-track/region metrics.
  struct Sample {
    std::string metric;
    std::string video_id;
    std::string condition;
    double value;
  };
  std::vector<Sample> samples;
  for (const auto& row : movement) {
    const auto condition = condition_of(row[0]);
    if (!condition) {
      unlabeled.insert(row[0]);
      continue;
    }
    samples.push_back({"Net Displacement", row[0], *condition,
                       parse_number(row[4], movement_path)});
    samples.push_back({"Avg Speed", row[0], *condition,
                       parse_number(row[5], movement_path)});
  }
  for (const auto& row : morphology) {
    const auto condition = condition_of(row[0]);
    if (!condition) {
      unlabeled.insert(row[0]);
      continue;
    }
    samples.push_back({"Area", row[0], *condition, parse_number(row[3], morphology_path)});
    samples.push_back(
        {"Eccentricity", row[0], *condition, parse_number(row[4], morphology_path)});
    samples.push_back(
        {"Solidity", row[0], *condition, parse_number(row[5], morphology_path)});
    samples.push_back(
        {"Perimeter", row[0], *condition, parse_number(row[6], morphology_path)});
  }

  if (pooling == "per-sample") {
    for (const auto& s : samples) {
      table[s.metric][s.condition].push_back(s.value);
    }
  } else {  // per-video-mean
    std::map<std::tuple<std::string, std::string, std::string>,
             std::pair<double, std::size_t>> acc;
    for (const auto& s : samples) {
      auto& [sum, n] = acc[{s.metric, s.condition, s.video_id}];
      sum += s.value;
      n += 1;
    }
    for (const auto& [key, sum_n] : acc) {
      table[std::get<0>(key)][std::get<1>(key)].push_back(
          sum_n.first / static_cast<double>(sum_n.second));
    }
  }

  for (const auto& id : unlabeled) {
    std::cerr << "warning: " << dir.string() << ": video '" << id
              << "' has no condition label, skipped\n";
  }
  return table;
}

int cmd_compare(const CompareOptions& opt) {
  ensure_out_dir(opt.out_dir);
  if (opt.pooling != "per-sample" && opt.pooling != "per-video-mean") {
    throw InputError("compare: pooling must be per-sample or per-video-mean");
  }
  std::optional<std::map<std::string, std::string>> real_labels, gen_labels;
  if (!opt.real_labels.empty()) real_labels = read_condition_labels(opt.real_labels);
  if (!opt.gen_labels.empty()) gen_labels = read_condition_labels(opt.gen_labels);

  const MetricTable real = load_metric_table(opt.real_dir, real_labels, opt.pooling);
  const MetricTable generated = load_metric_table(opt.gen_dir, gen_labels, opt.pooling);
  const ComparisonReport report = build_report(real, generated, opt.pooling);

  for (const auto& row : report.rows) {
    if (!row.w1) {
      std::cerr << "warning: metric '" << row.metric << "', condition '"
                << row.condition << "' present on one side only\n";
    }
  }

  std::vector<std::string> formats = opt.formats;
  if (formats.empty()) formats = {"csv", "json", "md"};
  for (const auto& format : formats) {
    if (format == "csv") {
      auto out = open_output(fs::path(opt.out_dir) / "report.csv");
      write_report_csv(report, out);
    } else if (format == "json") {
      auto out = open_output(fs::path(opt.out_dir) / "report.json");
      write_report_json(report, out);
    } else if (format == "md") {
      auto out = open_output(fs::path(opt.out_dir) / "report.md");
      write_report_markdown(report, out);
    } else {
      throw InputError("compare: unknown format '" + format + "'");
    }
  }
  nlohmann::json config{{"subcommand", "compare"},
                        {"real", opt.real_dir},
                        {"generated", opt.gen_dir},
                        {"pooling", opt.pooling},
                        {"formats", formats}};
  write_effective_config(opt.out_dir, config);
  return 0;
}

// ---------------------------------------------------------------------------
// label

struct LabelOptions {
  std::string scores_csv;
  std::string out_dir;
  std::string config_file;
  double low_percentile = 10.0;
  double high_percentile = 90.0;
};

struct ScoreRows {
  std::vector<std::string> video_ids;
  std::vector<PhenotypeScores> scores;
};

ScoreRows read_scores_csv(const fs::path& path) {
  auto rows = read_csv_file(
      path, {"video_id", "cell_count", "proliferation", "migration", "death"});
  ScoreRows out;
  for (const auto& row : rows) {
    out.video_ids.push_back(row[0]);
    out.scores.push_back({parse_number(row[1], path), parse_number(row[2], path),
                          parse_number(row[3], path), parse_number(row[4], path)});
  }
  return out;
}

nlohmann::json ranges_to_json(const NormalizationRanges& r) {
  auto axis = [](const AxisRange& a) {
    return nlohmann::json{{"min", a.min}, {"max", a.max}};
  };
  return {{"cell_count", axis(r.cell_count)},
          {"proliferation", axis(r.proliferation)},
          {"migration", axis(r.migration)},
          {"death", axis(r.death)}};
}

NormalizationRanges ranges_from_json(const nlohmann::json& doc) {
  auto axis = [](const nlohmann::json& j) {
    return AxisRange{j.at("min").get<double>(), j.at("max").get<double>()};
  };
  return {axis(doc.at("cell_count")), axis(doc.at("proliferation")),
          axis(doc.at("migration")), axis(doc.at("death"))};
}

int cmd_label(const LabelOptions& opt) {
  ensure_out_dir(opt.out_dir);
  const ScoreRows rows = read_scores_csv(opt.scores_csv);
  if (rows.scores.size() < 2) {
    throw InputError("label: need at least 2 score rows");
  }
  const ThresholdSet thresholds =
      compute_thresholds(rows.scores, opt.low_percentile, opt.high_percentile);
  const NormalizationRanges ranges = compute_ranges(rows.scores);

  auto out = open_output(fs::path(opt.out_dir) / "labels.csv");
  out << "video_id,label_count,label_proliferation,label_migration,label_death,"
         "extreme,prompt\n";
  for (std::size_t i = 0; i < rows.scores.size(); ++i) {
    const PhenotypeLabels labels = label_scores(rows.scores[i], thresholds);
    out << csv_escape(rows.video_ids[i]) << ',' << to_string(labels.cell_count)
        << ',' << to_string(labels.proliferation) << ','
        << to_string(labels.migration) << ',' << to_string(labels.death) << ','
        << (is_extreme(labels) ? "true" : "false") << ','
        << csv_escape(build_prompt(labels)) << '\n';
  }

  auto norm = open_output(fs::path(opt.out_dir) / "normalization.json");
  norm << ranges_to_json(ranges).dump(2) << '\n';

  auto axis_json = [](const AxisThresholds& t) {
    return nlohmann::json{{"p_low", t.p10}, {"p_high", t.p90}};
  };
  nlohmann::json config{{"subcommand", "label"},
                        {"scores", opt.scores_csv},
                        {"low_percentile", opt.low_percentile},
                        {"high_percentile", opt.high_percentile},
                        {"thresholds",
                         {{"cell_count", axis_json(thresholds.cell_count)},
                          {"proliferation", axis_json(thresholds.proliferation)},
                          {"migration", axis_json(thresholds.migration)},
                          {"death", axis_json(thresholds.death)}}}};
  write_effective_config(opt.out_dir, config);
  return 0;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedOptions {
  std::string scores_csv;
  std::string normalization_json;
  std::string weights_path;
  std::string save_weights_path;
  std::string out_dir;
  std::string config_file;
  std::int64_t init_seed = -1;
};

int cmd_embed(const EmbedOptions& opt) {
  ensure_out_dir(opt.out_dir);
  if (opt.weights_path.empty() && opt.init_seed < 0) {
    throw InputError("embed: give --weights FILE or --init-seed N");
  }
  MlpWeights weights = opt.weights_path.empty()
                           ? MlpWeights::random_init(
                                 static_cast<std::uint64_t>(opt.init_seed))
                           : load_weights(opt.weights_path);
  if (!opt.save_weights_path.empty()) {
    save_weights(weights, opt.save_weights_path);
  }

  const ScoreRows rows = read_scores_csv(opt.scores_csv);
  std::ifstream norm_in(opt.normalization_json);
  if (!norm_in) {
    throw InputError("cannot open normalization file: " + opt.normalization_json);
  }
  nlohmann::json norm_doc;
  try {
    norm_in >> norm_doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(opt.normalization_json + ": " + e.what());
  }
  const NormalizationRanges ranges = ranges_from_json(norm_doc);

  const fs::path bin_path = fs::path(opt.out_dir) / "embeddings.bin";
  std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
  if (!bin) {
    throw InputError("cannot open output file: " + bin_path.string());
  }
  for (std::size_t i = 0; i < rows.scores.size(); ++i) {
    const auto p = normalize_phenotypes(rows.scores[i], ranges);
    const auto embedding = embed_phenotype(p, weights);
    std::vector<float> row(embedding.size());
    for (std::size_t j = 0; j < embedding.size(); ++j) {
      row[j] = static_cast<float>(embedding[j]);
    }
    bin.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!bin) {
    throw InputError("write failed: " + bin_path.string());
  }

  nlohmann::json sidecar{{"rows", rows.scores.size()},
                         {"cols", MlpWeights::kOut},
                         {"dtype", "float32"},
                         {"byte_order", "little-endian"},
                         {"order", "row-major"},
                         {"video_ids", rows.video_ids}};
  auto sidecar_out = open_output(fs::path(opt.out_dir) / "embeddings.json");
  sidecar_out << sidecar.dump(2) << '\n';

  nlohmann::json config{{"subcommand", "embed"},
                        {"scores", opt.scores_csv},
                        {"normalization", opt.normalization_json},
                        {"weights", opt.weights_path},
                        {"init_seed", opt.init_seed}};
  write_effective_config(opt.out_dir, config);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  SimParams params;
  std::string out_path;
  std::string truth_path;
};

int cmd_simulate(const SimulateOptions& opt) {
  auto [video, truth] = simulate(opt.params);
  write_mask_video(video, opt.out_path);
  if (!opt.truth_path.empty()) {
    export_ground_truth(truth, opt.truth_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantifies cellular dynamics from time-lapse nucleus-mask videos"};
  app.require_subcommand(1);

  AnalyzeOptions analyze_opt;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute morphology, movement and population metrics");
  analyze->add_option("videos", analyze_opt.videos,
                      "Mask videos (.mskv files or PGM directories)");
  analyze->add_option("--out", analyze_opt.out_dir, "Output directory")->required();
  analyze->add_option("--tau", analyze_opt.tau,
                      "Division-detection derivative threshold");
  analyze->add_option("--max-link-distance", analyze_opt.max_link_distance,
                      "Greedy tracker gating distance, pixels");
  analyze->add_option("--jobs", analyze_opt.jobs, "Parallel workers");
  analyze->add_option("--config", analyze_opt.config_file, "JSON config file");

  CompareOptions compare_opt;
  CLI::App* compare = app.add_subcommand(
      "compare", "Wasserstein-1 comparison of two analyzed metric sets");
  compare->add_option("--real", compare_opt.real_dir, "analyze output dir (real)")
      ->required();
  compare->add_option("--gen", compare_opt.gen_dir, "analyze output dir (generated)")
      ->required();
  compare->add_option("--real-labels", compare_opt.real_labels,
                      "CSV video_id,condition for the real side");
  compare->add_option("--gen-labels", compare_opt.gen_labels,
                      "CSV video_id,condition for the generated side");
  compare->add_option("--pooling", compare_opt.pooling,
                      "per-sample or per-video-mean");
  compare->add_option("--format", compare_opt.formats,
                      "Report formats: csv, json, md (default all)");
  compare->add_option("--out", compare_opt.out_dir, "Output directory")->required();
  compare->add_option("--config", compare_opt.config_file, "JSON config file");

  LabelOptions label_opt;
  CLI::App* label = app.add_subcommand(
      "label", "Percentile phenotype labels, prompts and normalization ranges");
  label->add_option("--scores", label_opt.scores_csv, "Scores CSV")->required();
  label->add_option("--out", label_opt.out_dir, "Output directory")->required();
  label->add_option("--low-percentile", label_opt.low_percentile,
                    "LOW cut percentile");
  label->add_option("--high-percentile", label_opt.high_percentile,
                    "HIGH cut percentile");
  label->add_option("--config", label_opt.config_file, "JSON config file");

  EmbedOptions embed_opt;
  CLI::App* embed = app.add_subcommand(
      "embed", "Phenotype-embedding MLP forward pass over a scores CSV");
  embed->add_option("--scores", embed_opt.scores_csv, "Scores CSV")->required();
  embed->add_option("--normalization", embed_opt.normalization_json,
                    "Per-axis min/max JSON")
      ->required();
  embed->add_option("--weights", embed_opt.weights_path, "PEMB weights file");
  embed->add_option("--init-seed", embed_opt.init_seed,
                    "Seed for random weight init (when no --weights)");
  embed->add_option("--save-weights", embed_opt.save_weights_path,
                    "Write the effective weights to this PEMB file");
  embed->add_option("--out", embed_opt.out_dir, "Output directory")->required();
  embed->add_option("--config", embed_opt.config_file, "JSON config file");

  SimulateOptions sim_opt;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Seeded synthetic mask video with a ground-truth ledger");
  simulate_cmd->add_option("--width", sim_opt.params.width, "Field width, pixels");
  simulate_cmd->add_option("--height", sim_opt.params.height, "Field height, pixels");
  simulate_cmd->add_option("--frames", sim_opt.params.frames, "Frame count");
  simulate_cmd->add_option("--initial", sim_opt.params.initial_count,
                           "Initial nucleus count");
  simulate_cmd
      ->add_option("--div-prob", sim_opt.params.division_prob,
                   "Division probability per cell per frame")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd
      ->add_option("--death-prob", sim_opt.params.death_prob,
                   "Death probability per cell per frame")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--motion-std", sim_opt.params.motion_std,
                           "Gaussian step std, pixels/frame");
  simulate_cmd->add_option("--radius", sim_opt.params.nucleus_radius,
                           "Nucleus radius, pixels");
  simulate_cmd->add_option("--seed", sim_opt.params.seed, "RNG seed");
  simulate_cmd->add_option("--out", sim_opt.out_path, "Output .mskv path")->required();
  simulate_cmd->add_option("--truth", sim_opt.truth_path,
                           "Ground-truth ledger JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) {
      apply_config_file(analyze, analyze_opt.config_file);
      return cmd_analyze(analyze_opt);
    }
    if (compare->parsed()) {
      apply_config_file(compare, compare_opt.config_file);
      return cmd_compare(compare_opt);
    }
    if (label->parsed()) {
      apply_config_file(label, label_opt.config_file);
      return cmd_label(label_opt);
    }
    if (embed->parsed()) {
      apply_config_file(embed, embed_opt.config_file);
      return cmd_embed(embed_opt);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(sim_opt);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}

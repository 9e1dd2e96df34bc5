// Copyright 2026 The hamr3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hamr3d/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hamr3d/error.hpp"
#include "hamr3d/media_io.hpp"
#include "hamr3d/parallel.hpp"

namespace hamr {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    io_error(fmt::format("cannot create directory '{}'", dir.string()));
  }
}

// Writes through a temporary file so an interrupted run never leaves a
// truncated file behind.
void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    out.flush();
    if (!out) io_error(fmt::format("write to '{}' failed", path.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) io_error(fmt::format("cannot move '{}' into place", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    io_error(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (std::string_view h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  template <typename... Args>
  void row(const Args&... values) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += fmt::format("{}", values),
      first = false),
     ...);
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// The thread count never affects results, so manifests leave it out.
json config_json(Config config) {
  config.run.threads = 0;
  return json::parse(serialize_config(config));
}

std::string config_digest(const Config& config) {
  return fmt::format("{:016x}", fnv1a(config_json(config).dump()));
}

Config config_from_manifest(const json& manifest) {
  if (!manifest.contains("config")) io_error("manifest has no config");
  return parse_config(manifest.at("config").dump());
}

fs::path output_dir(const Config& config, const CommandOptions& options) {
  return options.out.empty() ? fs::path(config.output.directory)
                             : fs::path(options.out);
}

std::vector<int> parse_ids(const std::string& text) {
  std::vector<int> ids;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      const int id = std::stoi(item, &used);
      if (used != item.size() || id < 0) throw std::invalid_argument(item);
      ids.push_back(id);
    } catch (const std::exception&) {
      config_error(fmt::format(
          "--track-grains expects 'auto' or comma-separated grain ids, got '{}'",
          text));
    }
  }
  return ids;
}

double fraction_up(const MediaStack& media, const std::vector<Vec3>& state,
                   std::size_t layer) {
  const auto& grains = media.layers[layer].grains;
  if (grains.empty()) return 0.0;
  std::size_t up = 0;
  for (const GrainSpec& g : grains) {
    if (state[static_cast<std::size_t>(g.id)].z > 0.0) ++up;
  }
  return static_cast<double>(up) / static_cast<double>(grains.size());
}

MediaStack with_state(MediaStack media, const std::vector<Vec3>& state) {
  media.state = state;
  return media;
}

bool point_in_polygon(const std::vector<Point2>& poly, Point2 p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Sweep bookkeeping

std::size_t layer_by_name(const Config& c, const std::string& which) {
  return which == "top" ? 0 : c.media.layers.size() - 1;
}

FieldSweepSpec field_spec(const Config& c, int threads) {
  const std::size_t layer = layer_by_name(c, c.sweep.layer);
  const RecordingRun full = resolved_run(c);
  std::size_t head = full.array.heads.size();
  for (std::size_t i = 0; i < full.array.heads.size(); ++i) {
    if (target_layer(full.array, i, c.media.layers.size()) == layer) head = i;
  }
  if (head == full.array.heads.size()) {
    config_error(fmt::format("no head writes the {} layer", c.sweep.layer));
  }
  FieldSweepSpec s;
  s.media = c.media;
  s.media.layers = {c.media.layers[layer]};
  s.run = full;
  s.run.array.heads = {full.array.heads[head]};
  s.run.array.heads[0].delta_d = 0.0;
  s.run.array.heads[0].layer = 0;
  s.fields = c.sweep.values;
  s.seed = c.run.seed;
  s.repeats = c.repeats;
  s.analysis = c.analysis;
  s.threads = threads;
  return s;
}

DeltaDSweepSpec delta_d_spec(const Config& c, int threads) {
  DeltaDSweepSpec s;
  s.media = c.media;
  s.run = resolved_run(c);
  s.delta_d = c.sweep.values;
  s.seed = c.run.seed;
  s.repeats = c.repeats;
  s.analysis = c.analysis;
  s.threads = threads;
  return s;
}

json to_json(const FieldPoint& p) {
  json j;
  j["value"] = p.Hw;
  j["sp_eff"] = p.sp_mean;
  j["sp_std"] = p.sp_std;
  j["sp_runs"] = p.sp_runs;
  j["x1"] = p.x1;
  j["x2"] = p.x2;
  j["x"] = p.profile.x;
  j["mz_mean"] = p.profile.mz_mean;
  j["mz_var"] = p.profile.mz_var;
  j["h_hat"] = p.h_hat;
  return j;
}

json to_json(const AlignedWindows& a) {
  json j;
  j["windows"] = a.windows;
  j["u"] = a.u;
  j["mean"] = a.mean;
  j["var"] = a.var;
  return j;
}

json to_json(const SweepPoint& p) {
  json j;
  j["value"] = p.delta_d;
  j["snr_top"] = p.snr_top;
  j["snr_bottom"] = p.snr_bottom;
  j["snr_system"] = p.snr_system;
  j["clamped"] = p.clamped;
  j["aligned_top"] = to_json(p.aligned_top);
  j["aligned_bottom"] = to_json(p.aligned_bottom);
  return j;
}

fs::path marker_path(const fs::path& dir, std::size_t index) {
  return dir / "points" / fmt::format("point_{:03}.json", index);
}

// A marker is reused only if it was produced by the same config.
std::optional<json> load_marker(const fs::path& path, const std::string& digest,
                                double value) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    json j = json::parse(read_file(path));
    if (j.at("digest").get<std::string>() != digest) return std::nullopt;
    if (j.at("result").at("value").get<double>() != value) return std::nullopt;
    return j.at("result");
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct SweepTables {
  std::string curve_name;
  std::string curve;
  std::string summary_name;
  std::string summary;
};

SweepTables sweep_tables(const Config& c, const std::vector<json>& points) {
  SweepTables t;
  if (points.empty()) return t;
  std::size_t best = 0;
  if (c.sweep.axis == "Hw") {
    Csv curve({"Hw", "sp_eff", "sp_std", "repeats"});
    for (std::size_t i = 0; i < points.size(); ++i) {
      const json& p = points[i];
      curve.row(p["value"].get<double>(), p["sp_eff"].get<double>(),
                p["sp_std"].get<double>(), p["sp_runs"].size());
      if (p["sp_eff"].get<double>() > points[best]["sp_eff"].get<double>()) {
        best = i;
      }
    }
    Csv summary({"layer", "velocity", "bit_length", "Hw_opt", "sp_eff_max"});
    summary.row(c.sweep.layer, c.run.speed(), c.run.bit_length,
                points[best]["value"].get<double>(),
                points[best]["sp_eff"].get<double>());
    t = {"sp_eff_curve.csv", curve.str(), "sp_eff_summary.csv", summary.str()};
  } else {
    Csv curve({"delta_d", "snr_top", "snr_bottom", "snr_system", "clamped",
               "windows_top", "windows_bottom"});
    for (std::size_t i = 0; i < points.size(); ++i) {
      const json& p = points[i];
      curve.row(p["value"].get<double>(), p["snr_top"].get<double>(),
                p["snr_bottom"].get<double>(), p["snr_system"].get<double>(),
                p["clamped"].get<bool>() ? 1 : 0,
                p["aligned_top"]["windows"].get<std::size_t>(),
                p["aligned_bottom"]["windows"].get<std::size_t>());
      if (p["snr_system"].get<double>() >
          points[best]["snr_system"].get<double>()) {
        best = i;
      }
    }
    Csv summary({"velocity", "bit_length", "delta_d_opt", "snr_max"});
    summary.row(c.run.speed(), c.run.bit_length,
                points[best]["value"].get<double>(),
                points[best]["snr_system"].get<double>());
    t = {"snr_curve.csv", curve.str(), "snr_summary.csv", summary.str()};
  }
  return t;
}

std::vector<json> load_points(const fs::path& dir, const json& manifest) {
  const std::string digest = manifest.at("digest").get<std::string>();
  const auto values = manifest.at("values").get<std::vector<double>>();
  std::vector<json> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (auto p = load_marker(marker_path(dir, i), digest, values[i])) {
      points.push_back(std::move(*p));
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// plot-data emitters

std::string profile_csv(const MediaStack& media, const std::vector<Vec3>& state,
                        std::size_t layer, const Config& c) {
  const auto x = uniform_grid(media.track_length, c.analysis.grid_spacing);
  const auto mz =
      cross_track_profile(media, state, layer, x, c.analysis.normalize_by_me,
                          c.run.array.T_env, c.run.llb);
  Csv csv({"x", "m_z"});
  for (std::size_t k = 0; k < x.size(); ++k) csv.row(x[k], mz[k]);
  return csv.str();
}

std::string field_profile_csv(const Config& c, double t) {
  const RecordingRun run = resolved_run(c);
  const ProfileEvaluator profile(run.array, run.bit_length);
  const auto x = uniform_grid(c.media.track_length, c.analysis.grid_spacing);
  Csv csv({"x", "T", "H_z"});
  for (double xi : x) {
    const FieldSample s = profile.sample(xi, t);
    csv.row(xi, s.T, s.H.z);
  }
  return csv.str();
}

std::vector<std::string> plot_write_run(const fs::path& dir, const json& manifest,
                                        const Config& c, const fs::path& out) {
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(out / name, text);
    written.push_back(name);
  };
  const MediaStack final_media = load_media((dir / "final.txt").string());
  for (std::size_t l = 0; l < final_media.layers.size(); ++l) {
    const std::string& name = final_media.layers[l].stats.name;
    emit(fmt::format("track_profile_{}.csv", name),
         profile_csv(final_media, final_media.state, l, c));
  }
  const auto passes = manifest.at("snapshots").get<std::vector<std::string>>();
  for (std::size_t k = 0; k < passes.size(); ++k) {
    const MediaStack snap = load_media((dir / passes[k]).string());
    for (std::size_t l = 0; l < snap.layers.size(); ++l) {
      emit(fmt::format("track_profile_{}_pass{}.csv", snap.layers[l].stats.name,
                       k + 1),
           profile_csv(snap, snap.state, l, c));
    }
  }
  for (const json& t : manifest.at("trajectories")) {
    const auto file = t.at("file").get<std::string>();
    emit(file, read_file(dir / file));
  }
  return written;
}

std::vector<std::string> plot_sweep(const fs::path& dir, const json& manifest,
                                    const Config& c, const fs::path& out) {
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(out / name, text);
    written.push_back(name);
  };
  const std::vector<json> points = load_points(dir, manifest);
  if (points.empty()) io_error("sweep has no completed points to plot");
  const SweepTables t = sweep_tables(c, points);
  emit(t.curve_name, t.curve);
  emit(t.summary_name, t.summary);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const json& p = points[i];
    if (c.sweep.axis == "Hw") {
      Csv csv({"x", "m_z_mean", "m_z_var", "h_hat"});
      const auto x = p["x"].get<std::vector<double>>();
      const auto m = p["mz_mean"].get<std::vector<double>>();
      const auto v = p["mz_var"].get<std::vector<double>>();
      const auto h = p["h_hat"].get<std::vector<double>>();
      for (std::size_t k = 0; k < x.size(); ++k) csv.row(x[k], m[k], v[k], h[k]);
      emit(fmt::format("sp_profile_{:02}.csv", i), csv.str());
    } else {
      for (const char* layer : {"top", "bottom"}) {
        const json& a = p[fmt::format("aligned_{}", layer)];
        Csv csv({"u", "m_z_mean", "m_z_var"});
        const auto u = a["u"].get<std::vector<double>>();
        const auto m = a["mean"].get<std::vector<double>>();
        const auto v = a["var"].get<std::vector<double>>();
        for (std::size_t k = 0; k < u.size(); ++k) csv.row(u[k], m[k], v[k]);
        emit(fmt::format("aligned_{:02}_{}.csv", i, layer), csv.str());
      }
    }
  }
  return written;
}

}  // namespace

Config apply_options(Config c, const CommandOptions& o) {
  if (o.seed) {
    c.run.seed = *o.seed;
    c.media_seed = *o.seed;
  }
  if (o.repeats) c.repeats = *o.repeats;
  if (o.threads) c.run.threads = *o.threads;
  if (o.laser_off) c.run.array.laser_enabled = false;
  if (o.track_grains == "auto") {
    c.output.auto_track_pair = true;
  } else if (!o.track_grains.empty()) {
    for (int id : parse_ids(o.track_grains)) {
      c.run.trajectory_grain_ids.push_back(id);
    }
  }
  if (o.axis) c.sweep.axis = *o.axis;
  if (!o.values.empty()) c.sweep.values = o.values;
  if (o.layer) c.sweep.layer = *o.layer;
  return c;
}

int effective_threads(const Config& c, const CommandOptions& o) {
  if (o.threads) {
    if (*o.threads < 0) config_error("--threads must be >= 0");
    return *o.threads;
  }
  if (const char* env = std::getenv("HAMR3D_THREADS"); env && *env) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used != std::string_view(env).size() || n < 0) {
        throw std::invalid_argument(env);
      }
      return n;
    } catch (const std::exception&) {
      config_error(fmt::format("HAMR3D_THREADS='{}' is not a count", env));
    }
  }
  return c.run.threads;
}

std::vector<int> auto_track_pair(const MediaStack& media, double bit_length) {
  if (media.layers.empty() || media.layers[0].grains.empty()) {
    geometry_error("medium has no top-layer grains to track");
  }
  const int cells =
      std::max(1, static_cast<int>(std::floor(media.track_length / bit_length)));
  const Point2 target{(cells / 2 + 0.5) * bit_length, 0.5 * media.track_width};
  auto nearest = [&](const Layer& layer, Point2 p) {
    const GrainSpec* best = &layer.grains.front();
    double best_d = INFINITY;
    for (const GrainSpec& g : layer.grains) {
      const double d = std::hypot(g.center.x - p.x, g.center.y - p.y);
      if (d < best_d) {
        best_d = d;
        best = &g;
      }
    }
    return best;
  };
  const GrainSpec* top = nearest(media.layers.front(), target);
  std::vector<int> ids{top->id};
  if (media.layers.size() > 1 && !media.layers.back().grains.empty()) {
    const Layer& bottom = media.layers.back();
    const GrainSpec* under = nullptr;
    for (const GrainSpec& g : bottom.grains) {
      if (point_in_polygon(g.polygon, top->center)) under = &g;
    }
    if (under == nullptr) under = nearest(bottom, top->center);
    ids.push_back(under->id);
  }
  return ids;
}

std::string cmd_generate_media(const Config& config,
                               const CommandOptions& options) {
  validate(config);
  const MediaStack media =
      build_media(config.media.layers, config.media.track_length,
                  config.media.track_width, config.media_seed,
                  config.media.lloyd_iterations);
  const fs::path path = options.out.empty()
                            ? fs::path(config.output.directory) / "media.txt"
                            : fs::path(options.out);
  write_file(path, serialize_media(media));
  return fmt::format("wrote {} ({} grains, seed {})\n{}", path.string(),
                     media.grain_count(), media.seed, media_summary(media));
}

std::string cmd_write(const Config& config, const std::string& media_path,
                      const CommandOptions& options) {
  validate(config);
  const MediaStack media = load_media(media_path);
  if (media.layers.size() != config.media.layers.size()) {
    config_error(fmt::format(
        "media file '{}' has {} layers but the config describes {}",
        media_path, media.layers.size(), config.media.layers.size()));
  }
  RecordingRun run = resolved_run(config);
  run.threads = effective_threads(config, options);
  if (config.output.auto_track_pair) {
    for (int id : auto_track_pair(media, run.bit_length)) {
      if (std::find(run.trajectory_grain_ids.begin(),
                    run.trajectory_grain_ids.end(),
                    id) == run.trajectory_grain_ids.end()) {
        run.trajectory_grain_ids.push_back(id);
      }
    }
  }
  const RunResult result = run_recording(media, run);

  const fs::path dir = output_dir(config, options);
  ensure_dir(dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    files.push_back(name);
  };
  emit("media.txt", serialize_media(media));
  std::vector<std::string> snapshots;
  if (config.output.snapshots) {
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      snapshots.push_back(fmt::format("snapshot_pass{}.txt", k + 1));
      emit(snapshots.back(),
           serialize_media(with_state(media, result.snapshots[k])));
    }
  }
  emit("final.txt", serialize_media(with_state(media, result.final_state)));
  json trajectories = json::array();
  for (const auto& [id, samples] : result.trajectories) {
    const std::string name = fmt::format("trajectory_{}.csv", id);
    Csv csv({"t", "m_x", "m_y", "m_z", "m", "T"});
    for (const TrajectorySample& s : samples) {
      csv.row(s.t, s.m.x, s.m.y, s.m.z, norm(s.m), s.T);
    }
    emit(name, csv.str());
    json t;
    t["grain"] = id;
    t["layer"] = media.grain(id).layer_index;
    t["file"] = name;
    trajectories.push_back(t);
  }

  const Provenance& p = result.provenance;
  json manifest;
  manifest["format"] = "hamr3d-run";
  manifest["version"] = kVersion;
  manifest["command"] = "write";
  Config effective = config;
  effective.run.trajectory_grain_ids = run.trajectory_grain_ids;
  effective.output.auto_track_pair = false;
  manifest["config"] = config_json(effective);
  manifest["media"] = {{"file", "media.txt"},
                       {"seed", media.seed},
                       {"layers", media.layers.size()},
                       {"grains", media.grain_count()}};
  manifest["provenance"] = {{"seed", p.seed},       {"rng", p.rng},
                            {"dt", p.dt},           {"t_start", p.t_start},
                            {"t_sweep", p.t_sweep}, {"t_end", p.t_end},
                            {"steps", p.steps},     {"grain_steps", p.grain_steps},
                            {"snapshot_times", result.snapshot_times}};
  manifest["snapshots"] = snapshots;
  manifest["trajectories"] = trajectories;
  manifest["files"] = files;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  std::string report = fmt::format(
      "wrote {}: {} grains, {} steps of {} ns, seed {}\n", dir.string(),
      media.grain_count(), p.steps, p.dt, p.seed);
  for (std::size_t l = 0; l < media.layers.size(); ++l) {
    report += fmt::format("layer {}:", media.layers[l].stats.name);
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      report += fmt::format(" after pass {} {:.3f} up,", k + 1,
                            fraction_up(media, result.snapshots[k], l));
    }
    report += fmt::format(" final {:.3f} up\n",
                          fraction_up(media, result.final_state, l));
  }
  return report;
}

std::string cmd_sweep(const Config& config, const CommandOptions& options) {
  validate(config);
  const int threads = effective_threads(config, options);
  const fs::path dir = output_dir(config, options);
  const std::string digest = config_digest(config);
  const std::vector<double>& values = config.sweep.values;

  json manifest;
  manifest["format"] = "hamr3d-sweep";
  manifest["version"] = kVersion;
  manifest["command"] = "sweep";
  manifest["config"] = config_json(config);
  manifest["axis"] = config.sweep.axis;
  manifest["values"] = values;
  manifest["digest"] = digest;

  std::optional<FieldSweepSpec> fspec;
  std::optional<DeltaDSweepSpec> dspec;
  if (config.sweep.axis == "Hw") {
    fspec = field_spec(config, threads);
    validate(*fspec);
  } else {
    dspec = delta_d_spec(config, threads);
    validate(*dspec);
  }
  ensure_dir(dir / "points");
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  std::vector<std::string> failures;
  std::size_t reused = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const fs::path marker = marker_path(dir, i);
    if (load_marker(marker, digest, values[i])) {
      ++reused;
      continue;
    }
    try {
      json result = fspec ? to_json(field_point(*fspec, values[i]))
                          : to_json(delta_d_point(*dspec, values[i]));
      json j;
      j["digest"] = digest;
      j["index"] = i;
      j["result"] = std::move(result);
      write_file(marker, j.dump() + "\n");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kIo) throw;
      std::string what = e.what();
      for (std::size_t q = what.find('"'); q != std::string::npos;
           q = what.find('"', q + 2)) {
        what.insert(q, 1, '"');
      }
      std::replace(what.begin(), what.end(), '\n', ' ');
      failures.push_back(fmt::format("{},{},\"{}\"", i, values[i], what));
    }
  }

  const std::vector<json> points = load_points(dir, manifest);
  std::string report = fmt::format(
      "sweep over {} = {} values ({} reused), {} repeats each, into {}\n",
      config.sweep.axis, values.size(), reused, config.repeats, dir.string());
  if (!points.empty()) {
    const SweepTables t = sweep_tables(config, points);
    write_file(dir / t.curve_name, t.curve);
    write_file(dir / t.summary_name, t.summary);
    report += t.summary;
  }
  const fs::path failure_file = dir / "failures.csv";
  if (failures.empty()) {
    std::error_code ec;
    fs::remove(failure_file, ec);
    return report;
  }
  std::string text = "index,value,error\n";
  for (const std::string& f : failures) text += f + "\n";
  write_file(failure_file, text);
  simulation_error(fmt::format("{}{} of {} sweep points failed:\n{}", report,
                               failures.size(), values.size(), text));
}

std::string cmd_plot_data(const std::string& run_dir,
                          const std::optional<Config>& config,
                          const CommandOptions& options) {
  std::vector<std::string> written;
  fs::path out;
  if (!run_dir.empty()) {
    const fs::path dir(run_dir);
    const fs::path manifest_path = dir / "manifest.json";
    std::error_code ec;
    if (!fs::exists(manifest_path, ec)) {
      io_error(fmt::format("'{}' holds no manifest.json; run write or sweep "
                           "first", run_dir));
    }
    const json manifest = read_json(manifest_path);
    const Config c = config ? *config : config_from_manifest(manifest);
    out = options.out.empty() ? dir / "plot" : fs::path(options.out);
    ensure_dir(out);
    const std::string command = manifest.value("command", "");
    if (command == "write") {
      written = plot_write_run(dir, manifest, c, out);
    } else if (command == "sweep") {
      written = plot_sweep(dir, manifest, c, out);
    } else {
      io_error(fmt::format("unknown run kind '{}' in manifest", command));
    }
    if (options.profile_time) {
      write_file(out / "field_profile.csv",
                 field_profile_csv(c, *options.profile_time));
      written.push_back("field_profile.csv");
    }
  } else {
    if (!options.profile_time || !config) {
      io_error("plot-data needs a run directory, or --config with "
               "--profile-time");
    }
    validate(*config);
    out = options.out.empty() ? fs::path(config->output.directory)
                              : fs::path(options.out);
    write_file(out / "field_profile.csv",
               field_profile_csv(*config, *options.profile_time));
    written.push_back("field_profile.csv");
  }
  std::string report = fmt::format("wrote {} files into {}\n", written.size(),
                                    out.string());
  for (const std::string& w : written) report += "  " + w + "\n";
  return report;
}

std::string cmd_validate_config(const Config& config,
                                const CommandOptions& options) {
  validate(config);
  const RecordingRun run = resolved_run(config);
  std::string report = fmt::format(
      "config OK: {} layers, {} heads, v = {} m/s, BL = {} nm, dt = {} ns, "
      "{} bit cells\n",
      config.media.layers.size(), run.array.heads.size(), run.speed(),
      run.bit_length, run.llb.dt, track_cells(config));
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    const HeadSpec& h = run.array.heads[i];
    const std::size_t l = target_layer(run.array, i, config.media.layers.size());
    report += fmt::format(
        "head {}: Tw {} K, Hw {} Oe, delta_d {} nm -> layer {} (Tc {} K)\n",
        i + 1, h.Tw, h.Hw, h.delta_d, config.media.layers[l].name,
        config.media.layers[l].Tc_mean);
  }
  if (!options.out.empty()) {
    write_file(options.out, serialize_config(config));
    report += fmt::format("wrote normalized config to {}\n", options.out);
  }
  return report;
}

}  // namespace hamr

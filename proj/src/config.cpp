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

#include "hamr3d/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hamr3d/error.hpp"

namespace hamr {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) config_error(path + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) {
      config_error(fmt::format("{}: unknown key '{}'", path, item.key()));
    }
  }
}

std::string key_path(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

void read(const json& j, const char* key, const std::string& path,
          double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) config_error(key_path(path, key) + ": expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) config_error(key_path(path, key) + ": not finite");
}

void read(const json& j, const char* key, const std::string& path, int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    config_error(key_path(path, key) + ": expected an integer");
  }
  const auto wide = v.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() ||
      wide > std::numeric_limits<int>::max()) {
    config_error(key_path(path, key) + ": out of range");
  }
  out = static_cast<int>(wide);
}

void read(const json& j, const char* key, const std::string& path,
          std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    config_error(key_path(path, key) + ": expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void read(const json& j, const char* key, const std::string& path, bool& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean()) config_error(key_path(path, key) + ": expected a bool");
  out = v.get<bool>();
}

void read(const json& j, const char* key, const std::string& path,
          std::string& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string()) config_error(key_path(path, key) + ": expected a string");
  out = v.get<std::string>();
}

void read(const json& j, const char* key, const std::string& path,
          std::vector<double>& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array()) config_error(key_path(path, key) + ": expected a list");
  out.clear();
  for (const json& e : v) {
    if (!e.is_number()) {
      config_error(key_path(path, key) + ": expected a list of numbers");
    }
    out.push_back(e.get<double>());
  }
}

void read(const json& j, const char* key, const std::string& path,
          std::vector<int>& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array()) config_error(key_path(path, key) + ": expected a list");
  out.clear();
  for (const json& e : v) {
    if (!e.is_number_integer()) {
      config_error(key_path(path, key) + ": expected a list of integers");
    }
    out.push_back(e.get<int>());
  }
}

void read(const json& j, const char* key, const std::string& path, Vec3& out) {
  std::vector<double> v;
  read(j, key, path, v);
  if (!j.contains(key)) return;
  if (v.size() != 3) config_error(key_path(path, key) + ": expected 3 numbers");
  out = {v[0], v[1], v[2]};
}

void read_bits(const json& j, const std::string& path, std::string& out) {
  if (!j.contains("bits")) return;
  const json& v = j.at("bits");
  if (v.is_string()) {
    out = v.get<std::string>();
    return;
  }
  if (!v.is_array()) {
    config_error(path + ".bits: expected a string or a list of 0/1");
  }
  out.clear();
  for (const json& e : v) {
    if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1)) {
      config_error(path + ".bits: list entries must be 0 or 1");
    }
    out.push_back(e.get<int>() == 1 ? '1' : '0');
  }
}

LayerStats read_layer(const json& j, const std::string& path,
                      std::size_t index) {
  check_keys(j, path,
             {"name", "Ms0", "Tc", "sigma_Tc", "Ku0", "sigma_Ku", "thickness",
              "grain_diameter", "sigma_volume", "z_position"});
  LayerStats s = index < 2 ? default_layer(index) : LayerStats{};
  if (index >= 2) s.name = fmt::format("layer{}", index);
  read(j, "name", path, s.name);
  read(j, "Ms0", path, s.Ms0_mean);
  read(j, "Tc", path, s.Tc_mean);
  read(j, "sigma_Tc", path, s.sigma_Tc);
  read(j, "Ku0", path, s.Ku0_mean);
  read(j, "sigma_Ku", path, s.sigma_Ku);
  read(j, "thickness", path, s.thickness);
  read(j, "grain_diameter", path, s.grain_diameter_mean);
  read(j, "sigma_volume", path, s.sigma_volume);
  read(j, "z_position", path, s.z_position);
  return s;
}

void read_media(const json& j, Config& c) {
  const std::string path = "media";
  check_keys(j, path,
             {"track_length", "track_width", "lloyd_iterations", "seed",
              "layers"});
  read(j, "track_length", path, c.media.track_length);
  read(j, "track_width", path, c.media.track_width);
  read(j, "lloyd_iterations", path, c.media.lloyd_iterations);
  read(j, "seed", path, c.media_seed);
  if (j.contains("layers")) {
    const json& layers = j.at("layers");
    if (!layers.is_array()) config_error("media.layers: expected a list");
    c.media.layers.clear();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      c.media.layers.push_back(
          read_layer(layers[i], fmt::format("media.layers[{}]", i), i));
    }
  }
}

void read_heads(const json& j, Config& c) {
  const std::string path = "heads";
  check_keys(j, path, {"velocity", "T_env", "laser_enabled", "list"});
  double speed = c.run.speed();
  read(j, "velocity", path, speed);
  if (!(speed > 0.0)) {
    config_error(fmt::format("heads.velocity is a speed and must be > 0, got {}",
                             speed));
  }
  c.run.array.velocity = -speed;
  read(j, "T_env", path, c.run.array.T_env);
  read(j, "laser_enabled", path, c.run.array.laser_enabled);
  if (!j.contains("list")) return;
  const json& list = j.at("list");
  if (!list.is_array()) config_error("heads.list: expected a list");
  c.run.array.heads.clear();
  c.bits.clear();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string hp = fmt::format("heads.list[{}]", i);
    const json& h = list[i];
    check_keys(h, hp,
               {"Tw", "Hw", "fwhm_T", "fwhm_H", "head_width", "u_hat", "d",
                "delta_d", "ramp_time", "layer", "bits"});
    HeadSpec s = default_head(i);
    read(h, "Tw", hp, s.Tw);
    read(h, "Hw", hp, s.Hw);
    read(h, "fwhm_T", hp, s.fwhm_T);
    read(h, "fwhm_H", hp, s.fwhm_H);
    read(h, "head_width", hp, s.head_width);
    read(h, "u_hat", hp, s.u_hat);
    read(h, "d", hp, s.d);
    read(h, "delta_d", hp, s.delta_d);
    read(h, "ramp_time", hp, s.ramp_time);
    read(h, "layer", hp, s.layer);
    std::string bits = "square";
    read_bits(h, hp, bits);
    c.run.array.heads.push_back(s);
    c.bits.push_back(bits);
  }
}

void read_llb(const json& j, LlbParams& p) {
  const std::string path = "run.llb";
  check_keys(j, path,
             {"gamma_e", "lambda", "eta", "beta_me", "epsilon_m",
              "chi_amplitude", "chi_clamp", "m_max", "thermal_noise"});
  read(j, "gamma_e", path, p.gamma_e);
  read(j, "lambda", path, p.lambda);
  read(j, "eta", path, p.eta);
  read(j, "beta_me", path, p.beta_me);
  read(j, "epsilon_m", path, p.epsilon_m);
  read(j, "chi_amplitude", path, p.chi_amplitude);
  read(j, "chi_clamp", path, p.chi_clamp);
  read(j, "m_max", path, p.m_max);
  read(j, "thermal_noise", path, p.thermal_noise);
}

void read_run(const json& j, Config& c) {
  const std::string path = "run";
  check_keys(j, path,
             {"bit_length", "seed", "dt", "equilibration_time",
              "cooldown_time", "margin_fwhm", "erase_polarity",
              "quiet_temperature", "quiet_field", "repeats", "threads",
              "trajectory_grain_ids", "trajectory_interval", "llb"});
  RecordingRun& r = c.run;
  read(j, "bit_length", path, r.bit_length);
  read(j, "seed", path, r.seed);
  read(j, "dt", path, r.llb.dt);
  read(j, "equilibration_time", path, r.equilibration_time);
  read(j, "cooldown_time", path, r.cooldown_time);
  read(j, "margin_fwhm", path, r.margin_fwhm);
  read(j, "erase_polarity", path, r.erase_polarity);
  read(j, "quiet_temperature", path, r.quiet_temperature);
  read(j, "quiet_field", path, r.quiet_field);
  read(j, "repeats", path, c.repeats);
  read(j, "threads", path, r.threads);
  read(j, "trajectory_grain_ids", path, r.trajectory_grain_ids);
  read(j, "trajectory_interval", path, r.trajectory_interval);
  if (j.contains("llb")) read_llb(j.at("llb"), r.llb);
}

void read_analysis(const json& j, AnalysisOptions& a) {
  const std::string path = "analysis";
  check_keys(j, path,
             {"grid_spacing", "hysteresis", "ideal_threshold", "segment_cells",
              "normalize_by_me"});
  read(j, "grid_spacing", path, a.grid_spacing);
  read(j, "hysteresis", path, a.hysteresis);
  read(j, "ideal_threshold", path, a.ideal_threshold);
  read(j, "segment_cells", path, a.segment_cells);
  read(j, "normalize_by_me", path, a.normalize_by_me);
}

void read_sweep(const json& j, SweepConfig& s) {
  const std::string path = "sweep";
  check_keys(j, path, {"axis", "values", "layer"});
  read(j, "axis", path, s.axis);
  read(j, "values", path, s.values);
  read(j, "layer", path, s.layer);
}

void read_output(const json& j, OutputConfig& o) {
  const std::string path = "output";
  check_keys(j, path, {"directory", "snapshots", "track_pair"});
  read(j, "directory", path, o.directory);
  read(j, "snapshots", path, o.snapshots);
  read(j, "track_pair", path, o.auto_track_pair);
}

}  // namespace

LayerStats default_layer(std::size_t index) {
  LayerStats s;
  if (index == 0) {
    s = {"top", 487.0, 526.0, 0.03, 6.0e6, 0.15, 6.0, 6.0, 0.09, 0.0};
  } else if (index == 1) {
    s = {"bottom", 696.0, 620.0, 0.03, 25.0e6, 0.15, 6.0, 6.0, 0.09, -8.0};
  } else {
    config_error(fmt::format("no default for layer {}", index));
  }
  return s;
}

HeadSpec default_head(std::size_t index) {
  HeadSpec h;
  if (index == 0) {
    h.Tw = 680.0;
    h.Hw = 13000.0;
  } else if (index == 1) {
    h.Tw = 540.0;
    h.Hw = 13100.0;
    h.delta_d = 24.5;
  }
  return h;
}

Config default_config() {
  Config c;
  c.media.layers = {default_layer(0), default_layer(1)};
  c.media.track_length = 300.0;
  c.media.track_width = 60.0;
  c.run.array.heads = {default_head(0), default_head(1)};
  c.run.array.velocity = -5.0;
  c.run.threads = 0;
  c.bits = {"square", "square"};
  return c;
}

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(fmt::format("config is not valid JSON: {}", e.what()));
  }
  check_keys(j, "config",
             {"schema_version", "media", "heads", "run", "analysis", "sweep",
              "output"});
  Config c = default_config();
  read(j, "schema_version", "", c.schema_version);
  if (c.schema_version != kSchemaVersion) {
    config_error(fmt::format("unsupported schema_version {} (expected {})",
                             c.schema_version, kSchemaVersion));
  }
  if (j.contains("media")) read_media(j.at("media"), c);
  if (j.contains("heads")) read_heads(j.at("heads"), c);
  if (j.contains("run")) read_run(j.at("run"), c);
  if (j.contains("analysis")) read_analysis(j.at("analysis"), c.analysis);
  if (j.contains("sweep")) read_sweep(j.at("sweep"), c.sweep);
  if (j.contains("output")) read_output(j.at("output"), c.output);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(fmt::format("cannot read config '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const Config& c) {
  json j;
  j["schema_version"] = c.schema_version;
  json media;
  media["track_length"] = c.media.track_length;
  media["track_width"] = c.media.track_width;
  media["lloyd_iterations"] = c.media.lloyd_iterations;
  media["seed"] = c.media_seed;
  media["layers"] = json::array();
  for (const LayerStats& s : c.media.layers) {
    json l;
    l["name"] = s.name;
    l["Ms0"] = s.Ms0_mean;
    l["Tc"] = s.Tc_mean;
    l["sigma_Tc"] = s.sigma_Tc;
    l["Ku0"] = s.Ku0_mean;
    l["sigma_Ku"] = s.sigma_Ku;
    l["thickness"] = s.thickness;
    l["grain_diameter"] = s.grain_diameter_mean;
    l["sigma_volume"] = s.sigma_volume;
    l["z_position"] = s.z_position;
    media["layers"].push_back(l);
  }
  j["media"] = media;

  json heads;
  heads["velocity"] = c.run.speed();
  heads["T_env"] = c.run.array.T_env;
  heads["laser_enabled"] = c.run.array.laser_enabled;
  heads["list"] = json::array();
  for (std::size_t i = 0; i < c.run.array.heads.size(); ++i) {
    const HeadSpec& h = c.run.array.heads[i];
    json o;
    o["Tw"] = h.Tw;
    o["Hw"] = h.Hw;
    o["fwhm_T"] = h.fwhm_T;
    o["fwhm_H"] = h.fwhm_H;
    o["head_width"] = h.head_width;
    o["u_hat"] = {h.u_hat.x, h.u_hat.y, h.u_hat.z};
    o["d"] = h.d;
    o["delta_d"] = h.delta_d;
    o["ramp_time"] = h.ramp_time;
    o["layer"] = h.layer;
    o["bits"] = i < c.bits.size() ? c.bits[i] : std::string("square");
    heads["list"].push_back(o);
  }
  j["heads"] = heads;

  const RecordingRun& r = c.run;
  json run;
  run["bit_length"] = r.bit_length;
  run["seed"] = r.seed;
  run["dt"] = r.llb.dt;
  run["equilibration_time"] = r.equilibration_time;
  run["cooldown_time"] = r.cooldown_time;
  run["margin_fwhm"] = r.margin_fwhm;
  run["erase_polarity"] = r.erase_polarity;
  run["quiet_temperature"] = r.quiet_temperature;
  run["quiet_field"] = r.quiet_field;
  run["repeats"] = c.repeats;
  run["threads"] = r.threads;
  run["trajectory_grain_ids"] = r.trajectory_grain_ids;
  run["trajectory_interval"] = r.trajectory_interval;
  json llb;
  llb["gamma_e"] = r.llb.gamma_e;
  llb["lambda"] = r.llb.lambda;
  llb["eta"] = r.llb.eta;
  llb["beta_me"] = r.llb.beta_me;
  llb["epsilon_m"] = r.llb.epsilon_m;
  llb["chi_amplitude"] = r.llb.chi_amplitude;
  llb["chi_clamp"] = r.llb.chi_clamp;
  llb["m_max"] = r.llb.m_max;
  llb["thermal_noise"] = r.llb.thermal_noise;
  run["llb"] = llb;
  j["run"] = run;

  json analysis;
  analysis["grid_spacing"] = c.analysis.grid_spacing;
  analysis["hysteresis"] = c.analysis.hysteresis;
  analysis["ideal_threshold"] = c.analysis.ideal_threshold;
  analysis["segment_cells"] = c.analysis.segment_cells;
  analysis["normalize_by_me"] = c.analysis.normalize_by_me;
  j["analysis"] = analysis;

  json sweep;
  sweep["axis"] = c.sweep.axis;
  sweep["values"] = c.sweep.values;
  sweep["layer"] = c.sweep.layer;
  j["sweep"] = sweep;

  json output;
  output["directory"] = c.output.directory;
  output["snapshots"] = c.output.snapshots;
  output["track_pair"] = c.output.auto_track_pair;
  j["output"] = output;
  return j.dump(2) + "\n";
}

std::vector<int> resolve_bits(const std::string& spec, int cells) {
  if (spec == "square") return square_wave_bits(cells);
  if (spec == "ones") return std::vector<int>(static_cast<std::size_t>(cells), 1);
  if (spec == "zeros") {
    return std::vector<int>(static_cast<std::size_t>(cells), -1);
  }
  constexpr std::string_view kSegment = "segment:";
  if (spec.rfind(kSegment, 0) == 0) {
    const std::string count = spec.substr(kSegment.size());
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(count, &used);
      if (used != count.size()) throw std::invalid_argument(count);
    } catch (const std::exception&) {
      config_error(fmt::format("bad bit spec '{}': expected segment:<cells>",
                               spec));
    }
    return segment_bits(cells, n);
  }
  return parse_bits(spec);
}

int track_cells(const Config& c) {
  if (!(c.run.bit_length > 0.0)) config_error("run.bit_length must be > 0");
  const int cells =
      static_cast<int>(std::floor(c.media.track_length / c.run.bit_length + 1e-9));
  if (cells < 1) config_error("track is shorter than one bit cell");
  return cells;
}

RecordingRun resolved_run(const Config& c) {
  if (c.bits.size() != c.run.array.heads.size()) {
    config_error("one bit spec per head is required");
  }
  RecordingRun run = c.run;
  const int cells = track_cells(c);
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    run.array.heads[i].bits = resolve_bits(c.bits[i], cells);
  }
  return run;
}

void validate(const Config& c) {
  if (c.schema_version != kSchemaVersion) {
    config_error("unsupported schema_version");
  }
  if (c.media.layers.empty()) config_error("media.layers is empty");
  for (const LayerStats& s : c.media.layers) validate(s);
  if (!(c.media.track_length > 0.0) || !(c.media.track_width > 0.0)) {
    config_error("media track dimensions must be > 0");
  }
  if (c.media.lloyd_iterations < 0) {
    config_error("media.lloyd_iterations must be >= 0");
  }
  const RecordingRun run = resolved_run(c);
  validate(run.array);
  validate(run.llb);
  const std::size_t layers = c.media.layers.size();
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    const std::size_t l = target_layer(run.array, i, layers);
    if (run.array.laser_enabled &&
        !(run.array.heads[i].Tw > c.media.layers[l].Tc_mean)) {
      config_error(fmt::format(
          "head {}: Tw = {} K must exceed the median Curie temperature {} K "
          "of layer '{}'",
          i + 1, run.array.heads[i].Tw, c.media.layers[l].Tc_mean,
          c.media.layers[l].name));
    }
  }
  if (!(run.speed() > 0.0)) config_error("heads.velocity must be > 0");
  if (!(run.equilibration_time >= 0.0) || !(run.cooldown_time >= 0.0)) {
    config_error("equilibration_time and cooldown_time must be >= 0");
  }
  if (!(run.margin_fwhm > 0.0)) config_error("run.margin_fwhm must be > 0");
  if (run.erase_polarity != 1 && run.erase_polarity != -1) {
    config_error("run.erase_polarity must be +1 or -1");
  }
  if (!(run.quiet_temperature >= 0.0) || !(run.quiet_field >= 0.0)) {
    config_error("quiet thresholds must be >= 0");
  }
  if (!(run.trajectory_interval > 0.0)) {
    config_error("run.trajectory_interval must be > 0");
  }
  if (run.threads < 0) config_error("run.threads must be >= 0");
  if (c.repeats < 1) config_error("run.repeats must be >= 1");
  const AnalysisOptions& a = c.analysis;
  if (!(a.grid_spacing > 0.0) || a.grid_spacing > 1.0) {
    config_error("analysis.grid_spacing must lie in (0, 1] nm");
  }
  if (!(a.hysteresis >= 0.0) || a.hysteresis >= 1.0) {
    config_error("analysis.hysteresis must lie in [0, 1)");
  }
  if (!(a.ideal_threshold > 0.0) || a.ideal_threshold > 1.0) {
    config_error("analysis.ideal_threshold must lie in (0, 1]");
  }
  if (a.segment_cells < 1) config_error("analysis.segment_cells must be >= 1");
  if (c.sweep.axis != "delta_d" && c.sweep.axis != "Hw") {
    config_error(fmt::format("sweep.axis '{}' must be 'delta_d' or 'Hw'",
                             c.sweep.axis));
  }
  if (c.sweep.values.empty()) config_error("sweep.values is empty");
  if (c.sweep.layer != "top" && c.sweep.layer != "bottom") {
    config_error("sweep.layer must be 'top' or 'bottom'");
  }
  if (c.output.directory.empty()) config_error("output.directory is empty");
}

}  // namespace hamr

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


// hamr3d command-line tool. Talks to the simulator only through the C API.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hamr3d/hamr3d.h"

namespace {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitIo = 4;
constexpr int kExitGeometry = 5;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

int exit_code(hamr3d_status s) {
  switch (s) {
    case HAMR3D_OK: return kExitOk;
    case HAMR3D_ERR_CONFIG: return kExitConfig;
    case HAMR3D_ERR_GEOMETRY: return kExitGeometry;
    case HAMR3D_ERR_SIMULATION: return kExitSimulation;
    case HAMR3D_ERR_IO: return kExitIo;
    case HAMR3D_ERR_INVALID_ARGUMENT: return kExitUsage;
    case HAMR3D_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

int fail(hamr3d_status s) {
  std::fprintf(stderr, "hamr3d: %s: %s\n", hamr3d_status_name(s),
               hamr3d_last_error());
  return exit_code(s);
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int repeats = 0;
  std::string out;
  int threads = -1;
  bool laser_off = false;
  std::string track_grains;
  std::string media;
  std::string run_dir;
  std::string axis;
  std::vector<double> values;
  std::string layer;
  std::optional<double> profile_time;
};

class ConfigHandle {
 public:
  ~ConfigHandle() { hamr3d_config_free(ptr_); }
  hamr3d_config* get() const { return ptr_; }
  hamr3d_status load(const std::string& path) {
    return path.empty() ? hamr3d_config_default(&ptr_)
                        : hamr3d_config_load(path.c_str(), &ptr_);
  }

 private:
  hamr3d_config* ptr_ = nullptr;
};

hamr3d_options to_options(const Flags& f) {
  hamr3d_options o;
  hamr3d_options_init(&o);
  if (f.seed) {
    o.has_seed = 1;
    o.seed = *f.seed;
  }
  o.repeats = f.repeats;
  o.threads = f.threads;
  o.out = f.out.empty() ? nullptr : f.out.c_str();
  o.laser_off = f.laser_off ? 1 : 0;
  o.track_grains = f.track_grains.empty() ? nullptr : f.track_grains.c_str();
  o.axis = f.axis.empty() ? nullptr : f.axis.c_str();
  o.values = f.values.empty() ? nullptr : f.values.data();
  o.value_count = f.values.size();
  o.layer = f.layer.empty() ? nullptr : f.layer.c_str();
  if (f.profile_time) {
    o.has_profile_time = 1;
    o.profile_time = *f.profile_time;
  }
  return o;
}

int finish(hamr3d_status s, char* report) {
  if (s != HAMR3D_OK) return fail(s);
  if (report != nullptr) std::fputs(report, stdout);
  hamr3d_string_free(report);
  return kExitOk;
}

void add_config(CLI::App* cmd, Flags& f, bool required = false) {
  auto* opt = cmd->add_option("--config", f.config, "JSON run configuration");
  if (required) opt->required();
}

void add_seed(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "seed for the medium and thermal noise");
}

void add_threads(CLI::App* cmd, Flags& f) {
  cmd->add_option("--threads", f.threads,
                  "worker threads (0 = all cores; default HAMR3D_THREADS or "
                  "the config)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamr3d: granular LLB simulator for multi-layer HAMR"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hamr3d_version()));
  Flags f;

  auto* gen = app.add_subcommand("generate-media",
                                 "build a granular medium and save it");
  add_config(gen, f);
  add_seed(gen, f);
  add_threads(gen, f);  // accepted for uniformity; generation is serial
  gen->add_option("--out", f.out, "media file to write");

  auto* write = app.add_subcommand("write", "record the configured bits");
  add_config(write, f);
  write->add_option("media", f.media, "media file from generate-media")
      ->required();
  add_seed(write, f);
  write->add_option("--out", f.out, "output directory");
  add_threads(write, f);
  write->add_flag("--laser-off", f.laser_off, "disable heating (T = T_env)");
  write->add_option("--track-grains", f.track_grains,
                    "'auto' or comma-separated grain ids to trace");

  auto* sweep = app.add_subcommand("sweep", "Hw or delta_d sweep");
  add_config(sweep, f);
  add_seed(sweep, f);
  sweep->add_option("--repeats", f.repeats, "seeds per point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", f.out, "output directory");
  add_threads(sweep, f);
  sweep->add_option("--axis", f.axis, "Hw or delta_d")
      ->check(CLI::IsMember({"Hw", "delta_d"}));
  sweep->add_option("--values", f.values, "sweep values (Oe or nm)")
      ->delimiter(',');
  sweep->add_option("--layer", f.layer, "layer of an Hw sweep")
      ->check(CLI::IsMember({"top", "bottom"}));

  auto* plot = app.add_subcommand("plot-data",
                                  "plot-ready CSVs from a run or sweep");
  plot->add_option("dir", f.run_dir, "output directory of write or sweep");
  add_config(plot, f);
  plot->add_option("--out", f.out, "directory for the CSVs");
  plot->add_option("--profile-time", f.profile_time,
                   "also dump (x, T, H_z) at this time, ns");

  auto* check = app.add_subcommand("validate-config", "check a config file");
  add_config(check, f, true);
  check->add_option("--out", f.out, "write the normalized config here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const hamr3d_options options = to_options(f);
  char* report = nullptr;

  if (*plot) {
    ConfigHandle config;
    if (!f.config.empty()) {
      if (hamr3d_status s = config.load(f.config); s != HAMR3D_OK) return fail(s);
    }
    const hamr3d_status s = hamr3d_cmd_plot_data(
        config.get(), f.run_dir.empty() ? nullptr : f.run_dir.c_str(),
        &options, &report);
    return finish(s, report);
  }

  ConfigHandle config;
  if (hamr3d_status s = config.load(f.config); s != HAMR3D_OK) return fail(s);
  hamr3d_status s = HAMR3D_OK;
  if (*gen) {
    s = hamr3d_cmd_generate_media(config.get(), &options, &report);
  } else if (*write) {
    s = hamr3d_cmd_write(config.get(), f.media.c_str(), &options, &report);
  } else if (*sweep) {
    s = hamr3d_cmd_sweep(config.get(), &options, &report);
  } else if (*check) {
    s = hamr3d_cmd_validate_config(config.get(), &options, &report);
  }
  return finish(s, report);
}

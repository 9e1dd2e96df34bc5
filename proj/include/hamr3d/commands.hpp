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


// The CLI subcommands as library calls. Each returns the text report the
// CLI prints; every file they write lands under the chosen output path.

#ifndef HAMR3D_COMMANDS_HPP
#define HAMR3D_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamr3d/config.hpp"

namespace hamr {

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::string out;                   // empty: taken from the config
  std::optional<int> threads;        // else HAMR3D_THREADS, else the config
  bool laser_off = false;
  std::string track_grains;          // "auto" or comma-separated grain ids
  std::optional<std::string> axis;   // sweep overrides
  std::vector<double> values;
  std::optional<std::string> layer;
  std::optional<double> profile_time;  // plot-data: dump T and H_z at t (ns)
};

/// Applies command-line overrides to a config (not the output path).
Config apply_options(Config config, const CommandOptions& options);

/// Worker count: flag, then HAMR3D_THREADS, then the config; 0 is all cores.
int effective_threads(const Config& config, const CommandOptions& options);

std::string cmd_generate_media(const Config& config,
                               const CommandOptions& options);
std::string cmd_write(const Config& config, const std::string& media_path,
                      const CommandOptions& options);
std::string cmd_sweep(const Config& config, const CommandOptions& options);
std::string cmd_plot_data(const std::string& run_dir,
                          const std::optional<Config>& config,
                          const CommandOptions& options);
std::string cmd_validate_config(const Config& config,
                                const CommandOptions& options);

/// Top grain nearest the middle of the track and the bottom grain under it.
std::vector<int> auto_track_pair(const MediaStack& media, double bit_length);

}  // namespace hamr

#endif  // HAMR3D_COMMANDS_HPP

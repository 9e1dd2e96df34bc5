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

// Versioned JSON run configuration. Every key is optional; missing keys take
// the defaults of the dual-layer FePt system (two layers, two heads).
// Unknown keys are rejected.

#ifndef HAMR3D_CONFIG_HPP
#define HAMR3D_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hamr3d/analysis.hpp"
#include "hamr3d/protocol.hpp"

namespace hamr {

inline constexpr int kSchemaVersion = 1;

struct SweepConfig {
  std::string axis = "delta_d";  // "delta_d" or "Hw"
  std::vector<double> values{0, 5, 10, 15, 20, 25, 30, 40, 60};
  std::string layer = "bottom";  // Hw sweeps: "top" or "bottom"

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool snapshots = true;
  bool auto_track_pair = false;  // trace a top grain and the bottom grain under it

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Config {
  int schema_version = kSchemaVersion;
  MediaSpec media;
  std::uint64_t media_seed = 1;
  RecordingRun run;                // heads carry no bits; see `bits`
  std::vector<std::string> bits;   // per head: "0110", "square", "segment:N"
  int repeats = 10;
  AnalysisOptions analysis;
  SweepConfig sweep;
  OutputConfig output;

  friend bool operator==(const Config&, const Config&) = default;
};

Config default_config();

/// Default layer statistics: index 0 top, 1 bottom.
LayerStats default_layer(std::size_t index);
HeadSpec default_head(std::size_t index);

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
std::string serialize_config(const Config& config);

/// Checks everything that does not need a generated medium.
void validate(const Config& config);

/// Expands a bit spec over `cells` cells into +-1 bits.
std::vector<int> resolve_bits(const std::string& spec, int cells);

int track_cells(const Config& config);

/// The run with every head's bits resolved.
RecordingRun resolved_run(const Config& config);

}  // namespace hamr

#endif  // HAMR3D_CONFIG_HPP

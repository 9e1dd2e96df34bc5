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

// Hierarchical multi-pass write of a granular stack: DC erase, room
// temperature equilibration, the head-array sweep, and a zero-field
// cooldown.

#ifndef HAMR3D_PROTOCOL_HPP
#define HAMR3D_PROTOCOL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hamr3d/fields.hpp"
#include "hamr3d/llb.hpp"
#include "hamr3d/media.hpp"

namespace hamr {

struct RecordingRun {
  HeadArray array;                 // velocity sign sets the sweep direction
  double bit_length = 20.0;        // nm
  std::uint64_t seed = 1;
  LlbParams llb;
  double equilibration_time = 1.0; // ns
  double cooldown_time = 1.0;      // ns
  double margin_fwhm = 5.0;        // profile cutoff beyond the track, in FWHM
  int erase_polarity = -1;         // "0" is m_z < 0
  // Grains whose temperature excess and applied field stay below these
  // thresholds are held still rather than integrated. Zero disables skipping.
  double quiet_temperature = 0.1;  // K
  double quiet_field = 10.0;       // Oe
  std::vector<int> trajectory_grain_ids;
  double trajectory_interval = 0.01;  // ns
  int threads = 1;

  double speed() const { return std::fabs(array.velocity); }

  friend bool operator==(const RecordingRun&, const RecordingRun&) = default;
};

/// Validates the run against the medium; throws before any computation.
void validate(const RecordingRun& run, const MediaStack& media);

struct TrajectorySample {
  double t = 0.0;  // ns
  Vec3 m;
  double T = 0.0;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string rng = "philox4x32-10/grain-id/step-index";
  double dt = 0.0;
  double t_start = 0.0;   // ns, start of equilibration
  double t_sweep = 0.0;   // ns, start of the head sweep
  double t_end = 0.0;     // ns, end of cooldown
  std::uint64_t steps = 0;
  std::uint64_t grain_steps = 0;  // integrated (non-quiet) grain steps
};

struct RunResult {
  std::vector<Vec3> final_state;
  std::vector<std::vector<Vec3>> snapshots;  // one per head, after its pass
  std::vector<double> snapshot_times;        // ns
  std::map<int, std::vector<TrajectorySample>> trajectories;
  Provenance provenance;
};

/// Sweep timeline of a run over a track of given length.
struct Timeline {
  double t_equilibrate = 0.0;  // start of equilibration
  double t_sweep = 0.0;        // all profiles are negligible on the track
  double t_sweep_end = 0.0;    // last head has cleared the track
  double t_end = 0.0;          // end of cooldown
  std::vector<double> pass_end;  // per head, when its profiles clear the track
};

Timeline make_timeline(const RecordingRun& run, double track_length);

RunResult run_recording(const MediaStack& media, const RecordingRun& run);

/// Assigns each layer's bit string ('0' -> -1, '1' -> +1) to the head that
/// writes that layer, then records. `pattern[l]` belongs to layer l (0 = top).
RunResult write_pattern(const MediaStack& media, RecordingRun run,
                        const std::vector<std::string>& pattern);

/// Parses "0110..." into +-1 bits.
std::vector<int> parse_bits(const std::string& bits);

}  // namespace hamr

#endif  // HAMR3D_PROTOCOL_HPP

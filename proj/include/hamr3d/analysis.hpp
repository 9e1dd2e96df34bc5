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

// Read-back metrics: down-track m_z profiles, the effective switching
// possibility of a written segment, and transition-aligned medium SNR,
// plus the field and head-spacing sweeps built on them.

#ifndef HAMR3D_ANALYSIS_HPP
#define HAMR3D_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hamr3d/media.hpp"
#include "hamr3d/protocol.hpp"

namespace hamr {

struct ProfileMeta {
  double velocity = 0.0;  // m/s
  double bit_length = 0.0;
  double delta_d = 0.0;
  int layer = 0;
  int repeats = 0;
};

struct TrackProfile {
  std::vector<double> x;        // uniform grid, nm
  std::vector<double> mz_mean;  // mean over repeats
  std::vector<double> mz_var;   // unbiased variance over repeats
  std::vector<std::vector<double>> runs;  // one cross-track average per repeat
  ProfileMeta meta;
};

/// Uniform grid covering [0, length] with spacing at most `spacing`.
std::vector<double> uniform_grid(double length, double spacing);

/// Cross-track average of m_z over one layer at each grid point, weighting
/// each grain by its chord length (the area-weighted strip average). With
/// `normalize`, each grain's m_z is divided by its m_e(T_env), so a fully
/// written grain reads +-1.
std::vector<double> cross_track_profile(const MediaStack& media,
                                        const std::vector<Vec3>& state,
                                        std::size_t layer,
                                        const std::vector<double>& x,
                                        bool normalize, double T_env,
                                        const LlbParams& llb);

/// Collects repeats on a shared grid into mean and variance.
TrackProfile make_profile(std::vector<double> x,
                          std::vector<std::vector<double>> runs,
                          const ProfileMeta& meta);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

struct SpEff {
  double value = 0.0;
  bool switched = false;  // false: no positive region at the segment centre
  double x3 = 0.0;        // actual switching region
  double x4 = 0.0;
};

/// int_{x3}^{x4} m_z dx / int_{x1}^{x2} H_w dx. [x3, x4] is the contiguous
/// run of positive samples of `mz` around `center`; `h_hat` is the written
/// field pattern sampled on the same grid, normalized to unit plateau.
SpEff sp_eff(const std::vector<double>& x, const std::vector<double>& mz,
             const std::vector<double>& h_hat, double x1, double x2,
             double center);

SpEff sp_eff(const TrackProfile& profile, const std::vector<double>& h_hat,
             double x1, double x2, double center);

/// Interval [x1, x2] where h_hat >= threshold, around `center`.
std::pair<double, double> ideal_window(const std::vector<double>& x,
                                       const std::vector<double>& h_hat,
                                       double center, double threshold);

struct AlignedWindows {
  std::vector<double> u;     // offset from the transition centre, nm
  std::vector<double> mean;  // sign-normalized, rising
  std::vector<double> var;   // unbiased, over all windows of all repeats
  std::size_t windows = 0;
};

/// Transition centres of one profile: zero crossings of the linear
/// interpolant, grouped by a +-hysteresis band so noise near zero counts
/// once. Returns (centre, +1 rising / -1 falling) pairs.
std::vector<std::pair<double, int>> transition_centers(
    const std::vector<double>& x, const std::vector<double>& mz,
    double hysteresis);

/// Extracts [-BL/2, BL/2] windows around every transition of every repeat.
/// Windows that would leave the grid are skipped. Throws a simulation error
/// when fewer than two transitions are found in total.
AlignedWindows align_transitions(const std::vector<double>& x,
                                 const std::vector<std::vector<double>>& runs,
                                 double bit_length, double hysteresis,
                                 double spacing);

struct Snr {
  double db = 0.0;
  double signal = 0.0;  // int mean^2
  double noise = 0.0;   // int var
  bool clamped = false;
};

inline constexpr double kSnrClampDb = 60.0;
inline constexpr double kSnrNoiseFloor = 1e-12;

Snr medium_snr(const AlignedWindows& aligned);

/// Both layers contribute equally: signals and noises are summed first.
Snr system_snr(const Snr& top, const Snr& bottom);

// ---------------------------------------------------------------------------
// Sweeps

struct MediaSpec {
  std::vector<LayerStats> layers;  // top first
  double track_length = 300.0;
  double track_width = 60.0;
  int lloyd_iterations = 4;

  friend bool operator==(const MediaSpec&, const MediaSpec&) = default;
};

struct AnalysisOptions {
  double grid_spacing = 0.5;      // nm
  double hysteresis = 0.2;        // transition detection band on m_z
  double ideal_threshold = 0.5;   // H_w level defining [x1, x2]
  int segment_cells = 5;          // written "1" segment for SP_eff
  bool normalize_by_me = true;

  friend bool operator==(const AnalysisOptions&,
                         const AnalysisOptions&) = default;
};

/// Seed of repeat r: media and noise both derive from it.
inline std::uint64_t repeat_seed(std::uint64_t base, int repeat) {
  return base + static_cast<std::uint64_t>(repeat);
}

/// Bits of a segment of `cells` ones centred in a background of zeros.
std::vector<int> segment_bits(int total_cells, int cells);
/// 1, 0, 1, 0, ... square wave.
std::vector<int> square_wave_bits(int total_cells);

struct FieldPoint {
  double Hw = 0.0;
  double sp_mean = 0.0;
  double sp_std = 0.0;
  std::vector<double> sp_runs;
  TrackProfile profile;
  std::vector<double> h_hat;
  double x1 = 0.0;
  double x2 = 0.0;
};

struct FieldSweepSpec {
  MediaSpec media;         // exactly one layer
  RecordingRun run;        // exactly one head; its Hw is overwritten
  std::vector<double> fields;
  std::uint64_t seed = 1;
  int repeats = 10;
  AnalysisOptions analysis;
  int threads = 1;
};

struct FieldSweepResult {
  std::vector<FieldPoint> points;
  double best_field = 0.0;
  double best_sp = 0.0;
};

void validate(const FieldSweepSpec& spec);
FieldPoint field_point(const FieldSweepSpec& spec, double Hw);
FieldSweepResult field_sweep_sp(const FieldSweepSpec& spec);
/// Index of the largest mean SP_eff (first on ties).
std::size_t argmax_sp(const std::vector<FieldPoint>& points);

struct SweepPoint {
  double delta_d = 0.0;
  double snr_top = 0.0;
  double snr_bottom = 0.0;
  double snr_system = 0.0;
  bool clamped = false;
  std::size_t windows_top = 0;
  std::size_t windows_bottom = 0;
  AlignedWindows aligned_top;
  AlignedWindows aligned_bottom;
};

struct DeltaDSweepSpec {
  MediaSpec media;   // two layers
  RecordingRun run;  // two heads; bits and delta_d are overwritten
  std::vector<double> delta_d;
  std::uint64_t seed = 1;
  int repeats = 10;
  AnalysisOptions analysis;
  int threads = 1;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double delta_d_opt = 0.0;
  double snr_max = 0.0;
};

void validate(const DeltaDSweepSpec& spec);
SweepPoint delta_d_point(const DeltaDSweepSpec& spec, double delta_d);
SweepResult sweep_delta_d(const DeltaDSweepSpec& spec);
/// Index of the largest system SNR (first on ties).
std::size_t argmax_snr(const std::vector<SweepPoint>& points);
SweepResult summarize_sweep(std::vector<SweepPoint> points);

}  // namespace hamr

#endif  // HAMR3D_ANALYSIS_HPP

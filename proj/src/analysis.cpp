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

#include "hamr3d/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "hamr3d/error.hpp"
#include "hamr3d/llb.hpp"
#include "hamr3d/parallel.hpp"

namespace hamr {

namespace {

// Linear interpolation on an increasing grid, clamped at the ends.
double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double f = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + f * (y[i] - y[i - 1]);
}

// Integral of the piecewise-linear interpolant of (x, y) over [a, b].
double integrate_interval(const std::vector<double>& x,
                          const std::vector<double>& y, double a, double b) {
  if (b <= a) return 0.0;
  double total = 0.0;
  double prev_x = a;
  double prev_y = interpolate(x, y, a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= a) continue;
    if (x[i] >= b) break;
    total += 0.5 * (prev_y + y[i]) * (x[i] - prev_x);
    prev_x = x[i];
    prev_y = y[i];
  }
  total += 0.5 * (prev_y + interpolate(x, y, b)) * (b - prev_x);
  return total;
}

std::size_t nearest_index(const std::vector<double>& x, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return 0;
  if (it == x.end()) return x.size() - 1;
  const auto i = static_cast<std::size_t>(it - x.begin());
  return (at - x[i - 1] <= x[i] - at) ? i - 1 : i;
}

void mean_and_variance(const std::vector<std::vector<double>>& rows,
                       std::size_t width, std::vector<double>& mean,
                       std::vector<double>& var) {
  mean.assign(width, 0.0);
  var.assign(width, 0.0);
  const double n = static_cast<double>(rows.size());
  if (rows.empty()) return;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < width; ++k) mean[k] += r[k];
  }
  for (double& m : mean) m /= n;
  if (rows.size() < 2) return;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < width; ++k) {
      const double d = r[k] - mean[k];
      var[k] += d * d;
    }
  }
  for (double& v : var) v /= n - 1.0;
}

[[noreturn]] void rethrow_annotated(const Error& e, const std::string& where) {
  throw Error(e.kind(), where + ": " + e.what());
}

int cell_count(double track_length, double bit_length) {
  return static_cast<int>(std::floor(track_length / bit_length + 1e-9));
}

MediaStack build(const MediaSpec& spec, std::uint64_t seed) {
  return build_media(spec.layers, spec.track_length, spec.track_width, seed,
                     spec.lloyd_iterations);
}

}  // namespace

std::vector<double> uniform_grid(double length, double spacing) {
  if (!(length > 0.0) || !(spacing > 0.0)) {
    config_error("profile grid needs positive length and spacing");
  }
  const auto n = static_cast<std::size_t>(std::ceil(length / spacing - 1e-9));
  std::vector<double> x(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    x[k] = length * static_cast<double>(k) / static_cast<double>(n);
  }
  return x;
}

std::vector<double> cross_track_profile(const MediaStack& media,
                                        const std::vector<Vec3>& state,
                                        std::size_t layer,
                                        const std::vector<double>& x,
                                        bool normalize, double T_env,
                                        const LlbParams& llb) {
  if (layer >= media.layers.size()) {
    config_error(fmt::format("layer {} does not exist", layer));
  }
  std::vector<double> num(x.size(), 0.0);
  std::vector<double> den(x.size(), 0.0);
  for (const GrainSpec& g : media.layers[layer].grains) {
    double lo = g.polygon.front().x;
    double hi = lo;
    for (const Point2& p : g.polygon) {
      lo = std::min(lo, p.x);
      hi = std::max(hi, p.x);
    }
    double mz = state.at(static_cast<std::size_t>(g.id)).z;
    if (normalize) mz /= equilibrium_magnetization(T_env, g.Tc, llb);
    auto k = static_cast<std::size_t>(
        std::lower_bound(x.begin(), x.end(), lo) - x.begin());
    for (; k < x.size() && x[k] <= hi; ++k) {
      const double w = chord_length(g.polygon, x[k]);
      num[k] += w * mz;
      den[k] += w;
    }
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    num[k] = den[k] > 0.0 ? num[k] / den[k] : 0.0;
  }
  return num;
}

TrackProfile make_profile(std::vector<double> x,
                          std::vector<std::vector<double>> runs,
                          const ProfileMeta& meta) {
  for (const auto& r : runs) {
    if (r.size() != x.size()) config_error("profile runs do not share a grid");
  }
  TrackProfile p;
  mean_and_variance(runs, x.size(), p.mz_mean, p.mz_var);
  p.x = std::move(x);
  p.runs = std::move(runs);
  p.meta = meta;
  p.meta.repeats = static_cast<int>(p.runs.size());
  return p;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return total;
}

SpEff sp_eff(const std::vector<double>& x, const std::vector<double>& mz,
             const std::vector<double>& h_hat, double x1, double x2,
             double center) {
  if (x.size() < 2 || mz.size() != x.size() || h_hat.size() != x.size()) {
    config_error("sp_eff: profile, field and grid sizes differ");
  }
  const double denominator = integrate_interval(x, h_hat, x1, x2);
  if (!(denominator > 0.0)) {
    config_error("sp_eff: the ideal write window has no field");
  }
  SpEff out;
  const std::size_t c = nearest_index(x, center);
  if (!(mz[c] > 0.0)) return out;
  std::size_t lo = c;
  std::size_t hi = c;
  while (lo > 0 && mz[lo - 1] > 0.0) --lo;
  while (hi + 1 < x.size() && mz[hi + 1] > 0.0) ++hi;
  double numerator = 0.0;
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    numerator += 0.5 * (mz[i] + mz[i - 1]) * (x[i] - x[i - 1]);
  }
  out.switched = true;
  out.x3 = x[lo];
  out.x4 = x[hi];
  out.value = numerator / denominator;
  return out;
}

SpEff sp_eff(const TrackProfile& profile, const std::vector<double>& h_hat,
             double x1, double x2, double center) {
  return sp_eff(profile.x, profile.mz_mean, h_hat, x1, x2, center);
}

std::pair<double, double> ideal_window(const std::vector<double>& x,
                                       const std::vector<double>& h_hat,
                                       double center, double threshold) {
  const std::size_t c = nearest_index(x, center);
  if (!(h_hat[c] >= threshold)) {
    config_error("segment centre lies outside the write window");
  }
  std::size_t lo = c;
  std::size_t hi = c;
  while (lo > 0 && h_hat[lo - 1] >= threshold) --lo;
  while (hi + 1 < x.size() && h_hat[hi + 1] >= threshold) ++hi;
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double a = h_hat[inside] - threshold;
    const double b = h_hat[outside] - threshold;
    const double f = a / (a - b);
    return x[inside] + f * (x[outside] - x[inside]);
  };
  const double x1 = lo > 0 ? crossing(lo, lo - 1) : x[lo];
  const double x2 = hi + 1 < x.size() ? crossing(hi, hi + 1) : x[hi];
  return {x1, x2};
}

std::vector<std::pair<double, int>> transition_centers(
    const std::vector<double>& x, const std::vector<double>& mz,
    double hysteresis) {
  std::vector<std::pair<double, int>> out;
  int level = 0;
  std::size_t last = 0;  // last sample at the current level
  for (std::size_t i = 0; i < mz.size(); ++i) {
    int now = 0;
    if (mz[i] >= hysteresis) now = 1;
    if (mz[i] <= -hysteresis) now = -1;
    if (now == 0) continue;
    if (level != 0 && now != level) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t j = last; j < i; ++j) {
        const double a = mz[j];
        const double b = mz[j + 1];
        if ((a < 0.0) != (b < 0.0)) {
          sum += x[j] + (-a) / (b - a) * (x[j + 1] - x[j]);
          ++count;
        }
      }
      if (count > 0) out.emplace_back(sum / count, now);
    }
    level = now;
    last = i;
  }
  return out;
}

AlignedWindows align_transitions(const std::vector<double>& x,
                                 const std::vector<std::vector<double>>& runs,
                                 double bit_length, double hysteresis,
                                 double spacing) {
  if (!(bit_length > 0.0) || !(spacing > 0.0)) {
    config_error("align_transitions needs positive bit length and spacing");
  }
  AlignedWindows out;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::round(bit_length / spacing)));
  out.u.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    out.u[k] = -0.5 * bit_length +
               bit_length * static_cast<double>(k) / static_cast<double>(n);
  }
  std::vector<std::vector<double>> windows;
  for (const auto& run : runs) {
    if (run.size() != x.size()) config_error("profile runs do not share a grid");
    for (const auto& [c, dir] : transition_centers(x, run, hysteresis)) {
      if (c - 0.5 * bit_length < x.front() || c + 0.5 * bit_length > x.back()) {
        continue;
      }
      std::vector<double> w(out.u.size());
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = dir * interpolate(x, run, c + out.u[k]);
      }
      windows.push_back(std::move(w));
    }
  }
  if (windows.size() < 2) {
    simulation_error(fmt::format(
        "insufficient transitions: found {} usable transition window(s) in "
        "{} profile(s); need at least 2",
        windows.size(), runs.size()));
  }
  mean_and_variance(windows, out.u.size(), out.mean, out.var);
  out.windows = windows.size();
  return out;
}

namespace {

Snr snr_from(double signal, double noise) {
  Snr s;
  s.signal = signal;
  s.noise = noise;
  if (noise < kSnrNoiseFloor) {
    s.db = kSnrClampDb;
    s.clamped = true;
  } else {
    s.db = 10.0 * std::log10(signal / noise);
  }
  return s;
}

}  // namespace

Snr medium_snr(const AlignedWindows& aligned) {
  std::vector<double> sq(aligned.mean.size());
  for (std::size_t k = 0; k < sq.size(); ++k) {
    sq[k] = aligned.mean[k] * aligned.mean[k];
  }
  return snr_from(trapezoid(aligned.u, sq), trapezoid(aligned.u, aligned.var));
}

Snr system_snr(const Snr& top, const Snr& bottom) {
  return snr_from(top.signal + bottom.signal, top.noise + bottom.noise);
}

std::vector<int> segment_bits(int total_cells, int cells) {
  if (cells < 1 || total_cells < cells) {
    config_error(fmt::format(
        "a {}-cell segment does not fit a track of {} cells", cells,
        total_cells));
  }
  std::vector<int> bits(static_cast<std::size_t>(total_cells), -1);
  const int start = (total_cells - cells) / 2;
  for (int i = start; i < start + cells; ++i) {
    bits[static_cast<std::size_t>(i)] = 1;
  }
  return bits;
}

std::vector<int> square_wave_bits(int total_cells) {
  if (total_cells < 1) config_error("square wave needs at least one cell");
  std::vector<int> bits(static_cast<std::size_t>(total_cells));
  for (int i = 0; i < total_cells; ++i) {
    bits[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Field sweep

void validate(const FieldSweepSpec& spec) {
  if (spec.media.layers.size() != 1) {
    config_error("field sweep runs on a single-layer medium");
  }
  if (spec.run.array.heads.size() != 1) {
    config_error("field sweep runs with a single head");
  }
  if (spec.fields.empty()) config_error("field sweep has no field values");
  if (spec.repeats < 1) config_error("repeats must be >= 1");
  const int cells = cell_count(spec.media.track_length, spec.run.bit_length);
  segment_bits(cells, spec.analysis.segment_cells);
}

namespace {

struct FieldSetup {
  RecordingRun run;
  std::vector<double> x;
  std::vector<double> h_hat;
  double center = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

FieldSetup field_setup(const FieldSweepSpec& spec, double Hw) {
  FieldSetup s;
  s.run = spec.run;
  s.run.threads = 1;
  HeadSpec& head = s.run.array.heads.front();
  head.Hw = Hw;
  head.layer = 0;
  const int cells = cell_count(spec.media.track_length, spec.run.bit_length);
  head.bits = segment_bits(cells, spec.analysis.segment_cells);
  s.x = uniform_grid(spec.media.track_length, spec.analysis.grid_spacing);
  const ProfileEvaluator profile(s.run.array, s.run.bit_length);
  s.h_hat.resize(s.x.size());
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    s.h_hat[k] = std::max(0.0, profile.written_amplitude(0, s.x[k]));
  }
  const int start = (cells - spec.analysis.segment_cells) / 2;
  s.center = (start + 0.5 * spec.analysis.segment_cells) * s.run.bit_length;
  std::tie(s.x1, s.x2) =
      ideal_window(s.x, s.h_hat, s.center, spec.analysis.ideal_threshold);
  return s;
}

std::vector<double> field_repeat(const FieldSweepSpec& spec,
                                 const FieldSetup& setup, int repeat) {
  const std::uint64_t seed = repeat_seed(spec.seed, repeat);
  try {
    const MediaStack media = build(spec.media, seed);
    RecordingRun run = setup.run;
    run.seed = seed;
    const RunResult result = run_recording(media, run);
    return cross_track_profile(media, result.final_state, 0, setup.x,
                               spec.analysis.normalize_by_me,
                               run.array.T_env, run.llb);
  } catch (const Error& e) {
    rethrow_annotated(e, fmt::format("Hw = {} Oe, seed {}",
                                     setup.run.array.heads[0].Hw, seed));
  }
}

FieldPoint finish_field_point(FieldSetup setup,
                              std::vector<std::vector<double>> runs) {
  FieldPoint p;
  p.Hw = setup.run.array.heads[0].Hw;
  for (const auto& r : runs) {
    p.sp_runs.push_back(
        sp_eff(setup.x, r, setup.h_hat, setup.x1, setup.x2, setup.center)
            .value);
  }
  const double n = static_cast<double>(p.sp_runs.size());
  for (double v : p.sp_runs) p.sp_mean += v / n;
  if (p.sp_runs.size() > 1) {
    double ss = 0.0;
    for (double v : p.sp_runs) ss += (v - p.sp_mean) * (v - p.sp_mean);
    p.sp_std = std::sqrt(ss / (n - 1.0));
  }
  ProfileMeta meta;
  meta.velocity = setup.run.speed();
  meta.bit_length = setup.run.bit_length;
  meta.layer = 0;
  p.profile = make_profile(setup.x, std::move(runs), meta);
  p.h_hat = std::move(setup.h_hat);
  p.x1 = setup.x1;
  p.x2 = setup.x2;
  return p;
}

}  // namespace

FieldPoint field_point(const FieldSweepSpec& spec, double Hw) {
  validate(spec);
  FieldSetup setup = field_setup(spec, Hw);
  std::vector<std::vector<double>> runs(static_cast<std::size_t>(spec.repeats));
  parallel_for(runs.size(), spec.threads, [&](std::size_t r) {
    runs[r] = field_repeat(spec, setup, static_cast<int>(r));
  });
  return finish_field_point(std::move(setup), std::move(runs));
}

FieldSweepResult field_sweep_sp(const FieldSweepSpec& spec) {
  validate(spec);
  std::vector<FieldSetup> setups;
  for (double Hw : spec.fields) setups.push_back(field_setup(spec, Hw));
  const auto repeats = static_cast<std::size_t>(spec.repeats);
  std::vector<std::vector<double>> runs(setups.size() * repeats);
  parallel_for(runs.size(), spec.threads, [&](std::size_t task) {
    runs[task] = field_repeat(spec, setups[task / repeats],
                              static_cast<int>(task % repeats));
  });
  FieldSweepResult out;
  for (std::size_t i = 0; i < setups.size(); ++i) {
    std::vector<std::vector<double>> mine(
        std::make_move_iterator(runs.begin() + static_cast<long>(i * repeats)),
        std::make_move_iterator(runs.begin() +
                                static_cast<long>((i + 1) * repeats)));
    out.points.push_back(
        finish_field_point(std::move(setups[i]), std::move(mine)));
  }
  const std::size_t best = argmax_sp(out.points);
  out.best_field = out.points[best].Hw;
  out.best_sp = out.points[best].sp_mean;
  return out;
}

std::size_t argmax_sp(const std::vector<FieldPoint>& points) {
  if (points.empty()) config_error("no sweep points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].sp_mean > points[best].sp_mean) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Head-spacing sweep

void validate(const DeltaDSweepSpec& spec) {
  if (spec.media.layers.size() != 2) {
    config_error("head-spacing sweep runs on a two-layer medium");
  }
  if (spec.run.array.heads.size() != 2) {
    config_error("head-spacing sweep runs with two heads");
  }
  if (spec.delta_d.empty()) config_error("head-spacing sweep has no values");
  for (double d : spec.delta_d) {
    if (!(d >= 0.0)) config_error("delta_d values must be >= 0");
  }
  if (spec.repeats < 1) config_error("repeats must be >= 1");
  if (cell_count(spec.media.track_length, spec.run.bit_length) < 3) {
    config_error("head-spacing sweep needs at least 3 bit cells");
  }
}

namespace {

RecordingRun delta_d_run(const DeltaDSweepSpec& spec, double delta_d) {
  RecordingRun run = spec.run;
  run.threads = 1;
  const int cells = cell_count(spec.media.track_length, spec.run.bit_length);
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    run.array.heads[i].bits = square_wave_bits(cells);
    if (i > 0) run.array.heads[i].delta_d = delta_d;
  }
  return run;
}

struct LayerRuns {
  std::vector<double> top;
  std::vector<double> bottom;
};

LayerRuns delta_d_repeat(const DeltaDSweepSpec& spec, const RecordingRun& base,
                         const std::vector<double>& x, int repeat) {
  const std::uint64_t seed = repeat_seed(spec.seed, repeat);
  try {
    const MediaStack media = build(spec.media, seed);
    RecordingRun run = base;
    run.seed = seed;
    const RunResult result = run_recording(media, run);
    LayerRuns out;
    const bool norm = spec.analysis.normalize_by_me;
    out.top = cross_track_profile(media, result.final_state, 0, x, norm,
                                  run.array.T_env, run.llb);
    out.bottom = cross_track_profile(media, result.final_state, 1, x, norm,
                                     run.array.T_env, run.llb);
    return out;
  } catch (const Error& e) {
    rethrow_annotated(e, fmt::format("delta_d = {} nm, seed {}",
                                     base.array.heads[1].delta_d, seed));
  }
}

SweepPoint finish_delta_d_point(const DeltaDSweepSpec& spec, double delta_d,
                                const std::vector<double>& x,
                                const std::vector<LayerRuns>& runs) {
  std::vector<std::vector<double>> top;
  std::vector<std::vector<double>> bottom;
  for (const LayerRuns& r : runs) {
    top.push_back(r.top);
    bottom.push_back(r.bottom);
  }
  SweepPoint p;
  p.delta_d = delta_d;
  try {
    const double bl = spec.run.bit_length;
    const double h = spec.analysis.hysteresis;
    const double dx = spec.analysis.grid_spacing;
    p.aligned_top = align_transitions(x, top, bl, h, dx);
    p.aligned_bottom = align_transitions(x, bottom, bl, h, dx);
  } catch (const Error& e) {
    rethrow_annotated(e, fmt::format("delta_d = {} nm", delta_d));
  }
  const Snr t = medium_snr(p.aligned_top);
  const Snr b = medium_snr(p.aligned_bottom);
  const Snr s = system_snr(t, b);
  p.snr_top = t.db;
  p.snr_bottom = b.db;
  p.snr_system = s.db;
  p.clamped = t.clamped || b.clamped || s.clamped;
  p.windows_top = p.aligned_top.windows;
  p.windows_bottom = p.aligned_bottom.windows;
  return p;
}

}  // namespace

SweepPoint delta_d_point(const DeltaDSweepSpec& spec, double delta_d) {
  validate(spec);
  const RecordingRun base = delta_d_run(spec, delta_d);
  const auto x =
      uniform_grid(spec.media.track_length, spec.analysis.grid_spacing);
  std::vector<LayerRuns> runs(static_cast<std::size_t>(spec.repeats));
  parallel_for(runs.size(), spec.threads, [&](std::size_t r) {
    runs[r] = delta_d_repeat(spec, base, x, static_cast<int>(r));
  });
  return finish_delta_d_point(spec, delta_d, x, runs);
}

SweepResult sweep_delta_d(const DeltaDSweepSpec& spec) {
  validate(spec);
  const auto x =
      uniform_grid(spec.media.track_length, spec.analysis.grid_spacing);
  std::vector<RecordingRun> bases;
  for (double d : spec.delta_d) bases.push_back(delta_d_run(spec, d));
  const auto repeats = static_cast<std::size_t>(spec.repeats);
  std::vector<LayerRuns> runs(bases.size() * repeats);
  parallel_for(runs.size(), spec.threads, [&](std::size_t task) {
    runs[task] = delta_d_repeat(spec, bases[task / repeats], x,
                                static_cast<int>(task % repeats));
  });
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const std::vector<LayerRuns> mine(
        runs.begin() + static_cast<long>(i * repeats),
        runs.begin() + static_cast<long>((i + 1) * repeats));
    points.push_back(finish_delta_d_point(spec, spec.delta_d[i], x, mine));
  }
  return summarize_sweep(std::move(points));
}

std::size_t argmax_snr(const std::vector<SweepPoint>& points) {
  if (points.empty()) config_error("no sweep points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].snr_system > points[best].snr_system) best = i;
  }
  return best;
}

SweepResult summarize_sweep(std::vector<SweepPoint> points) {
  SweepResult out;
  const std::size_t best = argmax_snr(points);
  out.delta_d_opt = points[best].delta_d;
  out.snr_max = points[best].snr_system;
  out.points = std::move(points);
  return out;
}

}  // namespace hamr

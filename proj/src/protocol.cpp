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

#include "hamr3d/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "hamr3d/error.hpp"
#include "hamr3d/parallel.hpp"

namespace hamr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StepRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // exclusive
};

// Reach of a Gaussian of peak `amplitude` above `threshold`.
double gaussian_reach(double amplitude, double threshold, double fwhm) {
  if (threshold <= 0.0) return kInf;
  if (amplitude <= threshold) return 0.0;
  const double sigma = fwhm * kFwhmToSigma;
  return sigma * std::sqrt(2.0 * std::log(amplitude / threshold));
}

// Extent of one head's profiles relative to its laser position.
struct HeadExtent {
  double left = 0.0;
  double right = 0.0;
};

HeadExtent head_extent(const HeadSpec& h, double margin_fwhm) {
  const double reach_T = margin_fwhm * h.fwhm_T;
  const double pole = -h.d;
  const double reach_H = 0.5 * h.head_width + margin_fwhm * h.fwhm_H;
  return {std::min(-reach_T, pole - reach_H), std::max(reach_T, pole + reach_H)};
}

class GrainIntegrator {
 public:
  GrainIntegrator(const MediaStack& media, const RecordingRun& run,
                  const Timeline& timeline, const ProfileEvaluator& profile,
                  RunResult& result)
      : media_(media),
        run_(run),
        timeline_(timeline),
        profile_(profile),
        result_(result),
        dt_(run.llb.dt),
        dt_s_(run.llb.dt * kNsToS),
        eps2_(run.llb.epsilon_m * run.llb.epsilon_m) {
    total_steps_ = static_cast<std::uint64_t>(
        std::ceil((timeline.t_end - timeline.t_equilibrate) / dt_ - 1e-9));
    sweep_begin_ = index_at_or_after(timeline.t_sweep);
    sweep_end_ = index_at_or_after(timeline.t_sweep_end);
    for (double t : timeline.pass_end) {
      snapshot_index_.push_back(index_at_or_after(t));
    }
    stride_ = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(run.trajectory_interval / dt_)));
    const auto offsets = head_offsets(run.array);
    for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
      const HeadSpec& h = run.array.heads[i];
      const double excess = run.array.laser_enabled ? h.Tw - run.array.T_env : 0;
      reach_T_.push_back(
          gaussian_reach(excess, run.quiet_temperature, h.fwhm_T));
      const double rH = gaussian_reach(h.Hw, run.quiet_field, h.fwhm_H);
      reach_H_.push_back(h.Hw > run.quiet_field || run.quiet_field <= 0.0
                             ? 0.5 * h.head_width + rH
                             : 0.0);
      pole_shift_.push_back(-h.d);
      offset_.push_back(offsets[i]);
    }
  }

  std::uint64_t total_steps() const { return total_steps_; }

  double time_at(std::uint64_t n) const {
    return timeline_.t_equilibrate + static_cast<double>(n) * dt_;
  }

  std::uint64_t index_at_or_after(double t) const {
    const double k = std::ceil((t - timeline_.t_equilibrate) / dt_ - 1e-9);
    return std::min<std::uint64_t>(
        total_steps_, static_cast<std::uint64_t>(std::max(0.0, k)));
  }

  // Integrates one grain; returns the number of integrated steps.
  std::uint64_t integrate(const GrainSpec& g, bool tracked) {
    Vec3 m = result_.final_state[static_cast<std::size_t>(g.id)];
    const std::vector<StepRange> ranges = active_ranges(g);
    const CounterRng noise = grain_noise_stream(run_.seed, g.id);
    const StepInput quiet{
        grain_coefficients(g, run_.array.T_env, run_.llb, dt_s_), Vec3{}};
    std::vector<TrajectorySample>* traj =
        tracked ? &result_.trajectories.find(g.id)->second : nullptr;

    std::uint64_t n = 0;
    std::uint64_t integrated = 0;
    std::size_t next_snapshot = 0;

    auto record_span = [&](std::uint64_t a, std::uint64_t b) {
      // m is constant over [a, b)
      while (next_snapshot < snapshot_index_.size() &&
             snapshot_index_[next_snapshot] < b) {
        if (snapshot_index_[next_snapshot] >= a) {
          result_.snapshots[next_snapshot][static_cast<std::size_t>(g.id)] = m;
        }
        ++next_snapshot;
      }
      if (traj != nullptr) {
        std::uint64_t k = ((a + stride_ - 1) / stride_) * stride_;
        for (; k < b; k += stride_) {
          const double t = time_at(k);
          traj->push_back({t, m, sample(g, t).T});
        }
      }
    };

    auto input_at = [&](std::uint64_t k) -> StepInput {
      if (k < sweep_begin_ || k >= sweep_end_) return quiet;
      const FieldSample s = sample(g, time_at(k));
      return {grain_coefficients(g, s.T, run_.llb, dt_s_), s.H};
    };

    for (const StepRange& r : ranges) {
      record_span(n, r.begin);
      n = r.begin;
      StepInput now = input_at(n);
      for (; n < r.end; ++n) {
        record_span(n, n + 1);
        StepInput next = input_at(n + 1);
        std::array<double, 6> xi{};
        if (run_.llb.thermal_noise) xi = noise.normals6(n);
        m = heun_step(m, now, next, xi, g.easy_axis, run_.llb.gamma_e, dt_s_,
                      eps2_);
        check_magnitude(m, g.id, run_.llb);
        now = next;
      }
      integrated += r.end - r.begin;
    }
    record_span(n, total_steps_ + 1);
    result_.final_state[static_cast<std::size_t>(g.id)] = m;
    return integrated;
  }

 private:
  FieldSample sample(const GrainSpec& g, double t) const {
    if (t < timeline_.t_sweep || t >= timeline_.t_sweep_end) {
      return {run_.array.T_env, Vec3{}};
    }
    return profile_.sample(g.center.x, t);
  }

  std::vector<StepRange> active_ranges(const GrainSpec& g) const {
    std::vector<StepRange> ranges;
    ranges.push_back({0, sweep_begin_});
    const double v = run_.array.velocity;
    std::vector<std::pair<double, double>> windows;
    auto add_window = [&](double center_offset, double reach) {
      if (reach <= 0.0) return;
      if (!std::isfinite(reach)) {
        windows.emplace_back(-kInf, kInf);
        return;
      }
      // v t + center_offset within (x - reach, x + reach)
      double a = (g.center.x - reach - center_offset) / v;
      double b = (g.center.x + reach - center_offset) / v;
      if (a > b) std::swap(a, b);
      windows.emplace_back(a, b);
    };
    for (std::size_t i = 0; i < offset_.size(); ++i) {
      add_window(offset_[i], reach_T_[i]);
      add_window(offset_[i] + pole_shift_[i], reach_H_[i]);
    }
    std::sort(windows.begin(), windows.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& w : windows) {
      if (!merged.empty() && w.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, w.second);
      } else {
        merged.push_back(w);
      }
    }
    for (const auto& w : merged) {
      // A step n integrates [t_n, t_n+1]; include any step touching the
      // window.
      const double lo = std::max(w.first, timeline_.t_sweep);
      const double hi = std::min(w.second, timeline_.t_sweep_end);
      if (!(hi > lo)) continue;
      std::uint64_t a = index_at_or_after(lo);
      if (a > 0) --a;
      a = std::max(a, sweep_begin_);
      const std::uint64_t b = std::min(index_at_or_after(hi) + 1, sweep_end_);
      if (b <= a) continue;
      if (ranges.back().end >= a) {
        ranges.back().end = std::max(ranges.back().end, b);
      } else {
        ranges.push_back({a, b});
      }
    }
    if (ranges.back().end >= sweep_end_) {
      ranges.back().end = total_steps_;
    } else {
      ranges.push_back({sweep_end_, total_steps_});
    }
    return ranges;
  }

  const MediaStack& media_;
  const RecordingRun& run_;
  const Timeline& timeline_;
  const ProfileEvaluator& profile_;
  RunResult& result_;
  double dt_;
  double dt_s_;
  double eps2_;
  std::uint64_t total_steps_ = 0;
  std::uint64_t sweep_begin_ = 0;
  std::uint64_t sweep_end_ = 0;
  std::uint64_t stride_ = 1;
  std::vector<std::uint64_t> snapshot_index_;
  std::vector<double> reach_T_;
  std::vector<double> reach_H_;
  std::vector<double> pole_shift_;
  std::vector<double> offset_;
};

}  // namespace

void validate(const RecordingRun& run, const MediaStack& media) {
  validate_against_media(run.array, media);
  validate(run.llb);
  if (!(run.speed() > 0.0)) config_error("velocity must be nonzero");
  if (!(run.bit_length > 0.0)) config_error("bit_length must be > 0");
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    if (run.array.heads[i].bits.empty()) {
      config_error(fmt::format("head {}: bit sequence is empty", i + 1));
    }
  }
  if (!(run.equilibration_time >= 0.0) || !(run.cooldown_time >= 0.0)) {
    config_error("equilibration_time and cooldown_time must be >= 0");
  }
  if (!(run.margin_fwhm > 0.0)) config_error("margin_fwhm must be > 0");
  if (!(run.quiet_temperature >= 0.0) || !(run.quiet_field >= 0.0)) {
    config_error("quiet thresholds must be >= 0");
  }
  if (!(run.trajectory_interval > 0.0)) {
    config_error("trajectory_interval must be > 0");
  }
  if (run.erase_polarity != 1 && run.erase_polarity != -1) {
    config_error("erase_polarity must be +1 or -1");
  }
  if (run.threads < 0) config_error("threads must be >= 0");
  for (int id : run.trajectory_grain_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= media.grain_count()) {
      config_error(fmt::format("trajectory grain id {} does not exist", id));
    }
  }
}

Timeline make_timeline(const RecordingRun& run, double track_length) {
  const double v = run.array.velocity;
  if (v == 0.0) config_error("velocity must be nonzero");
  const auto offsets = head_offsets(run.array);
  Timeline tl;
  tl.t_sweep = kInf;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const HeadExtent e = head_extent(run.array.heads[i], run.margin_fwhm);
    double start;
    double clear;
    if (v < 0.0) {
      start = (track_length - offsets[i] - e.left) / v;
      clear = (-offsets[i] - e.right) / v;
    } else {
      start = (-offsets[i] - e.right) / v;
      clear = (track_length - offsets[i] - e.left) / v;
    }
    tl.t_sweep = std::min(tl.t_sweep, start);
    tl.pass_end.push_back(clear);
  }
  tl.t_sweep_end = *std::max_element(tl.pass_end.begin(), tl.pass_end.end());
  tl.t_equilibrate = tl.t_sweep - run.equilibration_time;
  tl.t_end = tl.t_sweep_end + run.cooldown_time;
  return tl;
}

RunResult run_recording(const MediaStack& media, const RecordingRun& run) {
  validate(run, media);
  const Timeline timeline = make_timeline(run, media.track_length);
  const ProfileEvaluator profile(run.array, run.bit_length);

  MediaStack erased = media;
  dc_erase(erased, run.erase_polarity, run.array.T_env, run.llb);

  RunResult result;
  result.final_state = erased.state;
  result.snapshots.assign(run.array.heads.size(), erased.state);
  result.snapshot_times = timeline.pass_end;
  for (int id : run.trajectory_grain_ids) result.trajectories[id];

  GrainIntegrator integrator(erased, run, timeline, profile, result);

  std::vector<const GrainSpec*> grains;
  for (const Layer& layer : erased.layers) {
    for (const GrainSpec& g : layer.grains) grains.push_back(&g);
  }
  std::vector<char> tracked(grains.size(), 0);
  for (int id : run.trajectory_grain_ids) {
    tracked[static_cast<std::size_t>(id)] = 1;
  }

  std::vector<std::uint64_t> work(grains.size(), 0);
  parallel_for(grains.size(), run.threads, [&](std::size_t i) {
    work[i] = integrator.integrate(*grains[i], tracked[i] != 0);
  });

  Provenance& p = result.provenance;
  p.seed = run.seed;
  p.dt = run.llb.dt;
  p.t_start = timeline.t_equilibrate;
  p.t_sweep = timeline.t_sweep;
  p.t_end = timeline.t_end;
  p.steps = integrator.total_steps();
  for (std::uint64_t w : work) p.grain_steps += w;
  return result;
}

std::vector<int> parse_bits(const std::string& bits) {
  std::vector<int> out;
  out.reserve(bits.size());
  for (char c : bits) {
    if (c == '0') {
      out.push_back(-1);
    } else if (c == '1') {
      out.push_back(1);
    } else {
      config_error(fmt::format("bit string '{}' may only contain 0 and 1",
                               bits));
    }
  }
  if (out.empty()) config_error("bit string is empty");
  return out;
}

RunResult write_pattern(const MediaStack& media, RecordingRun run,
                        const std::vector<std::string>& pattern) {
  if (pattern.size() != media.layers.size()) {
    config_error(fmt::format("pattern has {} layers, medium has {}",
                             pattern.size(), media.layers.size()));
  }
  for (const std::string& p : pattern) {
    if (p.size() != pattern.front().size()) {
      config_error("pattern lengths differ across layers");
    }
  }
  for (std::size_t i = 0; i < run.array.heads.size(); ++i) {
    const std::size_t layer = target_layer(run.array, i, media.layers.size());
    run.array.heads[i].bits = parse_bits(pattern[layer]);
  }
  return run_recording(media, run);
}

}  // namespace hamr

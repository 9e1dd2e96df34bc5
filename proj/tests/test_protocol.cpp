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


#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "hamr3d/error.hpp"
#include "hamr3d/fields.hpp"
#include "hamr3d/media.hpp"
#include "hamr3d/protocol.hpp"

using namespace hamr;

namespace {

LayerStats top_stats() {
  return {"top", 487.0, 526.0, 0.03, 6.0e6, 0.15, 6.0, 6.0, 0.09, 0.0};
}

LayerStats bottom_stats() {
  return {"bottom", 696.0, 620.0, 0.03, 25.0e6, 0.15, 6.0, 6.0, 0.09, -8.0};
}

MediaStack small_stack(std::uint64_t seed = 3, double length = 60.0) {
  return build_media({top_stats(), bottom_stats()}, length, 18.0, seed);
}

RecordingRun small_run(const std::string& bits = "010") {
  RecordingRun run;
  HeadSpec h1;
  h1.Tw = 680.0;
  h1.Hw = 13000.0;
  HeadSpec h2;
  h2.Tw = 540.0;
  h2.Hw = 13100.0;
  h2.delta_d = 24.5;
  run.array.heads = {h1, h2};
  run.array.velocity = -5.0;
  run.llb.dt = 1e-4;
  run.margin_fwhm = 3.0;
  run.equilibration_time = 0.2;
  run.cooldown_time = 0.2;
  run.array.heads[0].bits = parse_bits(bits);
  run.array.heads[1].bits = parse_bits(bits);
  return run;
}

double layer_mean_mz(const MediaStack& m, const std::vector<Vec3>& s,
                     std::size_t layer) {
  double sum = 0.0;
  for (const GrainSpec& g : m.layers[layer].grains) {
    sum += s[static_cast<std::size_t>(g.id)].z;
  }
  return sum / static_cast<double>(m.layers[layer].grains.size());
}

}  // namespace

TEST_CASE("parse_bits") {
  CHECK(parse_bits("0110") == std::vector<int>{-1, 1, 1, -1});
  CHECK_THROWS_AS(parse_bits("01x"), Error);
  CHECK_THROWS_AS(parse_bits(""), Error);
}

TEST_CASE("timeline brackets every pass") {
  const RecordingRun run = small_run();
  const Timeline tl = make_timeline(run, 60.0);
  REQUIRE(tl.pass_end.size() == 2);
  CHECK(tl.t_equilibrate == doctest::Approx(tl.t_sweep - 0.2));
  CHECK(tl.t_end == doctest::Approx(tl.t_sweep_end + 0.2));
  CHECK(tl.t_sweep < tl.pass_end[0]);
  // The trailing head clears last.
  CHECK(tl.pass_end[1] > tl.pass_end[0]);
  CHECK(tl.t_sweep_end == tl.pass_end[1]);

  // At the sweep start and at each pass end the profiles are negligible on
  // the track.
  const ProfileEvaluator ev(run.array, run.bit_length);
  const double floor_T = 600.0 * std::exp(-0.5 * 9.0 * 8.0 * std::log(2.0));
  for (double x = 0.0; x <= 60.0; x += 0.5) {
    CHECK(ev.temperature(x, tl.t_sweep) - 300.0 < floor_T);
    CHECK(ev.temperature(x, tl.t_sweep_end) - 300.0 < floor_T);
  }
  HeadArray first = run.array;
  first.heads.resize(1);
  for (double x = 0.0; x <= 60.0; x += 0.5) {
    CHECK(temperature_at(x, tl.pass_end[0], first) - 300.0 < floor_T);
  }
}

TEST_CASE("a two-head run emits one snapshot per pass") {
  const MediaStack media = small_stack();
  const RecordingRun run = small_run();
  const RunResult r = run_recording(media, run);
  CHECK(r.snapshots.size() == 2);
  CHECK(r.snapshot_times == make_timeline(run, 60.0).pass_end);
  CHECK(r.final_state.size() == media.grain_count());
  CHECK(r.provenance.seed == run.seed);
  CHECK(r.provenance.dt == run.llb.dt);
  CHECK(r.provenance.steps > 0);
  for (const Vec3& m : r.final_state) CHECK(norm(m) < run.llb.m_max);
}

TEST_CASE("run is deterministic and independent of the thread count") {
  const MediaStack media = small_stack(5);
  RecordingRun run = small_run("0110");
  run.trajectory_grain_ids = {0, 7};
  run.threads = 1;
  const RunResult a = run_recording(media, run);
  run.threads = 4;
  const RunResult b = run_recording(media, run);
  CHECK(a.final_state == b.final_state);
  CHECK(a.snapshots == b.snapshots);
  REQUIRE(a.trajectories.size() == 2);
  for (const auto& [id, samples] : a.trajectories) {
    const auto& other = b.trajectories.at(id);
    REQUIRE(samples.size() == other.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      CHECK(samples[k].m == other[k].m);
      CHECK(samples[k].T == other[k].T);
    }
  }
  run.seed = 99;
  const RunResult c = run_recording(media, run);
  CHECK(c.final_state != a.final_state);
}

TEST_CASE("writing all zeros over an erased medium changes nothing") {
  const MediaStack media = small_stack(7);
  const RecordingRun run = small_run();
  const RunResult r = write_pattern(media, run, {"000", "000"});
  for (const Vec3& m : r.final_state) CHECK(m.z < 0.0);
}

TEST_CASE("writing all ones switches both layers") {
  const MediaStack media = small_stack(9);
  const RunResult r = write_pattern(media, small_run(), {"111", "111"});
  int up = 0;
  for (const Vec3& m : r.final_state) up += m.z > 0.0;
  CHECK(static_cast<double>(up) >= 0.9 * static_cast<double>(media.grain_count()));
}

TEST_CASE("the hottest head writes the bottom layer") {
  const MediaStack media = small_stack(11);
  RecordingRun run = small_run("111");
  run.array.heads.resize(1);
  const RunResult r = run_recording(media, run);
  CHECK(layer_mean_mz(media, r.final_state, 1) > 0.6);

  // In the two-head run head 2 rewrites the top layer down.
  const RunResult both = write_pattern(media, small_run(), {"000", "111"});
  CHECK(layer_mean_mz(media, both.final_state, 0) < -0.6);
}

TEST_CASE("with the laser off the hard layer is unchanged") {
  // H_K(300 K) = 2 Ku0 m_e / Ms0: about 56 kOe bottom, 18 kOe top. A 13 kOe
  // field cannot touch the bottom layer but thermally switches the top one.
  // Footprints are kept apart; overlapping tails add up to about 2 Hw.
  const MediaStack media = small_stack(13);
  RecordingRun run = small_run("111");
  run.array.laser_enabled = false;
  run.array.heads[1].delta_d = 80.0;
  const RunResult r = run_recording(media, run);
  for (const GrainSpec& g : media.layers[1].grains) {
    CHECK(r.final_state[static_cast<std::size_t>(g.id)].z < 0.0);
  }

  // KV / kT is only about 13 for the top layer, so even a weak field lets
  // a few of its grains hop.
  run.array.heads[0].Hw = 1000.0;
  run.array.heads[1].Hw = 1000.0;
  const RunResult weak = run_recording(media, run);
  for (const GrainSpec& g : media.layers[1].grains) {
    CHECK(weak.final_state[static_cast<std::size_t>(g.id)].z < 0.0);
  }
  CHECK(layer_mean_mz(media, weak.final_state, 0) < -0.5);
}

TEST_CASE("zero spacing aligns the transitions of both layers") {
  const MediaStack media = small_stack(15, 80.0);
  RecordingRun run = small_run("0110");
  run.array.heads[1].delta_d = 0.0;
  run.array.heads[1].bits = parse_bits("0110");
  // Heads coincide; the hotter profile dominates and both layers see the
  // same bit cells.
  const ProfileEvaluator ev(run.array, run.bit_length);
  for (double t = -30.0; t < 10.0; t += 0.25) {
    CHECK(ev.bit(0, t) == ev.bit(1, t));
  }
}

TEST_CASE("invalid runs are refused before integration") {
  const MediaStack media = small_stack();
  RecordingRun run = small_run();
  std::swap(run.array.heads[0].Tw, run.array.heads[1].Tw);
  CHECK_THROWS_AS(run_recording(media, run), Error);

  run = small_run();
  run.array.heads[1].Tw = 500.0;  // below the top layer's Curie point
  CHECK_THROWS_AS(run_recording(media, run), Error);

  run = small_run();
  run.llb.dt = 0.0;
  CHECK_THROWS_AS(run_recording(media, run), Error);

  CHECK_THROWS_AS(write_pattern(media, small_run(), {"01", "011"}), Error);
  CHECK_THROWS_AS(write_pattern(media, small_run(), {"01"}), Error);
}

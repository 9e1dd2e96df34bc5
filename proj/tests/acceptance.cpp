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


// Acceptance runner. `hamr3d_acceptance N` evaluates criterion N (1-6) and
// prints one "criterion N PASS|FAIL: ..." line; the exit status is 0 only on
// PASS. Evidence CSVs go to $HAMR3D_ACCEPTANCE_OUT (default ./acceptance).
// Worker threads come from $HAMR3D_THREADS, default all cores.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "hamr3d/analysis.hpp"
#include "hamr3d/commands.hpp"
#include "hamr3d/config.hpp"
#include "hamr3d/media.hpp"
#include "hamr3d/protocol.hpp"

namespace fs = std::filesystem;
using namespace hamr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path out_dir() {
  const char* env = std::getenv("HAMR3D_ACCEPTANCE_OUT");
  fs::path dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("acceptance");
  fs::create_directories(dir);
  return dir;
}

int worker_threads() {
  if (const char* env = std::getenv("HAMR3D_THREADS"); env != nullptr) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Stochastic runs use the production integrator at dt = 1e-4 ns.
constexpr double kDt = 1e-4;
constexpr std::uint64_t kBaseSeed = 1;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += sep;
    s += parts[i];
  }
  return s;
}

// ---------------------------------------------------------------------------
// 1. SP_eff versus write field, one layer at a time.

Verdict criterion_1() {
  const Config cfg = default_config();
  std::vector<double> fields;
  for (int k = 9; k <= 17; ++k) fields.push_back(1000.0 * k);

  bool pass = true;
  std::vector<std::string> notes;
  // Layer 1 (bottom) is written by head 1, layer 0 (top) by head 2.
  for (const auto& [layer, head, floor] :
       {std::tuple{1, 0, 0.85}, std::tuple{0, 1, 0.80}}) {
    FieldSweepSpec spec;
    spec.media = cfg.media;
    spec.media.layers = {default_layer(static_cast<std::size_t>(layer))};
    spec.run = resolved_run(cfg);
    spec.run.llb.dt = kDt;
    HeadSpec h = default_head(static_cast<std::size_t>(head));
    h.delta_d = 0.0;
    spec.run.array.heads = {h};
    spec.fields = fields;
    spec.seed = kBaseSeed;
    spec.repeats = 10;
    spec.analysis = cfg.analysis;
    spec.threads = worker_threads();
    const FieldSweepResult r = field_sweep_sp(spec);

    const std::string name = layer == 0 ? "top" : "bottom";
    std::ofstream csv(out_dir() / fmt::format("c1_sp_eff_{}.csv", name));
    csv << "Hw,sp_eff,sp_std\n";
    for (const FieldPoint& p : r.points) {
      csv << fmt::format("{},{},{}\n", p.Hw, p.sp_mean, p.sp_std);
    }

    const std::size_t best = argmax_sp(r.points);
    const bool interior = best > 0 && best + 1 < r.points.size() &&
                          r.points.front().sp_mean < r.best_sp &&
                          r.points.back().sp_mean < r.best_sp;
    const bool near = std::fabs(r.best_field - 13050.0) <= 2000.0;
    const bool high = r.best_sp >= floor;
    pass = pass && interior && near && high;

    std::vector<std::string> curve;
    for (const FieldPoint& p : r.points) curve.push_back(fmt::format("{:.3f}", p.sp_mean));
    notes.push_back(fmt::format(
        "{}: max {:.3f} at {:.0f} Oe (interior {}, |dH| {}, >= {} {}) curve [{}]",
        name, r.best_sp, r.best_field, interior ? "yes" : "no",
        near ? "ok" : "off", floor, high ? "ok" : "no", join(curve, " ")));
  }
  return {pass, join(notes, "; ")};
}

// ---------------------------------------------------------------------------
// 2. Hierarchical write of all four two-layer patterns.

// Three cells per block; (top, bottom) reads 00, 11, 01, 10, 00.
const std::vector<std::string> kPattern{"000111000111000", "000111111000000"};

// Zigzag extrema of a smoothed |m| trace: a trough counts once |m| has come
// back up by `reversal` (or the trace ends).
std::vector<double> troughs(const std::vector<TrajectorySample>& trace,
                            std::size_t window, double reversal) {
  std::vector<double> s(trace.size(), 0.0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::size_t lo = i >= window / 2 ? i - window / 2 : 0;
    const std::size_t hi = std::min(trace.size(), i + window / 2 + 1);
    double sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) sum += norm(trace[k].m);
    s[i] = sum / static_cast<double>(hi - lo);
  }
  std::vector<double> out;
  if (s.empty()) return out;
  bool falling = false;
  double hi_v = s[0];
  double lo_v = s[0];
  for (double v : s) {
    if (!falling) {
      hi_v = std::max(hi_v, v);
      if (v < hi_v - reversal) {
        falling = true;
        lo_v = v;
      }
    } else {
      lo_v = std::min(lo_v, v);
      if (v > lo_v + reversal) {
        out.push_back(lo_v);
        falling = false;
        hi_v = v;
      }
    }
  }
  if (falling) out.push_back(lo_v);
  return out;
}

struct Episodes {
  int collapses = 0;
  int dips = 0;
};

// Collapse: |m| below 0.1. Dip: below 0.85 m_e(300 K) without collapsing.
Episodes classify(const std::vector<TrajectorySample>& trace, double me300,
                  double interval) {
  const auto window = static_cast<std::size_t>(std::lround(0.1 / interval));
  Episodes e;
  for (double t : troughs(trace, window, 0.15 * me300)) {
    if (t < 0.1) {
      ++e.collapses;
    } else if (t < 0.85 * me300) {
      ++e.dips;
    }
  }
  return e;
}

Verdict criterion_2() {
  const Config cfg = default_config();
  const int seeds = 20;
  const int threads = worker_threads();
  const double bl = cfg.run.bit_length;
  const int cells = static_cast<int>(kPattern[0].size());

  // correct[layer][cell]
  std::vector<std::vector<int>> correct(2, std::vector<int>(cells, 0));
  std::size_t bottom_total = 0;
  std::size_t flipped = 0;           // against the head-1-only reference
  std::size_t flipped_snapshot = 0;  // against the recorded pass-1 snapshot
  int traj_ok = 0;
  std::string traj_seed1;
  bool traj_seed1_ok = false;

  std::ofstream cells_csv(out_dir() / "c2_cells.csv");
  cells_csv << "seed,layer,cell,expected,mz\n";

  for (int r = 0; r < seeds; ++r) {
    const std::uint64_t seed = repeat_seed(kBaseSeed, r);
    const MediaStack media =
        build_media(cfg.media.layers, cfg.media.track_length,
                    cfg.media.track_width, seed, cfg.media.lloyd_iterations);
    RecordingRun run = resolved_run(cfg);
    run.llb.dt = kDt;
    run.seed = seed;
    run.threads = threads;
    run.trajectory_grain_ids = auto_track_pair(media, bl);
    const RunResult dual = write_pattern(media, run, kPattern);

    RecordingRun first = run;
    first.array.heads = {run.array.heads[0]};
    first.trajectory_grain_ids.clear();
    const RunResult single = write_pattern(media, first, kPattern);

    for (std::size_t l = 0; l < 2; ++l) {
      std::vector<double> sum(cells, 0.0);
      std::vector<int> count(cells, 0);
      for (const GrainSpec& g : media.layers[l].grains) {
        const int c = std::clamp(static_cast<int>(std::floor(g.center.x / bl)), 0, cells - 1);
        sum[c] += dual.final_state[static_cast<std::size_t>(g.id)].z;
        ++count[c];
      }
      for (int c = 0; c < cells; ++c) {
        const double mz = count[c] > 0 ? sum[c] / count[c] : 0.0;
        const int expected = kPattern[l][static_cast<std::size_t>(c)] == '1' ? 1 : -1;
        if (mz * expected > 0.0) ++correct[l][c];
        cells_csv << fmt::format("{},{},{},{},{}\n", seed, l == 0 ? "top" : "bottom",
                                 c, expected, mz);
      }
    }

    for (const GrainSpec& g : media.layers[1].grains) {
      const auto id = static_cast<std::size_t>(g.id);
      const bool final_up = dual.final_state[id].z > 0.0;
      ++bottom_total;
      if (final_up != (single.final_state[id].z > 0.0)) ++flipped;
      if (final_up != (dual.snapshots[0][id].z > 0.0)) ++flipped_snapshot;
    }

    const int top_id = run.trajectory_grain_ids[0];
    const int bottom_id = run.trajectory_grain_ids[1];
    const double me_top = equilibrium_magnetization(300.0, media.grain(top_id).Tc, run.llb);
    const double me_bot = equilibrium_magnetization(300.0, media.grain(bottom_id).Tc, run.llb);
    const Episodes top = classify(dual.trajectories.at(top_id), me_top, run.trajectory_interval);
    const Episodes bot = classify(dual.trajectories.at(bottom_id), me_bot, run.trajectory_interval);
    const bool ok = top.collapses == 2 && bot.collapses == 1 && bot.dips == 1;
    if (ok) ++traj_ok;
    if (r == 0) {
      traj_seed1_ok = ok;
      traj_seed1 = fmt::format("top {} collapses/{} dips, bottom {} collapses/{} dips",
                               top.collapses, top.dips, bot.collapses, bot.dips);
      std::ofstream tr(out_dir() / "c2_trajectories_seed1.csv");
      tr << "grain,layer,t,m_z,m,T\n";
      for (const auto& [id, name] : {std::pair{top_id, "top"}, std::pair{bottom_id, "bottom"}}) {
        for (const TrajectorySample& s : dual.trajectories.at(id)) {
          tr << fmt::format("{},{},{},{},{},{}\n", id, name, s.t, s.m.z, norm(s.m), s.T);
        }
      }
    }
    std::fprintf(stderr, "criterion 2: seed %d of %d done\n", r + 1, seeds);
  }

  // (a) per-cell probability, and the worst cell of each pattern.
  double worst = 1.0;
  std::map<std::string, double> per_pattern;
  for (int c = 0; c < cells; ++c) {
    const std::string key{kPattern[0][static_cast<std::size_t>(c)],
                          kPattern[1][static_cast<std::size_t>(c)]};
    const double p = std::min(correct[0][c], correct[1][c]) / static_cast<double>(seeds);
    worst = std::min(worst, p);
    per_pattern.try_emplace(key, 1.0);
    per_pattern[key] = std::min(per_pattern[key], p);
  }
  std::vector<std::string> pat;
  for (const auto& [k, p] : per_pattern) pat.push_back(fmt::format("{} {:.2f}", k, p));
  const bool a = worst >= 0.9;

  const double frac = static_cast<double>(flipped) / static_cast<double>(bottom_total);
  const double frac_snap = static_cast<double>(flipped_snapshot) / static_cast<double>(bottom_total);
  const bool b = frac < 0.05;
  const bool c = traj_seed1_ok;

  return {a && b && c,
          fmt::format("(a) {} worst cell p = {:.2f} [{}]; (b) {} bottom flips after pass 1 "
                      "{:.1f}% (recorded snapshot {:.1f}%); (c) {} seed 1 {}, {}/{} seeds match",
                      a ? "ok" : "FAIL", worst, join(pat, ", "), b ? "ok" : "FAIL",
                      100.0 * frac, 100.0 * frac_snap, c ? "ok" : "FAIL", traj_seed1,
                      traj_ok, seeds)};
}

// ---------------------------------------------------------------------------
// 3. System SNR versus head spacing.

SweepResult snr_sweep(double speed, double bit_length) {
  Config cfg = default_config();
  DeltaDSweepSpec spec;
  spec.media = cfg.media;
  spec.media.track_length = 200.0;
  spec.run = resolved_run(cfg);
  spec.run.llb.dt = kDt;
  spec.run.array.velocity = -speed;
  spec.run.bit_length = bit_length;
  spec.delta_d = {0, 5, 10, 15, 20, 25, 30, 40, 60};
  spec.seed = kBaseSeed;
  spec.repeats = 10;
  spec.analysis = cfg.analysis;
  spec.threads = worker_threads();
  SweepResult r = sweep_delta_d(spec);

  std::ofstream csv(out_dir() / fmt::format("c3_snr_v{}_bl{}.csv", speed, bit_length));
  csv << "delta_d,snr_top,snr_bottom,snr_system,windows_top,windows_bottom\n";
  for (const SweepPoint& p : r.points) {
    csv << fmt::format("{},{},{},{},{},{}\n", p.delta_d, p.snr_top, p.snr_bottom,
                       p.snr_system, p.windows_top, p.windows_bottom);
  }
  std::fprintf(stderr, "criterion 3: v = %g, BL = %g done\n", speed, bit_length);
  return r;
}

Verdict criterion_3() {
  const SweepResult base = snr_sweep(5.0, 20.0);
  const SweepResult short_bits = snr_sweep(5.0, 12.0);
  const SweepResult fast = snr_sweep(25.0, 20.0);

  const auto& pts = base.points;
  const std::size_t best = argmax_snr(pts);
  const bool rises = best > 0 && pts.front().snr_system < base.snr_max;
  const bool falls = best + 1 < pts.size() ||
                     std::fabs(pts.back().snr_system - pts[pts.size() - 2].snr_system) < 0.5;
  const bool where = base.delta_d_opt >= 15.0 && base.delta_d_opt <= 40.0;
  const bool level = std::fabs(base.snr_max - 14.3) <= 3.0;
  const bool by_bl = base.snr_max > short_bits.snr_max;
  const bool by_v = base.snr_max > fast.snr_max;

  std::vector<std::string> curve;
  for (const SweepPoint& p : pts) {
    curve.push_back(fmt::format("{:g}:{:.1f}", p.delta_d, p.snr_system));
  }
  return {rises && falls && where && level && by_bl && by_v,
          fmt::format("shape rise {} / interior {}; dd_opt {:g} nm {}; SNR_max {:.2f} dB {}; "
                      "BL12 {:.2f} dB {}; v25 {:.2f} dB {}; curve [{}]",
                      rises ? "ok" : "FAIL", falls ? "ok" : "FAIL", base.delta_d_opt,
                      where ? "ok" : "FAIL", base.snr_max, level ? "ok" : "FAIL",
                      short_bits.snr_max, by_bl ? "ok" : "FAIL", fast.snr_max,
                      by_v ? "ok" : "FAIL", join(curve, " "))};
}

// ---------------------------------------------------------------------------
// 4 and 5. Named cases of the unit suites, run in a child process.

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  if (pipe == nullptr) {
    status = -1;
    return out;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  const int raw = ::pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Verdict run_cases(const std::vector<std::pair<std::string, std::vector<std::string>>>& suites) {
  bool pass = true;
  std::vector<std::string> notes;
  for (const auto& [binary, cases] : suites) {
    int status = 0;
    const std::string log = capture(
        fmt::format("{} --test-case=\"{}\"", binary, join(cases, ",")), status);
    // "[doctest] test cases: N | P passed | F failed | ..."
    int ran = -1;
    int passed = -1;
    if (const auto at = log.find("test cases:"); at != std::string::npos) {
      std::sscanf(log.c_str() + at, "test cases: %d | %d passed", &ran, &passed);
    }
    const bool ok = status == 0 && ran == static_cast<int>(cases.size()) && passed == ran;
    pass = pass && ok;
    notes.push_back(fmt::format("{} {}/{}", fs::path(binary).filename().string(),
                                std::max(passed, 0), cases.size()));
    if (!ok) std::fputs(log.c_str(), stderr);
  }
  return {pass, join(notes, ", ")};
}

Verdict criterion_4() {
  return run_cases({
      {HAMR3D_TEST_LLB,
       {"thermal noise reproduces the Boltzmann distribution",
        "demagnetization above Tc", "Stoner-Wohlfarth threshold by bisection",
        "Heun converges at second order", "Callen-Callen anisotropy scaling is exact"}},
      {HAMR3D_TEST_FIELDS,
       {"temperature superposition is exact", "field is continuous at the pole edges",
        "bit ramp is linear and continuous", "temperature ordering is enforced"}},
  });
}

Verdict criterion_5() {
  return run_cases({
      {HAMR3D_TEST_ANALYSIS,
       {"sp_eff of a perfect write is one", "sp_eff without a positive region is zero",
        "medium SNR closed form", "sp_eff quadrature refinement",
        "medium SNR quadrature refinement", "sweep argmax equals brute force"}},
  });
}

// ---------------------------------------------------------------------------
// 6. Byte-identical CLI outputs across thread counts.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (fs::is_regular_file(root)) {
    files[""] = slurp(root);
    return files;
  }
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

Verdict criterion_6() {
  const fs::path dir = out_dir() / "c6";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string config = R"({
  "media": {"track_length": 60, "track_width": 12},
  "heads": {"list": [
    {"Tw": 680, "Hw": 13000, "bits": "square"},
    {"Tw": 540, "Hw": 13100, "delta_d": 80, "bits": "square"}]},
  "run": {"dt": 1e-4, "margin_fwhm": 3, "equilibration_time": 0.2,
          "cooldown_time": 0.2, "repeats": 2},
  "analysis": {"segment_cells": 1},
  "sweep": {"axis": "Hw", "values": [12000, 14000], "layer": "bottom"}
})";
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg, std::ios::binary) << config;

  auto cli = [&](const std::string& args) {
    const std::string cmd = fmt::format("{} {} > {} 2>&1", HAMR3D_CLI_PATH, args,
                                        (dir / "log.txt").string());
    const int raw = std::system(cmd.c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
      throw std::runtime_error(fmt::format("'{}' failed: {}", args, slurp(dir / "log.txt")));
    }
  };

  struct Command {
    std::string name;
    std::function<void(const std::string& threads, const fs::path& out)> run;
  };
  const fs::path media = dir / "media.txt";
  cli(fmt::format("generate-media --config {} --seed 5 --out {}", cfg.string(), media.string()));
  const std::vector<Command> commands{
      {"generate-media",
       [&](const std::string& t, const fs::path& out) {
         cli(fmt::format("generate-media --config {} --seed 5 --threads {} --out {}",
                         cfg.string(), t, out.string()));
       }},
      {"write",
       [&](const std::string& t, const fs::path& out) {
         cli(fmt::format("write {} --config {} --seed 5 --threads {} --track-grains auto --out {}",
                         media.string(), cfg.string(), t, out.string()));
         cli(fmt::format("plot-data {} --profile-time 1", out.string()));
       }},
      {"sweep Hw",
       [&](const std::string& t, const fs::path& out) {
         cli(fmt::format("sweep --config {} --seed 5 --threads {} --out {}", cfg.string(), t,
                         out.string()));
       }},
      {"sweep delta_d",
       [&](const std::string& t, const fs::path& out) {
         cli(fmt::format("sweep --config {} --axis delta_d --values 0,80 --seed 5 "
                         "--threads {} --out {}",
                         cfg.string(), t, out.string()));
       }},
  };

  bool pass = true;
  std::vector<std::string> notes;
  int index = 0;
  for (const Command& c : commands) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* t : {"1", "4", "4"}) {
      const fs::path out = dir / fmt::format("run{}_{}_t{}", index, outputs.size(), t);
      c.run(t, out);
      outputs.push_back(tree(out));
    }
    ++index;
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2];
    pass = pass && same;
    notes.push_back(fmt::format("{} {} ({} files)", c.name, same ? "identical" : "DIFFERS",
                                outputs[0].size()));
  }
  return {pass, join(notes, ", ")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2 || std::string(argv[1]).size() != 1 || argv[1][0] < '1' || argv[1][0] > '6') {
    std::fprintf(stderr, "usage: hamr3d_acceptance <1-6>\n");
    return 64;
  }
  const int n = argv[1][0] - '0';
  const std::vector<std::function<Verdict()>> criteria{
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6};
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = criteria[static_cast<std::size_t>(n - 1)]();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %d %s: %s [%.0f s, %d threads]\n", n, v.pass ? "PASS" : "FAIL",
              v.detail.c_str(), secs, worker_threads());
  return v.pass ? 0 : 1;
}

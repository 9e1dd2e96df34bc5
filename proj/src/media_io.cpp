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


#include "hamr3d/media_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "hamr3d/error.hpp"

namespace hamr {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::vector<std::string_view> tokens, std::size_t line)
      : tokens_(std::move(tokens)), line_(line) {}

  std::size_t size() const { return tokens_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    io_error(fmt::format("media file line {}: {}", line_, what));
  }

  void expect_size(std::size_t n) const {
    if (tokens_.size() != n) {
      fail(fmt::format("expected {} fields, got {}", n, tokens_.size()));
    }
  }

  std::string_view text(std::size_t i) const { return tokens_.at(i); }

  double real(std::size_t i) const {
    std::string_view s = tokens_.at(i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(fmt::format("'{}' is not a number", s));
    }
    return v;
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    std::string_view s = tokens_.at(i);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(fmt::format("'{}' is not an integer", s));
    }
    return v;
  }

 private:
  std::vector<std::string_view> tokens_;
  std::size_t line_;
};

}  // namespace

std::string serialize_media(const MediaStack& stack) {
  std::string out;
  auto line = [&out](std::string s) {
    out += s;
    out += '\n';
  };
  line(kMediaMagic);
  line(fmt::format("seed {}", stack.seed));
  line(fmt::format("track {} {}", stack.track_length, stack.track_width));
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const LayerStats& s = stack.layers[l].stats;
    if (s.name.empty() || s.name.find_first_of(" \t\n#") != std::string::npos) {
      config_error(fmt::format("layer name '{}' must be a single word", s.name));
    }
    line(fmt::format("layer {} {} {} {} {} {} {} {} {} {} {}", l, s.name,
                     s.Ms0_mean, s.Tc_mean, s.sigma_Tc, s.Ku0_mean, s.sigma_Ku,
                     s.thickness, s.grain_diameter_mean, s.sigma_volume,
                     s.z_position));
  }
  std::istringstream summary(media_summary(stack));
  for (std::string s; std::getline(summary, s);) line("# " + s);
  for (const Layer& layer : stack.layers) {
    for (const GrainSpec& g : layer.grains) {
      std::string row = fmt::format(
          "grain {} {} {} {} {} {} {} {} {} {} {} {} {}", g.id, g.layer_index,
          g.center.x, g.center.y, g.area, g.volume, g.easy_axis.x,
          g.easy_axis.y, g.easy_axis.z, g.Ms0, g.Tc, g.Ku0, g.polygon.size());
      for (const Point2& p : g.polygon) row += fmt::format(" {} {}", p.x, p.y);
      line(std::move(row));
    }
  }
  for (std::size_t i = 0; i < stack.state.size(); ++i) {
    const Vec3& m = stack.state[i];
    line(fmt::format("state {} {} {} {}", i, m.x, m.y, m.z));
  }
  return out;
}

MediaStack parse_media(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  if (!std::getline(in, raw) || raw != kMediaMagic) {
    io_error("not a hamr3d media file (missing header)");
  }
  MediaStack stack;
  bool have_seed = false;
  bool have_track = false;
  int next_id = 0;
  int last_layer = 0;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw.front() == '#') continue;
    LineReader r(split(raw), line_no);
    if (r.size() == 0) continue;
    const std::string_view kind = r.text(0);
    if (kind == "seed") {
      r.expect_size(2);
      stack.seed = r.integer<std::uint64_t>(1);
      have_seed = true;
    } else if (kind == "track") {
      r.expect_size(3);
      stack.track_length = r.real(1);
      stack.track_width = r.real(2);
      have_track = true;
    } else if (kind == "layer") {
      r.expect_size(12);
      if (r.integer<std::size_t>(1) != stack.layers.size()) {
        r.fail("layers must be listed in order");
      }
      if (next_id != 0) r.fail("layer line after grain lines");
      Layer layer;
      LayerStats& s = layer.stats;
      s.name = std::string(r.text(2));
      s.Ms0_mean = r.real(3);
      s.Tc_mean = r.real(4);
      s.sigma_Tc = r.real(5);
      s.Ku0_mean = r.real(6);
      s.sigma_Ku = r.real(7);
      s.thickness = r.real(8);
      s.grain_diameter_mean = r.real(9);
      s.sigma_volume = r.real(10);
      s.z_position = r.real(11);
      stack.layers.push_back(std::move(layer));
    } else if (kind == "grain") {
      if (r.size() < 14) r.fail("truncated grain line");
      GrainSpec g;
      g.id = r.integer<int>(1);
      g.layer_index = r.integer<int>(2);
      if (g.id != next_id) r.fail("grain ids must be consecutive from 0");
      if (g.layer_index < 0 ||
          static_cast<std::size_t>(g.layer_index) >= stack.layers.size()) {
        r.fail("grain refers to an unknown layer");
      }
      if (g.layer_index < last_layer) r.fail("grains must be grouped by layer");
      last_layer = g.layer_index;
      g.center = {r.real(3), r.real(4)};
      g.area = r.real(5);
      g.volume = r.real(6);
      g.easy_axis = {r.real(7), r.real(8), r.real(9)};
      g.Ms0 = r.real(10);
      g.Tc = r.real(11);
      g.Ku0 = r.real(12);
      const auto n = r.integer<std::size_t>(13);
      r.expect_size(14 + 2 * n);
      for (std::size_t k = 0; k < n; ++k) {
        g.polygon.push_back({r.real(14 + 2 * k), r.real(15 + 2 * k)});
      }
      stack.layers[static_cast<std::size_t>(g.layer_index)].grains.push_back(
          std::move(g));
      ++next_id;
    } else if (kind == "state") {
      r.expect_size(5);
      if (r.integer<std::size_t>(1) != stack.state.size()) {
        r.fail("state lines must be listed in grain order");
      }
      stack.state.push_back({r.real(2), r.real(3), r.real(4)});
    } else {
      r.fail(fmt::format("unknown record '{}'", kind));
    }
  }
  if (!have_seed || !have_track) io_error("media file lacks seed or track");
  if (stack.layers.empty()) io_error("media file has no layers");
  const auto grains = static_cast<std::size_t>(next_id);
  if (stack.state.empty()) {
    stack.state.resize(grains);
    for (const Layer& layer : stack.layers) {
      for (const GrainSpec& g : layer.grains) {
        stack.state[static_cast<std::size_t>(g.id)] = g.easy_axis;
      }
    }
  } else if (stack.state.size() != grains) {
    io_error(fmt::format("media file has {} state lines for {} grains",
                         stack.state.size(), grains));
  }
  return stack;
}

void save_media(const std::string& path, const MediaStack& stack) {
  const std::string text = serialize_media(stack);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(fmt::format("cannot write '{}'", path));
  out << text;
  out.flush();
  if (!out) io_error(fmt::format("write to '{}' failed", path));
}

MediaStack load_media(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(fmt::format("cannot read media file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_media(text.str());
}

std::string media_summary(const MediaStack& stack) {
  std::string out;
  for (const Layer& layer : stack.layers) {
    const LayerSummary s = summarize(layer);
    out += fmt::format(
        "layer {}: {} grains, mean D {:.4g} nm, median Tc {:.4g} K "
        "(log-sigma {:.4g}), median Ku0 {:.4g} erg/cc (log-sigma {:.4g}), "
        "median V {:.4g} nm^3 (log-sigma {:.4g})\n",
        layer.stats.name, s.grain_count, s.mean_diameter, s.median_Tc,
        s.log_std_Tc, s.median_Ku0, s.log_std_Ku0, s.median_volume,
        s.log_std_volume);
  }
  return out;
}

}  // namespace hamr

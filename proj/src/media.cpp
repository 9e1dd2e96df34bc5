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

#include "hamr3d/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "hamr3d/error.hpp"
#include "hamr3d/llb.hpp"
#include "hamr3d/rng.hpp"

namespace hamr {

namespace {

using Polygon = std::vector<Point2>;

// Keeps the part of `poly` on the side of the bisector of (a, b) nearer a.
Polygon clip_bisector(const Polygon& poly, const Point2& a, const Point2& b) {
  const double nx = b.x - a.x;
  const double ny = b.y - a.y;
  const double c = 0.5 * (nx * (a.x + b.x) + ny * (a.y + b.y));
  auto side = [&](const Point2& p) { return nx * p.x + ny * p.y - c; };
  Polygon out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    const double sp = side(p);
    const double sq = side(q);
    if (sp <= 0.0) out.push_back(p);
    if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
      const double s = sp / (sp - sq);
      out.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
    }
  }
  return out;
}

class SeedGrid {
 public:
  SeedGrid(const std::vector<Point2>& seeds, double length, double width,
           double cell)
      : seeds_(seeds), cell_(cell) {
    nx_ = std::max(1, static_cast<int>(std::ceil(length / cell)));
    ny_ = std::max(1, static_cast<int>(std::ceil(width / cell)));
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      buckets_[index(bx(seeds[i].x), by(seeds[i].y))].push_back(i);
    }
  }

  int bx(double x) const {
    return std::clamp(static_cast<int>(std::floor(x / cell_)), 0, nx_ - 1);
  }
  int by(double y) const {
    return std::clamp(static_cast<int>(std::floor(y / cell_)), 0, ny_ - 1);
  }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy * nx_ + ix);
  }
  int max_ring() const { return std::max(nx_, ny_); }
  double cell() const { return cell_; }

  template <typename Fn>
  void for_ring(int cx, int cy, int r, Fn&& fn) const {
    for (int iy = cy - r; iy <= cy + r; ++iy) {
      if (iy < 0 || iy >= ny_) continue;
      for (int ix = cx - r; ix <= cx + r; ++ix) {
        if (ix < 0 || ix >= nx_) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
        for (std::size_t j : buckets_[index(ix, iy)]) fn(j);
      }
    }
  }

 private:
  const std::vector<Point2>& seeds_;
  double cell_;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

std::vector<Polygon> voronoi_cells(const std::vector<Point2>& seeds,
                                   double length, double width, double cell) {
  const SeedGrid grid(seeds, length, width, cell);
  const Polygon box{{0.0, 0.0}, {length, 0.0}, {length, width}, {0.0, width}};
  std::vector<Polygon> cells(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Point2& s = seeds[i];
    Polygon poly = box;
    const int cx = grid.bx(s.x);
    const int cy = grid.by(s.y);
    for (int r = 0; r <= grid.max_ring(); ++r) {
      grid.for_ring(cx, cy, r, [&](std::size_t j) {
        if (j != i) poly = clip_bisector(poly, s, seeds[j]);
      });
      // Seeds beyond ring r are at least r * cell away; they cannot cut the
      // cell once it fits inside a disc of half that radius.
      double reach2 = 0.0;
      for (const Point2& p : poly) {
        reach2 = std::max(reach2, (p.x - s.x) * (p.x - s.x) +
                                      (p.y - s.y) * (p.y - s.y));
      }
      const double safe = 0.5 * r * grid.cell();
      if (reach2 <= safe * safe) break;
    }
    cells[i] = std::move(poly);
  }
  return cells;
}

double log_std(std::vector<double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double& x : v) {
    x = std::log(x);
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

void validate(const LayerStats& s) {
  const std::string who = s.name.empty() ? "layer" : "layer '" + s.name + "'";
  if (!(s.Ms0_mean > 0.0) || !(s.Tc_mean > 0.0) || !(s.Ku0_mean > 0.0) ||
      !(s.grain_diameter_mean > 0.0)) {
    config_error(who + ": Ms0, Tc, Ku0 and grain diameter must be positive");
  }
  if (!(s.thickness > 0.0)) config_error(who + ": thickness must be positive");
  if (!(s.sigma_Tc >= 0.0) || !(s.sigma_Ku >= 0.0) ||
      !(s.sigma_volume >= 0.0)) {
    config_error(who + ": log-normal sigmas must be >= 0");
  }
}

double polygon_area(const std::vector<Point2>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % polygon.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

Point2 polygon_centroid(const std::vector<Point2>& polygon) {
  double a = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % polygon.size()];
    const double c = p.x * q.y - q.x * p.y;
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (a == 0.0) return polygon.empty() ? Point2{} : polygon.front();
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

double chord_length(const std::vector<Point2>& polygon, double x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % polygon.size()];
    const double xmin = std::min(p.x, q.x);
    const double xmax = std::max(p.x, q.x);
    if (x < xmin || x > xmax) continue;
    if (xmax == xmin) {
      lo = std::min({lo, p.y, q.y});
      hi = std::max({hi, p.y, q.y});
      continue;
    }
    const double y = p.y + (x - p.x) / (q.x - p.x) * (q.y - p.y);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return hi > lo ? hi - lo : 0.0;
}

std::vector<GrainGeometry> generate_voronoi(double track_length,
                                            double track_width,
                                            double mean_diameter,
                                            std::uint64_t seed,
                                            int lloyd_iterations) {
  if (!(track_length > 0.0) || !(track_width > 0.0) ||
      !(mean_diameter > 0.0) || !std::isfinite(track_length) ||
      !std::isfinite(track_width) || !std::isfinite(mean_diameter)) {
    geometry_error(fmt::format(
        "invalid track geometry: length {} nm, width {} nm, grain diameter "
        "{} nm (all must be positive and finite)",
        track_length, track_width, mean_diameter));
  }
  if (lloyd_iterations < 0) config_error("lloyd_iterations must be >= 0");
  const double grain_area = std::numbers::pi * 0.25 * mean_diameter *
                            mean_diameter;
  const auto count = static_cast<std::size_t>(std::max(
      1.0, std::round(track_length * track_width / grain_area)));

  const CounterRng rng(seed, 0, RngPurpose::kGeometry);
  std::vector<Point2> seeds(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = rng.block(i);
    seeds[i] = {to_open_unit(b[0]) * track_length,
                to_open_unit(b[1]) * track_width};
  }

  const double cell = mean_diameter;
  std::vector<Polygon> cells = voronoi_cells(seeds, track_length, track_width,
                                             cell);
  for (int it = 0; it < lloyd_iterations; ++it) {
    for (std::size_t i = 0; i < count; ++i) {
      seeds[i] = polygon_centroid(cells[i]);
    }
    cells = voronoi_cells(seeds, track_length, track_width, cell);
  }

  std::vector<GrainGeometry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GrainGeometry g;
    g.area = polygon_area(cells[i]);
    if (!(g.area > 0.0) || cells[i].size() < 3) {
      geometry_error(fmt::format("degenerate Voronoi cell {}", i));
    }
    g.center = polygon_centroid(cells[i]);
    g.polygon = std::move(cells[i]);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GrainSpec> sample_properties(
    const std::vector<GrainGeometry>& geometry, const LayerStats& stats,
    std::uint64_t seed, int layer_index, int first_id) {
  validate(stats);
  const double median_volume = std::numbers::pi * 0.25 *
                               stats.grain_diameter_mean *
                               stats.grain_diameter_mean * stats.thickness;
  std::vector<GrainSpec> grains;
  grains.reserve(geometry.size());
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    const GrainGeometry& geo = geometry[i];
    GrainSpec g;
    g.id = first_id + static_cast<int>(i);
    g.layer_index = layer_index;
    g.center = geo.center;
    g.polygon = geo.polygon;
    g.area = geo.area;
    const CounterRng rng(seed, static_cast<std::uint32_t>(i),
                         RngPurpose::kProperties);
    const auto b = rng.block(static_cast<std::uint64_t>(layer_index));
    auto lognormal = [&](double med, double sigma, int lane) {
      if (sigma == 0.0) return med;
      return med * std::exp(sigma * inverse_normal_cdf(to_open_unit(
                                        b[static_cast<std::size_t>(lane)])));
    };
    g.Tc = lognormal(stats.Tc_mean, stats.sigma_Tc, 0);
    g.Ku0 = lognormal(stats.Ku0_mean, stats.sigma_Ku, 1);
    g.volume = lognormal(median_volume, stats.sigma_volume, 2);
    g.Ms0 = stats.Ms0_mean;
    grains.push_back(std::move(g));
  }
  return grains;
}

MediaStack build_media(const std::vector<LayerStats>& layers,
                       double track_length, double track_width,
                       std::uint64_t seed, int lloyd_iterations) {
  if (layers.empty()) config_error("medium needs at least one layer");
  MediaStack stack;
  stack.track_length = track_length;
  stack.track_width = track_width;
  stack.seed = seed;
  int next_id = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    validate(layers[l]);
    // Each layer gets its own tessellation stream derived from the seed.
    const std::uint64_t layer_seed = seed * 0x9E3779B97F4A7C15ull + l + 1;
    const auto geometry =
        generate_voronoi(track_length, track_width,
                         layers[l].grain_diameter_mean, layer_seed,
                         lloyd_iterations);
    Layer layer;
    layer.stats = layers[l];
    layer.grains = sample_properties(geometry, layers[l], layer_seed,
                                     static_cast<int>(l), next_id);
    next_id += static_cast<int>(layer.grains.size());
    stack.layers.push_back(std::move(layer));
  }
  stack.state.assign(static_cast<std::size_t>(next_id), Vec3{0.0, 0.0, 1.0});
  for (const Layer& layer : stack.layers) {
    for (const GrainSpec& g : layer.grains) {
      stack.state[static_cast<std::size_t>(g.id)] = g.easy_axis;
    }
  }
  return stack;
}

const GrainSpec& MediaStack::grain(int id) const {
  for (const Layer& layer : layers) {
    if (layer.grains.empty()) continue;
    const int first = layer.grains.front().id;
    if (id >= first && id < first + static_cast<int>(layer.grains.size())) {
      return layer.grains[static_cast<std::size_t>(id - first)];
    }
  }
  config_error(fmt::format("no grain with id {}", id));
}

double MediaStack::median_Tc(std::size_t layer) const {
  std::vector<double> tc;
  for (const GrainSpec& g : layers.at(layer).grains) tc.push_back(g.Tc);
  return median(std::move(tc));
}

void dc_erase(MediaStack& stack, int polarity, double temperature,
              const LlbParams& params) {
  if (polarity != 1 && polarity != -1) config_error("polarity must be +1 or -1");
  for (const Layer& layer : stack.layers) {
    for (const GrainSpec& g : layer.grains) {
      if (temperature >= g.Tc) {
        simulation_error(fmt::format(
            "cannot DC-erase at {} K: grain {} has Tc = {} K (erase must be "
            "below every Curie temperature)",
            temperature, g.id, g.Tc));
      }
    }
  }
  for (const Layer& layer : stack.layers) {
    for (const GrainSpec& g : layer.grains) {
      const double me = equilibrium_magnetization(temperature, g.Tc, params);
      stack.state[static_cast<std::size_t>(g.id)] =
          g.easy_axis * (polarity * me);
    }
  }
}

LayerSummary summarize(const Layer& layer) {
  LayerSummary s;
  s.grain_count = layer.grains.size();
  if (layer.grains.empty()) return s;
  std::vector<double> tc, ku, vol;
  double diam = 0.0;
  for (const GrainSpec& g : layer.grains) {
    tc.push_back(g.Tc);
    ku.push_back(g.Ku0);
    vol.push_back(g.volume);
    diam += 2.0 * std::sqrt(g.area / std::numbers::pi);
  }
  s.mean_diameter = diam / static_cast<double>(layer.grains.size());
  s.log_std_Tc = log_std(tc);
  s.log_std_Ku0 = log_std(ku);
  s.log_std_volume = log_std(vol);
  s.median_Tc = median(std::move(tc));
  s.median_Ku0 = median(std::move(ku));
  s.median_volume = median(std::move(vol));
  return s;
}

}  // namespace hamr

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

// Granular recording medium: Voronoi grains per layer with log-normally
// dispersed Curie temperature, anisotropy and volume. Units are CGS with
// lengths in nm.

#ifndef HAMR3D_MEDIA_HPP
#define HAMR3D_MEDIA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hamr3d/vec3.hpp"

namespace hamr {

struct LlbParams;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Output of the tessellation, before material properties are attached.
struct GrainGeometry {
  Point2 center;                 // polygon centroid
  std::vector<Point2> polygon;   // counter-clockwise, convex
  double area = 0.0;             // nm^2
};

struct GrainSpec {
  int id = 0;            // unique across the whole stack
  int layer_index = 0;   // 0 = top layer
  Point2 center;
  std::vector<Point2> polygon;
  double area = 0.0;     // nm^2, geometric cell area
  double volume = 0.0;   // nm^3, magnetic volume (log-normal about pi D^2 t / 4)
  Vec3 easy_axis{0.0, 0.0, 1.0};
  double Ms0 = 0.0;      // emu/cc
  double Tc = 0.0;       // K
  double Ku0 = 0.0;      // erg/cc
};

/// Per-layer distribution parameters. Means are log-normal medians.
struct LayerStats {
  std::string name;
  double Ms0_mean = 0.0;
  double Tc_mean = 0.0;
  double sigma_Tc = 0.0;
  double Ku0_mean = 0.0;
  double sigma_Ku = 0.0;
  double thickness = 0.0;
  double grain_diameter_mean = 0.0;
  double sigma_volume = 0.0;
  double z_position = 0.0;

  friend bool operator==(const LayerStats&, const LayerStats&) = default;
};

void validate(const LayerStats& stats);

struct Layer {
  LayerStats stats;
  std::vector<GrainSpec> grains;
};

/// Layer 0 is the top layer (nearest the head), the last layer the bottom.
/// Layers carry no coupling terms between each other.
struct MediaStack {
  std::vector<Layer> layers;
  std::vector<Vec3> state;  // reduced magnetization, indexed by GrainSpec::id
  double track_length = 0.0;
  double track_width = 0.0;
  std::uint64_t seed = 0;

  std::size_t grain_count() const { return state.size(); }
  const GrainSpec& grain(int id) const;
  /// Median Curie temperature of a layer over its grains.
  double median_Tc(std::size_t layer) const;
};

/// Seeded Voronoi tessellation of [0, L] x [0, W], clipped to the rectangle.
/// Seeds are uniform and relaxed by `lloyd_iterations` centroidal steps.
std::vector<GrainGeometry> generate_voronoi(double track_length,
                                            double track_width,
                                            double mean_diameter,
                                            std::uint64_t seed,
                                            int lloyd_iterations = 4);

std::vector<GrainSpec> sample_properties(
    const std::vector<GrainGeometry>& geometry, const LayerStats& stats,
    std::uint64_t seed, int layer_index = 0, int first_id = 0);

/// Builds every layer (independent tessellation per layer) and leaves the
/// state at m = easy axis.
MediaStack build_media(const std::vector<LayerStats>& layers,
                       double track_length, double track_width,
                       std::uint64_t seed, int lloyd_iterations = 4);

/// Sets every grain to polarity * m_e(T) * easy_axis.
void dc_erase(MediaStack& stack, int polarity, double temperature,
              const LlbParams& params);

double polygon_area(const std::vector<Point2>& polygon);
Point2 polygon_centroid(const std::vector<Point2>& polygon);

/// Cross-track length of the intersection of the line x = const with a
/// convex polygon.
double chord_length(const std::vector<Point2>& polygon, double x);

struct LayerSummary {
  std::size_t grain_count = 0;
  double mean_diameter = 0.0;  // equivalent-circle
  double median_Tc = 0.0;
  double median_Ku0 = 0.0;
  double median_volume = 0.0;
  double log_std_Tc = 0.0;
  double log_std_Ku0 = 0.0;
  double log_std_volume = 0.0;
};

LayerSummary summarize(const Layer& layer);

}  // namespace hamr

#endif  // HAMR3D_MEDIA_HPP

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

// Temperature and write-field profiles of a moving multi-head array.
//
// Head i's laser spot sits at x = v t + D_i and its pole is centred d_i
// behind the laser along +x, at v t + D_i - d_i. Velocities are signed; the
// recording protocol drives the array toward -x so that head 1 (smallest
// D_i, hottest) passes a grain first. Lengths in nm, time in ns, v in m/s
// (= nm/ns), fields in Oe, temperatures in K.

#ifndef HAMR3D_FIELDS_HPP
#define HAMR3D_FIELDS_HPP

#include <cstddef>
#include <vector>

#include "hamr3d/vec3.hpp"

namespace hamr {

struct MediaStack;

struct HeadSpec {
  double Tw = 0.0;          // K
  double fwhm_T = 20.0;     // nm
  double Hw = 0.0;          // Oe
  double fwhm_H = 20.0;     // nm
  double head_width = 20.0; // nm, down-track pole extent
  Vec3 u_hat{0.0, 0.0, 1.0};
  double d = 1.0;           // laser-to-pole distance, nm
  double delta_d = 0.0;     // distance to the previous head, nm
  std::vector<int> bits;    // +1 / -1, one entry per bit cell
  double ramp_time = 0.1;   // ns
  int layer = -1;           // target layer; -1 selects the default mapping

  friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

struct HeadArray {
  std::vector<HeadSpec> heads;
  double velocity = -5.0;    // m/s along +x
  double T_env = 300.0;      // K
  bool laser_enabled = true; // false: no heating at all, T = T_env

  friend bool operator==(const HeadArray&, const HeadArray&) = default;
};

/// Rejects malformed heads and any violation of Tw(1) > Tw(2) > ... > Tw(N).
void validate(const HeadArray& array);

/// Layer written by head i: its explicit `layer`, else bottom-first
/// (head 0 -> last layer).
std::size_t target_layer(const HeadArray& array, std::size_t head,
                         std::size_t layer_count);

/// Checks Tw(i) exceeds the median Tc of the layer head i writes.
void validate_against_media(const HeadArray& array, const MediaStack& media);

/// True when two pole footprints intersect (fields still superpose).
bool footprints_overlap(const HeadArray& array);

/// D_1 = d_1; D_i = d_i + sum_{k=2..i} delta_d_k.
std::vector<double> head_offsets(const HeadArray& array);

inline constexpr double kFwhmToSigma = 0.42466090014400953;  // 1/sqrt(8 ln 2)

struct FieldSample {
  double T = 0.0;
  Vec3 H;
};

/// Precomputed kinematics of an array writing cells of `bit_length` nm.
/// All queries are pure functions of (x, t).
class ProfileEvaluator {
 public:
  ProfileEvaluator(const HeadArray& array, double bit_length);

  double temperature(double x, double t) const;
  Vec3 field(double x, double t) const;
  FieldSample sample(double x, double t) const {
    return {temperature(x, t), field(x, t)};
  }

  /// Field with caller-supplied signed amplitudes in [-1, 1] per head.
  Vec3 field_with_amplitudes(double x, double t,
                             const std::vector<double>& amplitudes) const;

  /// Bit being written by head i at time t (no ramp).
  int bit(std::size_t head, double t) const;
  /// Ramped amplitude: the bit averaged over the trailing ramp_time, i.e. a
  /// linear ramp from the old to the new value after each flip.
  double amplitude(std::size_t head, double t) const;

  double laser_position(std::size_t head, double t) const;
  double pole_center(std::size_t head, double t) const;
  double trailing_edge(std::size_t head, double t) const;

  std::size_t head_count() const { return heads_.size(); }
  const HeadArray& array() const { return array_; }
  double bit_length() const { return bit_length_; }

  /// Normalized field pattern left on the medium by head i: the ramped
  /// amplitude at the moment its trailing edge passes x.
  double written_amplitude(std::size_t head, double x) const;

 private:
  struct Kinematics {
    double D = 0.0;
    double pole_shift = 0.0;      // pole centre relative to laser
    double trailing_shift = 0.0;  // trailing edge relative to laser
    double inv_two_var_T = 0.0;
    double inv_two_var_H = 0.0;
    double half_width = 0.0;
    double excess_T = 0.0;
    std::vector<double> prefix;   // cumulative bit sums, prefix[k] = sum_{j<k}
  };

  double bit_integral(std::size_t head, double p) const;
  int bit_at_position(std::size_t head, double p) const;
  double plateau_weight(const Kinematics& k, double x, double center) const;

  HeadArray array_;
  double bit_length_;
  std::vector<Kinematics> heads_;
};

/// Free-function forms of the profile queries.
double temperature_at(double x, double t, const HeadArray& array);
Vec3 field_at(double x, double t, const HeadArray& array,
              const std::vector<double>& current_bits);
int bit_at(const HeadArray& array, std::size_t head, double t,
           double bit_length);

}  // namespace hamr

#endif  // HAMR3D_FIELDS_HPP

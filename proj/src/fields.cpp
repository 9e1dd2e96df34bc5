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

#include "hamr3d/fields.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "hamr3d/error.hpp"
#include "hamr3d/media.hpp"

namespace hamr {

namespace {

double direction_sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

double gaussian_weight(double distance, double fwhm) {
  const double sigma = fwhm * kFwhmToSigma;
  return std::exp(-distance * distance / (2.0 * sigma * sigma));
}

double pole_weight(double x, double center, double half_width, double fwhm) {
  const double outside = std::fabs(x - center) - half_width;
  return outside <= 0.0 ? 1.0 : gaussian_weight(outside, fwhm);
}

}  // namespace

void validate(const HeadArray& array) {
  if (array.heads.empty()) config_error("head array has no heads");
  if (!std::isfinite(array.velocity)) config_error("velocity is not finite");
  if (!(array.T_env > 0.0)) config_error("T_env must be positive");
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    const HeadSpec& h = array.heads[i];
    const std::string who = fmt::format("head {}", i + 1);
    if (array.laser_enabled && !(h.Tw > array.T_env)) {
      config_error(fmt::format("{}: Tw = {} K must exceed T_env = {} K", who,
                               h.Tw, array.T_env));
    }
    if (!(h.Hw >= 0.0)) config_error(who + ": Hw must be >= 0");
    if (!(h.fwhm_T > 0.0) || !(h.fwhm_H > 0.0) || !(h.head_width > 0.0)) {
      config_error(who + ": fwhm_T, fwhm_H and head_width must be > 0");
    }
    if (std::fabs(norm(h.u_hat) - 1.0) > 1e-9) {
      config_error(who + ": u_hat must be a unit vector");
    }
    if (!(h.delta_d >= 0.0)) config_error(who + ": delta_d must be >= 0");
    if (i == 0 && h.delta_d != 0.0) {
      config_error("head 1: delta_d must be 0 (no previous head)");
    }
    if (!std::isfinite(h.d)) config_error(who + ": d is not finite");
    if (!(h.ramp_time >= 0.0)) config_error(who + ": ramp_time must be >= 0");
    for (int b : h.bits) {
      if (b != 1 && b != -1) config_error(who + ": bits must be +1 or -1");
    }
  }
  if (array.laser_enabled) {
    for (std::size_t i = 1; i < array.heads.size(); ++i) {
      if (!(array.heads[i - 1].Tw > array.heads[i].Tw)) {
        config_error(fmt::format(
            "writing temperatures must strictly decrease with head index "
            "(Tw(1) > Tw(2) > ... > Tw(N)); got Tw({}) = {} K, Tw({}) = {} K",
            i, array.heads[i - 1].Tw, i + 1, array.heads[i].Tw));
      }
    }
  }
}

std::size_t target_layer(const HeadArray& array, std::size_t head,
                         std::size_t layer_count) {
  const int explicit_layer = array.heads.at(head).layer;
  if (explicit_layer >= 0) {
    if (static_cast<std::size_t>(explicit_layer) >= layer_count) {
      config_error(fmt::format("head {} targets layer {} but the medium has {}",
                               head + 1, explicit_layer, layer_count));
    }
    return static_cast<std::size_t>(explicit_layer);
  }
  if (head >= layer_count) {
    config_error(fmt::format("head {} has no layer to write ({} layers)",
                             head + 1, layer_count));
  }
  return layer_count - 1 - head;
}

void validate_against_media(const HeadArray& array, const MediaStack& media) {
  validate(array);
  if (!array.laser_enabled) return;
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    const std::size_t layer = target_layer(array, i, media.layers.size());
    const double tc = media.median_Tc(layer);
    if (!(array.heads[i].Tw > tc)) {
      config_error(fmt::format(
          "head {}: Tw = {} K must exceed the median Curie temperature {} K "
          "of layer {} (delta_T > 0)",
          i + 1, array.heads[i].Tw, tc, layer));
    }
  }
}

std::vector<double> head_offsets(const HeadArray& array) {
  std::vector<double> offsets(array.heads.size());
  double spacing = 0.0;
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    if (i > 0) spacing += array.heads[i].delta_d;
    offsets[i] = array.heads[i].d + spacing;
  }
  return offsets;
}

bool footprints_overlap(const HeadArray& array) {
  const auto offsets = head_offsets(array);
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    for (std::size_t j = i + 1; j < array.heads.size(); ++j) {
      const double ci = offsets[i] - array.heads[i].d;
      const double cj = offsets[j] - array.heads[j].d;
      const double reach =
          0.5 * (array.heads[i].head_width + array.heads[j].head_width);
      if (std::fabs(ci - cj) < reach) return true;
    }
  }
  return false;
}

double temperature_at(double x, double t, const HeadArray& array) {
  if (!array.laser_enabled) return array.T_env;
  const auto offsets = head_offsets(array);
  double excess = 0.0;
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    const HeadSpec& h = array.heads[i];
    excess += (h.Tw - array.T_env) *
              gaussian_weight(x - array.velocity * t - offsets[i], h.fwhm_T);
  }
  return excess + array.T_env;
}

Vec3 field_at(double x, double t, const HeadArray& array,
              const std::vector<double>& current_bits) {
  if (current_bits.size() != array.heads.size()) {
    config_error("field_at: one bit per head required");
  }
  const auto offsets = head_offsets(array);
  Vec3 total;
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    const HeadSpec& h = array.heads[i];
    const double center = array.velocity * t + offsets[i] - h.d;
    const double w = pole_weight(x, center, 0.5 * h.head_width, h.fwhm_H);
    total += h.u_hat * (current_bits[i] * h.Hw * w);
  }
  return total;
}

int bit_at(const HeadArray& array, std::size_t head, double t,
           double bit_length) {
  return ProfileEvaluator(array, bit_length).bit(head, t);
}

ProfileEvaluator::ProfileEvaluator(const HeadArray& array, double bit_length)
    : array_(array), bit_length_(bit_length) {
  if (!(bit_length > 0.0)) config_error("bit_length must be > 0");
  const auto offsets = head_offsets(array);
  const double s = direction_sign(array.velocity);
  heads_.reserve(array.heads.size());
  for (std::size_t i = 0; i < array.heads.size(); ++i) {
    const HeadSpec& h = array.heads[i];
    Kinematics k;
    k.D = offsets[i];
    k.pole_shift = -h.d;
    k.half_width = 0.5 * h.head_width;
    k.trailing_shift = -h.d - s * k.half_width;
    const double sT = h.fwhm_T * kFwhmToSigma;
    const double sH = h.fwhm_H * kFwhmToSigma;
    k.inv_two_var_T = 1.0 / (2.0 * sT * sT);
    k.inv_two_var_H = 1.0 / (2.0 * sH * sH);
    k.excess_T = array.laser_enabled ? h.Tw - array.T_env : 0.0;
    k.prefix.assign(h.bits.size() + 1, 0.0);
    for (std::size_t j = 0; j < h.bits.size(); ++j) {
      k.prefix[j + 1] = k.prefix[j] + h.bits[j];
    }
    heads_.push_back(std::move(k));
  }
}

double ProfileEvaluator::laser_position(std::size_t head, double t) const {
  return array_.velocity * t + heads_[head].D;
}

double ProfileEvaluator::pole_center(std::size_t head, double t) const {
  return laser_position(head, t) + heads_[head].pole_shift;
}

double ProfileEvaluator::trailing_edge(std::size_t head, double t) const {
  return laser_position(head, t) + heads_[head].trailing_shift;
}

double ProfileEvaluator::temperature(double x, double t) const {
  double excess = 0.0;
  const double vt = array_.velocity * t;
  for (const Kinematics& k : heads_) {
    if (k.excess_T == 0.0) continue;
    const double u = x - vt - k.D;
    excess += k.excess_T * std::exp(-u * u * k.inv_two_var_T);
  }
  return excess + array_.T_env;
}

double ProfileEvaluator::plateau_weight(const Kinematics& k, double x,
                                        double center) const {
  const double outside = std::fabs(x - center) - k.half_width;
  return outside <= 0.0 ? 1.0 : std::exp(-outside * outside * k.inv_two_var_H);
}

Vec3 ProfileEvaluator::field(double x, double t) const {
  Vec3 total;
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    const HeadSpec& h = array_.heads[i];
    if (h.Hw == 0.0) continue;
    const double a = amplitude(i, t);
    if (a == 0.0) continue;
    const double w = plateau_weight(heads_[i], x, pole_center(i, t));
    total += h.u_hat * (a * h.Hw * w);
  }
  return total;
}

Vec3 ProfileEvaluator::field_with_amplitudes(
    double x, double t, const std::vector<double>& amplitudes) const {
  Vec3 total;
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    const HeadSpec& h = array_.heads[i];
    const double w = plateau_weight(heads_[i], x, pole_center(i, t));
    total += h.u_hat * (amplitudes.at(i) * h.Hw * w);
  }
  return total;
}

int ProfileEvaluator::bit_at_position(std::size_t head, double p) const {
  const auto& bits = array_.heads[head].bits;
  if (bits.empty()) config_error(fmt::format("head {} has no bits", head + 1));
  const double cell = std::floor(p / bit_length_);
  if (cell < 0.0) return bits.front();
  if (cell >= static_cast<double>(bits.size())) return bits.back();
  return bits[static_cast<std::size_t>(cell)];
}

double ProfileEvaluator::bit_integral(std::size_t head, double p) const {
  const auto& bits = array_.heads[head].bits;
  const auto& prefix = heads_[head].prefix;
  const std::size_t n = bits.size();
  if (p < 0.0) return bits.front() * p;
  const double cell = std::floor(p / bit_length_);
  if (cell >= static_cast<double>(n)) {
    return prefix[n] * bit_length_ +
           bits.back() * (p - static_cast<double>(n) * bit_length_);
  }
  const auto k = static_cast<std::size_t>(cell);
  return prefix[k] * bit_length_ + bits[k] * (p - cell * bit_length_);
}

int ProfileEvaluator::bit(std::size_t head, double t) const {
  return bit_at_position(head, trailing_edge(head, t));
}

double ProfileEvaluator::amplitude(std::size_t head, double t) const {
  const double tau = array_.heads[head].ramp_time;
  const double p1 = trailing_edge(head, t);
  if (tau <= 0.0 || array_.velocity == 0.0) return bit_at_position(head, p1);
  if (array_.heads[head].bits.empty()) {
    config_error(fmt::format("head {} has no bits", head + 1));
  }
  const double p0 = trailing_edge(head, t - tau);
  // The edge moves linearly in time, so the time average equals the average
  // of the bit pattern over the swept positions.
  return (bit_integral(head, p1) - bit_integral(head, p0)) / (p1 - p0);
}

double ProfileEvaluator::written_amplitude(std::size_t head, double x) const {
  if (array_.velocity == 0.0) config_error("written profile needs v != 0");
  const double t = (x - heads_[head].D - heads_[head].trailing_shift) /
                   array_.velocity;
  return amplitude(head, t);
}

}  // namespace hamr

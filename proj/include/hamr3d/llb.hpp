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

// Stochastic Landau-Lifshitz-Bloch dynamics of one macrospin per grain.
//
//   dm/dt = -g (m x H) + g a_par/m^2 (m.H) m
//           - g a_perp/m^2 m x (m x (H + zeta_perp)) + zeta_ad
//
// H = H_applied + H_anis + H_long, with
//   H_anis = -2 k_u(T) / (Ms0 m_e^2) (m - (m.e) e)     (T < Tc, else 0)
//   H_long = (1 / 2chi) (1 - m^2 / m_e^2) m            (T < Tc)
//          = -(1 / chi) m                             (T >= Tc)
// Both are gradients of the free energy
//   F/V = k_u (m^2 - (m.e)^2) / m_e^2 + Ms0 (m^2 - m_e^2)^2 / (8 chi m_e^2),
// so the noise below yields the Boltzmann distribution exp(-F/kT).
// Time is in seconds inside the kernel and in ns at the API boundary.

#ifndef HAMR3D_LLB_HPP
#define HAMR3D_LLB_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hamr3d/rng.hpp"
#include "hamr3d/vec3.hpp"

namespace hamr {

struct GrainSpec;

inline constexpr double kBoltzmann = 1.380649e-16;  // erg/K
inline constexpr double kNmCubedToCc = 1e-21;
inline constexpr double kNsToS = 1e-9;

struct LlbParams {
  double gamma_e = 1.76e7;      // rad s^-1 Oe^-1
  double lambda = 0.1;          // bath coupling
  double eta = 2.0;             // Callen-Callen exponent
  double beta_me = 0.365;       // m_e(T) = (1 - T/Tc)^beta
  double dt = 1e-5;             // ns
  double epsilon_m = 1e-3;      // floor for m_e and for |m| in 1/m^2
  double chi_amplitude = 1e-6;  // 1/Oe, scales |d m_e / d(T/Tc)|
  double chi_clamp = 0.01;      // minimum |1 - T/Tc| seen by chi and m_e
  double m_max = 1.2;           // |m| above this is an instability
  bool thermal_noise = true;

  friend bool operator==(const LlbParams&, const LlbParams&) = default;
};

void validate(const LlbParams& params);

/// Equilibrium reduced magnetization; epsilon_m at and above Tc.
double equilibrium_magnetization(double T, double Tc, const LlbParams& params);

/// k_u(T) = Ku0 m_e(T)^eta, erg/cc.
double anisotropy_constant(double T, const GrainSpec& grain,
                           const LlbParams& params);

struct Dampings {
  double parallel = 0.0;
  double perpendicular = 0.0;
};

Dampings dampings(double T, double Tc, double lambda);

/// Longitudinal susceptibility in 1/Oe.
double longitudinal_susceptibility(double T, double Tc,
                                   const LlbParams& params);

/// Everything the right-hand side needs at one temperature.
struct GrainCoefficients {
  double anis = 0.0;        // Oe
  double long_a = 0.0;      // Oe, (long_a - long_b m^2) m = H_long - anis m
  double long_b = 0.0;      // Oe
  double alpha_par = 0.0;
  double alpha_perp = 0.0;
  double noise_perp = 0.0;  // Oe, per-step std of each zeta_perp component
  double noise_ad = 0.0;    // 1/s, per-step std of each zeta_ad component
};

GrainCoefficients grain_coefficients(const GrainSpec& grain, double T,
                                     const LlbParams& params,
                                     double dt_seconds);

/// Anisotropy + longitudinal + applied field, Oe.
Vec3 effective_field(const GrainSpec& grain, const Vec3& m, double T,
                     const Vec3& H_applied, const LlbParams& params);

/// One evaluation point of the Heun scheme.
struct StepInput {
  GrainCoefficients coeff;
  Vec3 h_applied;
};

/// dm/dt in 1/s for given noise realizations.
inline Vec3 llb_derivative(const Vec3& m, const StepInput& in,
                           const Vec3& easy, const Vec3& zeta_perp,
                           const Vec3& zeta_ad, double gamma, double eps2) {
  const GrainCoefficients& c = in.coeff;
  const double m2_raw = dot(m, m);
  const double m2 = m2_raw > eps2 ? m2_raw : eps2;
  const double me_dot = dot(m, easy);
  Vec3 h = in.h_applied + easy * (c.anis * me_dot) +
           m * (c.long_a - c.long_b * m2_raw);
  const Vec3 precession = cross(m, h) * (-gamma);
  const double mh = dot(m, h);
  const Vec3 longitudinal = m * (gamma * c.alpha_par * mh / m2);
  const Vec3 hp = h + zeta_perp;
  // m x (m x hp) = m (m.hp) - hp m^2
  const Vec3 mmh = m * dot(m, hp) - hp * m2_raw;
  const Vec3 transverse = mmh * (-gamma * c.alpha_perp / m2);
  return precession + longitudinal + transverse + zeta_ad;
}

/// One stochastic Heun step. The same noise realization drives predictor and
/// corrector (Stratonovich); amplitudes are taken from `now`.
inline Vec3 heun_step(const Vec3& m, const StepInput& now,
                      const StepInput& next, const std::array<double, 6>& xi,
                      const Vec3& easy, double gamma, double dt_s,
                      double eps2) {
  const Vec3 zp{now.coeff.noise_perp * xi[0], now.coeff.noise_perp * xi[1],
                now.coeff.noise_perp * xi[2]};
  const Vec3 za{now.coeff.noise_ad * xi[3], now.coeff.noise_ad * xi[4],
                now.coeff.noise_ad * xi[5]};
  const Vec3 k1 = llb_derivative(m, now, easy, zp, za, gamma, eps2);
  const Vec3 pred = m + k1 * dt_s;
  const Vec3 k2 = llb_derivative(pred, next, easy, zp, za, gamma, eps2);
  return m + (k1 + k2) * (0.5 * dt_s);
}

/// Noise stream of one grain: keyed by (run seed, grain id, step index).
inline CounterRng grain_noise_stream(std::uint64_t seed, int grain_id) {
  return CounterRng(seed, static_cast<std::uint32_t>(grain_id),
                    RngPurpose::kThermalNoise);
}

/// Throws a simulation error when |m| is non-finite or above m_max.
void check_magnitude(const Vec3& m, int grain_id, const LlbParams& params);

struct FieldSample;

/// Temperature and applied field seen by a grain at time t (ns).
using FieldSampler = std::function<FieldSample(const GrainSpec&, double)>;

/// Advances every grain by one step from t to t + dt (ns). `step_index`
/// addresses the noise streams.
void step(std::span<const GrainSpec> grains, std::span<Vec3> state,
          const FieldSampler& sampler, double t, std::uint64_t step_index,
          std::uint64_t seed, const LlbParams& params);

}  // namespace hamr

#endif  // HAMR3D_LLB_HPP

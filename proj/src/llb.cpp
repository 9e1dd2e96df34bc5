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

#include "hamr3d/llb.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hamr3d/error.hpp"
#include "hamr3d/fields.hpp"
#include "hamr3d/media.hpp"

namespace hamr {

void validate(const LlbParams& p) {
  if (!(p.dt > 0.0)) config_error("llb.dt must be > 0");
  if (!(p.lambda > 0.0 && p.lambda <= 1.0)) {
    config_error("llb.lambda must lie in (0, 1]");
  }
  if (!(p.eta > 0.0)) config_error("llb.eta must be > 0");
  if (!(p.beta_me > 0.0 && p.beta_me < 1.0)) {
    config_error("llb.beta_me must lie in (0, 1)");
  }
  if (!(p.gamma_e > 0.0)) config_error("llb.gamma_e must be > 0");
  if (!(p.epsilon_m > 0.0 && p.epsilon_m < 1.0)) {
    config_error("llb.epsilon_m must lie in (0, 1)");
  }
  if (!(p.chi_amplitude > 0.0)) config_error("llb.chi_amplitude must be > 0");
  if (!(p.chi_clamp > 0.0 && p.chi_clamp < 1.0)) {
    config_error("llb.chi_clamp must lie in (0, 1)");
  }
  if (!(p.m_max > 1.0)) config_error("llb.m_max must be > 1");
}

double equilibrium_magnetization(double T, double Tc,
                                 const LlbParams& params) {
  if (T >= Tc) return params.epsilon_m;
  const double me = std::pow(1.0 - T / Tc, params.beta_me);
  return me > params.epsilon_m ? me : params.epsilon_m;
}

double anisotropy_constant(double T, const GrainSpec& grain,
                           const LlbParams& params) {
  return grain.Ku0 *
         std::pow(equilibrium_magnetization(T, grain.Tc, params), params.eta);
}

Dampings dampings(double T, double Tc, double lambda) {
  const double par = lambda * 2.0 * T / (3.0 * Tc);
  if (T >= Tc) return {par, par};
  return {par, lambda * (1.0 - T / (3.0 * Tc))};
}

double longitudinal_susceptibility(double T, double Tc,
                                   const LlbParams& params) {
  const double gap = std::max(std::fabs(1.0 - T / Tc), params.chi_clamp);
  return params.chi_amplitude * params.beta_me *
         std::pow(gap, params.beta_me - 1.0);
}

GrainCoefficients grain_coefficients(const GrainSpec& grain, double T,
                                     const LlbParams& params,
                                     double dt_seconds) {
  GrainCoefficients c;
  const double reduced = T / grain.Tc;
  const double beta = params.beta_me;
  if (reduced < 1.0) {
    const double gap = 1.0 - reduced;
    const double me_raw = std::exp(beta * std::log(gap));
    const double me = me_raw > params.epsilon_m ? me_raw : params.epsilon_m;
    const double me_eta_2 =
        params.eta == 2.0 ? 1.0 : std::pow(me, params.eta - 2.0);
    c.anis = 2.0 * grain.Ku0 * me_eta_2 / grain.Ms0;
    double chi;
    double me_long;
    if (gap >= params.chi_clamp) {
      // (1 - tau)^(beta - 1) = m_e / (1 - tau)
      chi = params.chi_amplitude * beta * me_raw / gap;
      me_long = me;
    } else {
      chi = params.chi_amplitude * beta * std::pow(params.chi_clamp, beta - 1.0);
      me_long = std::pow(params.chi_clamp, beta);
    }
    // The isotropic -anis m part of H_anis is folded into the linear term.
    c.long_a = 0.5 / chi - c.anis;
    c.long_b = 0.5 / (chi * me_long * me_long);
  } else {
    c.anis = 0.0;
    c.long_a = -1.0 / longitudinal_susceptibility(T, grain.Tc, params);
    c.long_b = 0.0;
  }
  const Dampings a = dampings(T, grain.Tc, params.lambda);
  c.alpha_par = a.parallel;
  c.alpha_perp = a.perpendicular;
  if (params.thermal_noise && T > 0.0) {
    const double kT = kBoltzmann * T;
    const double moment = grain.Ms0 * grain.volume * kNmCubedToCc;  // emu
    const double g = params.gamma_e;
    const double excess = c.alpha_perp - c.alpha_par;
    if (excess > 0.0) {
      c.noise_perp = std::sqrt(2.0 * kT * excess /
                               (g * moment * c.alpha_perp * c.alpha_perp) /
                               dt_seconds);
    }
    c.noise_ad = std::sqrt(2.0 * g * kT * c.alpha_par / moment / dt_seconds);
  }
  return c;
}

Vec3 effective_field(const GrainSpec& grain, const Vec3& m, double T,
                     const Vec3& H_applied, const LlbParams& params) {
  const GrainCoefficients c = grain_coefficients(grain, T, params, 1.0);
  return H_applied + grain.easy_axis * (c.anis * dot(m, grain.easy_axis)) +
         m * (c.long_a - c.long_b * dot(m, m));
}

void check_magnitude(const Vec3& m, int grain_id, const LlbParams& params) {
  const double len = norm(m);
  if (!std::isfinite(len) || len > params.m_max) {
    simulation_error(fmt::format(
        "integrator instability: grain {} reached |m| = {} (limit {}) with "
        "dt = {} ns; reduce llb.dt",
        grain_id, len, params.m_max, params.dt));
  }
}

void step(std::span<const GrainSpec> grains, std::span<Vec3> state,
          const FieldSampler& sampler, double t, std::uint64_t step_index,
          std::uint64_t seed, const LlbParams& params) {
  if (grains.size() != state.size()) {
    simulation_error("step: grain and state counts differ");
  }
  const double dt_s = params.dt * kNsToS;
  const double eps2 = params.epsilon_m * params.epsilon_m;
  for (std::size_t i = 0; i < grains.size(); ++i) {
    const GrainSpec& g = grains[i];
    const FieldSample now = sampler(g, t);
    const FieldSample next = sampler(g, t + params.dt);
    const StepInput in_now{grain_coefficients(g, now.T, params, dt_s), now.H};
    const StepInput in_next{grain_coefficients(g, next.T, params, dt_s),
                            next.H};
    std::array<double, 6> xi{};
    if (params.thermal_noise) {
      xi = grain_noise_stream(seed, g.id).normals6(step_index);
    }
    state[i] = heun_step(state[i], in_now, in_next, xi, g.easy_axis,
                         params.gamma_e, dt_s, eps2);
    check_magnitude(state[i], g.id, params);
  }
}

}  // namespace hamr

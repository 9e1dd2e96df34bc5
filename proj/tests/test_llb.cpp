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
#include <numbers>
#include <vector>

#include <doctest.h>

#include "hamr3d/error.hpp"
#include "hamr3d/fields.hpp"
#include "hamr3d/llb.hpp"
#include "hamr3d/media.hpp"

using namespace hamr;

namespace {

constexpr double kMedianVolume = std::numbers::pi * 0.25 * 36.0 * 6.0;

GrainSpec bottom_grain(int id = 0) {
  GrainSpec g;
  g.id = id;
  g.Ms0 = 696.0;
  g.Tc = 620.0;
  g.Ku0 = 25.0e6;
  g.volume = kMedianVolume;
  return g;
}

GrainSpec top_grain(int id = 0) {
  GrainSpec g;
  g.id = id;
  g.Ms0 = 487.0;
  g.Tc = 526.0;
  g.Ku0 = 6.0e6;
  g.volume = kMedianVolume;
  return g;
}

// Closed form used as the oracle, independent of the library.
double me_oracle(double T, double Tc) {
  return T >= Tc ? 1e-3 : std::pow(1.0 - T / Tc, 0.365);
}

// Holds every grain at a fixed temperature and field.
std::vector<Vec3> hold(const std::vector<GrainSpec>& grains,
                       std::vector<Vec3> state, double T, Vec3 H,
                       double duration, const LlbParams& p,
                       std::uint64_t seed = 1) {
  const FieldSampler sampler = [&](const GrainSpec&, double) {
    return FieldSample{T, H};
  };
  const auto steps = static_cast<std::uint64_t>(std::llround(duration / p.dt));
  for (std::uint64_t n = 0; n < steps; ++n) {
    step(grains, state, sampler, static_cast<double>(n) * p.dt, n, seed, p);
  }
  return state;
}

Vec3 tilted(double length, double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  return {length * std::sin(a), 0.0, length * std::cos(a)};
}

}  // namespace

TEST_CASE("equilibrium magnetization closed form") {
  LlbParams p;
  CHECK(equilibrium_magnetization(0.0, 620.0, p) == 1.0);
  CHECK(equilibrium_magnetization(620.0, 620.0, p) == p.epsilon_m);
  CHECK(equilibrium_magnetization(900.0, 620.0, p) == p.epsilon_m);
  CHECK(equilibrium_magnetization(300.0, 620.0, p) ==
        doctest::Approx(me_oracle(300.0, 620.0)).epsilon(1e-14));
  CHECK(equilibrium_magnetization(300.0, 620.0, p) ==
        doctest::Approx(0.78555).epsilon(1e-4));
}

TEST_CASE("Callen-Callen anisotropy scaling is exact") {
  LlbParams p;
  const GrainSpec g = bottom_grain();
  CHECK(anisotropy_constant(0.0, g, p) == 25.0e6);
  for (double T : {0.0, 100.0, 300.0, 450.0, 600.0, 619.9}) {
    const double me = equilibrium_magnetization(T, g.Tc, p);
    CHECK(anisotropy_constant(T, g, p) ==
          doctest::Approx(g.Ku0 * me * me).epsilon(1e-15));
  }
  CHECK(anisotropy_constant(700.0, g, p) ==
        doctest::Approx(25.0e6 * 1e-6).epsilon(1e-12));
  CHECK(anisotropy_constant(300.0, g, p) ==
        doctest::Approx(25.0e6 * 0.78555 * 0.78555).epsilon(1e-3));
}

TEST_CASE("damping closures") {
  const Dampings zero = dampings(0.0, 620.0, 0.1);
  CHECK(zero.parallel == 0.0);
  CHECK(zero.perpendicular == doctest::Approx(0.1));
  const Dampings at_tc = dampings(620.0, 620.0, 0.1);
  CHECK(at_tc.parallel == doctest::Approx(0.2 / 3.0));
  CHECK(at_tc.perpendicular == doctest::Approx(0.2 / 3.0));
  const Dampings below = dampings(620.0 * (1.0 - 1e-12), 620.0, 0.1);
  CHECK(below.perpendicular == doctest::Approx(at_tc.perpendicular));
  const Dampings above = dampings(700.0, 620.0, 0.1);
  CHECK(above.parallel == above.perpendicular);
}

TEST_CASE("effective field") {
  LlbParams p;
  const GrainSpec g = bottom_grain();
  const double me = equilibrium_magnetization(300.0, g.Tc, p);

  // At equilibrium length along the easy axis nothing acts.
  const Vec3 h = effective_field(g, {0.0, 0.0, me}, 300.0, {}, p);
  CHECK(h.x == 0.0);
  CHECK(h.y == 0.0);
  CHECK(h.z == doctest::Approx(0.0).scale(1.0));

  // Zero temperature, moment in the hard plane: the Stoner-Wohlfarth
  // anisotropy field 2 Ku0 / Ms0 pulls it back.
  const Vec3 h0 = effective_field(g, {1.0, 0.0, 0.0}, 0.0, {}, p);
  CHECK(-h0.x == doctest::Approx(2.0 * 25.0e6 / 696.0).epsilon(1e-9));
  CHECK(-h0.x == doctest::Approx(71839.0).epsilon(1e-4));

  // At T, the restoring torque on a small tilt is 2 k_u / (Ms0 m_e) per unit
  // angle.
  const double tilt = 1e-4;
  const Vec3 ht = effective_field(g, {me * tilt, 0.0, me}, 300.0, {}, p);
  const double ku = anisotropy_constant(300.0, g, p);
  CHECK(-ht.x / tilt == doctest::Approx(2.0 * ku / (g.Ms0 * me)).epsilon(1e-6));

  // A short moment is pulled back to length.
  const Vec3 hs = effective_field(g, {0.0, 0.0, 0.3}, 300.0, {}, p);
  CHECK(hs.z > 0.0);
  CHECK(hs.x == 0.0);

  const Vec3 ha = effective_field(g, {0.0, 0.0, me}, 300.0, {1.0, 2.0, 3.0}, p);
  CHECK(ha.x == doctest::Approx(1.0));
  CHECK(ha.y == doctest::Approx(2.0));
}

TEST_CASE("parameter validation") {
  LlbParams p;
  p.dt = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = {};
  p.lambda = 1.5;
  CHECK_THROWS_AS(validate(p), Error);
  p = {};
  p.eta = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  CHECK_NOTHROW(validate(LlbParams{}));
}

TEST_CASE("zero temperature fixed point") {
  LlbParams p;
  p.dt = 1e-4;
  const std::vector<GrainSpec> grains{bottom_grain()};
  const auto out = hold(grains, {{0.0, 0.0, 1.0}}, 0.0, {}, 0.2, p);
  CHECK(out[0].x == 0.0);
  CHECK(out[0].y == 0.0);
  CHECK(out[0].z == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a reversed field above H_K switches at zero temperature") {
  LlbParams p;
  p.dt = 1e-4;
  const std::vector<GrainSpec> grains{bottom_grain()};
  const auto out = hold(grains, {tilted(1.0, 1.0)}, 0.0, {0.0, 0.0, -80000.0},
                        1.0, p);
  CHECK(out[0].z < -0.9);
}

TEST_CASE("Stoner-Wohlfarth threshold by bisection") {
  LlbParams p;
  p.dt = 1e-4;
  const GrainSpec g = bottom_grain();
  const double hk = 2.0 * g.Ku0 / g.Ms0;
  auto switches = [&](double H) {
    const auto out = hold({g}, {tilted(1.0, 1.0)}, 0.0, {0.0, 0.0, -H}, 5.0, p);
    return out[0].z < 0.0;
  };
  double lo = 0.9 * hk;
  double hi = 1.1 * hk;
  REQUIRE_FALSE(switches(lo));
  REQUIRE(switches(hi));
  for (int i = 0; i < 10; ++i) {
    const double mid = 0.5 * (lo + hi);
    (switches(mid) ? hi : lo) = mid;
  }
  const double threshold = 0.5 * (lo + hi);
  MESSAGE("switching field " << threshold << " Oe, 2Ku0/Ms0 = " << hk);
  CHECK(std::fabs(threshold - hk) / hk < 0.02);
}

TEST_CASE("Heun converges at second order") {
  LlbParams p;
  p.thermal_noise = false;
  const GrainSpec g = top_grain();
  const double me = equilibrium_magnetization(300.0, g.Tc, p);
  const Vec3 H{4000.0, 1000.0, -6000.0};
  auto endpoint = [&](double dt) {
    LlbParams q = p;
    q.dt = dt;
    return hold({g}, {tilted(me, 30.0)}, 300.0, H, 1.0, q)[0];
  };
  const Vec3 ref = endpoint(2.5e-6);
  const double e1 = norm(endpoint(2e-4) - ref);
  const double e2 = norm(endpoint(1e-4) - ref);
  const double e3 = norm(endpoint(5e-5) - ref);
  MESSAGE("errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("deterministic limit conserves |m|") {
  LlbParams p;
  p.thermal_noise = false;
  p.dt = 1e-4;
  const GrainSpec g = bottom_grain();
  const double me = equilibrium_magnetization(300.0, g.Tc, p);
  const auto out = hold({g}, {tilted(me, 25.0)}, 300.0, {}, 1.0, p);
  CHECK(std::fabs(norm(out[0]) - me) < 1e-3);
}

TEST_CASE("demagnetization above Tc") {
  LlbParams p;
  p.dt = 1e-4;
  std::vector<GrainSpec> grains;
  for (int i = 0; i < 100; ++i) grains.push_back(bottom_grain(i));
  const double me300 = equilibrium_magnetization(300.0, 620.0, p);
  const std::vector<Vec3> start(grains.size(), Vec3{0.0, 0.0, me300});

  LlbParams quiet = p;
  quiet.thermal_noise = false;
  for (const Vec3& m : hold(grains, start, 700.0, {}, 0.5, quiet)) {
    CHECK(norm(m) < 0.1);
  }

  const auto half = hold(grains, start, 700.0, {}, 0.5, p, 3);
  double mean_half = 0.0;
  for (const Vec3& m : half) mean_half += norm(m) / 100.0;
  CHECK(mean_half < 0.1);

  // Paramagnetic level: F/V = Ms0 m^2 / (2 chi) gives <m^2> = 3kT chi/(Ms0 V).
  const double chi = longitudinal_susceptibility(700.0, 620.0, p);
  const double rms = std::sqrt(3.0 * kBoltzmann * 700.0 * chi /
                               (696.0 * kMedianVolume * kNmCubedToCc));
  const auto full = hold(grains, start, 700.0, {}, 1.0, p, 3);
  double mean = 0.0;
  for (const Vec3& m : full) mean += norm(m) / 100.0;
  MESSAGE("mean |m| " << mean << ", paramagnetic rms " << rms);
  CHECK(mean < 3.0 * rms);
}

TEST_CASE("switching probability grows with peak temperature") {
  LlbParams p;
  p.dt = 1e-4;
  std::vector<GrainSpec> grains;
  for (int i = 0; i < 200; ++i) grains.push_back(bottom_grain(i));
  const double me300 = equilibrium_magnetization(300.0, 620.0, p);
  // A 1 ns heat pulse peaking at 0.5 ns under a steady reversed 13 kOe.
  auto probability = [&](double peak) {
    const FieldSampler sampler = [&](const GrainSpec&, double t) {
      const double s = (t - 0.5) / 0.12;
      return FieldSample{300.0 + (peak - 300.0) * std::exp(-0.5 * s * s),
                         {0.0, 0.0, -13000.0}};
    };
    std::vector<Vec3> state(grains.size(), Vec3{0.0, 0.0, me300});
    const auto steps = static_cast<std::uint64_t>(std::llround(1.0 / p.dt));
    for (std::uint64_t n = 0; n < steps; ++n) {
      step(grains, state, sampler, static_cast<double>(n) * p.dt, n, 17, p);
    }
    double n = 0.0;
    for (const Vec3& m : state) n += m.z < 0.0 ? 1.0 : 0.0;
    return n / static_cast<double>(state.size());
  };
  const double p500 = probability(500.0);
  const double ptc = probability(620.0);
  const double phot = probability(640.0);
  MESSAGE("P(500) " << p500 << " P(Tc) " << ptc << " P(Tc + 20) " << phot);
  // Monte Carlo tolerance: two binomial standard errors plus one grain.
  auto slack = [](double a, double b) {
    return 2.0 * std::sqrt((a * (1.0 - a) + b * (1.0 - b)) / 200.0) + 1.0 / 200.0;
  };
  CHECK(p500 <= ptc + slack(p500, ptc));
  CHECK(ptc <= phot + slack(ptc, phot));
  CHECK(p500 < 0.1);
  CHECK(phot > 0.9);
}

TEST_CASE("integrator instability names the grain and dt") {
  LlbParams p;
  p.dt = 0.5;
  const std::vector<GrainSpec> grains{bottom_grain(42)};
  try {
    hold(grains, {{0.0, 0.0, 0.7}}, 700.0, {}, 5.0, p);
    FAIL("expected an instability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSimulation);
    const std::string what = e.what();
    CHECK(what.find("grain 42") != std::string::npos);
    CHECK(what.find("dt") != std::string::npos);
  }
}

namespace {

// Boltzmann weight of the direction cosine u = |m_z| / |m| for the LLB
// free energy, integrated over the length of m.
struct BoltzmannOracle {
  double me, ku, ms0, chi, v_over_kt;

  double energy(double m, double u) const {
    const double d = m * m - me * me;
    return ku * m * m * (1.0 - u * u) / (me * me) +
           ms0 * d * d / (8.0 * chi * me * me);
  }

  double density(double u) const {
    constexpr int kSteps = 4000;
    const double top = 1.2;
    double e_min = energy(me, 1.0);
    double sum = 0.0;
    for (int k = 0; k <= kSteps; ++k) {
      const double m = top * k / kSteps;
      const double w = (k == 0 || k == kSteps) ? 0.5 : 1.0;
      sum += w * m * m * std::exp(-v_over_kt * (energy(m, u) - e_min));
    }
    return sum;
  }
};

}  // namespace

TEST_CASE("thermal noise reproduces the Boltzmann distribution") {
  LlbParams p;
  p.dt = 1e-4;
  const double T = 300.0;
  const GrainSpec proto = top_grain();
  const double me = equilibrium_magnetization(T, proto.Tc, p);
  const BoltzmannOracle oracle{
      me_oracle(T, proto.Tc), anisotropy_constant(T, proto, p), proto.Ms0,
      longitudinal_susceptibility(T, proto.Tc, p),
      proto.volume * kNmCubedToCc / (kBoltzmann * T)};

  // Equal-probability bins in u from the oracle's cumulative distribution.
  constexpr int kBins = 10;
  constexpr int kGrid = 20000;
  std::vector<double> cdf(kGrid + 1, 0.0);
  double prev = oracle.density(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double d = oracle.density(static_cast<double>(k) / kGrid);
    cdf[k] = cdf[k - 1] + 0.5 * (prev + d);
    prev = d;
  }
  std::vector<double> edges{0.0};
  for (int b = 1; b < kBins; ++b) {
    const double target = cdf.back() * b / kBins;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    edges.push_back(static_cast<double>(it - cdf.begin()) / kGrid);
  }
  edges.push_back(1.0 + 1e-12);
  auto bin_of = [&](double u) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), u) -
                            edges.begin()) - 1;
  };

  constexpr int kGrains = 200;
  std::vector<GrainSpec> grains;
  for (int i = 0; i < kGrains; ++i) grains.push_back(top_grain(i));
  std::vector<Vec3> state(kGrains, Vec3{0.0, 0.0, me});
  const FieldSampler sampler = [&](const GrainSpec&, double) {
    return FieldSample{T, {}};
  };
  const std::uint64_t burn = 5000;
  const std::uint64_t total = 100000;  // 10 ns
  const std::uint64_t thin = 1000;     // 0.1 ns, several correlation times
  std::vector<double> all(kBins, 0.0);
  std::vector<double> thinned(kBins, 0.0);
  double n_all = 0.0;
  double n_thin = 0.0;
  for (std::uint64_t n = 0; n < total; ++n) {
    step(grains, state, sampler, static_cast<double>(n) * p.dt, n, 23, p);
    if (n < burn) continue;
    const bool take = (n - burn) % thin == 0;
    for (const Vec3& m : state) {
      const int b = bin_of(std::fabs(m.z) / norm(m));
      all[b] += 1.0;
      n_all += 1.0;
      if (take) {
        thinned[b] += 1.0;
        n_thin += 1.0;
      }
    }
  }
  double chi2 = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double freq = all[b] / n_all;
    CHECK(std::fabs(freq - 0.1) / 0.1 < 0.05);
    const double expected = n_thin / kBins;
    chi2 += (thinned[b] - expected) * (thinned[b] - expected) / expected;
  }
  MESSAGE("chi2 = " << chi2 << " over " << n_thin << " thinned samples");
  CHECK(chi2 < 21.67);  // 1% critical value, 9 degrees of freedom
}

#include "selfcheck.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "simulate.hpp"
#include "summaries.hpp"

namespace fmpp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(5);
  os << v;
  return os.str();
}

}  // namespace

std::vector<SelfCheckLine> run_selfcheck(int replicates, uint64_t seed) {
  if (replicates <= 0) replicates = 100;
  std::vector<SelfCheckLine> lines;
  const Window w = Window::rect(0, 1, 0, 1);
  const double rho = 100;
  auto grid = uniform_grid(0, 1, 0.25);

  // Poisson-ground mean of the raw estimate vs pi r^2, three corrections.
  const std::vector<double> r_grid = {0.05, 0.10};
  for (EdgeCorrection corr :
       {EdgeCorrection::MinusSampling, EdgeCorrection::Translational,
        EdgeCorrection::Isotropic}) {
    std::vector<double> mean(r_grid.size(), 0.0);
    for (int rep = 0; rep < replicates; ++rep) {
      Pattern p = simulate_pattern(GroundModel::poisson(rho),
                                   MarkModel::brownian(1.0), w, grid,
                                   splitmix64(seed) + rep);
      KQuery q = KQuery::make(2);
      q.r_grid = r_grid;
      q.correction = corr;
      q.norm = Normalization::Raw;
      // raw estimate with the true constant intensity injected
      IntensityModel m = IntensityModel::constant(w, rho);
      KEstimate est = estimate_k(p, q, m, 1);
      for (std::size_t k = 0; k < r_grid.size(); ++k)
        mean[k] += (est.available[k] ? est.value[k] : 0.0) / replicates;
    }
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
      double expect = std::numbers::pi * r_grid[k] * r_grid[k];
      double rel = std::abs(mean[k] - expect) / expect;
      SelfCheckLine line;
      line.name = std::string("poisson-k-") + correction_name(corr) + "-r" +
                  fmt(r_grid[k]);
      line.passed = rel < 0.10;  // reduced replicates, wider gate
      line.detail = "mean " + fmt(mean[k]) + " expect " + fmt(expect) +
                    " rel " + fmt(rel);
      lines.push_back(line);
    }
  }

  // Edge-weight integral identity for the translational correction
  // (analytic, rectangle window).
  {
    std::mt19937_64 rng = substream(seed, 0x736366ull);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    bool all_ok = true;
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      Vec2 shift{u(rng), u(rng)};
      // integral over x of 1{u + x in W} * w equals |W ∩ (W - u)| / |W ∩ (W + u)|
      Vec2 neg{-shift.x, -shift.y};
      double num = shifted_intersection_volume(w, {&neg, 1});
      double den = shifted_intersection_volume(w, {&shift, 1});
      double integral = num / den;
      worst = std::max(worst, std::abs(integral - 1.0));
      all_ok = all_ok && std::abs(integral - 1.0) < 1e-9;
    }
    lines.push_back({"trans-integral-identity", all_ok,
                     "max deviation " + fmt(worst)});
  }

  return lines;
}

}  // namespace fmpp

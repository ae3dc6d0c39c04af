#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "intensity.hpp"
#include "pattern.hpp"

namespace fmpp {

/// Ground-process generator: homogeneous/inhomogeneous Poisson, binomial
/// (fixed count), or a log-Gaussian Cox process simulated on a lattice via
/// dense Cholesky and thinning.
struct GroundModel {
  enum class Kind { Poisson, Binomial, Lgcp };
  Kind kind = Kind::Poisson;
  double rate = 100;                    // Poisson, constant rate
  const IntensityModel* rate_grid = nullptr;  // Poisson, optional rate field
  int n = 0;                            // Binomial
  double mu = 0, sig2 = 1, phi = 0.1;   // Lgcp: exp covariance
  int resolution = 32;                  // Lgcp lattice, >= 32

  static GroundModel poisson(double rate);
  static GroundModel poisson_field(const IntensityModel& rate);
  static GroundModel binomial(int n);
  static GroundModel lgcp(double mu, double sig2, double phi,
                          int resolution = 32);
  /// "poisson:<rate>" | "binomial:<n>" | "lgcp:mu=..,sig2=..,phi=..[,res=..]"
  static GroundModel parse(const std::string& spec);
};

std::vector<Vec2> simulate_ground(const GroundModel& gm, const Window& w,
                                  uint64_t seed);

struct GrowthInteractionParams {
  double lambda = 1;    // intrinsic logistic growth rate
  double carrying = 10; // logistic carrying capacity K
  double c = 0.5;       // pairwise competition strength
  double sigma_int = 0.1;  // spatial competition range
  double mu = 0.2;      // death rate (Exp lifetime)
  double sigma_noise = 0;  // >0 switches RK4 to Euler-Maruyama
  double dt = 1e-2;     // integration step
  double f0 = -1;       // initial size; <0 means 0.01 * carrying
  /// Per-label overrides for multi-type runs; missing labels fall back to
  /// the shared values above. Competition strength may vary per ordered
  /// label pair (victim, competitor).
  std::map<int, double> lambda_by_label, carrying_by_label;
  std::map<std::pair<int, int>, double> c_by_label_pair;
};

struct MarkModel {
  enum class Kind { IidBrownian, Geostat, IntensityDependent, GrowthInteraction };
  Kind kind = Kind::IidBrownian;
  double sigma = 1, start = 0;          // brownian
  double phi_s = 0.1, phi_t = 1, geo_sigma = 1, geo_mean = 0;  // geostat
  double a = 0, b = 0, sigma_eps = 0;   // intensity-dependent
  GrowthInteractionParams gi;

  static MarkModel brownian(double sigma, double start = 0);
  static MarkModel geostat(double phi_s, double phi_t, double sigma = 1,
                           double mean = 0);
  static MarkModel intensity_dependent(double a, double b, double sigma_eps);
  static MarkModel growth_interaction(GrowthInteractionParams gi);
  static MarkModel parse(const std::string& spec);
};

struct GrowthInteractionResult {
  std::vector<std::vector<double>> curves;  // per point, on the grid
  std::vector<double> birth, death;
};

/// Coupled logistic growth with Gaussian-kernel competition, sampled on the
/// grid; supports are [birth_i, death_i). Zero noise integrates with RK4,
/// positive noise with Euler-Maruyama; values are clipped at 0.
GrowthInteractionResult growth_interaction(
    const std::vector<Vec2>& points, const std::vector<int>& labels,
    const GrowthInteractionParams& params, const TimeGrid& grid,
    uint64_t seed);

struct MarkSimResult {
  std::vector<std::vector<double>> curves;
  std::vector<double> aux_scalars;  // birth times for growth-interaction
  bool has_aux = false;
};

MarkSimResult simulate_marks(const MarkModel& mm, const std::vector<Vec2>& points,
                             const std::vector<int>& labels, const Window& w,
                             const TimeGrid& grid, uint64_t seed);

/// Full pattern simulation: ground then marks, ids p0000, p0001, ...
Pattern simulate_pattern(const GroundModel& gm, const MarkModel& mm,
                         const Window& w,
                         std::shared_ptr<const TimeGrid> grid, uint64_t seed);

/// Local K LISA curves: value at h = number of other points within h.
std::vector<std::vector<double>> lisa_marks(const std::vector<Vec2>& points,
                                            const TimeGrid& h_grid);
Pattern lisa_pattern(const Pattern& p, std::shared_ptr<const TimeGrid> h_grid);

/// Lattice Monte Carlo estimate of |union of disks ∩ W| / |W|.
double coverage_fraction(const std::vector<Vec2>& points,
                         const std::vector<double>& radii, const Window& w,
                         int resolution);

}  // namespace fmpp

#pragma once

#include <cstdint>
#include <string>

#include "summaries.hpp"

namespace fmpp {

/// Monte Carlo null model for envelope tests. poisson-relocate redraws the
/// ground locations (uniform, or intensity-weighted when inhomogeneous is
/// set) keeping the mark list fixed in order; random-label permutes the
/// (aux, curve) assignments over fixed locations.
struct NullModel {
  enum class Kind { PoissonRelocate, RandomLabel };
  Kind kind = Kind::PoissonRelocate;
  bool inhomogeneous = false;  // PoissonRelocate: rejection-sample from rho
  int n_sim = 39;
  uint64_t seed = 1;

  static NullModel parse(const std::string& spec, int n_sim, uint64_t seed);
  std::string to_string() const;
};

enum class EnvelopeTransform { Identity, CubeRoot };
EnvelopeTransform parse_transform(const std::string& name);

struct EnvelopeResult {
  std::vector<double> r;
  std::vector<double> stat;  // transformed data statistic
  std::vector<double> lo, hi, mean;
  std::vector<uint8_t> available;
  EnvelopeTransform transform = EnvelopeTransform::Identity;
};

/// Draws replicate `index` (1-based) of the null model. Deterministic in
/// (nm.seed, index) regardless of evaluation order.
Pattern simulate_null(const Pattern& p, const NullModel& nm,
                      const IntensityModel& m, int index);

/// Reassigns the (aux, curve) pairs by an explicit permutation; perm[i] is
/// the point index whose marks the i-th location receives.
Pattern apply_mark_permutation(const Pattern& p,
                               const std::vector<std::size_t>& perm);

/// Runs the query on the data and nm.n_sim null replicates (intensity
/// refitted per replicate from intensity_spec) and takes pointwise min/max
/// of the transformed replicate curves.
EnvelopeResult envelope(const Pattern& p, const KQuery& q,
                        const std::string& intensity_spec,
                        const NullModel& nm, EnvelopeTransform transform,
                        int n_threads = 0);

}  // namespace fmpp

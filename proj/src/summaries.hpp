#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "intensity.hpp"
#include "testfuncs.hpp"

namespace fmpp {

enum class Normalization { Raw, Hamilton, GroundNormalized };

const char* normalization_name(Normalization n);
Normalization parse_normalization(const std::string& name);

/// Configuration of a t-weighted marked K estimate of order n in {2,3}:
/// conditioning mark set, neighbour mark sets and structuring-element
/// templates (scaled by the shared r grid), edge correction, normalization.
struct KQuery {
  int order = 2;
  TestFunction test_fn = TestFunction::one();
  MarkSet cond_set;                   // D x E
  std::vector<MarkSet> neighbor_sets; // D_i x E_i, order-1 entries
  std::vector<StructElem> elems;      // templates, order-1 entries
  std::vector<double> r_grid;
  EdgeCorrection correction = EdgeCorrection::Translational;
  Normalization norm = Normalization::Hamilton;
  /// Treat the pattern as unmarked: intensities and nu-hat terms use the
  /// ground intensity only. Set by ground_k and the ground-normalisation
  /// divisor so the denominator is a pure ground-process K.
  bool ground_intensity_only = false;

  /// Defaults: full mark sets and ball templates for every neighbour slot.
  static KQuery make(int order);
  std::string echo() const;
};

struct KEstimate {
  std::vector<double> r;
  std::vector<double> value;       // NaN where unavailable
  std::vector<uint8_t> available;
  std::vector<long long> count;    // contributing ordered tuples per r
  std::vector<double> normalizer;  // divisor applied to the tuple sum
  double nu_product = 1;           // Hamilton nu-hat terms used
  bool empty_conditioning = false;
  long long floored_rho_tuples = 0;
  std::string query_echo;
};

/// Estimator of the t-weighted marked reduced moment
/// measure over the r grid. Tuples are summed in id order (block-wise
/// deterministic parallel reduction). Minus-sampling entries whose erosion
/// degenerates are reported unavailable, not zero.
KEstimate estimate_k(const Pattern& p, const KQuery& q,
                     const IntensityModel& m, int n_threads = 0);

/// Ratio-unbiased estimate of the mark-set reference mass nu_M(D x E):
/// sum of 1/rho-hat over points in the set divided by the same sum over all
/// points with the ground intensity.
double hamilton_nu(const Pattern& p, const MarkSet& ms,
                   const IntensityModel& m);

/// Ground-process K function: order 2, t = 1, full mark sets, Hamilton
/// window-mass normalization.
KEstimate ground_k(const Pattern& p, std::vector<double> r_grid,
                   EdgeCorrection correction, const IntensityModel& m,
                   int n_threads = 0);

struct MinContrastResult {
  std::vector<double> theta;
  double contrast = 0;
};

/// Minimum-contrast fit of a parametric curve theta -> K(r; theta) against
/// an estimate: minimizes the integral of |K^q - Khat^q|^p over
/// [r_min, r_max] via golden section (1-D) or Nelder-Mead.
MinContrastResult minimum_contrast_fit(
    const KEstimate& observed,
    const std::function<double(double r, std::span<const double> theta)>&
        model,
    std::span<const double> lo, std::span<const double> hi, double p = 2,
    double q = 0.25, double r_min = 0,
    double r_max = std::numeric_limits<double>::infinity());

}  // namespace fmpp
